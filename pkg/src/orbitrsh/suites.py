"""Check suites shared by the command line and the acceptance tests.

Each suite returns a plain dict of residuals with a ``pass`` flag decided
against the thresholds in ``THRESHOLDS``.
"""

from __future__ import annotations

import cmath
import math
import random
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .bundle import cocycle_check
from .dynsys import sample
from .endo import banded_field, chart_change_report
from .expr import Cutoff, trig_polynomial
from .model import Model
from .rep import (
    Fn,
    Gen,
    Product,
    Word,
    assemble_rsh,
    boundary_decomposition_check,
    covariance_suite,
    evaluate_word,
    function_corpus,
    gauge_check,
    generator_corpus,
    lift_round_trip,
    lift_section,
    random_word,
    word_field,
)
from .sections import (
    ElementaryTensor,
    Section,
    constant_section,
    eval_section,
    generator_section,
    inner_product,
    orbit_breaking_project,
    phase_section,
    psi,
    psi_eval,
    tensor_inner_product,
    validate_section,
)
from .towers import first_return_time, validate_towers

THRESHOLDS = {
    "covering": Fraction(1, 2**60),
    "cocycle": 1e-12,
    "partition": 1e-12,
    "algebraic": 1e-9,
}


def parallel_map(fn: Callable, items: Iterable, jobs: int = 1) -> list:
    """Order-preserving map; ``jobs > 1`` evaluates items on a thread pool."""
    items = list(items)
    if jobs <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def tower_suite(model: Model, samples: int = 200, seed: int = 0, jobs: int = 1) -> dict:
    system = model.system
    towers = model.towers
    report = validate_towers(system, towers)
    points = sample(system, model.Y, samples, seed) + model.Y.boundary_points()

    def mismatch(y):
        return int(first_return_time(system, model.Y, y) != towers.r(towers.tower_of(y)))

    mismatches = sum(parallel_map(mismatch, points, jobs))
    ok = (
        towers.covering_residual < THRESHOLDS["covering"]
        and report["max_residual"] <= system.eps_cmp
        and mismatches == 0
    )
    return {
        "K": towers.K,
        "heights": list(towers.heights),
        "covering_residual": towers.covering_residual,
        "validation": report,
        "return_time_oracle": {"points": len(points), "mismatches": mismatches},
        "pass": ok,
    }


def section_corpus(model: Model, rng: random.Random) -> list[Section]:
    """Level-1 sections of several kinds: generators, twisted generators, phases, constants."""
    b = model.bundle
    out = [generator_section(b, j) for j in range(len(b.charts))]
    for f in function_corpus(model, rng, 2):
        out.append(generator_section(b, rng.randrange(len(b.charts))).times(f.coef))
    out.append(phase_section(b, 1, amplitude=0.8))
    out.append(constant_section(b, 0.6 - 0.3j))
    return out


def orbit_breaking_pairs(model: Model, seed: int = 0, count: int = 6) -> list[tuple[Section, Section, Section]]:
    """Pairs (xi, eta) of projected sections with a test function f."""
    rng = random.Random(seed)
    sections = [orbit_breaking_project(s, model.Y, model.width) for s in section_corpus(model, rng)]
    functions = function_corpus(model, rng, count)
    pairs = []
    for i in range(count):
        xi = sections[i % len(sections)]
        eta = sections[(i * 3 + 1) % len(sections)]
        pairs.append((xi, eta, functions[i]))
    return pairs


def bundle_suite(model: Model, samples: int = 500, seed: int = 0, jobs: int = 1) -> dict:
    b = model.bundle
    system = model.system
    cocycle = cocycle_check(b, samples_per_overlap=max(16, samples // 4), seed=seed)
    pts = sample(system, system.full(), 1000, seed + 1)
    partition = max(abs(sum(b.partition(p)) - 1.0) for p in pts)
    rng = random.Random(seed + 2)
    covariance = max(validate_section(s, 64, seed + 3) for s in section_corpus(model, rng))
    rng = random.Random(seed + 4)
    functions = function_corpus(model, rng, 3)
    generators = generator_corpus(model, rng, 3)
    words = [random_word(rng, functions, generators) for _ in range(4)]
    law = diag = 0.0
    used = 0
    k_order = sorted(range(1, model.K + 1), key=lambda k: -model.r(k))
    for k in k_order:
        pts_k = model.stage_points(k, samples, seed + 10 + k)
        for w in words:
            rep = chart_change_report(word_field(model, w, k), pts_k)
            law, diag = max(law, rep["chart_change"]), max(diag, rep["diagonal_invariance"])
        used += chart_change_report(word_field(model, words[0], k), pts_k)["overlap_points"]
    eps = THRESHOLDS["algebraic"]
    ok = (
        cocycle["max_violation"] < THRESHOLDS["cocycle"]
        and partition < THRESHOLDS["partition"]
        and covariance < eps
        and law < eps
        and diag < eps
    )
    return {
        "cocycle": cocycle["max_violation"],
        "partition_of_unity": partition,
        "section_chart_covariance": covariance,
        "chart_change_law": law,
        "diagonal_invariance": diag,
        "overlap_samples": used,
        "pass": ok,
    }


def covariance_corpus_suite(model: Model, samples: int = 1000, seed: int = 0, pairs: int = 6, jobs: int = 1) -> dict:
    corpus = orbit_breaking_pairs(model, seed, pairs)
    results = parallel_map(lambda t: covariance_suite(model, *t, samples=samples, seed=seed), corpus, jobs)
    worst = {key: max(r[key] for r in results) for key in ("c", "d_left", "d_right", "e")}
    worst["max"] = max(worst.values())
    return {
        "pairs": len(corpus),
        "samples_per_pair": results[0]["samples"] if results else 0,
        "deviation": worst,
        "pass": worst["max"] < THRESHOLDS["algebraic"],
    }


def graded_words(model: Model, seed: int = 0) -> dict[int, list[Word]]:
    """Homogeneous words of each degree from -2 to 3, plus high-degree words."""
    rng = random.Random(seed)
    fs = function_corpus(model, rng, 3)
    gs = generator_corpus(model, rng, 4)
    F = [Fn(f) for f in fs]
    G = [Gen(gs[i % len(gs)]) for i in range(5)]
    words = {
        -2: [G[0].H * G[1].H, F[0] * G[2].H * G[3].H * F[1]],
        -1: [G[1].H, G[0].H * F[2], G[2].H * G[3] * G[1].H],
        0: [F[0], G[0].H * G[1], G[2] * G[3].H + F[1]],
        1: [G[0], F[1] * G[2], G[1] * G[0].H * G[3]],
        2: [G[0] * G[1], G[2] * F[0] * G[3]],
        3: [G[0] * G[1] * G[2], G[3] * G[4] * F[2] * G[0]],
    }
    return words


def nilpotent_words(model: Model, seed: int = 0) -> list[tuple[int, Word]]:
    rng = random.Random(seed)
    gs = [Gen(g) for g in generator_corpus(model, rng, 2)]
    fs = [Fn(f) for f in function_corpus(model, rng, 2)]
    out = []
    top = max(model.towers.heights)
    for n in range(1, top + 2):
        chain = [gs[i % len(gs)] for i in range(n)]
        chain.insert(n // 2, fs[0])
        w = Product(tuple(chain))
        out.append((n, w))
        out.append((-n, w.H))
    return out


def gauge_suite(model: Model, samples: int = 16, seed: int = 0, jobs: int = 1) -> dict:
    roots = [cmath.exp(2j * math.pi * j / 16) for j in range(16)]
    words = graded_words(model, seed)
    worst = 0.0
    checked = 0
    nonzero = 0
    high = 0
    for k in range(1, model.K + 1):
        points = model.stage_points(k, samples, seed + k)

        def at_point(x, k=k):
            U = model.tuple_for(x, k)
            dev = 0.0
            for degree_words in words.values():
                for w in degree_words:
                    for z in roots:
                        dev = max(dev, gauge_check(w, z, x, k, U, model))
            zeros = 0
            for n, w in nilpotent_words(model, seed):
                if abs(n) >= model.r(k):
                    zeros += int(np.any(evaluate_word(w, x, k, U, model) != 0))
            return dev, zeros

        for dev, zeros in parallel_map(at_point, points, jobs):
            worst = max(worst, dev)
            nonzero += zeros
            checked += 1
        high += sum(1 for n, _ in nilpotent_words(model, seed) if abs(n) >= model.r(k)) * len(points)
    return {
        "roots": len(roots),
        "degrees": sorted(words),
        "points": checked,
        "deviation": worst,
        "high_degree_evaluations": high,
        "high_degree_nonzero": nonzero,
        "pass": worst < THRESHOLDS["algebraic"] and nonzero == 0,
    }


def random_tensor(model: Model, rng: random.Random, m: int) -> ElementaryTensor:
    sections = section_corpus(model, rng)
    factors = []
    for _ in range(m):
        s = sections[rng.randrange(len(sections))]
        f = function_corpus(model, rng, 1)[0]
        factors.append(s.times(f.coef))
    return ElementaryTensor(tuple(factors))


def psi_suite(model: Model, samples: int = 1000, seed: int = 0, lengths: Sequence[int] = (1, 2, 3), jobs: int = 1) -> dict:
    """<psi(s), psi(t)> against iterated contraction, and psi_eval against the psi section."""
    system = model.system
    b = model.bundle
    rng = random.Random(seed)
    out = {}
    for m in lengths:
        s, t = random_tensor(model, rng, m), random_tensor(model, rng, m)
        ps, pt = psi(s), psi(t)
        points = sample(system, system.full(), samples, seed + m)

        def residual(x):
            inner = abs(inner_product(ps, pt, x) - tensor_inner_product(s, t, x))
            U = b.select_tuple(x, m)
            coef = abs(psi_eval(s, x, U) - eval_section(ps, x, U))
            return max(inner, coef)

        out[m] = max(parallel_map(residual, points, jobs))
    worst = max(out.values())
    return {
        "lengths": list(lengths),
        "samples": samples,
        "deviation": {str(m): v for m, v in out.items()},
        "max": worst,
        "pass": worst < THRESHOLDS["algebraic"],
    }


def boundary_points_all(model: Model) -> list[tuple[int, int]]:
    return [(k, x) for k in range(2, model.K + 1) for x in model.boundary_points(k)]


def bdp_suite(model: Model, words: int = 50, seed: int = 0, jobs: int = 1) -> dict:
    rng = random.Random(seed)
    fs = function_corpus(model, rng, 4)
    gs = generator_corpus(model, rng, 4)
    corpus = [random_word(rng, fs, gs) for _ in range(words)]
    points = boundary_points_all(model)

    def check(item):
        k, x = item
        block = off = 0.0
        for w in corpus:
            res = boundary_decomposition_check(w, model, k, x)
            block, off = max(block, res.block_residual), max(off, res.offblock)
        return block, off, res.itinerary

    results = parallel_map(check, points, jobs)
    block = max((r[0] for r in results), default=0.0)
    off = max((r[1] for r in results), default=0.0)
    itineraries = [
        {"k": k, "x": x, "mu": list(r[2].mu), "partial_sums": list(r[2].partial_sums)}
        for (k, x), r in zip(points, results)
    ]
    return {
        "words": len(corpus),
        "boundary_points": len(points),
        "itineraries": itineraries,
        "block_residual": block,
        "offblock": off,
        "pass": block < THRESHOLDS["algebraic"] and off < THRESHOLDS["algebraic"],
    }


def random_target(model: Model, rng: random.Random, k: int, m: int):
    """Banded field on closure(Y_k) with random trigonometric profiles, vanishing on the glue boundary."""
    system = model.system
    level = model.towers.level(k)
    r = level.r
    glue = level.glue_boundary
    profiles = []
    for _ in range(r - m):
        coefficients = {f: complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for f in range(-2, 3)}
        profile = trig_polynomial(system, coefficients)
        if not glue.is_empty():
            profile = profile * Cutoff(glue, 0.05)
        profiles.append(profile)
    return banded_field(model.bundle, r, level.base_closure, m, profiles, f"target[k={k},m={m}]")


def lift_suite(model: Model, targets: int = 20, samples: int = 64, seed: int = 0, jobs: int = 1) -> dict:
    rng = random.Random(seed)
    jobs_list = []
    for i in range(targets):
        k = 1 + i % model.K
        m = rng.randrange(model.r(k))
        jobs_list.append((i, k, m, random_target(model, rng, k, m)))

    def run(item):
        i, k, m, target = item
        word = lift_section(model, k, target, m, samples=16, seed=seed + i)
        res = lift_round_trip(model, k, target, word, samples=samples, seed=seed + i)
        return {"k": k, "m": m, **res}

    rows = parallel_map(run, jobs_list, jobs)
    reproduction = max(r["reproduction"] for r in rows)
    leak = max(r["earlier_stages"] for r in rows)
    return {
        "targets": rows,
        "reproduction": reproduction,
        "earlier_stages": leak,
        "pass": reproduction < THRESHOLDS["algebraic"] and leak < THRESHOLDS["algebraic"],
    }


def rsh_suite(model: Model, words: int = 20, seed: int = 0) -> dict:
    rng = random.Random(seed)
    fs = function_corpus(model, rng, 3)
    gs = generator_corpus(model, rng, 3)
    corpus = [random_word(rng, fs, gs) for _ in range(words)]
    rsh = assemble_rsh(model, corpus, seed=seed)
    sizes = list(rsh.matrix_sizes)
    ok = (
        sizes == sorted(set(sizes))
        and sizes == list(model.towers.heights)
        and rsh.max_pullback_residual < THRESHOLDS["algebraic"]
        and all(s.unresolved == 0 for s in rsh.stages)
    )
    return {"decomposition": rsh, "pass": ok}
