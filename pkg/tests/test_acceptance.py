"""The ten acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line; the lines are printed by each test
and again in the pytest terminal summary.  Run standalone with
``python3 tests/test_acceptance.py``.
"""

from fractions import Fraction
from pathlib import Path

import mpmath
import pytest

from conftest import ACCEPTANCE_LINES
from oracles import GOLDEN_HEIGHTS, golden_towers_by_intervals
from orbitrsh import suites
from orbitrsh.bundle import cocycle_check
from orbitrsh.config import load_config
from orbitrsh.dynsys import sample
from orbitrsh.towers import first_return_time, validate_towers

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
ALG = 1e-9


def model_for(name):
    return load_config(CONFIGS / f"{name}.json").build_model()


@pytest.fixture(scope="module")
def golden():
    return model_for("golden_degree1")


@pytest.fixture(scope="module")
def trivial():
    return model_for("golden_trivial")


@pytest.fixture(scope="module")
def odometer():
    return model_for("odometer_23")


def record(n: int, title: str, ok: bool, detail: str):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n:2d}  {title}: {detail}"
    ACCEPTANCE_LINES[n] = line
    print(line)
    assert ok, line


def closures_match_oracle(model) -> bool:
    system = model.system
    towers = model.towers
    for lo, hi, r in golden_towers_by_intervals():
        (arc,) = towers.level(towers.heights.index(r) + 1).base_closure.arcs()
        for tick, value in ((arc.a, lo), (arc.b, hi)):
            if abs(Fraction(tick, system.modulus) - Fraction(mpmath.nstr(value, 60))) >= Fraction(1, 2**100):
                return False
    return True


def test_criterion_01_tower_covering(golden):
    towers = golden.towers
    ok = (
        towers.K == 3
        and towers.heights == GOLDEN_HEIGHTS
        and towers.covering_residual < Fraction(1, 2**60)
        and closures_match_oracle(golden)
    )
    record(1, "golden tower covering", ok, f"K={towers.K} r={towers.heights} residual={float(towers.covering_residual):.3g}")


def test_criterion_02_odometer_direct_sum(odometer):
    towers = odometer.towers
    report = validate_towers(odometer.system, towers)
    ok = (
        towers.K == 1
        and towers.heights == (2,)
        and all(level.glue_boundary.is_empty() for level in towers.levels)
        and towers.covering_residual == 0
        and report["max_residual"] == 0
    )
    record(2, "odometer (2,3), Y={d0=0}", ok, f"K={towers.K} r={towers.heights} residual={report['max_residual']}")


def test_criterion_03_return_time_oracle():
    names = ("golden_degree1", "golden_trivial", "odometer_23", "cf_rotation")
    mismatches, checked = 0, 0
    for name in names:
        model = model_for(name)
        towers = model.towers
        for y in sample(model.system, model.Y, 200, 1000 + len(name)):
            checked += 1
            mismatches += first_return_time(model.system, model.Y, y) != towers.r(towers.tower_of(y))
    record(3, "brute-force return times", mismatches == 0, f"{checked} points over {len(names)} configs, {mismatches} mismatches")


def test_criterion_04_cocycle_and_charts(golden):
    cocycle = cocycle_check(golden.bundle)["max_violation"]
    result = suites.bundle_suite(golden, samples=200, seed=4)
    ok = (
        cocycle < 1e-12
        and result["overlap_samples"] >= 500
        and result["chart_change_law"] < ALG
        and result["diagonal_invariance"] < ALG
    )
    record(
        4,
        "cocycle and chart consistency",
        ok,
        f"cocycle={cocycle:.2g} law={result['chart_change_law']:.2g} diag={result['diagonal_invariance']:.2g} "
        f"over {result['overlap_samples']} overlap samples",
    )


def test_criterion_05_covariance(golden, trivial):
    runs = [suites.covariance_corpus_suite(m, samples=1000, seed=5, pairs=6) for m in (golden, trivial)]
    worst = max(r["deviation"]["max"] for r in runs)
    pairs = sum(r["pairs"] for r in runs)
    ok = worst < ALG and all(r["pairs"] >= 6 and r["samples_per_pair"] >= 1000 * 3 for r in runs)
    record(5, "covariance (c),(d),(e)", ok, f"max deviation {worst:.2g}, {pairs} pairs, degrees 1 and 0")


def test_criterion_06_gauge(golden, odometer):
    runs = [suites.gauge_suite(m, samples=16, seed=6) for m in (golden, odometer)]
    worst = max(r["deviation"] for r in runs)
    nonzero = sum(r["high_degree_nonzero"] for r in runs)
    ok = worst < ALG and nonzero == 0 and all(r["roots"] == 16 and r["degrees"] == [-2, -1, 0, 1, 2, 3] for r in runs)
    evaluations = sum(r["high_degree_evaluations"] for r in runs)
    record(6, "gauge equivariance", ok, f"max deviation {worst:.2g}; {evaluations} high-degree words, {nonzero} nonzero")


def test_criterion_07_psi_inner_product(golden):
    result = suites.psi_suite(golden, samples=1000, seed=7, lengths=(1, 2, 3))
    record(7, "psi inner products", result["max"] < ALG, f"m=1,2,3 max deviation {result['max']:.2g} over 1000 samples")


def test_criterion_08_bdp(golden):
    result = suites.bdp_suite(golden, words=50, seed=8)
    system = golden.system
    one_minus_theta = system.modulus - system.theta_ticks
    seen = any(row["x"] == one_minus_theta and row["mu"] == [1, 2] for row in result["itineraries"])
    ok = seen and result["block_residual"] < ALG and result["offblock"] < ALG
    record(
        8,
        "boundary decomposition",
        ok,
        f"{result['words']} words at {result['boundary_points']} points, block={result['block_residual']:.2g} off={result['offblock']:.2g}",
    )


def test_criterion_09_lift(golden):
    result = suites.lift_suite(golden, targets=20, samples=48, seed=9)
    bands = {row["m"] for row in result["targets"]}
    ok = len(result["targets"]) == 20 and 0 in bands and any(m > 0 for m in bands) and result["pass"]
    record(
        9,
        "lift round trip",
        ok,
        f"20 targets, bands {sorted(bands)}, reproduction={result['reproduction']:.2g} earlier={result['earlier_stages']:.2g}",
    )


def test_criterion_10_rsh(golden, trivial):
    twisted = suites.rsh_suite(golden, words=20, seed=10)["decomposition"]
    plain = suites.rsh_suite(trivial, words=20, seed=10)["decomposition"]
    closures = [level.base_closure for level in golden.towers.levels]
    ok = (
        twisted.matrix_sizes == (1, 2, 3)
        and [s.base for s in twisted.stages] == closures
        and closures_match_oracle(golden)
        and twisted.max_pullback_residual < ALG
        and plain.matrix_sizes == twisted.matrix_sizes
        and [s.base for s in plain.stages] == closures
        and plain.max_pullback_residual < ALG
    )
    record(
        10,
        "RSH assembly",
        ok,
        f"sizes {twisted.matrix_sizes}, pullback {twisted.max_pullback_residual:.2g}; trivial sizes {plain.matrix_sizes}",
    )


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
