"""Tower representations of the orbit-breaking algebra and its RSH structure.

For a point x in the closure of Y_k and a chart tuple U of length r_k, the
representation is evaluated in the frame basis of U:

    pi_k(f)(x)   = diag(f(x), f(alpha x), ..., f(alpha^{r_k - 1} x))
    tau_k(xi)(x) = sum_j xi~(alpha^j x) E_{j+1, j}

where xi~(alpha^j x) is the coefficient of xi in the single chart U_j.
Words in these generators are evaluated by matrix algebra.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bundle import ChartTuple
from .dynsys import Region, sample
from .endo import MatrixField, band_offset_mass
from .errors import (
    BoundaryAmbiguous,
    InhomogeneousWord,
    PreconditionError,
    StructureMismatch,
    VanishingPreconditionViolated,
)
from .expr import Expr, Function, PositivePart, Prod, Root, Shift, trig_polynomial
from .model import Model
from .sections import (
    Section,
    eval_section,
    function_section,
    generator_section,
    inner_product,
    left_action,
    orbit_breaking_project,
)
from .towers import boundary_itinerary

__all__ = [
    "Adjoint",
    "Fn",
    "Gen",
    "Product",
    "RSHDecomposition",
    "Scaled",
    "Stage",
    "Total",
    "Word",
    "assemble_rsh",
    "boundary_decomposition_check",
    "covariance_suite",
    "evaluate_word",
    "function_corpus",
    "generator_corpus",
    "gauge_check",
    "injectivity_witness",
    "lift_round_trip",
    "lift_section",
    "pi_eval",
    "random_word",
    "tau_eval",
    "word_field",
]


class Word:
    """Formal expression in the generators Fn (degree 0) and Gen (degree 1)."""

    degree: int | None

    def __add__(self, other: "Word") -> "Word":
        return Total((self, other))

    def __mul__(self, other):
        if isinstance(other, Word):
            return Product((self, other))
        return Scaled(complex(other), self)

    def __rmul__(self, other):
        return Scaled(complex(other), self)

    def __neg__(self):
        return Scaled(-1 + 0j, self)

    @property
    def H(self) -> "Word":
        return Adjoint(self)

    def atoms(self):
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class Fn(Word):
    section: Section

    def __post_init__(self):
        if self.section.level != 0:
            raise PreconditionError("Fn atoms take level-0 sections")

    degree = 0

    def atoms(self):
        yield self


@dataclass(frozen=True, eq=False)
class Gen(Word):
    section: Section

    def __post_init__(self):
        if self.section.level != 1:
            raise PreconditionError("Gen atoms take level-1 sections")

    degree = 1

    def atoms(self):
        yield self


@dataclass(frozen=True, eq=False)
class Total(Word):
    terms: tuple

    @property
    def degree(self):
        degrees = {t.degree for t in self.terms}
        return degrees.pop() if len(degrees) == 1 else None

    def atoms(self):
        for t in self.terms:
            yield from t.atoms()


@dataclass(frozen=True, eq=False)
class Product(Word):
    factors: tuple

    @property
    def degree(self):
        degrees = [f.degree for f in self.factors]
        return None if None in degrees else sum(degrees)

    def atoms(self):
        for f in self.factors:
            yield from f.atoms()


@dataclass(frozen=True, eq=False)
class Adjoint(Word):
    inner: Word

    @property
    def degree(self):
        d = self.inner.degree
        return None if d is None else -d

    def atoms(self):
        yield from self.inner.atoms()


@dataclass(frozen=True, eq=False)
class Scaled(Word):
    scalar: complex
    inner: Word

    @property
    def degree(self):
        return self.inner.degree

    def atoms(self):
        yield from self.inner.atoms()


def _check_point(model: Model, x: int, k: int, U: ChartTuple):
    model.require_stage_point(x, k)
    if len(U) < model.r(k):
        raise PreconditionError(f"tuple shorter than r_{k} = {model.r(k)}")


def pi_eval(f: Section, x: int, k: int, U: ChartTuple, model: Model) -> np.ndarray:
    _check_point(model, x, k, U)
    system = model.system
    return np.diag([f.coef(system.apply(x, j)) for j in range(model.r(k))]).astype(complex)


def tau_eval(xi: Section, x: int, k: int, U: ChartTuple, model: Model) -> np.ndarray:
    _check_point(model, x, k, U)
    r = model.r(k)
    b = model.bundle
    M = np.zeros((r, r), dtype=complex)
    y = x
    for j in range(r - 1):
        if j:
            y = model.system.apply(y, 1)
        M[j + 1, j] = eval_section(xi, y, b.shifted(U, j, 1))
    return M


def evaluate_word(w: Word, x: int, k: int, U: ChartTuple, model: Model) -> np.ndarray:
    _check_point(model, x, k, U)
    return _evaluate(w, x, k, U, model)


def _evaluate(w: Word, x, k, U, model) -> np.ndarray:
    if isinstance(w, Fn):
        return pi_eval(w.section, x, k, U, model)
    if isinstance(w, Gen):
        return tau_eval(w.section, x, k, U, model)
    if isinstance(w, Total):
        out = _evaluate(w.terms[0], x, k, U, model)
        for t in w.terms[1:]:
            out = out + _evaluate(t, x, k, U, model)
        return out
    if isinstance(w, Product):
        out = _evaluate(w.factors[0], x, k, U, model)
        for f in w.factors[1:]:
            out = out @ _evaluate(f, x, k, U, model)
        return out
    if isinstance(w, Adjoint):
        return _evaluate(w.inner, x, k, U, model).conj().T
    if isinstance(w, Scaled):
        return w.scalar * _evaluate(w.inner, x, k, U, model)
    raise TypeError(f"not a word: {w!r}")


def word_field(model: Model, w: Word, k: int) -> MatrixField:
    level = model.towers.level(k)
    return MatrixField(
        model.bundle, level.r, level.base_closure, lambda x, U: evaluate_word(w, x, k, U, model), f"word@{k}"
    )


def _opnorm(M: np.ndarray) -> float:
    return float(np.linalg.norm(M, 2)) if M.size else 0.0


def inner_function(model: Model, xi: Section, eta: Section, side: str = "right") -> Section:
    """The level-0 section x -> <xi, eta>(x) (left side: <eta, xi> o alpha^{-1})."""
    return function_section(model.bundle, Function(lambda p: inner_product(xi, eta, p, side), f"<.,.>_{side}"))


def covariance_suite(model: Model, xi: Section, eta: Section, f: Section, samples: int = 1000, seed: int = 0) -> dict:
    """Worst deviations in the three tower-representation identities.

    c:       pi(<xi,eta>)          = tau(xi)^* tau(eta)
    d_left:  tau(f . xi)           = pi(f) tau(xi)
    d_right: tau(f . xi)           = tau(xi) pi(f o alpha)
    e:       pi(<eta,xi> o alpha^-1) = tau(xi) tau(eta)^*
    """
    system = model.system
    right = inner_function(model, xi, eta, "right")
    left = inner_function(model, xi, eta, "left")
    f_xi = left_action(f.coef, xi)
    f_alpha = function_section(model.bundle, f.coef.shift(system, 1))
    worst = {"c": 0.0, "d_left": 0.0, "d_right": 0.0, "e": 0.0}
    count = 0
    for k in range(1, model.K + 1):
        for x in model.stage_points(k, samples, seed + k):
            U = model.tuple_for(x, k)
            Tx = tau_eval(xi, x, k, U, model)
            Te = tau_eval(eta, x, k, U, model)
            Tfx = tau_eval(f_xi, x, k, U, model)
            worst["c"] = max(worst["c"], _opnorm(pi_eval(right, x, k, U, model) - Tx.conj().T @ Te))
            worst["d_left"] = max(worst["d_left"], _opnorm(Tfx - pi_eval(f, x, k, U, model) @ Tx))
            worst["d_right"] = max(worst["d_right"], _opnorm(Tfx - Tx @ pi_eval(f_alpha, x, k, U, model)))
            worst["e"] = max(worst["e"], _opnorm(pi_eval(left, x, k, U, model) - Tx @ Te.conj().T))
            count += 1
    worst["max"] = max(worst.values())
    worst["samples"] = count
    return worst


def gauge_check(w: Word, z: complex, x: int, k: int, U: ChartTuple, model: Model) -> float:
    """|| U_z M U_z^* - z^n M || for the degree-n word w."""
    n = w.degree
    if n is None:
        raise InhomogeneousWord("gauge check needs a homogeneous word")
    M = evaluate_word(w, x, k, U, model)
    Uz = np.diag([z**j for j in range(M.shape[0])])
    return _opnorm(Uz @ M @ Uz.conj().T - z**n * M)


def injectivity_witness(f: Section, model: Model, samples: int = 2000, seed: int = 0) -> dict:
    """Locate a tower entry that sees a nonzero value of f, if any."""
    system = model.system
    points = sample(system, system.full(), samples, seed)
    best = max(points, key=lambda p: abs(f.coef(p)))
    value = f.coef(best)
    if abs(value) <= model.eps_alg:
        return {"is_zero": True, "witness": None, "max_abs": abs(value)}
    k, i = model.towers.locate(best)
    y = system.apply(best, -i)
    entry = pi_eval(f, y, k, model.tuple_for(y, k), model)[i, i]
    return {"is_zero": False, "witness": (k, y, i), "value": entry, "max_abs": abs(value)}


@dataclass(frozen=True)
class BDPResult:
    block_residual: float
    offblock: float
    itinerary: object

    @property
    def residual(self) -> float:
        return max(self.block_residual, self.offblock)


def boundary_decomposition_check(w: Word, model: Model, k: int, x: int) -> BDPResult:
    """Compare pi_k(w)(x) with the block diagonal of earlier towers along the itinerary of x."""
    system = model.system
    b = model.bundle
    it = boundary_itinerary(system, model.towers, k, x)
    U = model.tuple_for(x, k)
    M = evaluate_word(w, x, k, U, model)
    mask = np.zeros(M.shape, dtype=bool)
    block = 0.0
    for t, start in zip(it.mu, it.partial_sums):
        size = model.r(t)
        y = system.apply(x, start)
        B = evaluate_word(w, y, t, b.shifted(U, start, size), model)
        block = max(block, _opnorm(M[start : start + size, start : start + size] - B))
        mask[start : start + size, start : start + size] = True
    off = float(np.abs(M[~mask]).max()) if (~mask).any() else 0.0
    return BDPResult(block, off, it)


def _vanishing_set(model: Model, k: int, m: int) -> Region:
    system = model.system
    zero = system.empty()
    for j in range(1, m + 1):
        zero = zero.union(system.region_map(model.Y, -j))
    r = model.r(k)
    for q in range(1, k):
        closure = model.towers.level(q).base_closure
        for i in range(min(model.r(q) - 1, r - 1 - m) + 1):
            zero = zero.union(system.region_map(closure, i))
    return zero


def _glued_section(model: Model, k: int, target: MatrixField, m: int) -> Function:
    """Reference coefficient of a level-m section G with G(alpha^i y) = target(y)[i+m, i].

    G is 0 on the mandated vanishing set and is extended across each gap of
    the glued closed set by linear interpolation between the gap endpoints.
    """
    system = model.system
    b = model.bundle
    r = model.r(k)
    base = model.towers.level(k).base_closure
    zero = _vanishing_set(model, k, m)
    anchors = [system.region_map(base, i) for i in range(r - m)]
    glued = zero
    for a in anchors:
        glued = glued.union(a)
    gaps = glued.complement()

    def on_set(z: int) -> complex | None:
        if zero.contains(z):
            return 0j
        for i, anchor in enumerate(anchors):
            if anchor.contains(z):
                y = system.apply(z, -i)
                U = b.select_tuple(y, r)
                entry = target(y, U)[i + m, i]
                return entry * b.frame(b.shifted(U, i, m), m, z)
        return None

    def value(z: int) -> complex:
        direct = on_set(z)
        if direct is not None:
            return direct
        if system.kind != "rotation":
            return 0j
        lo, hi = gaps.cells.locate(2 * z)
        n = system.modulus
        left = (lo - 1) // 2 % n
        right = hi // 2 % n
        span = (right - left) % n or n
        t = (z - left) % n
        return ((span - t) * on_set(left) + t * on_set(right)) / span

    return Function(value, f"G[k={k},m={m}]")


def lift_section(model: Model, k: int, target: MatrixField, m: int, samples: int = 64, seed: int = 0) -> Word:
    """A word whose k-th tower image is the banded target field on closure(Y_k)."""
    r = model.r(k)
    if target.size != r:
        raise StructureMismatch(f"target has size {target.size}, tower {k} has height {r}")
    if not 0 <= m < r:
        raise StructureMismatch(f"band {m} does not fit in a {r}x{r} field")
    b = model.bundle
    points = model.stage_points(k, samples, seed)
    mats = [target.at(x) for x in points]
    if max(float(np.abs(M).max()) for M in mats) <= model.eps_alg:
        return Fn(function_section(b, 0))
    off = max(band_offset_mass(M, m) for M in mats)
    if off > model.eps_alg:
        raise StructureMismatch(f"target has mass {off:.3g} off band {m}")
    if k > 1:
        for x in model.boundary_points(k):
            if float(np.abs(target.at(x)).max()) > model.eps_alg:
                raise VanishingPreconditionViolated("target does not vanish on closure(Y_k) minus Y_k")
    G = _glued_section(model, k, target, m)
    if m == 0:
        return Fn(function_section(b, G))
    return _factor_through_generators(model, G, m)


def _factor_through_generators(model: Model, G: Expr, m: int) -> Word:
    """Write psi^{-1}(G) as a sum of products of m orbit-breaking generators.

    With f_I = <psi(eta_I), G> for multi-indices I, G = sum_I psi(eta_I) f_I.
    Splitting f_I = sum_c c F_{I,c} into four non-negative parts and using
    eta_I f = (f o alpha^{-m})^{1/m} eta_{i_1} (x) ... (x) (f o alpha^{-1})^{1/m} eta_{i_m},
    each factor vanishes on alpha^{-1}(Y) whenever G vanishes on the union
    of alpha^{-1}(Y), ..., alpha^{-m}(Y).
    """
    system = model.system
    b = model.bundle
    etas = [generator_section(b, j) for j in range(len(b.charts))]
    terms = []
    for I in itertools.product(range(len(etas)), repeat=m):
        frame = Prod(tuple(Shift(etas[i].coef, system, m - p) if m - p else etas[i].coef for p, i in enumerate(I, 1)))
        f_I = Function(lambda z, frame=frame: frame(z).conjugate() * G(z), f"f_{I}")
        for c in (1, -1, 1j, -1j):
            F = PositivePart(f_I, complex(c).conjugate())
            factors = []
            for p, i in enumerate(I, 1):
                root = Root(F.shift(system, p - m), m)
                factors.append(Gen(Section(b, 1, etas[i].coef * root, f"lift_{I}_{p}")))
            terms.append(Scaled(complex(c), Product(tuple(factors))))
    return Total(tuple(terms))


def lift_round_trip(model: Model, k: int, target: MatrixField, word: Word, samples: int = 64, seed: int = 0) -> dict:
    """Reproduction error on closure(Y_k) and leakage into earlier towers."""
    error = 0.0
    for x in model.stage_points(k, samples, seed):
        U = model.tuple_for(x, k)
        error = max(error, _opnorm(evaluate_word(word, x, k, U, model) - target(x, U)))
    leak = 0.0
    for q in range(1, k):
        for x in model.stage_points(q, samples, seed + q):
            leak = max(leak, _opnorm(evaluate_word(word, x, q, model.tuple_for(x, q), model)))
    return {"reproduction": error, "earlier_stages": leak}


@dataclass(frozen=True)
class Stage:
    k: int
    size: int
    base: Region
    glue_boundary: Region
    boundary_points: tuple[int, ...]
    pullback_residual: float
    unresolved: int = 0


@dataclass(frozen=True)
class RSHDecomposition:
    stages: tuple[Stage, ...]
    words_checked: int
    base_dimension: int

    @property
    def length(self) -> int:
        return len(self.stages)

    @property
    def matrix_sizes(self) -> tuple[int, ...]:
        return tuple(s.size for s in self.stages)

    @property
    def max_pullback_residual(self) -> float:
        return max((s.pullback_residual for s in self.stages), default=0.0)


def assemble_rsh(model: Model, words: Sequence[Word], samples: int = 0, seed: int = 0) -> RSHDecomposition:
    """Stage table with the gluing map checked on every boundary point of every stage."""
    stages = []
    for k in range(1, model.K + 1):
        level = model.towers.level(k)
        points = model.boundary_points(k)
        residual, unresolved = 0.0, 0
        for x in points:
            try:
                for w in words:
                    residual = max(residual, boundary_decomposition_check(w, model, k, x).residual)
            except BoundaryAmbiguous:
                unresolved += 1
        stages.append(Stage(k, level.r, level.base_closure, level.glue_boundary, tuple(points), residual, unresolved))
    dimension = 1 if model.system.kind == "rotation" else 0
    return RSHDecomposition(tuple(stages), len(words), dimension)


# random words -------------------------------------------------------------


def function_corpus(model: Model, rng: random.Random, count: int = 4) -> list[Section]:
    """Random low-frequency trigonometric polynomials as level-0 sections."""
    out = []
    for _ in range(count):
        coefficients = {f: complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for f in range(-2, 3)}
        out.append(function_section(model.bundle, trig_polynomial(model.system, coefficients)))
    return out


def generator_corpus(model: Model, rng: random.Random, count: int = 4) -> list[Section]:
    """Orbit-breaking generators: projected chart generators times random functions."""
    b = model.bundle
    etas = [generator_section(b, j) for j in range(len(b.charts))]
    out = [orbit_breaking_project(eta, model.Y, model.width) for eta in etas]
    for f in function_corpus(model, rng, count):
        eta = etas[rng.randrange(len(etas))]
        out.append(orbit_breaking_project(eta.times(f.coef), model.Y, model.width))
    return out


def random_word(rng: random.Random, functions: Sequence[Section], generators: Sequence[Section], max_factors: int = 4) -> Word:
    """Random product of atoms and adjoints, occasionally summed with a same-degree partner."""

    def monomial(degree: int | None = None) -> Word:
        for _ in range(64):
            factors = []
            for _ in range(rng.randint(1, max_factors)):
                roll = rng.random()
                if roll < 0.35:
                    factors.append(Fn(rng.choice(functions)))
                elif roll < 0.75:
                    factors.append(Gen(rng.choice(generators)))
                else:
                    factors.append(Gen(rng.choice(generators)).H)
            w = factors[0] if len(factors) == 1 else Product(tuple(factors))
            if degree is None or w.degree == degree:
                return w
        return Fn(rng.choice(functions)) if degree == 0 else w

    w = monomial()
    if rng.random() < 0.4:
        w = Total((w, Scaled(complex(rng.uniform(-1, 1), rng.uniform(-1, 1)), monomial(w.degree))))
    return w
