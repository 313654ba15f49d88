"""Sections of tensor powers, the tensor-to-section map psi, and inner products.

A :class:`Section` of level ``n`` stores one closed-form coefficient against
the bundle's reference frame of ``V^(n)``; chart coefficients are recovered
by dividing by the chart frame.  The bimodule structure is

    (xi . f)(x) = xi(x) f(x),      (f . xi)(x) = xi(x) f(alpha^n x),

and an elementary tensor xi_1 (x) ... (x) xi_m maps to the level-m section

    psi(xi)(x) = xi_1(alpha^{m-1} x) (x) ... (x) xi_m(x).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .bundle import ChartTuple, LineBundle, tensor_transition
from .dynsys import Region, sample
from .errors import LevelMismatch, PointOutsideDomain, PreconditionError
from .expr import Const, Cutoff, Expr, Function, Indicator, Phase, Prod, Shift, as_expr

__all__ = [
    "ElementaryTensor",
    "Section",
    "constant_section",
    "cutoff_width",
    "eval_section",
    "function_section",
    "generator_section",
    "inner_product",
    "left_action",
    "orbit_breaking_cutoff",
    "orbit_breaking_project",
    "orbit_breaking_test",
    "phase_section",
    "psi",
    "psi_eval",
    "tensor_inner_product",
    "validate_section",
]


@dataclass(frozen=True)
class Section:
    """Continuous section of V^(level) given by its reference-frame coefficient."""

    bundle: LineBundle
    level: int
    coef: Expr
    label: str = ""

    def __post_init__(self):
        if self.level < 0:
            raise PreconditionError("section level must be non-negative")

    def _same(self, other: "Section"):
        if other.level != self.level:
            raise LevelMismatch(f"levels {self.level} and {other.level} differ")

    def __add__(self, other: "Section") -> "Section":
        self._same(other)
        return Section(self.bundle, self.level, self.coef + other.coef)

    def __sub__(self, other: "Section") -> "Section":
        self._same(other)
        return Section(self.bundle, self.level, self.coef - other.coef)

    def scale(self, c: complex) -> "Section":
        return Section(self.bundle, self.level, Const(complex(c)) * self.coef, self.label)

    def times(self, f: Expr) -> "Section":
        """Right action xi . f."""
        return Section(self.bundle, self.level, self.coef * as_expr(f), self.label)

    def global_value(self, p: int) -> complex:
        return self.coef(p)


@dataclass(frozen=True)
class ElementaryTensor:
    """xi_1 (x) ... (x) xi_m of level-1 sections, or a function when m = 0."""

    factors: tuple[Section, ...] = ()
    function: Section | None = None

    def __post_init__(self):
        if self.factors:
            if self.function is not None:
                raise PreconditionError("give either factors or a function")
            for xi in self.factors:
                if xi.level != 1:
                    raise LevelMismatch("tensor factors must be level-1 sections")
        elif self.function is None or self.function.level != 0:
            raise PreconditionError("an empty tensor needs a level-0 function")

    @property
    def length(self) -> int:
        return len(self.factors)

    @property
    def bundle(self) -> LineBundle:
        return (self.factors[0] if self.factors else self.function).bundle


def function_section(bundle: LineBundle, f) -> Section:
    """Level-0 section (a scalar function) from an expression or a constant."""
    return Section(bundle, 0, as_expr(f))


def constant_section(bundle: LineBundle, value: complex, level: int = 1) -> Section:
    """Section whose reference-frame coefficient is constant."""
    return Section(bundle, level, Const(complex(value)), label=f"const({value})")


def phase_section(bundle: LineBundle, frequency: int, level: int = 1, amplitude: complex = 1) -> Section:
    """Reference coefficient amplitude * exp(2 pi i frequency x)."""
    expr = Const(complex(amplitude)) * Phase(bundle.system, int(frequency))
    return Section(bundle, level, expr, label=f"phase({frequency})")


def generator_section(bundle: LineBundle, j: int) -> Section:
    """eta_j: chart-j coefficient gamma_j^{1/2}, zero outside chart j."""
    if not 0 <= j < len(bundle.charts):
        raise PreconditionError(f"no chart {j}")

    def coefficient(p: int) -> complex:
        weight = bundle.partition(p)[j]
        if weight == 0.0:
            return 0j
        return weight**0.5 * bundle.gauge(j, p)

    return Section(bundle, 1, Function(coefficient, f"eta_{j}"), label=f"eta_{j}")


def eval_section(s: Section, p: int, U: ChartTuple) -> complex:
    """Coefficient of s(p) against the frame v_U^{(level)}(p)."""
    b = s.bundle
    if len(U) < s.level:
        raise LevelMismatch("tuple shorter than the section level")
    if s.level == 0:
        return s.coef(p)
    head = b.shifted(U, 0, s.level)
    if not b.tuple_contains(head, p):
        raise PointOutsideDomain("point outside the tuple domain")
    return s.coef(p) * b.frame_inverse(head, s.level, p)


def psi(t: ElementaryTensor) -> Section:
    """The level-m section psi(t) as a reference-frame coefficient."""
    if t.length == 0:
        return t.function
    system = t.bundle.system
    m = t.length
    factors = tuple(Shift(xi.coef, system, m - i) if m - i else xi.coef for i, xi in enumerate(t.factors, 1))
    return Section(t.bundle, m, Prod(factors))


def psi_eval(t: ElementaryTensor, p: int, U: ChartTuple) -> complex:
    """prod_i (coef of xi_i at alpha^{m-i} p in chart U_{m-i})."""
    if t.length == 0:
        return t.function.coef(p)
    b = t.bundle
    m = t.length
    if len(U) < m:
        raise LevelMismatch("tuple shorter than the tensor length")
    out = 1 + 0j
    for i, xi in enumerate(t.factors, 1):
        shift = m - i
        q = b.system.apply(p, shift)
        out *= eval_section(xi, q, b.shifted(U, shift, 1))
    return out


def inner_product(s: Section, t: Section, p: int, side: str = "right") -> complex:
    """Right: sum over tuples of gamma_U conj(coef_U s) coef_U t.  Left: right(t, s) at alpha^{-n} p."""
    s._same(t)
    b = s.bundle
    if side == "left":
        return inner_product(t, s, b.system.apply(p, -s.level), "right")
    if side != "right":
        raise ValueError(f"unknown side {side!r}")
    if s.level == 0:
        return s.coef(p).conjugate() * t.coef(p)
    weights = []
    q = p
    for shift in range(s.level):
        if shift:
            q = b.system.apply(q, 1)
        weights.append(list(enumerate(b.partition(q))))
    total = 0j
    for combo in itertools.product(*weights):
        gamma = 1.0
        for _, w in combo:
            gamma *= w
        if gamma == 0.0:
            continue
        U = b.chart_tuple(tuple(j for j, _ in combo))
        total += gamma * eval_section(s, p, U).conjugate() * eval_section(t, p, U)
    return total


def tensor_inner_product(s: ElementaryTensor, t: ElementaryTensor, p: int) -> complex:
    """Iterated contraction <xi_m,eta_m>(x) <xi_{m-1},eta_{m-1}>(alpha x) ... <xi_1,eta_1>(alpha^{m-1} x)."""
    if s.length != t.length:
        raise LevelMismatch("tensors of different lengths")
    if s.length == 0:
        return s.function.coef(p).conjugate() * t.function.coef(p)
    system = s.bundle.system
    m = s.length
    out = 1 + 0j
    for i in range(m, 0, -1):
        q = system.apply(p, m - i)
        out *= inner_product(s.factors[i - 1], t.factors[i - 1], q)
    return out


def left_action(f: Expr, s: Section) -> Section:
    """f . s = s . (f o alpha^level)."""
    f = as_expr(f)
    return Section(s.bundle, s.level, s.coef * f.shift(s.bundle.system, s.level), s.label)


def validate_section(s: Section, samples: int = 200, seed: int = 0) -> float:
    """Worst chart-covariance residual |eval(V) - g_VU eval(U)| over sampled tuple overlaps."""
    b = s.bundle
    worst = 0.0
    if s.level == 0:
        return worst
    for p in sample(b.system, b.system.full(), samples, seed):
        tuples = b.tuples_at(p, s.level)
        values = [(U, eval_section(s, p, U)) for U in tuples]
        U0, c0 = values[0]
        for V, cv in values[1:]:
            worst = max(worst, abs(cv - tensor_transition(b, s.level, V, U0, p) * c0))
    return worst


def cutoff_width(Y: Region) -> float:
    return min(0.05, float(Y.measure()) / 4)


def orbit_breaking_cutoff(system, Y: Region, width: float | None = None) -> Expr:
    """Continuous f with f = 0 on Y and f = 1 at distance >= width from Y."""
    if system.kind == "odometer":
        return Indicator(Y.complement())
    return Cutoff(Y, cutoff_width(Y) if width is None else width)


def orbit_breaking_project(s: Section, Y: Region, width: float | None = None) -> Section:
    """f . s with the cutoff f vanishing on Y; the result vanishes on alpha^{-1}(Y)."""
    if s.level != 1:
        raise LevelMismatch("orbit-breaking projection acts on level-1 sections")
    if Y.is_empty():
        raise PreconditionError("Y must be non-empty")
    f = orbit_breaking_cutoff(s.bundle.system, Y, width)
    label = f"P({s.label})" if s.label else "projected"
    return Section(s.bundle, 1, s.coef * Shift(f, s.bundle.system, 1), label)


def orbit_breaking_test(t: ElementaryTensor, Y: Region, samples: int = 64, seed: int = 0, eps: float = 1e-9) -> dict:
    """Sampled check that psi(t) vanishes on alpha^{-1}(Y) u ... u alpha^{-m}(Y)."""
    if Y.is_empty():
        raise PreconditionError("Y must be non-empty")
    b = t.bundle
    system = b.system
    m = t.length
    points = list(sample(system, Y, samples, seed)) + Y.boundary_points()
    worst = 0.0
    for j in range(1, m + 1):
        for y in points:
            x = system.apply(y, -j)
            U = b.select_tuple(x, max(m, 1), margin=0)
            worst = max(worst, abs(psi_eval(t, x, U)))
    return {"member": worst < eps, "max_residual": worst, "samples": len(points) * m}
