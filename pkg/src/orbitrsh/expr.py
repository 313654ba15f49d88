"""Closed-form coefficient functions evaluated at exact system points.

Every node is an immutable callable ``expr(p) -> complex``.  Composition
with the dynamics is exact: :class:`Shift` moves the integer point before
evaluation, so no rounding enters until a coordinate is turned into a float.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable

TWO_PI_I = 2j * math.pi


def smoothstep(t: float) -> float:
    """C^1 ramp 3t^2 - 2t^3 clamped to [0, 1]."""
    if t <= 0.0:
        return 0.0
    if t >= 1.0:
        return 1.0
    return t * t * (3.0 - 2.0 * t)


class Expr:
    def __call__(self, p: int) -> complex:
        raise NotImplementedError

    def __add__(self, other):
        return Sum((self, as_expr(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return Sum((self, Prod((Const(-1), as_expr(other)))))

    def __mul__(self, other):
        return Prod((self, as_expr(other)))

    __rmul__ = __mul__

    def __neg__(self):
        return Prod((Const(-1), self))

    def conj(self) -> "Expr":
        return Conj(self)

    def shift(self, system, n: int) -> "Expr":
        return self if n == 0 else Shift(self, system, n)


def as_expr(value) -> Expr:
    return value if isinstance(value, Expr) else Const(complex(value))


@dataclass(frozen=True)
class Const(Expr):
    value: complex

    def __call__(self, p):
        return self.value


ZERO = Const(0j)
ONE = Const(1 + 0j)


@dataclass(frozen=True)
class Coordinate(Expr):
    """The point coordinate in [0, 1)."""

    system: Any

    def __call__(self, p):
        return complex(self.system.coordinate(p))


@dataclass(frozen=True)
class Phase(Expr):
    """exp(2 pi i (offset + frequency * x)); exact in the grid for the circle."""

    system: Any
    frequency: int
    offset: float = 0.0

    def __call__(self, p):
        system = self.system
        if system.kind == "rotation":
            turns = (self.frequency * p) % system.modulus / system.modulus
        else:
            turns = self.frequency * system.coordinate(p)
        return cmath.exp(TWO_PI_I * (self.offset + turns))


@dataclass(frozen=True)
class Sum(Expr):
    terms: tuple

    def __call__(self, p):
        return sum((t(p) for t in self.terms), 0j)


@dataclass(frozen=True)
class Prod(Expr):
    factors: tuple

    def __call__(self, p):
        out = 1 + 0j
        for f in self.factors:
            out *= f(p)
            if out == 0:
                return 0j
        return out


@dataclass(frozen=True)
class Conj(Expr):
    inner: Expr

    def __call__(self, p):
        return self.inner(p).conjugate()


@dataclass(frozen=True)
class Shift(Expr):
    """inner o alpha^n."""

    inner: Expr
    system: Any
    n: int

    def __call__(self, p):
        return self.inner(self.system.apply(p, self.n))


@dataclass(frozen=True)
class PositivePart(Expr):
    """max(Re(rotation * inner), 0)."""

    inner: Expr
    rotation: complex = 1 + 0j

    def __call__(self, p):
        return complex(max((self.rotation * self.inner(p)).real, 0.0))


@dataclass(frozen=True)
class Root(Expr):
    """Real non-negative m-th root of a non-negative real expression."""

    inner: Expr
    m: int

    def __call__(self, p):
        value = self.inner(p).real
        if value <= 0.0:
            return 0j
        return complex(value ** (1.0 / self.m))


@dataclass(frozen=True)
class Cutoff(Expr):
    """0 on the region, smoothstep in the distance, 1 at distance >= width."""

    region: Any
    width: float

    def __call__(self, p):
        return complex(smoothstep(float(self.region.distance(p)) / self.width))


@dataclass(frozen=True)
class Indicator(Expr):
    """1 on the region and 0 off it; continuous only for clopen regions."""

    region: Any

    def __call__(self, p):
        return 1 + 0j if self.region.contains(p) else 0j


@dataclass(frozen=True, eq=False)
class Function(Expr):
    """Wrap an arbitrary point function, memoizing its values."""

    fn: Callable[[int], complex]
    label: str = "function"
    cache_size: int = 65536

    def __post_init__(self):
        object.__setattr__(self, "_cached", lru_cache(maxsize=self.cache_size)(self.fn))

    def __call__(self, p):
        return complex(self._cached(p))


def trig_polynomial(system, coefficients: dict[int, complex]) -> Expr:
    """sum_k c_k exp(2 pi i k x)."""
    return Sum(tuple(Const(complex(c)) * Phase(system, int(k)) for k, c in sorted(coefficients.items())))
