"""Minimal systems on the circle and on odometers, with exact region algebra.

Both systems are rotations of a finite cyclic group:

* the circle rotation stores points as integers modulo ``2**bits`` (a fixed
  point grid of spacing ``2**-bits``) and rotates by ``theta_ticks``;
* the odometer stores points by their first ``depth`` digits, read as a
  mixed-radix integer modulo ``M_depth``, and adds one with carry.

Arcs on the circle are stored in doubled coordinates so that endpoint
closure flags are represented exactly: the even integer ``2p`` is the grid
point ``p`` and the odd integer ``2p + 1`` is the open cell ``(p, p + 1)``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence, Union

from .errors import BudgetExceeded, DepthExhausted, EmptyRegion, PreconditionError
from .intervals import IntervalSet

__all__ = [
    "Arc",
    "ArcRegion",
    "CylinderRegion",
    "Membership",
    "Odometer",
    "Region",
    "Rotation",
    "System",
    "apply",
    "golden_theta",
    "membership",
    "region_boolean",
    "region_map",
    "sample",
    "to_fraction",
]

DEFAULT_BITS = 128
DEFAULT_MAX_RETURN = 10000
EPS_CMP = Fraction(1, 2**80)


def to_fraction(value) -> Fraction:
    """Exact rational from an int, Fraction, float, or a decimal/ratio string."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, float)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot read a real number from {value!r}")


def _round_div(num: int, den: int) -> int:
    return (2 * num + den) // (2 * den)


def golden_theta(bits: int = DEFAULT_BITS) -> int:
    """(sqrt(5) - 1) / 2 rounded to the grid of spacing 2**-bits."""
    extra = 64
    scale = 1 << (bits + extra)
    root5 = math.isqrt(5 * scale * scale)
    return _round_div(root5 - scale, 2 << extra)


def theta_from_continued_fraction(terms: Sequence[int], bits: int) -> int:
    value = Fraction(terms[-1])
    for a in reversed(terms[:-1]):
        value = a + 1 / value
    return _round_div(value.numerator << bits, value.denominator)


class Membership(Enum):
    IN = "In"
    OUT = "Out"
    AMBIGUOUS = "Ambiguous"


class Arc(NamedTuple):
    """An arc [a, b] in grid ticks; ``b`` may exceed the modulus for wrapping arcs."""

    a: int
    b: int
    left_closed: bool
    right_closed: bool


class Region:
    """Common interface of circle arc unions and odometer cylinder unions."""

    def intersect(self, other):
        raise NotImplementedError

    def union(self, other):
        raise NotImplementedError

    def difference(self, other):
        raise NotImplementedError

    def closure(self):
        raise NotImplementedError

    def interior(self):
        raise NotImplementedError

    def measure(self) -> Fraction:
        raise NotImplementedError

    def is_empty(self) -> bool:
        raise NotImplementedError

    def contains(self, p: int) -> bool:
        raise NotImplementedError

    def boundary_points(self) -> list[int]:
        raise NotImplementedError

    def __and__(self, other):
        return self.intersect(other)

    def __or__(self, other):
        return self.union(other)

    def __sub__(self, other):
        return self.difference(other)


class ArcRegion(Region):
    """Finite union of arcs of the circle with exact endpoint flags."""

    __slots__ = ("bits", "cells")

    def __init__(self, bits: int, cells: IntervalSet):
        if cells.modulus != 2 << bits:
            raise ValueError("cell set does not match the grid")
        self.bits = bits
        self.cells = cells

    @property
    def modulus(self) -> int:
        return 1 << self.bits

    @classmethod
    def empty(cls, bits: int) -> "ArcRegion":
        return cls(bits, IntervalSet(2 << bits))

    @classmethod
    def full(cls, bits: int) -> "ArcRegion":
        return cls(bits, IntervalSet.full(2 << bits))

    @classmethod
    def arc(cls, bits: int, a: int, b: int, left_closed: bool = True, right_closed: bool = True) -> "ArcRegion":
        """Arc from tick ``a`` to tick ``b`` (``b >= a``; ``b - a >= 2**bits`` is the full circle)."""
        if b < a:
            raise PreconditionError("arc endpoints must satisfy a <= b")
        modulus = 1 << bits
        if b - a >= modulus:
            return cls.full(bits)
        lo = 2 * a + (0 if left_closed else 1)
        hi = 2 * b + (1 if right_closed else 0)
        return cls(bits, IntervalSet(2 << bits, [(lo, hi)]))

    @classmethod
    def point(cls, bits: int, p: int) -> "ArcRegion":
        return cls.arc(bits, p, p, True, True)

    @classmethod
    def from_arcs(cls, bits: int, arcs: Iterable[Arc]) -> "ArcRegion":
        region = cls.empty(bits)
        for arc in arcs:
            region = region.union(cls.arc(bits, *arc))
        return region

    def _wrap(self, cells: IntervalSet) -> "ArcRegion":
        return ArcRegion(self.bits, cells)

    def _check(self, other):
        if not isinstance(other, ArcRegion) or other.bits != self.bits:
            raise PreconditionError("regions live on different grids")

    def __eq__(self, other):
        return isinstance(other, ArcRegion) and self.bits == other.bits and self.cells == other.cells

    def __hash__(self):
        return hash(("arc", self.bits, self.cells))

    def __repr__(self):
        scale = float(self.modulus)
        parts = []
        for arc in self.arcs():
            left = "[" if arc.left_closed else "("
            right = "]" if arc.right_closed else ")"
            parts.append(f"{left}{arc.a / scale:.6f}, {arc.b / scale:.6f}{right}")
        return "ArcRegion(" + " U ".join(parts) + ")" if parts else "ArcRegion(empty)"

    def intersect(self, other):
        self._check(other)
        return self._wrap(self.cells.intersection(other.cells))

    def union(self, other):
        self._check(other)
        return self._wrap(self.cells.union(other.cells))

    def difference(self, other):
        self._check(other)
        return self._wrap(self.cells.difference(other.cells))

    def complement(self):
        return self._wrap(self.cells.complement())

    def closure(self):
        if self.cells.is_full():
            return self
        runs = []
        for lo, hi in self.cells.components():
            runs.append((lo - (lo % 2), hi + (1 - hi % 2)))
        return self._wrap(IntervalSet(self.cells.modulus, runs))

    def interior(self):
        if self.cells.is_full():
            return self
        runs = []
        for lo, hi in self.cells.components():
            lo2 = lo + (1 - lo % 2)
            hi2 = hi - (1 - (hi - 1) % 2)
            if lo2 < hi2:
                runs.append((lo2, hi2))
        return self._wrap(IntervalSet(self.cells.modulus, runs))

    def boundary(self) -> "ArcRegion":
        return self.closure().difference(self.interior())

    def boundary_points(self) -> list[int]:
        points = []
        for lo, hi in self.boundary().cells.ranges:
            points.extend(v // 2 for v in range(lo + lo % 2, hi, 2))
        return points

    def measure(self) -> Fraction:
        cells = sum(hi // 2 - lo // 2 for lo, hi in self.cells.ranges)
        return Fraction(cells, self.modulus)

    def is_empty(self) -> bool:
        return self.cells.is_empty()

    def is_full(self) -> bool:
        return self.cells.is_full()

    def contains(self, p: int) -> bool:
        return self.cells.contains(2 * p)

    def translate(self, ticks: int) -> "ArcRegion":
        return self._wrap(self.cells.shift(2 * ticks))

    def arcs(self) -> list[Arc]:
        out = []
        for lo, hi in self.cells.components():
            last = hi - 1
            if last % 2 == 0:
                b, right_closed = last // 2, True
            else:
                b, right_closed = (last + 1) // 2, False
            out.append(Arc(lo // 2, b, lo % 2 == 0, right_closed))
        return out

    def distance(self, p: int) -> Fraction:
        """Arc-length distance from grid point ``p`` to the closure of the region."""
        if self.cells.contains(2 * p):
            return Fraction(0)
        m = self.cells.modulus
        v = (2 * p) % m
        best = None
        for lo, hi in self.closure().cells.components():
            last = hi - 1
            gap = min((lo - v) % m, (v - last) % m)
            best = gap if best is None else min(best, gap)
        if best is None:
            return Fraction(1)
        return Fraction(best // 2, self.modulus)

    def boundary_distance(self, p: int) -> int | None:
        """Tick distance from ``p`` to the nearest boundary point, or None if there is none."""
        n = self.modulus
        best = None
        for q in self.boundary_points():
            d = (p - q) % n
            d = min(d, n - d)
            best = d if best is None else min(best, d)
        return best


def _radix(radices: Sequence[int], i: int) -> int:
    return radices[i % len(radices)]


def _place(radices: Sequence[int], depth: int) -> int:
    out = 1
    for i in range(depth):
        out *= _radix(radices, i)
    return out


class CylinderRegion(Region):
    """Finite union of digit-prefix cylinders of an odometer (always clopen).

    Stored as the set of residues of the first ``depth`` digits, read as a
    little-endian mixed-radix integer.  Radices repeat periodically.
    """

    __slots__ = ("radices", "depth", "cells")

    def __init__(self, radices: Sequence[int], depth: int, cells: IntervalSet):
        radices = tuple(radices)
        if cells.modulus != _place(radices, depth):
            raise ValueError("cell set does not match the cylinder depth")
        self.radices = radices
        self.depth = depth
        self.cells = cells

    @classmethod
    def from_residues(cls, radices, depth, residues: Iterable[int]) -> "CylinderRegion":
        modulus = _place(radices, depth)
        return cls(radices, depth, IntervalSet(modulus, [(v, v + 1) for v in residues]))._coarsen()

    @classmethod
    def cylinder(cls, radices, prefix: Sequence[int]) -> "CylinderRegion":
        value = 0
        place = 1
        for i, digit in enumerate(prefix):
            if not 0 <= digit < _radix(radices, i):
                raise PreconditionError(f"digit {digit} out of range at position {i}")
            value += digit * place
            place *= _radix(radices, i)
        return cls.from_residues(radices, len(prefix), [value])

    @classmethod
    def full(cls, radices) -> "CylinderRegion":
        return cls(radices, 0, IntervalSet.full(1))

    @classmethod
    def empty(cls, radices) -> "CylinderRegion":
        return cls(radices, 0, IntervalSet(1))

    def _refine(self, depth: int) -> IntervalSet:
        if depth == self.depth:
            return self.cells
        base = self.cells.modulus
        factor = _place(self.radices, depth) // base
        runs = [(lo + j * base, hi + j * base) for j in range(factor) for lo, hi in self.cells.ranges]
        return IntervalSet(base * factor, runs)

    def _coarsen(self) -> "CylinderRegion":
        for depth in range(self.depth):
            place = _place(self.radices, depth)
            if self.cells.shift(place) == self.cells:
                head = self.cells.intersection(IntervalSet(self.cells.modulus, [(0, place)]))
                return CylinderRegion(self.radices, depth, IntervalSet(place, head.ranges))
        return self

    def _combine(self, other, op) -> "CylinderRegion":
        if not isinstance(other, CylinderRegion) or other.radices != self.radices:
            raise PreconditionError("regions live on different odometers")
        depth = max(self.depth, other.depth)
        cells = op(self._refine(depth), other._refine(depth))
        return CylinderRegion(self.radices, depth, cells)._coarsen()

    def __eq__(self, other):
        return (
            isinstance(other, CylinderRegion)
            and self.radices == other.radices
            and self.depth == other.depth
            and self.cells == other.cells
        )

    def __hash__(self):
        return hash(("cyl", self.radices, self.depth, self.cells))

    def __repr__(self):
        return f"CylinderRegion(depth={self.depth}, prefixes={self.prefixes()})"

    def intersect(self, other):
        return self._combine(other, IntervalSet.intersection)

    def union(self, other):
        return self._combine(other, IntervalSet.union)

    def difference(self, other):
        return self._combine(other, IntervalSet.difference)

    def complement(self):
        return CylinderRegion(self.radices, self.depth, self.cells.complement())

    def closure(self):
        return self

    def interior(self):
        return self

    def boundary_points(self) -> list[int]:
        return []

    def measure(self) -> Fraction:
        return Fraction(self.cells.size(), self.cells.modulus)

    def is_empty(self) -> bool:
        return self.cells.is_empty()

    def is_full(self) -> bool:
        return self.cells.is_full()

    def contains(self, p: int) -> bool:
        return self.cells.contains(p % self.cells.modulus)

    def translate(self, n: int) -> "CylinderRegion":
        return CylinderRegion(self.radices, self.depth, self.cells.shift(n))

    def residues(self) -> list[int]:
        return [v for lo, hi in self.cells.ranges for v in range(lo, hi)]

    def prefixes(self) -> list[tuple[int, ...]]:
        out = []
        for v in self.residues():
            digits = []
            for i in range(self.depth):
                v, d = divmod(v, _radix(self.radices, i))
                digits.append(d)
            out.append(tuple(digits))
        return out

    def distance(self, p: int) -> Fraction:
        """Ultrametric distance 1/M_j, where j is the longest prefix of ``p`` seen in the region."""
        if self.contains(p):
            return Fraction(0)
        members = self.residues()
        for j in range(self.depth, -1, -1):
            place = _place(self.radices, j)
            if any((v - p) % place == 0 for v in members):
                return Fraction(1, place)
        return Fraction(1)

    def boundary_distance(self, p: int) -> int | None:
        return None


@dataclass(frozen=True)
class Rotation:
    """Rotation x -> x + theta on R/Z, on the grid of spacing 2**-bits."""

    theta_ticks: int
    bits: int = DEFAULT_BITS
    max_return: int = DEFAULT_MAX_RETURN
    eps_cmp: Fraction = EPS_CMP

    kind = "rotation"

    def __post_init__(self):
        if not 0 < self.theta_ticks < self.modulus:
            raise PreconditionError("theta must lie strictly inside (0, 1)")

    @classmethod
    def from_theta(cls, theta, bits: int = DEFAULT_BITS, max_return: int = DEFAULT_MAX_RETURN, **kw) -> "Rotation":
        """Build from ``"golden"``, a continued-fraction list, or any exact real."""
        if isinstance(theta, str) and theta.strip().lower() == "golden":
            ticks = golden_theta(bits)
        elif isinstance(theta, (list, tuple)):
            ticks = theta_from_continued_fraction([int(a) for a in theta], bits)
        else:
            frac = to_fraction(theta)
            ticks = _round_div(frac.numerator << bits, frac.denominator)
        return cls(ticks, bits, max_return, **kw)

    @property
    def modulus(self) -> int:
        return 1 << self.bits

    @property
    def step(self) -> int:
        return self.theta_ticks

    @property
    def theta(self) -> float:
        return self.theta_ticks / self.modulus

    @cached_property
    def eps_ticks(self) -> int:
        return math.ceil(self.eps_cmp * self.modulus)

    def ticks(self, value) -> int:
        frac = to_fraction(value)
        return _round_div(frac.numerator << self.bits, frac.denominator)

    def point(self, value) -> int:
        """Grid point nearest to the real number ``value`` (reduced mod 1)."""
        return self.ticks(value) % self.modulus

    def coordinate(self, p: int) -> float:
        return p / self.modulus

    def exact_coordinate(self, p: int) -> Fraction:
        return Fraction(p, self.modulus)

    def apply(self, p: int, n: int) -> int:
        _budget(self, n)
        return (p + n * self.theta_ticks) % self.modulus

    def region_map(self, region: ArcRegion, n: int) -> ArcRegion:
        _budget(self, n)
        return region.translate(n * self.theta_ticks)

    def full(self) -> ArcRegion:
        return ArcRegion.full(self.bits)

    def empty(self) -> ArcRegion:
        return ArcRegion.empty(self.bits)

    def arc(self, a, b, left_closed: bool = True, right_closed: bool = True) -> ArcRegion:
        """Arc between real endpoints ``a <= b`` (``b`` may exceed 1 to wrap)."""
        return ArcRegion.arc(self.bits, self.ticks(a), self.ticks(b), left_closed, right_closed)

    def circular_distance(self, p: int, q: int) -> int:
        d = (p - q) % self.modulus
        return min(d, self.modulus - d)

    def shortest_period(self) -> int | None:
        """Smallest n <= max_return with n*theta within eps_cmp of 0 mod 1."""
        q = 0
        for n in range(1, self.max_return + 1):
            q = (q + self.theta_ticks) % self.modulus
            if min(q, self.modulus - q) <= self.eps_ticks:
                return n
        return None


@dataclass(frozen=True)
class Odometer:
    """Adding machine on prod_i Z/m_i; radices repeat with period len(radices)."""

    radices: tuple[int, ...]
    depth: int
    max_return: int = DEFAULT_MAX_RETURN
    eps_cmp: Fraction = EPS_CMP

    kind = "odometer"

    def __post_init__(self):
        object.__setattr__(self, "radices", tuple(int(m) for m in self.radices))
        if not self.radices or any(m < 2 for m in self.radices):
            raise PreconditionError("odometer radices must be integers >= 2")
        if self.depth < 1:
            raise PreconditionError("odometer depth must be positive")

    @classmethod
    def for_region_depth(cls, radices, region_depth: int, max_return: int = DEFAULT_MAX_RETURN, **kw) -> "Odometer":
        """Depth = region digits + digits needed to count to max_return + 2 guard digits."""
        radices = tuple(radices)
        extra, place = 0, 1
        while place < max_return:
            place *= _radix(radices, region_depth + extra)
            extra += 1
        return cls(radices, region_depth + extra + 2, max_return, **kw)

    @property
    def modulus(self) -> int:
        return _place(self.radices, self.depth)

    @property
    def step(self) -> int:
        return 1

    @cached_property
    def eps_ticks(self) -> int:
        return 0

    def radix(self, i: int) -> int:
        return _radix(self.radices, i)

    def place(self, depth: int) -> int:
        return _place(self.radices, depth)

    def digits(self, p: int) -> tuple[int, ...]:
        out = []
        for i in range(self.depth):
            p, d = divmod(p, self.radix(i))
            out.append(d)
        return tuple(out)

    def point(self, digits: Sequence[int]) -> int:
        """Point from its leading digits; unspecified trailing digits are 0."""
        if len(digits) > self.depth:
            raise DepthExhausted(f"{len(digits)} digits given, system stores {self.depth}")
        value, place = 0, 1
        for i, d in enumerate(digits):
            if not 0 <= d < self.radix(i):
                raise PreconditionError(f"digit {d} out of range at position {i}")
            value += d * place
            place *= self.radix(i)
        return value

    def coordinate(self, p: int) -> float:
        """Continuous embedding into [0, 1): sum_i d_i / (m_0 ... m_i)."""
        total, place = 0.0, 1
        for i in range(self.depth):
            p, d = divmod(p, self.radix(i))
            place *= self.radix(i)
            total += d / place
        return total

    def apply(self, p: int, n: int) -> int:
        # Carries out of the stored digits only alter digits we do not track,
        # so the stored prefix of the image is exact.
        _budget(self, n)
        return (p + n) % self.modulus

    def region_map(self, region: CylinderRegion, n: int) -> CylinderRegion:
        _budget(self, n)
        self.require_depth(region)
        return region.translate(n)

    def require_depth(self, region: CylinderRegion):
        if region.depth > self.depth:
            raise DepthExhausted(f"region needs {region.depth} digits, system stores {self.depth}")

    def full(self) -> CylinderRegion:
        return CylinderRegion.full(self.radices)

    def empty(self) -> CylinderRegion:
        return CylinderRegion.empty(self.radices)

    def cylinder(self, prefix: Sequence[int]) -> CylinderRegion:
        region = CylinderRegion.cylinder(self.radices, prefix)
        self.require_depth(region)
        return region

    def circular_distance(self, p: int, q: int) -> int:
        return 0 if p == q else 1


System = Union[Rotation, Odometer]


def _budget(system, n: int):
    if abs(n) > 2 * system.max_return:
        raise BudgetExceeded(f"|n| = {abs(n)} exceeds 2 * max_return = {2 * system.max_return}")


def apply(system: System, p: int, n: int) -> int:
    return system.apply(p, n)


def region_map(system: System, region: Region, n: int) -> Region:
    return system.region_map(region, n)


def region_boolean(a: Region, b: Region | None, op: str):
    """Boolean algebra and measure on regions; ``b`` is ignored by unary ops."""
    if op == "intersect":
        return a.intersect(b)
    if op == "union":
        return a.union(b)
    if op == "difference":
        return a.difference(b)
    if op == "closure":
        return a.closure()
    if op == "interior":
        return a.interior()
    if op == "measure":
        return a.measure()
    raise ValueError(f"unknown region operation {op!r}")


def membership(region: Region, p: int, eps=EPS_CMP, system: System | None = None) -> Membership:
    """In/Out when ``p`` is farther than ``eps`` from every endpoint, Ambiguous otherwise."""
    if isinstance(region, CylinderRegion):
        if system is not None:
            system.require_depth(region)
        return Membership.IN if region.contains(p) else Membership.OUT
    band = math.ceil(to_fraction(eps) * region.modulus)
    near = region.boundary_distance(p)
    if near is not None and near <= band:
        return Membership.AMBIGUOUS
    return Membership.IN if region.contains(p) else Membership.OUT


def sample(system: System, region: Region, count: int, seed: int) -> list[int]:
    """Seeded stratified sample of ``count`` points from the interior of ``region``."""
    if count < 0:
        raise PreconditionError("count must be non-negative")
    rng = random.Random(seed)
    if isinstance(region, CylinderRegion):
        return _sample_cylinders(system, region, count, rng)
    return _sample_arcs(system, region, count, rng)


def _allocate(weights: list[int], count: int) -> list[int]:
    total = sum(weights)
    shares = [count * w // total for w in weights]
    remainders = sorted(range(len(weights)), key=lambda i: (-(count * weights[i] % total), i))
    for i in remainders[: count - sum(shares)]:
        shares[i] += 1
    return shares


def _sample_arcs(system: Rotation, region: ArcRegion, count: int, rng: random.Random) -> list[int]:
    margin = system.eps_ticks + 1
    spans = []
    for lo, hi in region.interior().cells.components():
        start = lo // 2 + margin
        stop = hi // 2 - margin
        if stop > start:
            spans.append((start, stop - start))
    if not spans:
        raise EmptyRegion("region has no interior to sample from")
    points = []
    for (start, width), share in zip(spans, _allocate([w for _, w in spans], count)):
        for j in range(share):
            frac = (j << 32) + rng.getrandbits(32)
            points.append((start + width * frac // (share << 32)) % system.modulus)
    return points


def _sample_cylinders(system: Odometer, region: CylinderRegion, count: int, rng: random.Random) -> list[int]:
    system.require_depth(region)
    residues = region.residues()
    if not residues:
        raise EmptyRegion("region is empty")
    base = region.cells.modulus
    fibre = system.modulus // base
    points, seen = [], set()
    for i in range(count):
        v = residues[i % len(residues)]
        for _ in range(8):
            p = v + base * rng.randrange(fibre)
            if p not in seen:
                break
        seen.add(p)
        points.append(p)
    return points
