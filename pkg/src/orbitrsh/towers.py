"""First-return towers over a closed set Y.

``first_return_partition`` computes the sets

    R_n = (Y minus R_1 ... R_{n-1}) intersected with alpha^{-n}(Y)

with exact region algebra until every point of Y is accounted for.  The
nonempty ``R_n`` are the tower bases ``Y_k`` with heights ``r_k = n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .dynsys import Region, System, sample
from .errors import BoundaryAmbiguous, ItinerarySumMismatch, MaxReturnExceeded, PreconditionError

__all__ = [
    "BoundaryItinerary",
    "TowerDecomposition",
    "TowerLevel",
    "boundary_itinerary",
    "first_return_partition",
    "first_return_time",
    "simplicity_certificate",
    "validate_towers",
]


@dataclass(frozen=True)
class TowerLevel:
    r: int
    base: Region
    base_closure: Region

    @property
    def glue_boundary(self) -> Region:
        return self.base_closure.difference(self.base)


@dataclass(frozen=True)
class TowerDecomposition:
    system: System
    Y: Region
    levels: tuple[TowerLevel, ...]
    covering_residual: Fraction
    horizon: int

    @property
    def K(self) -> int:
        return len(self.levels)

    @property
    def heights(self) -> tuple[int, ...]:
        return tuple(level.r for level in self.levels)

    def level(self, k: int) -> TowerLevel:
        """Tower k, counted from 1."""
        if not 1 <= k <= self.K:
            raise PreconditionError(f"tower index {k} outside 1..{self.K}")
        return self.levels[k - 1]

    def r(self, k: int) -> int:
        return self.level(k).r

    def tower_of(self, y: int) -> int:
        """Index k of the base containing y, with a hard error near ambiguous endpoints."""
        eps = self.system.eps_ticks
        hit = None
        for k, level in enumerate(self.levels, 1):
            near = level.base.boundary_distance(y)
            if near is not None and 0 < near <= eps:
                raise BoundaryAmbiguous(f"point within eps_cmp of an endpoint of Y_{k}")
            if level.base.contains(y):
                hit = k
        if hit is None:
            raise PreconditionError("point is not in Y")
        return hit

    def locate(self, x: int) -> tuple[int, int]:
        """(k, i) with x in alpha^i(Y_k), found by walking backwards into Y."""
        system = self.system
        for i in range(self.heights[-1]):
            y = system.apply(x, -i)
            if self.Y.contains(y):
                k = self.tower_of(y)
                if i < self.r(k):
                    return k, i
        raise PreconditionError("point not covered by the towers")


def first_return_partition(system: System, Y: Region, max_return: int | None = None) -> TowerDecomposition:
    horizon = system.max_return if max_return is None else max_return
    if Y.closure() != Y:
        raise PreconditionError("Y must be closed")
    if Y.interior().is_empty():
        raise PreconditionError("Y requires non-empty interior")
    endpoints = Y.boundary_points()
    levels = []
    remaining = Y
    for n in range(1, horizon + 1):
        image = system.region_map(Y, -n)
        _check_separation(system, endpoints, image.boundary_points())
        piece = remaining.intersect(image)
        if not piece.is_empty():
            levels.append(TowerLevel(n, piece, piece.closure()))
            remaining = remaining.difference(piece)
            if remaining.is_empty():
                break
    else:
        raise MaxReturnExceeded(f"points of Y have not returned after {horizon} steps")
    total = sum((level.r * level.base.measure() for level in levels), Fraction(0))
    return TowerDecomposition(system, Y, tuple(levels), abs(1 - total), horizon)


def _check_separation(system, ours, theirs):
    eps = system.eps_ticks
    if not eps:
        return
    for p in ours:
        for q in theirs:
            d = system.circular_distance(p, q)
            if 0 < d <= eps:
                raise BoundaryAmbiguous("translated endpoints of Y closer than eps_cmp")


def validate_towers(system: System, d: TowerDecomposition) -> dict:
    """Exact residuals of the tower axioms (all Fractions)."""
    union = system.empty()
    overlap = Fraction(0)
    worst_pair = None
    total = Fraction(0)
    for k, level in enumerate(d.levels, 1):
        image = level.base
        for i in range(level.r):
            if i:
                image = system.region_map(image, 1)
            shared = union.intersect(image).measure()
            if shared > overlap:
                overlap, worst_pair = shared, (k, i)
            union = union.union(image)
            total += image.measure()
    partition = system.empty()
    for level in d.levels:
        partition = partition.union(level.base)
    containment = sum((level.base.difference(d.Y).measure() for level in d.levels), Fraction(0))
    returns = Fraction(0)
    for level in d.levels:
        top = system.region_map(level.base_closure, level.r)
        returns += top.difference(d.Y).measure()
    closed = Fraction(0)
    prefix = system.empty()
    for level in d.levels:
        prefix = prefix.union(level.base)
        closed += prefix.closure().difference(prefix).measure()
    report = {
        "disjointness": overlap,
        "disjointness_witness": worst_pair,
        "covering": abs(1 - union.measure()),
        "total_measure": abs(1 - total),
        "partition": abs(d.Y.measure() - partition.measure()) + d.Y.difference(partition).measure(),
        "containment": containment,
        "return_containment": returns,
        "prefix_closure": closed,
    }
    report["max_residual"] = max(v for key, v in report.items() if key != "disjointness_witness")
    return report


@dataclass(frozen=True)
class BoundaryItinerary:
    k: int
    x: int
    mu: tuple[int, ...]
    partial_sums: tuple[int, ...]


def boundary_itinerary(system: System, d: TowerDecomposition, k: int, x: int) -> BoundaryItinerary:
    """Towers visited by successive first returns from x in closure(Y_k)."""
    level = d.level(k)
    if not level.base_closure.contains(x):
        raise PreconditionError("x must lie in the closure of Y_k")
    if level.base.contains(x):
        d.tower_of(x)
        return BoundaryItinerary(k, x, (k,), (0, level.r))
    mu, sums = [], [0]
    y = x
    while sums[-1] < level.r:
        t = d.tower_of(y)
        mu.append(t)
        sums.append(sums[-1] + d.r(t))
        y = system.apply(y, d.r(t))
    if sums[-1] != level.r:
        raise ItinerarySumMismatch(f"return times {sums} overshoot r_{k} = {level.r}")
    return BoundaryItinerary(k, x, tuple(mu), tuple(sums))


def first_return_time(system: System, Y: Region, y: int, horizon: int | None = None) -> int:
    """Brute force: iterate alpha until the orbit re-enters Y."""
    horizon = system.max_return if horizon is None else horizon
    x = y
    for n in range(1, horizon + 1):
        x = system.apply(x, 1)
        if Y.contains(x):
            return n
    raise MaxReturnExceeded(f"no return within {horizon} steps")


def simplicity_certificate(system: System, Y: Region, N: int) -> dict:
    """Smallest n <= N with measure(Y n alpha^n Y) > eps_cmp, if any."""
    for n in range(1, N + 1):
        if Y.intersect(system.region_map(Y, n)).measure() > system.eps_cmp:
            return {"empty_up_to": n - 1, "first_hit": n}
    return {"empty_up_to": N, "first_hit": None}


def sample_base(d: TowerDecomposition, k: int, count: int, seed: int) -> list[int]:
    return sample(d.system, d.level(k).base, count, seed)
