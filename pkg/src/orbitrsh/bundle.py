"""Line bundles over the circle or an odometer, as cocycles on a finite cover.

A circle bundle is described by open arcs ``U_j`` and integer twist rates
``rho_j``.  Chart ``j`` carries the local frame ``h_j(x, 1) = chi_j(x) s(x)``
relative to a reference frame ``s``, where

    chi_j(x) = exp(2 pi i * degree * rho_j * t_j(x)),   t_j(x) = (x - a_j) mod 1.

The transition between charts is then the closed-form phase

    g_{ij}(x) = chi_j(x) / chi_i(x) = exp(2 pi i (c_ij + s_ij x))

on the overlap, where the slope ``s_ij = degree * (rho_j - rho_i)`` is an
integer, so the cocycle identities hold exactly.  Coefficients obey
``coef_V = g_{V,U} * coef_U``.  The odometer only carries the trivial bundle.
"""

from __future__ import annotations

import cmath
import itertools
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .dynsys import ArcRegion, CylinderRegion, Rotation, System, sample
from .errors import NoChartCoversPoint, PointOutsideDomain, PreconditionError
from .expr import TWO_PI_I, smoothstep

__all__ = [
    "Chart",
    "ChartTuple",
    "LineBundle",
    "Transition",
    "cocycle_check",
    "frame_section",
    "tensor_transition",
    "tuple_cover",
]

DEFAULT_CHARTS = (("-0.15", "0.65"), ("0.35", "1.15"))


@dataclass(frozen=True)
class Chart:
    """Open arc (start, start + length) in grid ticks, or the whole odometer."""

    label: str
    start: int
    length: int
    twist: int
    region: object

    def position(self, modulus: int, p: int) -> int:
        return (p - self.start) % modulus

    def depth(self, modulus: int, p: int) -> int:
        """Tick distance from ``p`` to the chart boundary (<= 0 when outside)."""
        if isinstance(self.region, CylinderRegion):
            return modulus
        t = self.position(modulus, p)
        if t == 0 or t >= self.length:
            return 0
        return min(t, self.length - t)


@dataclass(frozen=True)
class Transition:
    """g(x) = amplitude * exp(2 pi i (offset + slope * x)) on an overlap (ticks units)."""

    offset: int
    slope: int
    amplitude: float = 1.0

    def __call__(self, modulus: int, p: int) -> complex:
        turns = (self.offset + self.slope * p) % modulus
        return self.amplitude * cmath.exp(TWO_PI_I * (turns / modulus))


@dataclass(frozen=True)
class ChartTuple:
    """Chart indices (U_0, ..., U_{n-1}) with domain = intersection of alpha^{-j}(U_j)."""

    entries: tuple[int, ...]
    domain: object

    def __len__(self):
        return len(self.entries)


class LineBundle:
    """Complex line bundle over the system's space, with its tensor powers."""

    def __init__(
        self,
        system: System,
        charts: Sequence[Chart],
        degree: int = 0,
        ramp: int | None = None,
        transitions: dict | None = None,
    ):
        self.system = system
        self.charts = tuple(charts)
        self.degree = int(degree)
        if not self.charts:
            raise PreconditionError("a cover needs at least one chart")
        union = system.empty()
        for chart in self.charts:
            union = union.union(chart.region)
        if not union.is_full():
            raise PreconditionError("charts do not cover the space")
        self.ramp = ramp if ramp is not None else self._default_ramp()
        self.transitions = dict(transitions) if transitions is not None else self._derive_transitions()

    @classmethod
    def circle(cls, system: Rotation, degree: int, arcs=DEFAULT_CHARTS, twists=None) -> "LineBundle":
        """Degree-``degree`` clutching over open arcs (default: two overlapping arcs)."""
        if system.kind != "rotation":
            raise PreconditionError("circle bundles need a rotation system")
        twists = tuple(twists) if twists is not None else tuple(range(len(arcs)))
        charts = []
        for j, ((a, b), rho) in enumerate(zip(arcs, twists)):
            start = system.ticks(a)
            length = system.ticks(b) - start
            if not 0 < length < system.modulus:
                raise PreconditionError(f"chart {j} must be a proper open arc")
            region = ArcRegion.arc(system.bits, start, start + length, False, False)
            charts.append(Chart(f"U{j}", start % system.modulus, length, int(rho), region))
        return cls(system, charts, degree)

    @classmethod
    def trivial(cls, system: System) -> "LineBundle":
        if system.kind == "rotation":
            return cls.circle(system, 0)
        chart = Chart("X", 0, system.modulus, 0, system.full())
        return cls(system, [chart], 0)

    @property
    def is_trivial(self) -> bool:
        return self.degree == 0 and all(t.amplitude == 1.0 for t in self.transitions.values())

    def _default_ramp(self) -> int:
        if len(self.charts) == 1:
            return 1
        widths = []
        for i, j in itertools.combinations(range(len(self.charts)), 2):
            overlap = self.charts[i].region.intersect(self.charts[j].region)
            widths.extend(arc.b - arc.a for arc in overlap.arcs())
        return min(widths) if widths else 1

    def _derive_transitions(self) -> dict:
        out = {}
        n = self.system.modulus
        for i, ci in enumerate(self.charts):
            for j, cj in enumerate(self.charts):
                if i != j and ci.region.intersect(cj.region).is_empty():
                    continue
                if isinstance(ci.region, CylinderRegion):
                    out[(i, j)] = Transition(0, 0)
                    continue
                d = self.degree
                offset = d * (ci.twist * ci.start - cj.twist * cj.start) % n
                out[(i, j)] = Transition(offset, d * (cj.twist - ci.twist))
        return out

    def with_scaled_transition(self, i: int, j: int, factor: float) -> "LineBundle":
        """Copy with one transition multiplied by ``factor`` (for defect injection)."""
        transitions = dict(self.transitions)
        t = transitions[(i, j)]
        transitions[(i, j)] = Transition(t.offset, t.slope, t.amplitude * factor)
        return LineBundle(self.system, self.charts, self.degree, self.ramp, transitions)

    # single charts -----------------------------------------------------

    def in_chart(self, j: int, p: int, margin: int = 0) -> bool:
        chart = self.charts[j]
        if isinstance(chart.region, CylinderRegion):
            return True
        return chart.depth(self.system.modulus, p) > margin

    def gauge(self, j: int, p: int) -> complex:
        """chi_j(p): the reference-frame coefficient of the chart-j frame."""
        chart = self.charts[j]
        if self.degree == 0 or chart.twist == 0:
            return 1 + 0j
        n = self.system.modulus
        turns = self.degree * chart.twist * chart.position(n, p) % n
        return cmath.exp(TWO_PI_I * (turns / n))

    def transition(self, i: int, j: int, p: int) -> complex:
        """g_{U_i, U_j}(p); ``p`` must lie in both charts."""
        if not (self.in_chart(i, p) and self.in_chart(j, p)):
            raise PointOutsideDomain(f"point not in the overlap of charts {i} and {j}")
        return self.transitions[(i, j)](self.system.modulus, p)

    def bumps(self, p: int) -> list[float]:
        n = self.system.modulus
        out = []
        for chart in self.charts:
            if isinstance(chart.region, CylinderRegion):
                out.append(1.0)
            else:
                out.append(smoothstep(chart.depth(n, p) / self.ramp))
        return out

    def partition(self, p: int) -> list[float]:
        """gamma_j(p): smoothstep bumps normalized by their sum."""
        weights = self.bumps(p)
        total = sum(weights)
        return [w / total for w in weights]

    # chart tuples ------------------------------------------------------

    @lru_cache(maxsize=None)
    def chart_tuple(self, entries: tuple[int, ...]) -> ChartTuple:
        domain = self.system.full()
        for shift, j in enumerate(entries):
            domain = domain.intersect(self.system.region_map(self.charts[j].region, -shift))
        return ChartTuple(tuple(entries), domain)

    def tuple_contains(self, U: ChartTuple, p: int, margin: int = 0) -> bool:
        q = p
        for shift, j in enumerate(U.entries):
            if shift:
                q = self.system.apply(q, 1)
            if not self.in_chart(j, q, margin):
                return False
        return True

    @lru_cache(maxsize=None)
    def tuple_cover(self, n: int) -> tuple[ChartTuple, ...]:
        """All tuples of length n with nonempty domain, in lexicographic chart order."""
        if n < 0:
            raise PreconditionError("tuple length must be non-negative")
        found = []

        def extend(entries, domain):
            if len(entries) == n:
                found.append(ChartTuple(tuple(entries), domain))
                return
            shift = len(entries)
            for j, chart in enumerate(self.charts):
                sub = domain.intersect(self.system.region_map(chart.region, -shift))
                if not sub.interior().is_empty():
                    extend(entries + [j], sub)

        extend([], self.system.full())
        return tuple(found)

    def select_tuple(self, p: int, length: int, margin: int | None = None) -> ChartTuple:
        """First tuple in chart order whose domain contains ``p`` with margin."""
        margin = self.system.eps_ticks if margin is None else margin
        entries = []
        q = p
        for shift in range(length):
            if shift:
                q = self.system.apply(q, 1)
            for j in range(len(self.charts)):
                if self.in_chart(j, q, margin):
                    entries.append(j)
                    break
            else:
                raise NoChartCoversPoint(f"no chart contains alpha^{shift}(x) with margin")
        return self.chart_tuple(tuple(entries))

    def tuples_at(self, p: int, length: int) -> list[ChartTuple]:
        """Every tuple of the given length whose domain contains ``p``."""
        choices = []
        q = p
        for shift in range(length):
            if shift:
                q = self.system.apply(q, 1)
            choices.append([j for j in range(len(self.charts)) if self.in_chart(j, q)])
        return [self.chart_tuple(entries) for entries in itertools.product(*choices)]

    def shifted(self, U: ChartTuple, start: int, length: int | None = None) -> ChartTuple:
        """alpha^start(U) = (U_start, ..., U_{start+length-1})."""
        stop = len(U) if length is None else start + length
        if stop > len(U):
            raise PreconditionError("shifted tuple runs past the end of U")
        return self.chart_tuple(U.entries[start:stop])

    def frame(self, U: ChartTuple, level: int, p: int) -> complex:
        """Reference coefficient of v_U^{(level)}(p) = prod_j chi_{U_j}(alpha^j p)."""
        if level > len(U):
            raise PreconditionError("tuple shorter than the tensor level")
        out = 1 + 0j
        q = p
        for shift in range(level):
            if shift:
                q = self.system.apply(q, 1)
            out *= self.gauge(U.entries[shift], q)
        return out

    def frame_inverse(self, U: ChartTuple, level: int, p: int) -> complex:
        return self.frame(U, level, p).conjugate()


def tuple_cover(b: LineBundle, n: int) -> tuple[ChartTuple, ...]:
    return b.tuple_cover(n)


def tensor_transition(b: LineBundle, level: int, V: ChartTuple, U: ChartTuple, p: int) -> complex:
    """prod_{j<level} g_{V_j,U_j}(alpha^j p): coef in V = this * coef in U."""
    if level > len(U) or level > len(V):
        raise PreconditionError("tuples shorter than the tensor level")
    if not (b.tuple_contains(U, p) and b.tuple_contains(V, p)):
        raise PointOutsideDomain("point outside the common domain of the tuples")
    out = 1 + 0j
    q = p
    for shift in range(level):
        if shift:
            q = b.system.apply(q, 1)
        out *= b.transition(V.entries[shift], U.entries[shift], q)
    return out


@dataclass(frozen=True)
class FrameToken:
    """Identifies the local frame v_U^{(level)}(x) of the tensor power."""

    bundle: LineBundle
    charts: tuple[int, ...]
    level: int
    point: int

    def coefficient(self) -> complex:
        return self.bundle.frame(self.bundle.chart_tuple(self.charts), self.level, self.point)

    def transition_to(self, other: "FrameToken") -> complex:
        """Factor c with other = c * self, from the cocycle (not the gauges)."""
        if other.level != self.level or other.point != self.point:
            raise PreconditionError("frames at different levels or points")
        b = self.bundle
        return tensor_transition(b, self.level, b.chart_tuple(self.charts), b.chart_tuple(other.charts), self.point)


def frame_section(b: LineBundle, U: ChartTuple, level: int, p: int) -> FrameToken:
    if level > len(U):
        raise PreconditionError("tuple shorter than the tensor level")
    if not b.tuple_contains(b.shifted(U, 0, level), p):
        raise PointOutsideDomain("point outside the tuple domain")
    return FrameToken(b, U.entries[:level], level, p)


def cocycle_check(b: LineBundle, samples_per_overlap: int = 200, seed: int = 0) -> dict:
    """Worst violation of unit modulus, g_ii = 1, g_ij g_ji = 1 and g_ik = g_ij g_jk."""
    system = b.system
    count = len(b.charts)
    worst = 0.0
    where = None
    rng = random.Random(seed)

    def note(value, label):
        nonlocal worst, where
        if value > worst:
            worst, where = value, label

    for i, j, k in itertools.product(range(count), repeat=3):
        overlap = b.charts[i].region.intersect(b.charts[j].region).intersect(b.charts[k].region)
        if overlap.interior().is_empty():
            continue
        for p in sample(system, overlap.interior(), samples_per_overlap, rng.randrange(1 << 30)):
            gij = b.transition(i, j, p)
            gjk = b.transition(j, k, p)
            gik = b.transition(i, k, p)
            note(abs(abs(gij) - 1.0), f"|g_{i}{j}| != 1")
            note(abs(b.transition(i, i, p) - 1.0), f"g_{i}{i} != 1")
            note(abs(gij * b.transition(j, i, p) - 1.0), f"g_{i}{j} g_{j}{i} != 1")
            note(abs(gik - gij * gjk), f"g_{i}{k} != g_{i}{j} g_{j}{k}")
    return {"max_violation": worst, "worst": where, "charts": count}
