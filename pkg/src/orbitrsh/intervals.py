"""Finite unions of half-open integer ranges on the cycle Z/M.

This is the exact backbone of all region algebra.  Circle regions live in
doubled lattice coordinates (even integers are lattice points, odd integers
are the open cells between them) and odometer regions live on residues of
the first few digits, so every boolean operation reduces to merging ranges.
"""

from __future__ import annotations

from bisect import bisect_right
from typing import Iterable


def _normalize(modulus: int, ranges: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    pieces = []
    for lo, hi in ranges:
        if hi <= lo:
            continue
        if hi - lo >= modulus:
            return ((0, modulus),)
        start = lo % modulus
        stop = start + (hi - lo)
        if stop <= modulus:
            pieces.append((start, stop))
        else:
            pieces.append((start, modulus))
            pieces.append((0, stop - modulus))
    pieces.sort()
    merged: list[tuple[int, int]] = []
    for lo, hi in pieces:
        if merged and lo <= merged[-1][1]:
            if hi > merged[-1][1]:
                merged[-1] = (merged[-1][0], hi)
        else:
            merged.append((lo, hi))
    return tuple(merged)


class IntervalSet:
    """Immutable subset of Z/modulus stored as sorted disjoint ranges [lo, hi)."""

    __slots__ = ("modulus", "ranges", "_starts")

    def __init__(self, modulus: int, ranges: Iterable[tuple[int, int]] = ()):
        if modulus <= 0:
            raise ValueError("modulus must be positive")
        self.modulus = modulus
        self.ranges = _normalize(modulus, ranges)
        self._starts = [lo for lo, _ in self.ranges]

    @classmethod
    def full(cls, modulus: int) -> "IntervalSet":
        return cls(modulus, [(0, modulus)])

    def __eq__(self, other):
        return (
            isinstance(other, IntervalSet)
            and self.modulus == other.modulus
            and self.ranges == other.ranges
        )

    def __hash__(self):
        return hash((self.modulus, self.ranges))

    def __repr__(self):
        return f"IntervalSet({self.modulus}, {list(self.ranges)})"

    def _check(self, other: "IntervalSet"):
        if other.modulus != self.modulus:
            raise ValueError("interval sets live on different cycles")

    def size(self) -> int:
        return sum(hi - lo for lo, hi in self.ranges)

    def is_empty(self) -> bool:
        return not self.ranges

    def is_full(self) -> bool:
        return self.ranges == ((0, self.modulus),)

    def contains(self, value: int) -> bool:
        value %= self.modulus
        i = bisect_right(self._starts, value) - 1
        return i >= 0 and value < self.ranges[i][1]

    def complement(self) -> "IntervalSet":
        gaps = []
        cursor = 0
        for lo, hi in self.ranges:
            if lo > cursor:
                gaps.append((cursor, lo))
            cursor = hi
        if cursor < self.modulus:
            gaps.append((cursor, self.modulus))
        return IntervalSet(self.modulus, gaps)

    def union(self, other: "IntervalSet") -> "IntervalSet":
        self._check(other)
        return IntervalSet(self.modulus, self.ranges + other.ranges)

    def intersection(self, other: "IntervalSet") -> "IntervalSet":
        self._check(other)
        out = []
        a, b = self.ranges, other.ranges
        i = j = 0
        while i < len(a) and j < len(b):
            lo = max(a[i][0], b[j][0])
            hi = min(a[i][1], b[j][1])
            if lo < hi:
                out.append((lo, hi))
            if a[i][1] < b[j][1]:
                i += 1
            else:
                j += 1
        return IntervalSet(self.modulus, out)

    def difference(self, other: "IntervalSet") -> "IntervalSet":
        return self.intersection(other.complement())

    def shift(self, offset: int) -> "IntervalSet":
        offset %= self.modulus
        if offset == 0:
            return self
        return IntervalSet(self.modulus, [(lo + offset, hi + offset) for lo, hi in self.ranges])

    def components(self) -> list[tuple[int, int]]:
        """Maximal circular runs; a run through 0 is reported once with hi > modulus."""
        runs = list(self.ranges)
        if len(runs) >= 2 and runs[0][0] == 0 and runs[-1][1] == self.modulus:
            first = runs.pop(0)
            last = runs.pop()
            runs.append((last[0], self.modulus + first[1]))
        return runs

    def locate(self, value: int) -> tuple[int, int] | None:
        """The circular component containing ``value``, if any."""
        value %= self.modulus
        for lo, hi in self.components():
            if lo <= value < hi or lo <= value + self.modulus < hi:
                return lo, hi
        return None
