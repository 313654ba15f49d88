from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from orbitrsh.dynsys import (
    ArcRegion,
    CylinderRegion,
    Membership,
    Odometer,
    Rotation,
    apply,
    golden_theta,
    membership,
    region_boolean,
    region_map,
    sample,
    theta_from_continued_fraction,
)
from orbitrsh.errors import BudgetExceeded, DepthExhausted, EmptyRegion, PreconditionError

BITS = 6
N = 1 << BITS


def points_of(region: ArcRegion) -> set[int]:
    return {p for p in range(region.modulus) if region.contains(p)}


def cells_of(region: ArcRegion) -> set[int]:
    return {v for v in range(region.cells.modulus) if region.cells.contains(v)}


arcs = st.tuples(st.integers(0, N - 1), st.integers(0, N - 1), st.booleans(), st.booleans()).map(
    lambda t: ArcRegion.arc(BITS, t[0], t[0] + t[1], t[2], t[3] or t[1] == 0)
)


def _union(xs):
    out = ArcRegion.empty(BITS)
    for x in xs:
        out = out.union(x)
    return out


regions = st.lists(arcs, max_size=3).map(_union)


# rotation ------------------------------------------------------------------


def test_golden_theta_value(golden):
    assert abs(golden.theta - 0.6180339887498949) < 1e-15
    assert golden.theta_ticks == golden_theta(128)
    assert theta_from_continued_fraction([0] + [1] * 100, 128) == pytest.approx(golden.theta_ticks, rel=1e-30)


def test_rotation_apply_is_exact(golden):
    p = golden.point(Fraction(1, 4))
    q = apply(golden, p, 3)
    assert q == (p + 3 * golden.theta_ticks) % golden.modulus
    assert apply(golden, q, -3) == p
    assert abs(golden.coordinate(q) - (0.25 + 3 * golden.theta) % 1) < 1e-15


def test_rotation_budget(golden):
    with pytest.raises(BudgetExceeded):
        golden.apply(0, 2 * golden.max_return + 1)
    golden.apply(0, 2 * golden.max_return)


def test_rotation_rejects_endpoints():
    with pytest.raises(PreconditionError):
        Rotation.from_theta(0)
    with pytest.raises(PreconditionError):
        Rotation.from_theta(1)


def test_rational_rotation_has_short_period():
    assert Rotation.from_theta("2/5", max_return=100).shortest_period() == 5
    assert Rotation.from_theta("golden", max_return=2000).shortest_period() is None


def test_arc_translation_matches_region_map(golden):
    Y = golden.arc(0, Fraction(1, 2))
    image = region_map(golden, Y, 1)
    (arc,) = image.arcs()
    assert arc.a == golden.theta_ticks
    assert image.measure() == Fraction(1, 2)


def test_closure_interior_boundary(golden):
    Y = golden.arc(Fraction(1, 4), Fraction(1, 2), False, True)
    assert Y.closure() == golden.arc(Fraction(1, 4), Fraction(1, 2))
    assert Y.interior() == golden.arc(Fraction(1, 4), Fraction(1, 2), False, False)
    assert Y.boundary_points() == [golden.point(Fraction(1, 4)), golden.point(Fraction(1, 2))]
    assert Y.measure() == Fraction(1, 4)


def test_wrapping_arc(golden):
    Y = golden.arc(Fraction(-1, 10), Fraction(1, 10))
    assert Y.contains(0)
    assert Y.contains(golden.point(Fraction(95, 100)))
    assert not Y.contains(golden.point(Fraction(1, 2)))
    assert len(Y.arcs()) == 1


def test_membership_ambiguity(golden):
    Y = golden.arc(0, Fraction(1, 2))
    half = golden.point(Fraction(1, 2))
    assert membership(Y, half) is Membership.AMBIGUOUS
    assert membership(Y, half + golden.eps_ticks) is Membership.AMBIGUOUS
    assert membership(Y, half + 2 * golden.eps_ticks) is Membership.OUT
    assert membership(Y, golden.point(Fraction(1, 4))) is Membership.IN


def test_region_boolean_dispatch(golden):
    a, b = golden.arc(0, Fraction(1, 2)), golden.arc(Fraction(1, 4), Fraction(3, 4))
    assert region_boolean(a, b, "intersect").measure() == Fraction(1, 4)
    assert region_boolean(a, b, "union").measure() == Fraction(3, 4)
    assert region_boolean(a, None, "measure") == Fraction(1, 2)
    with pytest.raises(ValueError):
        region_boolean(a, b, "xor")


@given(regions, regions)
def test_arc_algebra_against_cells(A, B):
    assert cells_of(A.union(B)) == cells_of(A) | cells_of(B)
    assert cells_of(A.intersect(B)) == cells_of(A) & cells_of(B)
    assert cells_of(A.difference(B)) == cells_of(A) - cells_of(B)
    assert A.union(B).measure() + A.intersect(B).measure() == A.measure() + B.measure()


@given(regions)
def test_closure_and_interior_are_idempotent(A):
    assert A.closure().closure() == A.closure()
    assert A.interior().interior() == A.interior()
    assert cells_of(A.interior()) <= cells_of(A) <= cells_of(A.closure())
    assert A.closure().measure() == A.measure() == A.interior().measure()
    assert A.complement().closure() == A.interior().complement()


@given(regions, st.integers(-200, 200))
def test_translate_preserves_structure(A, k):
    T = A.translate(k)
    assert T.measure() == A.measure()
    assert points_of(T) == {(p + k) % N for p in points_of(A)}
    assert T.closure() == A.closure().translate(k)


def test_sampling_is_seeded_and_inside(golden):
    Y = golden.arc(Fraction(1, 10), Fraction(3, 10)).union(golden.arc(Fraction(1, 2), Fraction(9, 10)))
    pts = sample(golden, Y, 100, seed=5)
    assert pts == sample(golden, Y, 100, seed=5)
    assert pts != sample(golden, Y, 100, seed=6)
    assert all(membership(Y, p) is Membership.IN for p in pts)
    left = sum(1 for p in pts if golden.coordinate(p) < 0.4)
    assert left == 33  # stratified by length: 0.2 of 0.6


def test_sampling_needs_interior(golden):
    with pytest.raises(EmptyRegion):
        sample(golden, ArcRegion.point(golden.bits, 5), 3, 0)


# odometer ------------------------------------------------------------------


def test_odometer_carry(odometer):
    p = odometer.point([1, 2, 1])
    assert odometer.digits(apply(odometer, p, 1))[:4] == (0, 0, 0, 1)
    assert odometer.digits(apply(odometer, p, -1))[:3] == (0, 2, 1)


def test_odometer_top_point_wraps(odometer):
    top = odometer.modulus - 1
    assert odometer.apply(top, 1) == 0


@given(st.lists(st.integers(0, 5), min_size=1, max_size=6), st.integers(-50, 50))
@settings(max_examples=50)
def test_odometer_apply_is_digit_addition(raw, n):
    o = Odometer((2, 3), 8)
    digits = [d % o.radix(i) for i, d in enumerate(raw)]
    p = o.point(digits)
    value = sum(d * o.place(i) for i, d in enumerate(digits))
    assert o.apply(p, n) == (value + n) % o.modulus


def test_cylinders_and_measure(odometer):
    c = odometer.cylinder([1, 2])
    assert c.measure() == Fraction(1, 6)
    assert c.residues() == [5]
    assert c.closure() == c and c.interior() == c
    assert c.translate(1).prefixes() == [(0, 0)]
    union = odometer.cylinder([0]).union(odometer.cylinder([1, 0]))
    assert union.measure() == Fraction(2, 3)
    assert union.complement().prefixes() == [(1, 1), (1, 2)]


def test_depth_is_enforced():
    o = Odometer((2, 3), 2)
    with pytest.raises(DepthExhausted):
        o.cylinder([0, 1, 0])
    with pytest.raises(DepthExhausted):
        o.point([0, 1, 0])
    deep = CylinderRegion.cylinder((2, 3), [0, 1, 0])
    with pytest.raises(DepthExhausted):
        membership(deep, 0, system=o)


def test_odometer_sampling(odometer):
    Y = odometer.cylinder([0])
    pts = sample(odometer, Y, 50, 1)
    assert all(odometer.digits(p)[0] == 0 for p in pts)
    assert len(set(pts)) == 50
