from fractions import Fraction

import pytest

from orbitrsh.bundle import LineBundle
from orbitrsh.dynsys import sample
from orbitrsh.errors import LevelMismatch, PreconditionError
from orbitrsh.expr import Coordinate, trig_polynomial
from orbitrsh.sections import (
    ElementaryTensor,
    constant_section,
    eval_section,
    function_section,
    generator_section,
    inner_product,
    left_action,
    orbit_breaking_project,
    orbit_breaking_test,
    phase_section,
    psi,
    psi_eval,
    tensor_inner_product,
    validate_section,
)


@pytest.fixture(scope="module")
def bundle(golden):
    return LineBundle.circle(golden, 1)


def test_sections_are_chart_covariant(bundle):
    for s in (generator_section(bundle, 0), generator_section(bundle, 1), phase_section(bundle, 2), constant_section(bundle, 1j)):
        assert validate_section(s, 100, 1) < 1e-12


def test_generators_square_to_partition(golden, bundle):
    etas = [generator_section(bundle, j) for j in range(2)]
    for p in sample(golden, golden.full(), 100, 0):
        total = sum(inner_product(e, e, p) for e in etas)
        assert abs(total - 1) < 1e-12


def test_inner_product_is_frame_independent(golden, bundle):
    s, t = phase_section(bundle, 1, amplitude=0.5), constant_section(bundle, 2 - 1j)
    for p in sample(golden, golden.full(), 50, 3):
        assert abs(inner_product(s, t, p) - s.coef(p).conjugate() * t.coef(p)) < 1e-12


def test_left_action_uses_alpha(golden, bundle):
    f = trig_polynomial(golden, {1: 0.3, -1: 0.2j})
    s = constant_section(bundle, 1)
    x = golden.point(Fraction(1, 10))
    assert abs(left_action(f, s).coef(x) - f(golden.apply(x, 1))) < 1e-15


def test_psi_matches_pointwise_product(golden, bundle):
    xi = [phase_section(bundle, 1), generator_section(bundle, 0), constant_section(bundle, 0.5)]
    t = ElementaryTensor(tuple(xi))
    s = psi(t)
    assert s.level == 3
    for x in sample(golden, golden.full(), 50, 5):
        U = bundle.select_tuple(x, 3)
        assert abs(psi_eval(t, x, U) - eval_section(s, x, U)) < 1e-12
        expected = xi[0].coef(golden.apply(x, 2)) * xi[1].coef(golden.apply(x, 1)) * xi[2].coef(x)
        assert abs(s.coef(x) - expected) < 1e-12


def test_psi_preserves_inner_products(golden, bundle):
    s = ElementaryTensor((generator_section(bundle, 0), phase_section(bundle, 1)))
    t = ElementaryTensor((constant_section(bundle, 1j), generator_section(bundle, 1)))
    for x in sample(golden, golden.full(), 100, 6):
        assert abs(inner_product(psi(s), psi(t), x) - tensor_inner_product(s, t, x)) < 1e-12


def test_empty_tensor_is_a_function(bundle, golden):
    f = function_section(bundle, Coordinate(golden))
    t = ElementaryTensor(function=f)
    assert psi(t) is f


def test_level_checks(bundle):
    with pytest.raises(LevelMismatch):
        generator_section(bundle, 0) + function_section(bundle, 1)
    with pytest.raises(LevelMismatch):
        ElementaryTensor((function_section(bundle, 1),))
    with pytest.raises(PreconditionError):
        generator_section(bundle, 5)


def test_orbit_breaking_projection(golden_model):
    b, Y = golden_model.bundle, golden_model.Y
    xi = orbit_breaking_project(generator_section(b, 0), Y, golden_model.width)
    eta = orbit_breaking_project(phase_section(b, 1), Y, golden_model.width)
    assert orbit_breaking_test(ElementaryTensor((xi, eta)), Y)["member"]
    assert orbit_breaking_test(ElementaryTensor((xi,)), Y)["max_residual"] == 0
    raw = ElementaryTensor((phase_section(b, 1),))
    assert not orbit_breaking_test(raw, Y)["member"]
    # projected sections vanish on alpha^{-1}(Y), not on Y itself
    system = golden_model.system
    y = system.point(Fraction(1, 4))
    assert eta.coef(system.apply(y, -1)) == 0
    assert abs(eta.coef(y)) > 0.5


def test_odometer_projection(odometer_model):
    b, Y = odometer_model.bundle, odometer_model.Y
    xi = orbit_breaking_project(constant_section(b, 1), Y)
    assert orbit_breaking_test(ElementaryTensor((xi,)), Y)["max_residual"] == 0
