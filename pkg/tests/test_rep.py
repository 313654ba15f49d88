import random
from fractions import Fraction

import numpy as np
import pytest

from orbitrsh.endo import banded_field, classify_structure
from orbitrsh.errors import (
    InhomogeneousWord,
    PreconditionError,
    StructureMismatch,
    VanishingPreconditionViolated,
)
from orbitrsh.expr import Const, Coordinate, Cutoff, trig_polynomial
from orbitrsh.rep import (
    Fn,
    Gen,
    Product,
    assemble_rsh,
    boundary_decomposition_check,
    covariance_suite,
    evaluate_word,
    function_corpus,
    gauge_check,
    generator_corpus,
    injectivity_witness,
    lift_round_trip,
    lift_section,
    pi_eval,
    random_word,
    tau_eval,
)
from orbitrsh.sections import constant_section, function_section, orbit_breaking_cutoff, orbit_breaking_project


def test_pi_eval_examples(golden_model):
    system = golden_model.system
    b = golden_model.bundle
    x = system.point(Fraction(1, 10))
    U = golden_model.tuple_for(x, 2)
    assert np.allclose(pi_eval(function_section(b, 1), x, 2, U, golden_model), np.eye(2))
    M = pi_eval(function_section(b, Coordinate(system)), x, 2, U, golden_model)
    assert M[0, 0] == pytest.approx(0.1)
    assert M[1, 1] == pytest.approx((0.1 + system.theta) % 1)
    with pytest.raises(PreconditionError):
        pi_eval(function_section(b, 1), system.point(Fraction(3, 4)), 2, U, golden_model)


def test_tau_eval_examples(trivial_model):
    system = trivial_model.system
    b = trivial_model.bundle
    c = 0.7 - 0.2j
    xi = orbit_breaking_project(constant_section(b, c), trivial_model.Y, trivial_model.width)
    x = system.point(Fraction(1, 10))
    M = tau_eval(xi, x, 2, trivial_model.tuple_for(x, 2), trivial_model)
    cutoff = orbit_breaking_cutoff(system, trivial_model.Y, trivial_model.width)
    expected = np.array([[0, 0], [c * cutoff(system.apply(x, 1)), 0]])
    assert np.allclose(M, expected, atol=1e-15)
    y = system.point(Fraction(2, 5))
    assert tau_eval(xi, y, 1, trivial_model.tuple_for(y, 1), trivial_model).tolist() == [[0]]


def test_nilpotency(golden_model):
    rng = random.Random(3)
    xi = generator_corpus(golden_model, rng, 1)[-1]
    x = golden_model.stage_points(3, 1, 0)[0]
    U = golden_model.tuple_for(x, 3)
    assert np.all(evaluate_word(Product((Gen(xi),) * 3), x, 3, U, golden_model) == 0)
    assert np.any(evaluate_word(Product((Gen(xi),) * 2), x, 3, U, golden_model) != 0)


def test_covariance_trivial_and_zero(trivial_model):
    b = trivial_model.bundle
    xi = orbit_breaking_project(constant_section(b, 1 + 1j), trivial_model.Y, trivial_model.width)
    eta = orbit_breaking_project(constant_section(b, 0.5), trivial_model.Y, trivial_model.width)
    f = function_section(b, trig_polynomial(trivial_model.system, {1: 1, 0: 0.5}))
    assert covariance_suite(trivial_model, xi, eta, f, samples=50)["max"] < 1e-9
    zero = constant_section(b, 0)
    res = covariance_suite(trivial_model, zero, zero, f, samples=10)
    assert res["max"] == 0


def test_gauge_examples(golden_model):
    rng = random.Random(4)
    f = function_corpus(golden_model, rng, 1)[0]
    xi = generator_corpus(golden_model, rng, 1)[0]
    x = golden_model.stage_points(2, 1, 0)[0]
    U = golden_model.tuple_for(x, 2)
    assert gauge_check(Gen(xi), 1, x, 2, U, golden_model) == 0
    assert gauge_check(Fn(f), 0.6 + 0.8j, x, 2, U, golden_model) < 1e-12
    assert gauge_check(Gen(xi), 1j, x, 2, U, golden_model) < 1e-9
    with pytest.raises(InhomogeneousWord):
        gauge_check(Fn(f) + Gen(xi), 1j, x, 2, U, golden_model)


def test_injectivity_witness(golden_model):
    system = golden_model.system
    b = golden_model.bundle
    assert injectivity_witness(function_section(b, 0), golden_model)["is_zero"]
    one = injectivity_witness(function_section(b, 1), golden_model)
    assert not one["is_zero"] and one["value"] == 1
    # thin bump inside alpha^2(Y_3)
    top = system.region_map(golden_model.towers.level(3).base_closure, 2)
    (arc,) = top.arcs()
    mid = (arc.a + arc.b) // 2
    bump = system.arc(Fraction(mid - (1 << 120), system.modulus), Fraction(mid + (1 << 120), system.modulus))
    f = function_section(b, Const(1) - Cutoff(bump, 0.001))
    found = injectivity_witness(f, golden_model, samples=4000)
    assert not found["is_zero"]
    k, y, i = found["witness"]
    assert (k, i) == (3, 2)
    assert abs(found["value"]) > 0


def test_bdp_examples(golden_model):
    system = golden_model.system
    rng = random.Random(5)
    f = function_corpus(golden_model, rng, 1)[0]
    xi = generator_corpus(golden_model, rng, 1)[0]
    x = system.modulus - system.theta_ticks
    res = boundary_decomposition_check(Fn(f), golden_model, 3, x)
    assert res.itinerary.mu == (1, 2)
    assert res.residual < 1e-9
    res = boundary_decomposition_check(Gen(xi), golden_model, 3, x)
    assert res.residual < 1e-9
    M = evaluate_word(Gen(xi), x, 3, golden_model.tuple_for(x, 3), golden_model)
    assert M[1, 0] == 0 and M[2, 1] != 0
    inner = golden_model.stage_points(3, 1, 0)[0]
    single = boundary_decomposition_check(Gen(xi), golden_model, 3, inner)
    assert single.itinerary.mu == (3,) and single.residual == 0


def test_lift_diagonal_recovers_function(golden_model):
    system = golden_model.system
    f = trig_polynomial(system, {1: 0.4, 0: 0.1j})
    level = golden_model.towers.level(1)
    target = banded_field(golden_model.bundle, 1, level.base_closure, 0, [f])
    w = lift_section(golden_model, 1, target, 0)
    for x in golden_model.stage_points(1, 20, 1):
        assert abs(evaluate_word(w, x, 1, golden_model.tuple_for(x, 1), golden_model)[0, 0] - f(x)) < 1e-9


def test_lift_subdiagonal_round_trip(golden_model):
    system = golden_model.system
    level = golden_model.towers.level(3)
    profiles = [trig_polynomial(system, {1: 0.3, -2: 0.2j}) * Cutoff(level.glue_boundary, 0.03) for _ in range(2)]
    target = banded_field(golden_model.bundle, 3, level.base_closure, 1, profiles)
    assert str(classify_structure(target)) == "Subdiagonal(1)"
    w = lift_section(golden_model, 3, target, 1)
    res = lift_round_trip(golden_model, 3, target, w, samples=20)
    assert res["reproduction"] < 1e-9 and res["earlier_stages"] < 1e-9


def test_lift_rejections(golden_model):
    system = golden_model.system
    level = golden_model.towers.level(3)
    f = trig_polynomial(system, {1: 0.3})
    not_vanishing = banded_field(golden_model.bundle, 3, level.base_closure, 1, [f, f])
    with pytest.raises(VanishingPreconditionViolated):
        lift_section(golden_model, 3, not_vanishing, 1)
    with pytest.raises(StructureMismatch):
        lift_section(golden_model, 2, not_vanishing, 1)
    with pytest.raises(StructureMismatch):
        lift_section(golden_model, 3, not_vanishing, 0)
    zero = banded_field(golden_model.bundle, 3, level.base_closure, 0, [Const(0)] * 3)
    w = lift_section(golden_model, 3, zero, 0)
    x = golden_model.stage_points(3, 1, 0)[0]
    assert np.all(evaluate_word(w, x, 3, golden_model.tuple_for(x, 3), golden_model) == 0)


def test_rsh_shapes(golden_model, trivial_model, odometer_model):
    rng = random.Random(6)
    words = [random_word(rng, function_corpus(golden_model, rng, 2), generator_corpus(golden_model, rng, 2)) for _ in range(5)]
    rsh = assemble_rsh(golden_model, words)
    assert rsh.matrix_sizes == (1, 2, 3) and rsh.length == 3
    assert rsh.max_pullback_residual < 1e-9
    triv = assemble_rsh(trivial_model, words[:1])
    assert triv.matrix_sizes == rsh.matrix_sizes
    assert [s.base for s in triv.stages] == [s.base for s in rsh.stages]
    odo = assemble_rsh(odometer_model, [Fn(function_section(odometer_model.bundle, 1))])
    assert odo.matrix_sizes == (2,) and odo.stages[0].glue_boundary.is_empty()
