import random

import numpy as np
import pytest

from orbitrsh.endo import (
    MatrixField,
    band_offset_mass,
    banded_field,
    change_chart,
    chart_change_report,
    classify_structure,
    field_algebra,
    transition_unitary,
)
from orbitrsh.errors import DomainMismatch, SizeMismatch
from orbitrsh.expr import trig_polynomial
from orbitrsh.bundle import tensor_transition
from orbitrsh.dynsys import sample
from orbitrsh.rep import Fn, Gen, function_corpus, generator_corpus, word_field


def overlap_point(b, n, seed=0):
    system = b.system
    for x in sample(system, system.full(), 200, seed):
        tuples = b.tuples_at(x, n)
        if len(tuples) >= 2:
            return x, tuples
    raise AssertionError("no overlap point found")


def test_transition_unitary(golden_model, trivial_model):
    b = golden_model.bundle
    x, (U, V, *_) = overlap_point(b, 3)
    u = transition_unitary(b, x, U, V, 3)
    assert u[0, 0] == 1
    for level in (1, 2):
        assert abs(u[level, level] - tensor_transition(b, level, V, U, x)) < 1e-15
    assert np.allclose(transition_unitary(b, x, U, V, 1), np.eye(1))
    tb = trivial_model.bundle
    x, (U, V, *_) = overlap_point(tb, 3, 1)
    assert np.allclose(transition_unitary(tb, x, U, V, 3), np.eye(3))


def test_change_chart_rules(golden_model):
    b = golden_model.bundle
    x, (U, V, *_) = overlap_point(b, 2)
    D = np.diag([2.0, 3.0j])
    assert np.allclose(change_chart(D, x, U, V, b), D)
    E = np.array([[0, 0], [1, 0]], dtype=complex)
    moved = change_chart(E, x, U, V, b)
    assert band_offset_mass(moved, 1) == 0
    assert abs(moved[1, 0] - tensor_transition(b, 1, V, U, x)) < 1e-15
    M = np.arange(4).reshape(2, 2) + 1j
    assert np.allclose(change_chart(change_chart(M, x, U, V, b), x, V, U, b), M, atol=1e-12)


def test_classification(golden_model):
    rng = random.Random(0)
    f = function_corpus(golden_model, rng, 1)[0]
    xi = generator_corpus(golden_model, rng, 1)[0]
    assert str(classify_structure(word_field(golden_model, Fn(f), 3))) == "Diagonal"
    tau = classify_structure(word_field(golden_model, Gen(xi), 3))
    assert str(tau) == "Subdiagonal(1)" and tau.chart_independent
    assert str(classify_structure(word_field(golden_model, Gen(xi).H, 3))) == "Superdiagonal(1)"
    assert str(classify_structure(word_field(golden_model, Fn(f) + Gen(xi), 3))) == "General"


def test_chart_change_law_on_word_fields(golden_model):
    rng = random.Random(1)
    f = function_corpus(golden_model, rng, 1)[0]
    g = generator_corpus(golden_model, rng, 2)
    field = word_field(golden_model, Gen(g[0]) * Fn(f) * Gen(g[1]) + Gen(g[2]).H * Gen(g[0]), 3)
    report = chart_change_report(field, golden_model.stage_points(3, 200, 2))
    assert report["overlap_points"] > 50
    assert report["chart_change"] < 1e-9 and report["diagonal_invariance"] < 1e-9


def test_field_algebra(golden_model):
    b = golden_model.bundle
    level = golden_model.towers.level(3)
    identity = MatrixField(b, 3, level.base_closure, lambda x, U: np.eye(3), "I")
    assert field_algebra(identity, None, "supnorm") == pytest.approx(1.0)
    system = golden_model.system
    f = trig_polynomial(system, {1: 0.5, -1: 0.25})
    a = banded_field(b, 3, level.base_closure, 1, [f, f])
    aa = field_algebra(a, field_algebra(a, None, "adjoint"), "mul")
    for x in aa.points(20, 0):
        eig = np.linalg.eigvalsh(aa.at(x))
        assert eig.min() > -1e-12
    diag = banded_field(b, 3, level.base_closure, 0, [f, f.shift(system, 1), f.shift(system, 2)])
    points = diag.points(64, 1)
    expected = max(abs(f(system.apply(x, i))) for x in points for i in range(3))
    assert field_algebra(diag, None, "supnorm", samples=64, seed=1) == pytest.approx(expected)
    with pytest.raises(SizeMismatch):
        field_algebra(a, MatrixField(b, 2, level.base_closure, lambda x, U: np.eye(2)), "add")
    other = golden_model.towers.level(2).base_closure
    with pytest.raises(DomainMismatch):
        field_algebra(a, MatrixField(b, 3, other, lambda x, U: np.eye(3)), "add")
