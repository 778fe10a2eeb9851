import random

import pytest
from hypothesis import given, settings

from strategies import rpoly, seeds
from symplinv.fields import hamiltonian_field
from symplinv.forms import (
    DifferentialForm,
    UnsupportedDegree,
    contraction,
    d_minus,
    d_plus,
    d_two,
    exterior_d,
    is_primitive,
    lefschetz_project,
    lefschetz_reconstruct,
    lie_derivative_form,
    omega,
    primitive_dim,
    random_form,
    random_primitive,
)
from symplinv.poly import Poly, random_poly


def P(m, s):
    return Poly.parse(m, s)


def F(m, deg, d):
    return DifferentialForm(m, deg, {k: P(m, v) if isinstance(v, str) else v for k, v in d.items()})


# m=2 index order: x1=0, x2=1, y1=2, y2=3


def test_exterior_d_examples():
    assert exterior_d(DifferentialForm.function(P(1, "x1"))) == F(1, 1, {(0,): "1"})
    assert exterior_d(F(1, 1, {(0,): "y1"})) == F(1, 2, {(0, 1): "-1"})


@given(seeds)
def test_dd_zero(s):
    rng = random.Random(s)
    for p in range(3):
        a = random_form(2, p, rng, 3)
        assert exterior_d(exterior_d(a)).is_zero()


def test_lambda_normalization():
    assert contraction(omega(2)) == DifferentialForm(2, 0, {(): Poly.const(2, 2)})
    assert contraction(omega(3)) == DifferentialForm(3, 0, {(): Poly.const(3, 3)})


def test_lefschetz_examples():
    a = F(2, 2, {(0, 2): "1"})
    prim, coef = lefschetz_project(a)
    assert prim == a - omega(2).scale(P(2, "1/2"))
    assert coef == DifferentialForm(2, 0, {(): P(2, "1/2")})
    prim, coef = lefschetz_project(omega(2))
    assert prim.is_zero() and coef == DifferentialForm(2, 0, {(): P(2, "1")})


@given(seeds)
def test_lefschetz_idempotent_on_primitives(s):
    b = random_primitive(2, 2, random.Random(s), 2)
    parts = lefschetz_project(b)
    assert parts[0] == b and all(x.is_zero() for x in parts[1:])


def test_fiber_dimensions():
    assert primitive_dim(2, 2) + primitive_dim(2, 0) == 6
    assert (primitive_dim(2, 2), primitive_dim(2, 1), primitive_dim(3, 3)) == (5, 4, 14)


@given(seeds)
def test_lefschetz_reconstruction(s):
    rng = random.Random(s)
    for m, p in [(2, 2), (2, 3), (3, 3), (3, 2)]:
        a = random_form(m, p, rng, 2, 0.3)
        parts = lefschetz_project(a)
        assert len(parts) == p // 2 + 1
        assert all(is_primitive(b) for b in parts)
        assert lefschetz_reconstruct(parts) == a


def test_d_plus_on_functions():
    f = P(2, "x1^2*y2 + 3*y1")
    assert d_plus(DifferentialForm.function(f)) == exterior_d(DifferentialForm.function(f))


def test_d_minus_example():
    assert d_minus(F(2, 1, {(0,): "y1"})) == DifferentialForm(2, 0, {(): P(2, "-1/2")})


@given(rpoly(1, 4))
def test_d_two_m1_by_hand(f):
    # d(f dx) = -f_y dx^dy = -f_y omega, so d_minus = -f_y and d_two = -f_xy dx - f_yy dy
    out = d_two(DifferentialForm(1, 1, {(0,): f}))
    assert out == DifferentialForm(1, 1, {(0,): -f.diff(0).diff(1), (1,): -f.diff(1).diff(1)})


@given(seeds)
def test_d_plus_d_plus_primitive(s):
    f = random_poly(2, 4, random.Random(s))
    out = d_plus(d_plus(DifferentialForm.function(f)))
    assert out.degree == 2 and contraction(out).is_zero()


@settings(max_examples=15)
@given(seeds)
def test_d_two_is_composition(s):
    rng = random.Random(s)
    for p in (1, 2):
        b = random_primitive(2, p, rng, 3)
        assert d_two(b) == d_plus(d_minus(b))


def test_d_two_constant_coefficients():
    b = random_primitive(2, 1, random.Random(0), 0, 1.0)
    assert d_two(b).is_zero()


@settings(max_examples=10)
@given(seeds)
def test_d_plus_minus_commute_with_lie(s):
    rng = random.Random(s)
    m = 2
    X = hamiltonian_field(random_poly(m, 4, rng, 0.3, min_deg=1))
    for p in (0, 1):
        b = random_primitive(m, p, rng, 2)
        assert lie_derivative_form(X, d_plus(b)) == d_plus(lie_derivative_form(X, b))
    for p in (1, 2):
        b = random_primitive(m, p, rng, 2)
        assert lie_derivative_form(X, d_minus(b)) == d_minus(lie_derivative_form(X, b))


def test_preconditions():
    with pytest.raises(ValueError):
        d_plus(F(2, 2, {(0, 2): "1"}))
    with pytest.raises(UnsupportedDegree):
        d_plus(random_primitive(2, 2, random.Random(1), 1))
    with pytest.raises(UnsupportedDegree):
        d_minus(DifferentialForm.function(P(2, "x1")))


def test_form_json_round_trip():
    a = random_form(2, 2, random.Random(5), 2)
    assert DifferentialForm.from_json(a.to_json()) == a
