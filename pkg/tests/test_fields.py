import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import poisson_ref
from strategies import rpoly, seeds
from symplinv.fields import (
    PolyTensorField,
    hamiltonian_field,
    lie_derivative,
    lie_derivative_momenta,
    momenta_degree,
    poisson,
    random_momenta_poly,
    schouten,
)
from symplinv.poly import Poly, random_poly
from symplinv.sprep import build_irrep


def P(m, s, nvars=None):
    return Poly.parse(m, s, nvars)


def test_poisson_examples():
    assert poisson(P(1, "x1"), P(1, "y1")) == P(1, "1")
    assert poisson(P(1, "x1^2"), P(1, "x1*y1")) == P(1, "2*x1^2")
    assert poisson(P(2, "x2"), P(2, "y1")).is_zero()


@given(rpoly(2), rpoly(2))
def test_poisson_matches_sympy(f, g):
    assert poisson(f, g) == poisson_ref(f, g)


@given(rpoly(2), rpoly(2), rpoly(2))
def test_poisson_algebra(f, g, h):
    assert (poisson(f, g) + poisson(g, f)).is_zero()
    assert (poisson(f, poisson(g, h)) + poisson(g, poisson(h, f)) + poisson(h, poisson(f, g))).is_zero()
    assert poisson(f, g * h) == poisson(f, g) * h + g * poisson(f, h)
    assert poisson(f * 3 + g, h) == poisson(f, h) * 3 + poisson(g, h)


def test_poisson_rank_mismatch():
    with pytest.raises(ValueError):
        poisson(P(1, "x1"), P(2, "x1"))


def test_hamiltonian_field_examples():
    X = hamiltonian_field(P(1, "x1^3"))
    assert X.components == [Poly(1), P(1, "3*x1^2")]
    X = hamiltonian_field(P(1, "x1*y1"))
    assert X.components == [P(1, "-x1"), P(1, "y1")]
    assert hamiltonian_field(P(2, "7")).is_zero()


@given(rpoly(2, 4), rpoly(2))
def test_hamiltonian_field_is_bracket(H, g):
    assert hamiltonian_field(H)(g) == poisson(H, g)


def test_lie_derivative_constant_field_kills_constants():
    fib = build_irrep(2, (1, 1))
    t = PolyTensorField.constant(fib, [1, -2, 3, 0, 5])
    assert lie_derivative(hamiltonian_field(P(2, "x1")), t).is_zero()


@given(seeds, seeds)
def test_lie_derivative_quadratic_is_fiber_action(sh, st_):
    m = 2
    fib = build_irrep(m, (2, 1))
    H = random_poly(m, 2, random.Random(sh), 0.6, min_deg=2)
    rng = random.Random(st_)
    vals = [rng.randint(-3, 3) for _ in range(fib.dim)]
    t = PolyTensorField.constant(fib, vals)
    J = {k: v.eval_at_zero() for k, v in hamiltonian_field(H).jacobian_w().items()}
    rhoJ = fib.rho(J).apply({i: Fraction(v) for i, v in enumerate(vals) if v})
    expect = PolyTensorField.constant(fib, [-rhoJ.get(i, 0) for i in range(fib.dim)])
    assert lie_derivative(hamiltonian_field(H), t) == expect


@given(rpoly(2, 4, min_deg=1), rpoly(2))
def test_lie_derivative_on_functions(H, f):
    fib = build_irrep(2, (0, 0))
    t = PolyTensorField(2, fib, [f])
    assert lie_derivative(hamiltonian_field(H), t).components == [poisson(H, f)]


@pytest.mark.parametrize("lam", [(1, 0), (1, 1), (2, 0)])
@settings(max_examples=8)
@given(seeds)
def test_lie_derivative_is_action(lam, s):
    rng = random.Random(s)
    m = 2
    fib = build_irrep(m, lam)
    H1 = random_poly(m, 4, rng, 0.3, min_deg=1)
    H2 = random_poly(m, 4, rng, 0.3, min_deg=1)
    t = PolyTensorField.random(fib, rng, 2)
    X1, X2 = hamiltonian_field(H1), hamiltonian_field(H2)
    lhs = lie_derivative(X1, lie_derivative(X2, t)) - lie_derivative(X2, lie_derivative(X1, t))
    assert lhs == lie_derivative(hamiltonian_field(poisson(H1, H2)), t)


def test_tensor_field_json_round_trip():
    fib = build_irrep(2, (1, 0))
    t = PolyTensorField.random(fib, random.Random(3), 3)
    assert PolyTensorField.loads(t.dumps()) == t
    with pytest.raises(ValueError):
        PolyTensorField.from_json({"m": 2, "weight": [1, 0], "components": []})


def test_schouten_vector_field_case():
    m = 1
    assert schouten(P(m, "px1", 4), P(m, "x1*py1", 4)) == P(m, "py1", 4)


@given(seeds, st.integers(1, 3), st.integers(1, 3))
def test_schouten_degree_and_jacobi(s, k, l):
    rng = random.Random(s)
    a = random_momenta_poly(1, k, rng, 2)
    b = random_momenta_poly(1, l, rng, 2)
    c = random_momenta_poly(1, 1, rng, 2)
    ab = schouten(a, b)
    if not ab.is_zero():
        assert momenta_degree(ab) == k + l - 1
    jac = schouten(a, schouten(b, c)) + schouten(b, schouten(c, a)) + schouten(c, schouten(a, b))
    assert jac.is_zero()


@given(rpoly(1, 3, min_deg=1), seeds)
def test_momenta_lie_derivative_of_vector_fields(H, s):
    # on S^1 (vector fields) the Lie derivative is the commutator
    rng = random.Random(s)
    X = hamiltonian_field(H)
    Y = [random_poly(1, 2, rng) for _ in range(2)]
    from symplinv.fields import VectorField, momentum_function
    Yv = VectorField(1, Y)
    assert lie_derivative_momenta(X, momentum_function(Yv)) == momentum_function(X.bracket(Yv))
