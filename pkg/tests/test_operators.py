import random
from fractions import Fraction

import pytest
from hypothesis import given

from strategies import seeds
from symplinv.bidiff import BidifferentialOperator
from symplinv.classifier import classify, extract_all
from symplinv.fields import PolyTensorField, hamiltonian_field, lie_derivative, poisson
from symplinv.operators import (
    NoSuchComponent,
    UnknownOperator,
    check_invariance,
    dualize,
    field_of_vector,
    field_to_momenta,
    from_bidiff,
    get_operator,
    lie_pairing,
    momenta_to_field,
    poisson_operator,
    ratio_to_schouten,
    with_trivial_slot,
    z_operators,
    z_project,
)
from symplinv.poly import Poly, monomials
from symplinv.sprep import build_irrep, generators


def const_field(fib, vals):
    return PolyTensorField.constant(fib, vals)


def test_z_pairing_of_one_forms():
    W = build_irrep(1, (1,))
    up, down = [w for w in W.weights].index((1,)), [w for w in W.weights].index((-1,))
    e = [[0, 0], [0, 0]]
    e[0][up] = 1
    e[1][down] = 1
    a, b = const_field(W, e[0]), const_field(W, e[1])
    (z,) = z_project(a, b, (0,))
    assert not z.is_zero() and z.components[0].degree() == 0
    assert z_project(a, a, (0,))[0].is_zero()
    assert z_project(b, a, (0,))[0] == z.scale(-1)


def test_z_missing_component():
    W = build_irrep(1, (1,))
    with pytest.raises(NoSuchComponent):
        z_project(const_field(W, [1, 0]), const_field(W, [0, 1]), (3,))


def test_z_cartan_product_is_top_symmetric():
    (Z,) = z_operators(1, (1,), (1,), (2,))
    W = build_irrep(1, (1,))
    rng = random.Random(0)
    for _ in range(3):
        a = PolyTensorField.random(W, rng, 2)
        b = PolyTensorField.random(W, rng, 2)
        assert Z(a, b) == Z(b, a)


@pytest.mark.parametrize("m,lam,mu,nu", [(1, (1,), (2,), (1,)), (2, (1, 0), (1, 0), (1, 1)), (2, (1, 1), (1, 0), (1, 0))])
def test_z_is_fiber_equivariant(m, lam, mu, nu):
    A, B = build_irrep(m, lam), build_irrep(m, mu)
    rng = random.Random(1)
    for Z in z_operators(m, lam, mu, nu):
        a = const_field(A, [rng.randint(-2, 2) for _ in range(A.dim)])
        b = const_field(B, [rng.randint(-2, 2) for _ in range(B.dim)])
        for g in generators(m):
            M = {k: Poly.const(m, v) for k, v in g.matrix(m).items()}
            lhs = Z(a, b).fiber_action(M)
            rhs = Z(a.fiber_action(M), b) + Z(a, b.fiber_action(M))
            assert lhs == rhs


def test_lie_pairing_cases():
    m = 2
    V = build_irrep(m, (1, 0))
    T = build_irrep(m, (1, 1))
    t = const_field(T, [1, 2, 0, -1, 3])
    xi = field_of_vector(V, hamiltonian_field(Poly.parse(m, "x1")))
    assert lie_pairing(xi, t).is_zero()
    H = Poly.parse(m, "x1*y2 + 3*y1^2")
    assert lie_pairing(field_of_vector(V, hamiltonian_field(H)), t) == lie_derivative(hamiltonian_field(H), t)
    T0 = build_irrep(m, (0, 0))
    f = Poly.parse(m, "x1^2*y2 - y1")
    out = lie_pairing(field_of_vector(V, hamiltonian_field(H)), PolyTensorField(m, T0, [f]))
    assert out.components == [poisson(H, f)]
    with pytest.raises(ValueError):
        lie_pairing(t, t)


def random_bidiff(m, lam, mu, nu, order, rng, terms=6):
    A, B, C = build_irrep(m, lam), build_irrep(m, mu), build_irrep(m, nu)
    monos = [e for d in range(order + 1) for e in monomials(2 * m, d)]
    coeffs = {}
    for _ in range(terms):
        key = (rng.randrange(C.dim), ((rng.randrange(A.dim), rng.choice(monos)), (rng.randrange(B.dim), rng.choice(monos))))
        coeffs[key] = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
    return BidifferentialOperator(m, (A, B), C, coeffs)


@given(seeds)
def test_dualize_involution(s):
    rng = random.Random(s)
    B = random_bidiff(1, (1,), (2,), (1,), 2, rng)
    for slot in (1, 2):
        assert dualize(dualize(B, slot), slot) == B


def test_dualize_integration_by_parts():
    T0 = build_irrep(1, (0,))
    dx = (1, 0)
    B = BidifferentialOperator(1, (T0, T0), T0, {(0, ((0, dx), (0, (0, 0)))): 1})
    D = dualize(B, 1)
    # int f_x g eta = -int f (g eta)_x
    expect = {(0, ((0, dx), (0, (0, 0)))): -1, (0, ((0, (0, 0)), (0, dx))): -1}
    assert D == BidifferentialOperator(1, (T0, T0), T0, expect)


def test_dual_of_poisson():
    P = poisson_operator(2)
    assert dualize(P, 1) == P.scale(-1)
    assert dualize(P, 2) == P.scale(-1)


def test_dualize_preserves_invariance():
    res = classify(1, (2,), (2,), (3,), 1)
    (B,) = extract_all(res)
    for slot in (1, 2):
        assert check_invariance(from_bidiff(dualize(B, slot)), trials=2, seed=3, max_h_degree=3,
                                input_degree=2).passed


def test_extracted_first_order_is_schouten_multiple():
    (B,) = extract_all(classify(1, (2,), (2,), (3,), 1))
    assert ratio_to_schouten(B) == Fraction(1, 2)


@given(seeds)
def test_momenta_round_trip(s):
    fib = build_irrep(2, (2, 0))
    f = PolyTensorField.random(fib, random.Random(s), 2)
    assert momenta_to_field(field_to_momenta(f), 2) == f


def test_bidiff_json_round_trip():
    B = random_bidiff(2, (1, 0), (1, 0), (1, 1), 1, random.Random(7))
    assert BidifferentialOperator.from_json(B.to_json()) == B
    assert B.normalized().ratio_to(B) is not None


@pytest.mark.parametrize("name,kw", [
    ("poisson", {}), ("lie", {"lam": "1"}), ("schouten", {"k": 2, "l": 1}), ("z:0", {"lam": "1", "mu": "1"}),
])
def test_registry_operators_pass(name, kw):
    op = get_operator(name, 1, **kw)
    rep = check_invariance(op, trials=3, seed=5, max_h_degree=4, input_degree=2)
    assert rep.passed, rep.residuals


@pytest.mark.parametrize("name,degree", [("dplus", 0), ("dplus", 1), ("dminus", 1), ("dminus", 2), ("d2", 1)])
def test_unary_forms_with_trivial_slot(name, degree):
    op = with_trivial_slot(get_operator(name, 2, degree=degree))
    assert check_invariance(op, trials=2, seed=2, max_h_degree=3, input_degree=2).passed


def test_checker_detects_perturbation():
    T0 = build_irrep(1, (0,))
    P = poisson_operator(1)
    bad = P + BidifferentialOperator(1, (T0, T0), T0, {(0, ((0, (1, 0)), (0, (1, 0)))): 1})
    assert not check_invariance(from_bidiff(bad), trials=3, seed=0).passed


def test_grid_mode_and_report():
    rep = check_invariance(get_operator("poisson", 1), max_h_degree=3, input_degree=1, mode="grid")
    assert rep.passed and rep.mode == "grid"
    d = rep.to_json()
    assert d["schema"] == "symplinv-invariance/1" and d["verdict"] == "pass"
    assert d["conventions"]["version"] == "symplinv-conventions/1"


def test_reports_deterministic_and_parallel_equal():
    op = get_operator("poisson", 2)
    a = check_invariance(op, trials=4, seed=11, jobs=1).to_json()
    b = check_invariance(op, trials=4, seed=11, jobs=2).to_json()
    assert a == b


def test_registry_errors():
    with pytest.raises(UnknownOperator):
        get_operator("nope", 1)
    with pytest.raises(ValueError):
        get_operator("gz", 2)
    with pytest.raises(ValueError):
        get_operator("dplus", 2, degree=2)
    with pytest.raises(ValueError):
        get_operator("z:3", 1, lam="1", mu="1")
