import random
from fractions import Fraction

import pytest
from hypothesis import given

from strategies import seeds
from symplinv.classifier import (
    IModulePiece,
    SymbolVector,
    act_singularity,
    build_imodule_piece,
    classify,
    classify_unary,
    extract_all,
    degree1_reduction,
    result_from_json,
    verify_p8_example,
    verify_singular,
)
from symplinv.operators import check_invariance, from_bidiff, poisson_operator, ratio_to_gz
from symplinv.sprep import ResourceError, bracket_coords, build_irrep, decompose_tensor, generators


@pytest.mark.parametrize("m,lam,k,dim", [(1, (0,), 1, 2), (1, (0,), 0, 1), (2, (1, 0), 1, 16), (2, (1, 1), 2, 50)])
def test_imodule_piece_dims(m, lam, k, dim):
    assert build_imodule_piece(m, lam, k).dim == dim


def test_imodule_piece_cap():
    with pytest.raises(ResourceError):
        build_imodule_piece(2, (1, 1), 3, cap=10)


def test_symbols_transform_as_standard_rep():
    # I((0))_1 is spanned by the two symbols, and the sp-action is that of W
    piece = IModulePiece(build_irrep(1, (0,)), 1)
    W = build_irrep(1, (1,))
    assert sorted(piece.weight(k) for k in piece.basis) == sorted(W.weights)


def matmul(a, b):
    out = {}
    for (r, k), x in a.items():
        for (k2, c), y in b.items():
            if k == k2:
                out[r, c] = out.get((r, c), 0) + x * y
    return {k: v for k, v in out.items() if v}


@pytest.mark.parametrize("m,lam,k", [(1, (1,), 2), (2, (1, 0), 1)])
def test_imodule_commutation(m, lam, k):
    piece = IModulePiece(build_irrep(m, lam), k)
    mats = {g: piece.matrix(g) for g in generators(m)}
    for a in generators(m)[:6]:
        for b in generators(m):
            ab, ba = matmul(mats[a], mats[b]), matmul(mats[b], mats[a])
            lhs = {key: ab.get(key, 0) - ba.get(key, 0) for key in set(ab) | set(ba)}
            rhs = {}
            for g, c in bracket_coords(m, a, b).items():
                for key, v in mats[g].items():
                    rhs[key] = rhs.get(key, 0) + c * v
            assert {x: y for x, y in lhs.items() if y} == {x: y for x, y in rhs.items() if y}


def degree1_keys(reps):
    keys = []
    for a, b in [(1, 0), (0, 1)]:
        for k1 in IModulePiece(reps[0], a).basis:
            for k2 in IModulePiece(reps[1], b).basis:
                keys.append(k1 + k2)
    return keys


TRIPLES = [(1, (1,), (2,)), (2, (1, 0), (1, 1)), (2, (2, 1), (1, 0))]


@pytest.mark.parametrize("m,lam,mu", TRIPLES)
@given(seeds)
def test_singularity_degree1_matches_displayed_equation(m, lam, mu, s):
    reps = (build_irrep(m, lam), build_irrep(m, mu))
    keys = degree1_keys(reps)
    rng = random.Random(s)
    w = SymbolVector(reps, 1, {k: Fraction(rng.randint(-3, 3)) for k in rng.sample(keys, min(10, len(keys)))})
    w.coords = {k: v for k, v in w.coords.items() if v}
    red = degree1_reduction(w)
    assert act_singularity(w).coords == {k: 2 * v for k, v in red.items()}


def test_singularity_degree0_is_zero():
    reps = (build_irrep(2, (1, 0)), build_irrep(2, (1, 1)))
    z = (0, 0, 0, 0)
    w = SymbolVector(reps, 0, {(z, i, z, j): Fraction(i + j + 1) for i in range(4) for j in range(5)})
    assert act_singularity(w).is_zero()


@given(seeds)
def test_singularity_leibniz(s):
    rng = random.Random(s)
    reps = (build_irrep(1, (1,)), build_irrep(1, (2,)))
    p1, p2 = IModulePiece(reps[0], 2), IModulePiece(reps[1], 1)
    w1 = {k: Fraction(rng.randint(-3, 3)) for k in rng.sample(p1.basis, 3)}
    w2 = {k: Fraction(rng.randint(-3, 3)) for k in rng.sample(p2.basis, 3)}
    pure = {a + b: x * y for a, x in w1.items() for b, y in w2.items() if x * y}
    total = act_singularity(SymbolVector(reps, 3, pure)).coords
    left = act_singularity(SymbolVector(reps[:1], 2, {a: x for a, x in w1.items() if x})).coords
    right = act_singularity(SymbolVector(reps[1:], 1, {b: y for b, y in w2.items() if y})).coords
    split = {}
    for a, x in left.items():
        for b, y in w2.items():
            split[a + b] = split.get(a + b, 0) + x * y
    for a, x in w1.items():
        for b, y in right.items():
            split[a + b] = split.get(a + b, 0) + x * y
    assert total == {k: v for k, v in split.items() if v}


@pytest.mark.parametrize("m,lam,mu,nu,d,dim", [
    (1, (1,), (1,), (4,), 1, 0),
    (1, (2,), (2,), (3,), 1, 1),
    (2, (1, 0), (1, 0), (0, 0), 0, 1),
    (2, (2, 1), (2, 1), (2, 1), 1, 2),
    (1, (0,), (0,), (0,), 2, 1),
    (1, (2,), (2,), (2,), 2, 1),
])
def test_classify_examples(m, lam, mu, nu, d, dim):
    res = classify(m, lam, mu, nu, d)
    assert res.dimension == dim
    reps = tuple(build_irrep(m, w) for w in (lam, mu))
    assert all(verify_singular(reps, nu, v) for v in res.basis)


@pytest.mark.parametrize("lam,nu,d,dim", [
    ((1, 0), (1, 1), 1, 1), ((1, 1), (1, 0), 1, 1), ((1, 0), (1, 0), 2, 1), ((0, 0), (0, 0), 1, 0),
])
def test_classify_unary_examples(lam, nu, d, dim):
    assert classify_unary(2, lam, nu, d).dimension == dim


@pytest.mark.parametrize("m", [1, 2])
def test_degree0_equals_multiplicities(m):
    from symplinv.sprep import dominant_weights
    ws = dominant_weights(m, 2)
    for lam in ws:
        for mu in ws:
            mult = decompose_tensor(m, lam, mu)
            for nu in ws:
                assert classify(m, lam, mu, nu, 0).dimension == mult.get(nu, 0)


def test_extended_mode_agrees():
    for args in [(1, (2,), (2,), (3,), 1), (1, (2,), (2,), (2,), 2), (2, (1, 0), (1, 0), (1, 1), 1)]:
        res = classify(*args, extended=True)
        assert res.extended_checked and res.dimension == classify(*args).dimension


def test_extract_poisson():
    (B,) = extract_all(classify(1, (0,), (0,), (0,), 2))
    assert B.ratio_to(poisson_operator(1)) is not None
    assert B.order == (1, 1)


def test_extract_gz_up_to_scale():
    (B,) = extract_all(classify(1, (2,), (2,), (2,), 2))
    assert ratio_to_gz(B) is not None


@pytest.mark.parametrize("m,lam,mu,nu,d", [(1, (1,), (1,), (2,), 2), (2, (1, 0), (1, 1), (0, 0), 1), (2, (1, 0), (0, 0), (1, 1), 1)])
def test_extract_round_trip_invariance(m, lam, mu, nu, d):
    res = classify(m, lam, mu, nu, d)
    assert res.dimension >= 1
    for B in extract_all(res):
        assert B.total_order == d
        assert check_invariance(from_bidiff(B), trials=2, seed=0, max_h_degree=3, input_degree=d).passed


def test_result_json_round_trip():
    res = classify(1, (2,), (2,), (3,), 1)
    data = res.to_json()
    assert data["schema"] == "symplinv-classify/1" and data["conventions"] == "symplinv-conventions/1"
    back = result_from_json(data)
    assert back.basis == res.basis and back.dimension == res.dimension
    assert "seconds" not in data and "seconds" in res.to_json(timing=True)


def test_classify_cap():
    with pytest.raises(ResourceError):
        classify(2, (2, 1), (2, 1), (2, 1), 1, cap=5)


def test_p8_example():
    rep = verify_p8_example(2, (1, 0), 1)
    assert rep["dimension"] >= 1
    assert rep["seed"]["weight_ok"]
    assert rep["readings"]["B"]["in_kernel"]
    assert not rep["readings"]["A"]["in_kernel"] and rep["readings"]["A"]["diff"]


def test_p8_preconditions():
    with pytest.raises(ValueError):
        verify_p8_example(1, (1,), 1)
    with pytest.raises(ValueError):
        verify_p8_example(2, (1, 1), 2)


def test_metric_operator_at_m2_is_invariant():
    # the m = 2 analogue of the second-order metric operator; its kernel is 1-dimensional
    res = classify(2, (2, 0), (2, 0), (2, 0), 2)
    assert res.dimension == 1
    (B,) = extract_all(res)
    assert check_invariance(from_bidiff(B), trials=2, seed=1, max_h_degree=3, input_degree=2).passed
