from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from symplinv.exact import (
    SparseMatrix,
    SpanTracker,
    dense_inverse,
    format_rational,
    parse_rational,
    rank,
    solve_in_span,
    sparse_kernel,
)


def proportional(v, target):
    """v (sparse dict) is a nonzero multiple of the dense list target."""
    dense = [v.get(i, Fraction(0)) for i in range(len(target))]
    k = next(i for i, t in enumerate(target) if t)
    if not dense[k]:
        return False
    s = dense[k] / target[k]
    return all(d == s * t for d, t in zip(dense, target))


def test_kernel_rank_one():
    ker = sparse_kernel(SparseMatrix.from_dense([[1, 2], [2, 4]]))
    assert len(ker) == 1 and proportional(ker[0], [-2, 1])


def test_kernel_identity_empty():
    assert sparse_kernel(SparseMatrix.identity(3)) == []


def test_kernel_dependent_rows():
    ker = sparse_kernel(SparseMatrix.from_dense([[1, 1, 0], [0, 1, 1], [1, 2, 1]]))
    assert len(ker) == 1 and proportional(ker[0], [1, -1, 1])


@pytest.mark.parametrize("rows,expected", [
    ([[0, 0], [0, 0]], 0),
    ([[1, 0, 0], [0, 1, 0], [0, 0, 1]], 3),
    ([[1, 2], [2, 4]], 1),
])
def test_rank_examples(rows, expected):
    assert rank(SparseMatrix.from_dense(rows)) == expected


def test_no_stored_zeros():
    M = SparseMatrix.from_dense([[0, 1], [2, 0]])
    assert all(v != 0 for v in M.entries.values())
    assert len((M - M).entries) == 0


def test_rational_strings_round_trip():
    for x in [Fraction(0), Fraction(5), Fraction(-3, 7), Fraction(10 ** 30 + 1, 3)]:
        assert parse_rational(format_rational(x)) == x
    assert format_rational(Fraction(4, 2)) == "2"
    with pytest.raises(ValueError):
        parse_rational("1/0")


matrices = st.integers(1, 6).flatmap(lambda r: st.integers(1, 6).flatmap(
    lambda c: st.lists(st.lists(st.integers(-3, 3), min_size=c, max_size=c), min_size=r, max_size=r)))


@given(matrices)
def test_kernel_against_sympy(rows):
    M = SparseMatrix.from_dense(rows)
    ker = sparse_kernel(M)
    S = sympy.Matrix(rows)
    assert rank(M) == S.rank()
    assert rank(M) + len(ker) == M.cols
    for v in ker:
        assert M.apply(v) == {}
    # reduced echelon normalization: each vector has a distinct free column with coefficient 1
    free = [max(v) for v in ker]
    assert len(set(free)) == len(free)
    assert all(v[f] == 1 for v, f in zip(ker, free))
    for v in ker:
        assert all(w.get(max(v), 0) == (1 if w is v else 0) for w in ker)


@given(matrices)
def test_kernel_deterministic_under_row_order(rows):
    a = sparse_kernel(SparseMatrix.from_dense(rows))
    b = sparse_kernel(SparseMatrix.from_dense(list(reversed(rows))))
    assert a == b


@given(st.lists(st.lists(st.integers(-4, 4), min_size=3, max_size=3), min_size=3, max_size=3))
def test_dense_inverse_against_sympy(rows):
    S = sympy.Matrix(rows)
    if S.det() == 0:
        return
    inv = dense_inverse(rows)
    Si = S.inv()
    assert all(inv[i][j] == Fraction(int(Si[i, j].p), int(Si[i, j].q)) for i in range(3) for j in range(3))


def test_solve_in_span_and_tracker():
    basis = [{"a": 1, "b": 1}, {"b": 1, "c": 2}]
    assert solve_in_span(basis, {"a": 2, "b": 5, "c": 6}) == [2, 3]
    assert solve_in_span(basis, {"c": 1}) is None
    t = SpanTracker()
    assert t.add({"a": Fraction(1)}) and not t.add({"a": Fraction(3)})
    assert t.contains({"a": Fraction(-1, 2)}) and not t.contains({"b": Fraction(1)})
