"""
Exact rational arithmetic and sparse linear algebra over Q.

Scalars are :class:`fractions.Fraction`. Matrices are stored as a dict of
nonzero entries; elimination runs on row dicts and always finishes in
reduced row echelon form, which is unique for a fixed column order, so the
kernel basis does not depend on the order in which rows were fed in.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

Rational = Fraction
SparseVec = Dict[int, Fraction]


def Q(x) -> Fraction:
    """Coerce ints, strings ("p/q") and Fractions to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return parse_rational(x)
    return Fraction(x)


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return "%d/%d" % (x.numerator, x.denominator)


def parse_rational(s: str) -> Fraction:
    s = s.strip()
    if "/" in s:
        p, q = s.split("/")
        if int(q) <= 0:
            raise ValueError("denominator must be positive: %r" % s)
        return Fraction(int(p), int(q))
    return Fraction(int(s))


class SparseMatrix:
    """A rows x cols matrix over Q with only nonzero entries stored."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Mapping[Tuple[int, int], object] = ()):
        if rows < 0 or cols < 0:
            raise ValueError("negative dimension")
        self.rows = rows
        self.cols = cols
        self.entries: Dict[Tuple[int, int], Fraction] = {}
        items = entries.items() if isinstance(entries, Mapping) else entries
        for (i, j), v in items:
            if not (0 <= i < rows and 0 <= j < cols):
                raise IndexError("entry (%d, %d) outside %dx%d" % (i, j, rows, cols))
            v = Q(v)
            if v:
                self.entries[i, j] = v

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence[object]]) -> "SparseMatrix":
        nr = len(rows)
        nc = len(rows[0]) if nr else 0
        ent = {}
        for i, row in enumerate(rows):
            if len(row) != nc:
                raise ValueError("ragged rows")
            for j, v in enumerate(row):
                if v:
                    ent[i, j] = v
        return cls(nr, nc, ent)

    @classmethod
    def from_rows(cls, rows: Sequence[Mapping[int, object]], cols: int) -> "SparseMatrix":
        ent = {}
        for i, r in enumerate(rows):
            for j, v in r.items():
                ent[i, j] = v
        return cls(len(rows), cols, ent)

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    def __getitem__(self, key: Tuple[int, int]) -> Fraction:
        return self.entries.get(key, Fraction(0))

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (self.rows, self.cols, self.entries) == (other.rows, other.cols, other.entries)

    def __repr__(self):
        return "SparseMatrix(%d, %d, nnz=%d)" % (self.rows, self.cols, len(self.entries))

    def to_dense(self) -> List[List[Fraction]]:
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def row_dicts(self) -> List[SparseVec]:
        out: List[SparseVec] = [{} for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.cols, self.rows, {(j, i): v for (i, j), v in self.entries.items()})

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        self._check_same_shape(other)
        ent = dict(self.entries)
        for k, v in other.entries.items():
            ent[k] = ent.get(k, 0) + v
        return SparseMatrix(self.rows, self.cols, ent)

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        return self + other.scale(-1)

    def scale(self, c) -> "SparseMatrix":
        c = Q(c)
        return SparseMatrix(self.rows, self.cols, {k: c * v for k, v in self.entries.items()})

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch %dx%d @ %dx%d" % (self.rows, self.cols, other.rows, other.cols))
        right = other.row_dicts()
        acc: Dict[Tuple[int, int], Fraction] = {}
        for (i, k), a in self.entries.items():
            for j, b in right[k].items():
                acc[i, j] = acc.get((i, j), 0) + a * b
        return SparseMatrix(self.rows, other.cols, acc)

    def commutator(self, other: "SparseMatrix") -> "SparseMatrix":
        return self @ other - other @ self

    def apply(self, v: Mapping[int, object]) -> SparseVec:
        """Matrix-vector product on a sparse vector (dict index -> value)."""
        cols_of: Dict[int, List[Tuple[int, Fraction]]] = {}
        for (i, j), a in self.entries.items():
            cols_of.setdefault(j, []).append((i, a))
        out: SparseVec = {}
        for j, x in v.items():
            if j < 0 or j >= self.cols:
                raise IndexError("vector index %d outside %d columns" % (j, self.cols))
            for i, a in cols_of.get(j, ()):
                out[i] = out.get(i, 0) + a * x
        return {i: x for i, x in out.items() if x}

    def _check_same_shape(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")


def _reduce(row: SparseVec, pivots: Dict[int, SparseVec]) -> SparseVec:
    """Eliminate all pivot columns from ``row`` (pivot rows lead at their pivot)."""
    heap = [c for c in row if c in pivots]
    heapq.heapify(heap)
    seen = set(heap)
    while heap:
        c = heapq.heappop(heap)
        f = row.get(c)
        if not f:
            continue
        for k, v in pivots[c].items():
            nv = row.get(k, 0) - f * v
            if nv:
                row[k] = nv
                if k in pivots and k not in seen:
                    seen.add(k)
                    heapq.heappush(heap, k)
            else:
                row.pop(k, None)
    return row


def echelon(rows: Iterable[Mapping[int, object]]) -> Dict[int, SparseVec]:
    """Reduced row echelon form of the given rows.

    Returns a dict pivot column -> pivot row; each pivot row has a 1 at its
    pivot, its other entries lie in later non-pivot columns only.
    """
    pivots: Dict[int, SparseVec] = {}
    for r in rows:
        row = {k: Q(v) for k, v in r.items() if v}
        row = _reduce(row, pivots)
        if not row:
            continue
        c = min(row)
        inv = 1 / row[c]
        pivots[c] = {k: v * inv for k, v in row.items()}
    # back substitution, highest pivot first
    done: Dict[int, SparseVec] = {}
    for c in sorted(pivots, reverse=True):
        row = pivots[c]
        hits = [k for k in row if k != c and k in done]
        for k in hits:
            f = row.get(k)
            if not f:
                continue
            for kk, v in done[k].items():
                nv = row.get(kk, 0) - f * v
                if nv:
                    row[kk] = nv
                else:
                    row.pop(kk, None)
        done[c] = row
    return done


def rank(M: SparseMatrix) -> int:
    return len(echelon(M.row_dicts()))


def kernel_from_echelon(pivots: Dict[int, SparseVec], ncols: int) -> List[SparseVec]:
    """Kernel basis from an RREF: one vector per free column, with a 1 there.

    Each vector's support is its free column plus earlier pivot columns, so
    the basis is itself in reduced echelon form read from the last column.
    """
    by_free: Dict[int, SparseVec] = {}
    for c, row in pivots.items():
        for k, v in row.items():
            if k != c:
                by_free.setdefault(k, {})[c] = -v
    basis = []
    for f in range(ncols):
        if f in pivots:
            continue
        v = {f: Fraction(1)}
        v.update(by_free.get(f, {}))
        basis.append(dict(sorted(v.items())))
    return basis


def sparse_kernel(M: SparseMatrix) -> List[SparseVec]:
    """Exact basis of {v : M v = 0}; deterministic for a given column order."""
    return kernel_from_echelon(echelon(M.row_dicts()), M.cols)


def kernel_of_rows(rows: Iterable[Mapping[int, object]], ncols: int) -> List[SparseVec]:
    return kernel_from_echelon(echelon(rows), ncols)


def dense_vector(v: Mapping[int, Fraction], n: int) -> List[Fraction]:
    out = [Fraction(0)] * n
    for i, x in v.items():
        out[i] = x
    return out


def solve_in_span(basis: Sequence[Mapping[object, Fraction]], target: Mapping[object, Fraction]):
    """Coefficients c with sum c_i basis_i == target, or None if not in the span.

    Vectors are dicts keyed by arbitrary hashable coordinates.
    """
    keys = sorted({k for b in basis for k in b} | set(target), key=repr)
    index = {k: n for n, k in enumerate(keys)}
    nb = len(basis)
    # columns: basis coefficients, then the target; rows: coordinates
    rows: List[SparseVec] = [dict() for _ in keys]
    for j, b in enumerate(basis):
        for k, x in b.items():
            if x:
                rows[index[k]][j] = Q(x)
    for k, x in target.items():
        if x:
            rows[index[k]][nb] = -Q(x)
    ker = kernel_of_rows(rows, nb + 1)
    for v in ker:
        if v.get(nb):
            s = v[nb]
            return [v.get(j, Fraction(0)) / s for j in range(nb)]
    return None


class SpanTracker:
    """Incrementally tracks the span of vectors keyed by hashable coordinates."""

    def __init__(self):
        self._index: Dict[object, int] = {}
        self._pivots: Dict[int, SparseVec] = {}

    def _encode(self, v: Mapping[object, Fraction]) -> SparseVec:
        out = {}
        for k, x in v.items():
            if not x:
                continue
            if k not in self._index:
                self._index[k] = len(self._index)
            out[self._index[k]] = Q(x)
        return out

    def add(self, v: Mapping[object, Fraction]) -> bool:
        """Add v; return True if it enlarged the span."""
        row = _reduce(self._encode(v), self._pivots)
        if not row:
            return False
        c = min(row)
        inv = 1 / row[c]
        self._pivots[c] = {k: x * inv for k, x in row.items()}
        return True

    def contains(self, v: Mapping[object, Fraction]) -> bool:
        if any(k not in self._index for k, x in v.items() if x):
            return False
        return not _reduce(self._encode(v), self._pivots)

    def __len__(self):
        return len(self._pivots)


def dense_inverse(M: Sequence[Sequence[object]]) -> List[List[Fraction]]:
    """Gauss-Jordan inverse of a small square matrix; raises ZeroDivisionError if singular."""
    n = len(M)
    A = [[Q(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c]), None)
        if p is None:
            raise ZeroDivisionError("singular matrix")
        A[c], A[p] = A[p], A[c]
        inv = 1 / A[c][c]
        A[c] = [x * inv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c]:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [row[n:] for row in A]
