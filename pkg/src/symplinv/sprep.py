"""
Explicit finite-dimensional irreducible representations of sp(2m).

Conventions (used by every other module):

* W = R^{2m} is the tangent representation, basis order
  ``x_1, ..., x_m, y_m, ..., y_1`` (so y_i sits at position 2m - i).
* The symplectic form is omega = sum dx_i ^ dy_i.
* A matrix A in sp(2m) is identified with the linear vector field
  (A z) . d/dz.  Generators are named after those fields:

  - ``up(i,j)``   e^{ij}  = y_i d_j + y_j d_i        (y_i d_i for i == j)
  - ``down(i,j)`` e_{ij}  = x_i dy_j + x_j dy_i      (x_i dy_i for i == j)
  - ``mix(i,j)``  e^i_j   = x_j d_i - y_i dy_j

  so the upper-triangular matrices (the Borel subalgebra) are up(i,j) and
  mix(i,j) with i < j.  Simple raisings: mix(i,i+1) for i < m and up(m,m).
* Cartan h_i = mix(i,i); the basis vector of W in direction x_i has weight
  +eps_i and the one in direction y_i has weight -eps_i.  V_lambda is
  realised inside W^{(x)|lambda|} with matrix-highest weight lambda.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Mapping, Sequence, Tuple

from .exact import (
    SpanTracker,
    SparseMatrix,
    dense_inverse,
    echelon,
    format_rational,
    kernel_of_rows,
)

DEFAULT_AMBIENT_CAP = 10 ** 6

Weight = Tuple[int, ...]


class ResourceError(RuntimeError):
    """A configured size cap was exceeded."""


class InvariantViolation(AssertionError):
    """An internal consistency check failed; results must not be trusted."""


def check_dominant(m: int, lam: Sequence[int]) -> Weight:
    lam = tuple(int(x) for x in lam)
    if len(lam) != m:
        raise ValueError("weight %r has length %d, expected m=%d" % (lam, len(lam), m))
    if any(a < b for a, b in zip(lam, lam[1:])) or (lam and lam[-1] < 0):
        raise ValueError("non-dominant weight %r" % (lam,))
    return lam


def dominant_weights(m: int, bound: int) -> List[Weight]:
    """All dominant weights with entries <= bound, in lexicographic order."""
    out = [w for w in itertools.product(range(bound + 1), repeat=m)
           if all(a >= b for a, b in zip(w, w[1:]))]
    return sorted(out)


def weyl_dim(m: int, lam: Sequence[int]) -> int:
    lam = check_dominant(m, lam)
    l = [lam[i] + m - i for i in range(m)]
    r = [m - i for i in range(m)]
    d = Fraction(1)
    for i in range(m):
        d *= Fraction(l[i], r[i])
        for j in range(i + 1, m):
            d *= Fraction(l[i] ** 2 - l[j] ** 2, r[i] ** 2 - r[j] ** 2)
    assert d.denominator == 1
    return int(d)


# -- the standard representation ------------------------------------------------

def wx(m: int, i: int) -> int:
    return i - 1


def wy(m: int, i: int) -> int:
    return 2 * m - i


def w_weight(m: int, k: int) -> Weight:
    w = [0] * m
    if k < m:
        w[k] = 1
    else:
        w[2 * m - k - 1] = -1
    return tuple(w)


@dataclass(frozen=True, order=True)
class SpGenerator:
    kind: str  # "up", "down" or "mix"
    i: int
    j: int

    def __post_init__(self):
        if self.kind not in ("up", "down", "mix"):
            raise ValueError("unknown generator kind %r" % self.kind)
        if self.kind != "mix" and self.i > self.j:
            # e^{ij} = e^{ji}, e_{ij} = e_{ji}: store sorted
            a, b = self.j, self.i
            object.__setattr__(self, "i", a)
            object.__setattr__(self, "j", b)

    @property
    def name(self) -> str:
        return "%s(%d,%d)" % (self.kind, self.i, self.j)

    @classmethod
    def parse(cls, s: str) -> "SpGenerator":
        kind, rest = s.split("(")
        i, j = rest.rstrip(")").split(",")
        return cls(kind, int(i), int(j))

    def root(self, m: int) -> Weight:
        r = [0] * m
        if self.kind == "up":
            r[self.i - 1] += 1
            r[self.j - 1] += 1
        elif self.kind == "down":
            r[self.i - 1] -= 1
            r[self.j - 1] -= 1
        else:
            r[self.i - 1] += 1
            r[self.j - 1] -= 1
        return tuple(r)

    def matrix(self, m: int) -> Dict[Tuple[int, int], int]:
        """Entries of the 2m x 2m matrix in W-ordering."""
        i, j = self.i, self.j
        if not (1 <= i <= m and 1 <= j <= m):
            raise ValueError("generator index out of range for m=%d" % m)
        ent: Dict[Tuple[int, int], int] = {}
        if self.kind == "up":
            ent[wx(m, j), wy(m, i)] = 1
            if i != j:
                ent[wx(m, i), wy(m, j)] = 1
        elif self.kind == "down":
            ent[wy(m, j), wx(m, i)] = 1
            if i != j:
                ent[wy(m, i), wx(m, j)] = 1
        else:
            ent[wx(m, i), wx(m, j)] = 1
            ent[wy(m, j), wy(m, i)] = ent.get((wy(m, j), wy(m, i)), 0) - 1
        return ent


@lru_cache(maxsize=None)
def generators(m: int) -> Tuple[SpGenerator, ...]:
    out = []
    for i in range(1, m + 1):
        for j in range(i, m + 1):
            out.append(SpGenerator("up", i, j))
            out.append(SpGenerator("down", i, j))
    for i in range(1, m + 1):
        for j in range(1, m + 1):
            out.append(SpGenerator("mix", i, j))
    return tuple(out)


def raising_generators(m: int) -> Tuple[SpGenerator, ...]:
    return tuple(g for g in generators(m)
                 if g.kind == "up" or (g.kind == "mix" and g.i < g.j))


def lowering_generators(m: int) -> Tuple[SpGenerator, ...]:
    return tuple(g for g in generators(m)
                 if g.kind == "down" or (g.kind == "mix" and g.i > g.j))


def simple_raisings(m: int) -> Tuple[SpGenerator, ...]:
    return tuple([SpGenerator("mix", i, i + 1) for i in range(1, m)] + [SpGenerator("up", m, m)])


def cartan(m: int) -> Tuple[SpGenerator, ...]:
    return tuple(SpGenerator("mix", i, i) for i in range(1, m + 1))


def sp_coords(m: int, A: Mapping[Tuple[int, int], object]) -> Dict[SpGenerator, Fraction]:
    """Expand a 2m x 2m matrix in the generator basis; raises if A is not in sp(2m)."""
    A = {k: Fraction(v) for k, v in A.items() if v}
    c: Dict[SpGenerator, Fraction] = {}
    for g in generators(m):
        if g.kind == "up":
            v = A.get((wx(m, g.j), wy(m, g.i)), 0)
        elif g.kind == "down":
            v = A.get((wy(m, g.j), wx(m, g.i)), 0)
        else:
            v = A.get((wx(m, g.i), wx(m, g.j)), 0)
        if v:
            c[g] = Fraction(v)
    back: Dict[Tuple[int, int], Fraction] = {}
    for g, v in c.items():
        for k, x in g.matrix(m).items():
            back[k] = back.get(k, 0) + v * x
    back = {k: v for k, v in back.items() if v}
    if back != A:
        raise ValueError("matrix is not in sp(2m)")
    return c


def bracket_coords(m: int, g1: SpGenerator, g2: SpGenerator) -> Dict[SpGenerator, Fraction]:
    a = SparseMatrix(2 * m, 2 * m, g1.matrix(m))
    b = SparseMatrix(2 * m, 2 * m, g2.matrix(m))
    return sp_coords(m, a.commutator(b).entries)


# -- tensor powers of W ---------------------------------------------------------

Tensor = Dict[Tuple[int, ...], Fraction]


def apply_to_tensor(A: Mapping[Tuple[int, int], object], t: Mapping[Tuple[int, ...], Fraction]) -> Tensor:
    cols: Dict[int, List[Tuple[int, object]]] = {}
    for (r, c), v in A.items():
        cols.setdefault(c, []).append((r, v))
    out: Tensor = {}
    for key, x in t.items():
        for p, c in enumerate(key):
            for r, v in cols.get(c, ()):
                nk = key[:p] + (r,) + key[p + 1:]
                out[nk] = out.get(nk, 0) + v * x
    return {k: v for k, v in out.items() if v}


def wedge_top(m: int, r: int) -> Tensor:
    """e_{x_1} ^ ... ^ e_{x_r} as an antisymmetric tensor in W^{(x)r}."""
    out: Tensor = {}
    for perm in itertools.permutations(range(r)):
        inv = sum(1 for a in range(r) for b in range(a + 1, r) if perm[a] > perm[b])
        out[tuple(wx(m, p + 1) for p in perm)] = Fraction(-1 if inv % 2 else 1)
    return out


def tensor_kron(a: Tensor, b: Tensor) -> Tensor:
    return {ka + kb: va * vb for ka, va in a.items() for kb, vb in b.items()}


def highest_tensor(m: int, lam: Weight) -> Tensor:
    t: Tensor = {(): Fraction(1)}
    ext = list(lam) + [0]
    for r in range(1, m + 1):
        for _ in range(ext[r - 1] - ext[r]):
            t = tensor_kron(t, wedge_top(m, r))
    return t


def tensor_weight(m: int, key: Tuple[int, ...]) -> Weight:
    w = [0] * m
    for k in key:
        if k < m:
            w[k] += 1
        else:
            w[2 * m - k - 1] -= 1
    return tuple(w)


def _normalize(v: Tensor) -> Tensor:
    lead = v[min(v)]
    return {k: x / lead for k, x in sorted(v.items())}


# -- irreducible modules ---------------------------------------------------------

@dataclass
class IrrepBasis:
    m: int
    weight: Weight
    dim: int
    degree: int
    basis: List[Tensor]
    weights: List[Weight]
    generator_matrices: Dict[SpGenerator, SparseMatrix]
    _form: object = field(default=None, repr=False)

    def matrix(self, g: SpGenerator) -> SparseMatrix:
        return self.generator_matrices[g]

    def rho(self, A: Mapping[Tuple[int, int], object]) -> SparseMatrix:
        """Matrix of an arbitrary element of sp(2m) given in W coordinates."""
        out = SparseMatrix(self.dim, self.dim)
        for g, c in sp_coords(self.m, A).items():
            out = out + self.generator_matrices[g].scale(c)
        return out

    def highest_index(self) -> int:
        return 0

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "weight": list(self.weight),
            "dim": self.dim,
            "ambient_degree": self.degree,
            "basis": [[[list(k), format_rational(v)] for k, v in sorted(b.items())] for b in self.basis],
            "weights": [list(w) for w in self.weights],
            "generators": {
                g.name: [[i, j, format_rational(v)] for (i, j), v in sorted(M.entries.items())]
                for g, M in sorted(self.generator_matrices.items())
            },
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def invariant_form(self) -> SparseMatrix:
        """The sp-invariant bilinear form G (rho(g)^T G + G rho(g) = 0), unique up to scale."""
        if self._form is None:
            self._form = _invariant_form(self)
        return self._form


def _invariant_form(rep: IrrepBasis) -> SparseMatrix:
    n = rep.dim
    # G pairs weight mu with weight -mu only
    idx = {}
    for a in range(n):
        for b in range(n):
            if all(x == -y for x, y in zip(rep.weights[a], rep.weights[b])):
                idx[a, b] = len(idx)
    rows: Dict[Tuple[SpGenerator, int, int], Dict[int, Fraction]] = {}
    for g in generators(rep.m):
        M = rep.generator_matrices[g]
        for (r, c), v in M.entries.items():
            # (M^T G)_{c,b} = sum_r M_{rc} G_{rb};  (G M)_{a,c} = sum_r G_{a r} M_{r c}
            for b in range(n):
                if (r, b) in idx:
                    row = rows.setdefault((g, c, b), {})
                    row[idx[r, b]] = row.get(idx[r, b], 0) + v
            for a in range(n):
                if (a, r) in idx:
                    row = rows.setdefault((g, a, c), {})
                    row[idx[a, r]] = row.get(idx[a, r], 0) + v
    ker = kernel_of_rows([rows[k] for k in sorted(rows, key=repr)], len(idx))
    if len(ker) != 1:
        raise InvariantViolation("invariant form space has dimension %d" % len(ker))
    inv = {v: k for k, v in idx.items()}
    return SparseMatrix(n, n, {inv[c]: x for c, x in ker[0].items()})


class _WeightSolver:
    """Coordinates of ambient tensors in a fixed basis of one weight space."""

    def __init__(self, vectors: List[Tensor]):
        self.vectors = vectors
        keys = sorted({k for v in vectors for k in v})
        kidx = {k: n for n, k in enumerate(keys)}
        piv = echelon([{kidx[k]: x for k, x in v.items()} for v in vectors])
        self.positions = [keys[c] for c in sorted(piv)]
        M = [[v.get(p, 0) for v in vectors] for p in self.positions]
        self.inverse = dense_inverse(M)

    def coords(self, t: Tensor) -> List[Fraction]:
        rhs = [t.get(p, 0) for p in self.positions]
        return [sum((a * b for a, b in zip(row, rhs)), Fraction(0)) for row in self.inverse]


def _check_cap(m, lam, cap):
    deg = sum(lam)
    if (2 * m) ** deg > cap:
        raise ResourceError("ambient tensor space (2m)^%d = %d exceeds cap %d" % (deg, (2 * m) ** deg, cap))


@lru_cache(maxsize=64)
def _build_irrep_cached(m: int, lam: Weight, cap: int) -> IrrepBasis:
    _check_cap(m, lam, cap)
    v0 = _normalize(highest_tensor(m, lam))
    mats = {g: g.matrix(m) for g in generators(m)}
    lowers = lowering_generators(m)
    basis: List[Tensor] = [v0]
    wts: List[Weight] = [lam]
    spans: Dict[Weight, SpanTracker] = {lam: SpanTracker()}
    spans[lam].add(v0)
    frontier = [0]
    while frontier:
        nxt = []
        for k in frontier:
            for g in lowers:
                t = apply_to_tensor(mats[g], basis[k])
                if not t:
                    continue
                w = tuple(a + b for a, b in zip(wts[k], g.root(m)))
                sp = spans.setdefault(w, SpanTracker())
                if sp.add(t):
                    basis.append(_normalize(t))
                    wts.append(w)
                    nxt.append(len(basis) - 1)
        frontier = nxt
    dim = weyl_dim(m, lam)
    if len(basis) != dim:
        raise InvariantViolation("built %d basis vectors for %r, Weyl dimension is %d" % (len(basis), lam, dim))
    by_weight: Dict[Weight, List[int]] = {}
    for n, w in enumerate(wts):
        by_weight.setdefault(w, []).append(n)
    solvers = {w: _WeightSolver([basis[n] for n in ns]) for w, ns in by_weight.items()}
    gm: Dict[SpGenerator, SparseMatrix] = {}
    for g in generators(m):
        ent = {}
        root = g.root(m)
        for k in range(dim):
            t = apply_to_tensor(mats[g], basis[k])
            if not t:
                continue
            w = tuple(a + b for a, b in zip(wts[k], root))
            if w not in solvers:
                raise InvariantViolation("generator %s leaves the module" % g.name)
            cs = solvers[w].coords(t)
            for n, c in zip(by_weight[w], cs):
                if c:
                    ent[n, k] = c
        gm[g] = SparseMatrix(dim, dim, ent)
    return IrrepBasis(m=m, weight=lam, dim=dim, degree=sum(lam), basis=basis, weights=wts,
                      generator_matrices=gm)


def build_irrep(m: int, lam: Sequence[int], cap: int = DEFAULT_AMBIENT_CAP) -> IrrepBasis:
    """V_lambda inside W^{(x)|lambda|}: highest tensor closed under lowering generators."""
    lam = check_dominant(m, lam)
    return _build_irrep_cached(m, lam, cap)


def apply_generator(rep: IrrepBasis, g: SpGenerator, v: Sequence[object]) -> List[Fraction]:
    if len(v) != rep.dim:
        raise ValueError("vector of length %d, module has dimension %d" % (len(v), rep.dim))
    out = rep.matrix(g).apply({i: Fraction(x) for i, x in enumerate(v) if x})
    return [out.get(i, Fraction(0)) for i in range(rep.dim)]


def check_commutation(rep: IrrepBasis, pairs=None) -> bool:
    """[rho(g1), rho(g2)] == rho([g1, g2]) on the given generator pairs (default: all)."""
    gens = generators(rep.m)
    if pairs is None:
        pairs = [(a, b) for a in gens for b in gens if a < b]
    for a, b in pairs:
        lhs = rep.matrix(a).commutator(rep.matrix(b))
        rhs = SparseMatrix(rep.dim, rep.dim)
        for g, c in bracket_coords(rep.m, a, b).items():
            rhs = rhs + rep.matrix(g).scale(c)
        if lhs != rhs:
            return False
    return True


# -- modules given by generator actions -------------------------------------------

class TensorModule:
    """V_1 (x) ... (x) V_k with the Leibniz action; vectors are dicts keyed by index tuples."""

    def __init__(self, factors: Sequence[IrrepBasis]):
        self.factors = list(factors)
        self.m = factors[0].m
        self._cols = [{g: _columns(f.matrix(g)) for g in generators(self.m)} for f in factors]

    def weight(self, key: Tuple[int, ...]) -> Weight:
        w = [0] * self.m
        for f, k in zip(self.factors, key):
            for a, x in enumerate(f.weights[k]):
                w[a] += x
        return tuple(w)

    def keys_of_weight(self, target: Weight) -> List[Tuple[int, ...]]:
        groups = []
        for f in self.factors:
            g: Dict[Weight, List[int]] = {}
            for n, w in enumerate(f.weights):
                g.setdefault(w, []).append(n)
            groups.append(g)
        out = []

        def rec(p, acc, key):
            if p == len(groups):
                if acc == tuple(target):
                    out.extend(key)
                return
            for w, ns in groups[p].items():
                nacc = tuple(a + b for a, b in zip(acc, w))
                rec(p + 1, nacc, [k + (n,) for k in key for n in ns])

        rec(0, (0,) * self.m, [()])
        return sorted(out)

    def act(self, g: SpGenerator, v: Mapping[Tuple[int, ...], Fraction]) -> Dict[Tuple[int, ...], Fraction]:
        out: Dict[Tuple[int, ...], Fraction] = {}
        for key, x in v.items():
            for p, k in enumerate(key):
                for r, a in self._cols[p][g].get(k, ()):
                    nk = key[:p] + (r,) + key[p + 1:]
                    out[nk] = out.get(nk, 0) + a * x
        return {k: x for k, x in out.items() if x}


def _columns(M: SparseMatrix) -> Dict[int, List[Tuple[int, Fraction]]]:
    cols: Dict[int, List[Tuple[int, Fraction]]] = {}
    for (r, c), v in sorted(M.entries.items()):
        cols.setdefault(c, []).append((r, v))
    return cols


def highest_vectors(space: TensorModule, target: Sequence[int]) -> List[Dict[Tuple[int, ...], Fraction]]:
    """Basis of weight-`target` vectors killed by mix(i,i+1), i<m, and up(m,m)."""
    keys = space.keys_of_weight(tuple(target))
    col = {k: n for n, k in enumerate(keys)}
    rows: Dict[Tuple, Dict[int, Fraction]] = {}
    for g in simple_raisings(space.m):
        for k in keys:
            for img, x in space.act(g, {k: Fraction(1)}).items():
                row = rows.setdefault((g, img), {})
                row[col[k]] = row.get(col[k], 0) + x
    ker = kernel_of_rows([rows[r] for r in sorted(rows)], len(keys))
    return [{keys[c]: x for c, x in v.items()} for v in ker]


def decompose_tensor(m: int, lam: Sequence[int], mu: Sequence[int],
                     cap: int = DEFAULT_AMBIENT_CAP) -> Dict[Weight, int]:
    """Multiplicities of the irreducible constituents of V_lam (x) V_mu."""
    lam = check_dominant(m, lam)
    mu = check_dominant(m, mu)
    a = build_irrep(m, lam, cap)
    b = build_irrep(m, mu, cap)
    if a.dim * b.dim > cap:
        raise ResourceError("tensor product dimension %d exceeds cap %d" % (a.dim * b.dim, cap))
    tm = TensorModule([a, b])
    cands = sorted({tuple(x + y for x, y in zip(u, v)) for u in a.weights for v in b.weights})
    out: Dict[Weight, int] = {}
    for nu in cands:
        if any(p < q for p, q in zip(nu, nu[1:])) or nu[-1] < 0:
            continue
        k = len(highest_vectors(tm, nu))
        if k:
            out[nu] = k
    total = sum(k * weyl_dim(m, nu) for nu, k in out.items())
    if total != a.dim * b.dim:
        raise InvariantViolation("dimension bookkeeping failed: %d != %d" % (total, a.dim * b.dim))
    return out
