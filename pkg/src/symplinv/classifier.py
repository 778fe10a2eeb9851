"""
Invariant operators as singular vectors.

I(lambda) is the space of constant-coefficient differential operators from
T(lambda) to functions, graded by symbol degree.  An element s^A (x) u (u in
V_lambda^*) pairs with a field chi as (d^A <u, chi>)(0).  A vector field xi
acts on I(lambda) by precomposition, phi -> phi o L_xi; for

    xi = sum_a xi^a(z) d_a,    D xi = sum_G z^G M_G   (M_G in sp(2m))

this is

    s^A u  ->  sum_{a,G} [z^G] xi^a * s_a d_s^G(s^A) u  -  sum_G d_s^G(s^A) rho(M_G)^T u

(multiplication by z_b dualizes to d/ds_b).  For a linear field this is the
sp(2m)-action used for weights and highest-vector conditions; for the cubic
element x_1^2 d/dy_1 it lowers symbol degree by one.

A bilinear operator T(lambda) x T(mu) -> T(nu) of order d corresponds to w in
the degree-d part of I(lambda) (x) I(mu) of weight nu, killed by the simple
raisings and by x_1^2 d/dy_1.  ``classify`` returns an exact basis of that
space; ``extract_operator`` rebuilds the operator by sp-equivariance.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .bidiff import BidifferentialOperator
from .exact import SpanTracker, dense_inverse, format_rational, kernel_of_rows, solve_in_span
from .fields import CONVENTION_VERSION, VectorField, hamiltonian_field, poly_to_w, sp_coords_poly
from .poly import Poly, monomials
from .sprep import (
    IrrepBasis,
    ResourceError,
    SpGenerator,
    build_irrep,
    check_dominant,
    lowering_generators,
    simple_raisings,
)

DEFAULT_CLASSIFY_CAP = 2 * 10 ** 6
SCHEMA_VERSION = "symplinv-classify/1"

Mono = Tuple[int, ...]
SlotKey = Tuple[Mono, int]                 # (symbol monomial, dual fiber index)
Vec = Dict[tuple, Fraction]


# -- actions on I(lambda) ----------------------------------------------------------

class FieldAction:
    """Precomputed data of a polynomial vector field acting on I-modules."""

    def __init__(self, m: int, xi: VectorField, label: str = ""):
        self.m = m
        self.label = label
        self.transport = [(a, e, c) for a, comp in enumerate(xi.components) for e, c in comp.terms.items()]
        J = xi.jacobian_w()
        self.rotation: List[Tuple[Mono, SpGenerator, Fraction]] = []
        for g, coef in sorted(sp_coords_poly(m, J).items()):
            for e, c in coef.terms.items():
                self.rotation.append((e, g, c))

    @classmethod
    def from_matrix(cls, m: int, g: SpGenerator) -> "FieldAction":
        A = g.matrix(m)
        comps = []
        for a in range(2 * m):
            p = Poly(m)
            for b in range(2 * m):
                v = A.get((poly_to_w(m, a), poly_to_w(m, b)))
                if v:
                    p = p + Poly.var(m, b) * v
            comps.append(p)
        return cls(m, VectorField(m, comps), g.name)

    @classmethod
    def singular(cls, m: int) -> "FieldAction":
        """x_1^2 d/dy_1, i.e. X_H with H = x_1^3 / 3."""
        H = Poly.var(m, 0) ** 3 * Fraction(1, 3)
        return cls(m, hamiltonian_field(H), "x1^2*dy1")


def _dmono(alpha: Mono, gamma: Mono) -> Tuple[Optional[Mono], int]:
    """d_s^gamma s^alpha = f * s^(alpha - gamma)."""
    f = 1
    out = []
    for a, g in zip(alpha, gamma):
        if g > a:
            return None, 0
        for j in range(g):
            f *= a - j
        out.append(a - g)
    return tuple(out), f


class IModulePiece:
    """Degree-k part of I(lambda): basis (symbol monomial, dual fiber index)."""

    def __init__(self, rep: IrrepBasis, k: int):
        self.rep = rep
        self.m = rep.m
        self.k = k
        self.monomials = monomials(2 * rep.m, k)
        self.basis: List[SlotKey] = [(a, i) for a in self.monomials for i in range(rep.dim)]
        self._by_weight: Optional[Dict[Tuple[int, ...], List[SlotKey]]] = None

    @property
    def dim(self) -> int:
        return len(self.basis)

    def weight(self, key: SlotKey) -> Tuple[int, ...]:
        return slot_weight(self.rep, key)

    def by_weight(self) -> Dict[Tuple[int, ...], List[SlotKey]]:
        if self._by_weight is None:
            d: Dict[Tuple[int, ...], List[SlotKey]] = {}
            for key in self.basis:
                d.setdefault(self.weight(key), []).append(key)
            self._by_weight = d
        return self._by_weight

    def matrix(self, g: SpGenerator) -> Dict[Tuple[SlotKey, SlotKey], Fraction]:
        """Action of a generator as a sparse (row key, column key) map."""
        act = FieldAction.from_matrix(self.m, g)
        out = {}
        for key in self.basis:
            for k2, v in slot_act(self.rep, act, key).items():
                out[k2, key] = v
        return out


def symbol_weight(m: int, alpha: Mono) -> Tuple[int, ...]:
    return tuple(alpha[i] - alpha[m + i] for i in range(m))


def slot_weight(rep: IrrepBasis, key: SlotKey) -> Tuple[int, ...]:
    alpha, i = key
    sw = symbol_weight(rep.m, alpha)
    return tuple(a - b for a, b in zip(sw, rep.weights[i]))


_slot_cache: Dict[tuple, Dict[SlotKey, Fraction]] = {}


def slot_act(rep: IrrepBasis, act: FieldAction, key: SlotKey) -> Dict[SlotKey, Fraction]:
    ck = (id(rep), rep.weight, act.label, key)
    hit = _slot_cache.get(ck)
    if hit is not None:
        return hit
    alpha, i = key
    out: Dict[SlotKey, Fraction] = {}
    for a, gamma, c in act.transport:
        nm, f = _dmono(alpha, gamma)
        if nm is None:
            continue
        nm = nm[:a] + (nm[a] + 1,) + nm[a + 1:]
        k2 = (nm, i)
        out[k2] = out.get(k2, 0) + c * f
    for gamma, g, c in act.rotation:
        nm, f = _dmono(alpha, gamma)
        if nm is None:
            continue
        # rho(g)^T e_i^* = sum_k rho(g)_{ik} e_k^*
        for (r, col), v in rep.matrix(g).entries.items():
            if r == i:
                k2 = (nm, col)
                out[k2] = out.get(k2, 0) - c * f * v
    out = {k: v for k, v in out.items() if v}
    if len(_slot_cache) > 500000:
        _slot_cache.clear()
    _slot_cache[ck] = out
    return out


def tensor_act(reps: Sequence[IrrepBasis], act: FieldAction, v: Mapping[tuple, Fraction]) -> Vec:
    """Leibniz action on I(rho_1) (x) ... (x) I(rho_n); keys are flattened (A1, i1, A2, i2, ...)."""
    out: Vec = {}
    n = len(reps)
    for key, x in v.items():
        slots = [(key[2 * p], key[2 * p + 1]) for p in range(n)]
        for p in range(n):
            for (a2, i2), c in slot_act(reps[p], act, slots[p]).items():
                nk = key[:2 * p] + (a2, i2) + key[2 * p + 2:]
                out[nk] = out.get(nk, 0) + c * x
    return {k: x for k, x in out.items() if x}


def dual_act(rep: IrrepBasis, g: SpGenerator, u: Mapping[int, Fraction]) -> Dict[int, Fraction]:
    """Contragredient action -rho(g)^T on V^* coordinates."""
    out: Dict[int, Fraction] = {}
    for (r, c), v in rep.matrix(g).entries.items():
        x = u.get(r)
        if x:
            out[c] = out.get(c, 0) - v * x
    return {k: x for k, x in out.items() if x}


def build_imodule_piece(m: int, lam: Sequence[int], k: int, cap: int = DEFAULT_CLASSIFY_CAP) -> IModulePiece:
    rep = build_irrep(m, lam)
    n = len(monomials(2 * m, k)) * rep.dim
    if n > cap:
        raise ResourceError("I-module piece of dimension %d exceeds cap %d" % (n, cap))
    return IModulePiece(rep, k)


# -- symbol vectors ------------------------------------------------------------------

@dataclass
class SymbolVector:
    reps: Tuple[IrrepBasis, ...]
    degree: int
    coords: Vec

    def is_zero(self) -> bool:
        return not self.coords


def act_singularity(w: SymbolVector) -> SymbolVector:
    m = w.reps[0].m
    out = tensor_act(w.reps, FieldAction.singular(m), w.coords)
    return SymbolVector(w.reps, max(w.degree - 1, 0), out)


def degree1_reduction(w: SymbolVector) -> Vec:
    """e'_{11} z0 + e''_{11} z1 where z0, z1 are the coefficients of the symbol
    x_1 in slot one resp. slot two of a degree-1 binary vector; e_{11} acts
    on each dual fiber by -rho(down(1,1))^T.

    On degree 1, act_singularity(w) is exactly twice this: the Jacobian of
    x_1^2 d/dy_1 is 2 x_1 times down(1,1)."""
    if len(w.reps) != 2 or w.degree != 1:
        raise ValueError("degree-1 binary vectors only")
    m = w.reps[0].m
    s1 = tuple(1 if a == 0 else 0 for a in range(2 * m))
    s0 = (0,) * (2 * m)
    g = SpGenerator("down", 1, 1)
    out: Vec = {}
    for (a1, i, a2, j), x in w.coords.items():
        if a1 == s1 and a2 == s0:
            for i2, c in dual_act(w.reps[0], g, {i: x}).items():
                k = (s0, i2, s0, j)
                out[k] = out.get(k, 0) + c
        elif a1 == s0 and a2 == s1:
            for j2, c in dual_act(w.reps[1], g, {j: x}).items():
                k = (s0, i, s0, j2)
                out[k] = out.get(k, 0) + c
    return {k: v for k, v in out.items() if v}


# -- classification ------------------------------------------------------------------

@dataclass
class ClassificationResult:
    m: int
    sources: Tuple[Tuple[int, ...], ...]
    target: Tuple[int, ...]
    degree: int
    dimension: int
    columns: List[tuple]
    basis: List[Vec]
    metrics: Dict[str, int] = field(default_factory=dict)
    seconds: float = 0.0
    extended_checked: bool = False

    @property
    def query(self) -> dict:
        return {"m": self.m, "sources": [list(s) for s in self.sources], "target": list(self.target),
                "order": self.degree}

    def symbol_vectors(self) -> List[SymbolVector]:
        reps = tuple(build_irrep(self.m, s) for s in self.sources)
        return [SymbolVector(reps, self.degree, v) for v in self.basis]

    def to_json(self, include_basis: bool = True, timing: bool = False) -> dict:
        out = {
            "schema": SCHEMA_VERSION,
            "conventions": CONVENTION_VERSION,
            "query": self.query,
            "dimension": self.dimension,
            "metrics": dict(sorted(self.metrics.items())),
        }
        if include_basis:
            out["basis"] = [
                [[_key_json(k), format_rational(x)] for k, x in sorted(v.items())] for v in self.basis
            ]
        if timing:
            out["seconds"] = round(self.seconds, 3)
        return out


def _key_json(k: tuple) -> list:
    return [list(x) if isinstance(x, tuple) else x for x in k]


def _key_from_json(k: list) -> tuple:
    return tuple(tuple(x) if isinstance(x, list) else int(x) for x in k)


def result_from_json(data: Mapping) -> ClassificationResult:
    q = data["query"]
    basis = [{_key_from_json(k): Fraction(str(x)) for k, x in v} for v in data.get("basis", [])]
    return ClassificationResult(
        m=int(q["m"]), sources=tuple(tuple(s) for s in q["sources"]), target=tuple(q["target"]),
        degree=int(q["order"]), dimension=int(data["dimension"]), columns=[], basis=basis,
        metrics=dict(data.get("metrics", {})), seconds=float(data.get("seconds", 0.0)))


def _bidegree_splits(d: int, n: int) -> List[Tuple[int, ...]]:
    if n == 1:
        return [(d,)]
    out = []
    for a in range(d, -1, -1):
        for rest in _bidegree_splits(d - a, n - 1):
            out.append((a,) + rest)
    return out


def weight_subspace(reps: Sequence[IrrepBasis], d: int, nu: Sequence[int], cap: int) -> List[tuple]:
    """Basis keys of the weight-nu part of the degree-d piece of I(rho_1) (x) ... (x) I(rho_n)."""
    nu = tuple(nu)
    m = reps[0].m
    out: List[tuple] = []
    for split in _bidegree_splits(d, len(reps)):
        groups = [IModulePiece(r, k).by_weight() for r, k in zip(reps, split)]

        def rec(p, acc, prefix):
            if p == len(groups):
                if acc == nu:
                    out.extend(prefix)
                    if len(out) > cap:
                        raise ResourceError("search space exceeds cap %d at weight %r" % (cap, nu))
                return
            for w, keys in groups[p].items():
                nacc = tuple(a + b for a, b in zip(acc, w))
                if p == len(groups) - 1 and nacc != nu:
                    continue
                rec(p + 1, nacc, [pre + k for pre in prefix for k in keys])

        rec(0, (0,) * m, [()])
    return out


def _column_order(key: tuple):
    # bidegree descending, then symbol monomials descending, fiber indices ascending
    parts = []
    n = len(key) // 2
    parts.append(tuple(-sum(key[2 * p]) for p in range(n)))
    for p in range(n):
        parts.append(tuple(-x for x in key[2 * p]))
        parts.append(key[2 * p + 1])
    return tuple(parts)


def condition_actions(m: int, extended: bool = False) -> List[FieldAction]:
    acts = [FieldAction.from_matrix(m, g) for g in simple_raisings(m)]
    acts.append(FieldAction.singular(m))
    if extended:
        for e in monomials(2 * m, 3):
            H = Poly(m, {e: 1})
            acts.append(FieldAction(m, hamiltonian_field(H), "cubic:%s" % H.to_str()))
    return acts


def _solve(reps, d, nu, cap, extended=False):
    cols = sorted(weight_subspace(reps, d, nu, cap), key=_column_order)
    index = {k: n for n, k in enumerate(cols)}
    m = reps[0].m
    rows: Dict[tuple, Dict[int, Fraction]] = {}
    nnz = 0
    for ci, act in enumerate(condition_actions(m, extended)):
        for key in cols:
            for img, x in tensor_act(reps, act, {key: Fraction(1)}).items():
                row = rows.setdefault((ci, img), {})
                row[index[key]] = row.get(index[key], 0) + x
                nnz += 1
    ordered = [rows[r] for r in sorted(rows, key=lambda r: (r[0], _column_order(r[1])))]
    ker = kernel_of_rows(ordered, len(cols))
    basis = [{cols[c]: x for c, x in v.items()} for v in ker]
    metrics = {"columns": len(cols), "rows": len(rows), "nnz": nnz}
    return cols, basis, metrics


def verify_singular(reps: Sequence[IrrepBasis], nu: Sequence[int], v: Mapping[tuple, Fraction]) -> bool:
    """Independent re-check: weight nu, killed by simple raisings and x_1^2 d/dy_1."""
    m = reps[0].m
    for key in v:
        w = [0] * m
        for p, r in enumerate(reps):
            for a, x in enumerate(slot_weight(r, (key[2 * p], key[2 * p + 1]))):
                w[a] += x
        if tuple(w) != tuple(nu):
            return False
    return all(not tensor_act(reps, act, v) for act in condition_actions(m))


def _classify(m, weights, nu, d, cap, extended):
    weights = tuple(check_dominant(m, w) for w in weights)
    nu = check_dominant(m, nu)
    if d < 0:
        raise ValueError("order must be non-negative")
    reps = tuple(build_irrep(m, w) for w in weights)
    t0 = time.perf_counter()
    cols, basis, metrics = _solve(reps, d, nu, cap)
    checked = False
    if extended:
        _, basis2, _ = _solve(reps, d, nu, cap, extended=True)
        if len(basis2) != len(basis):
            raise AssertionError("extended cubic conditions changed the kernel: %d -> %d"
                                 % (len(basis), len(basis2)))
        checked = True
    for v in basis:
        if not verify_singular(reps, nu, v):
            raise AssertionError("kernel vector fails the defining conditions")
    return ClassificationResult(m=m, sources=weights, target=nu, degree=d, dimension=len(basis),
                                columns=cols, basis=basis, metrics=metrics,
                                seconds=time.perf_counter() - t0, extended_checked=checked)


def classify(m: int, lam: Sequence[int], mu: Sequence[int], nu: Sequence[int], d: int,
             cap: int = DEFAULT_CLASSIFY_CAP, extended: bool = False) -> ClassificationResult:
    """Invariant bilinear operators T(lam) x T(mu) -> T(nu) of order exactly d."""
    return _classify(m, (lam, mu), nu, d, cap, extended)


def classify_unary(m: int, lam: Sequence[int], nu: Sequence[int], d: int,
                   cap: int = DEFAULT_CLASSIFY_CAP, extended: bool = False) -> ClassificationResult:
    return _classify(m, (lam,), nu, d, cap, extended)


# -- extraction -------------------------------------------------------------------------

def extract_operator(w: SymbolVector, target: Sequence[int], name: str = "") -> BidifferentialOperator:
    """Operator whose pairing with the highest vector of V_nu^* is w, completed by
    sp-equivariance along lowering generators."""
    reps = w.reps
    m = reps[0].m
    nu = check_dominant(m, target)
    if not verify_singular(reps, nu, w.coords):
        raise ValueError("vector is not a singular vector of weight %r" % (nu,))
    V = build_irrep(m, nu)
    # highest vector of V^*: weight nu, i.e. dual to weight -nu basis vectors
    hv = _dual_highest(V)
    acts = {g: FieldAction.from_matrix(m, g) for g in lowering_generators(m)}
    us: List[Dict[int, Fraction]] = [hv]
    images: List[Vec] = [dict(w.coords)]
    span = SpanTracker()
    span.add(hv)
    frontier = [0]
    while frontier and len(us) < V.dim:
        nxt = []
        for n in frontier:
            for g in lowering_generators(m):
                u2 = dual_act(V, g, us[n])
                if not u2 or not span.add(u2):
                    continue
                us.append(u2)
                images.append(tensor_act(reps, acts[g], images[n]))
                nxt.append(len(us) - 1)
        frontier = nxt
    if len(us) != V.dim:
        raise AssertionError("lowering closure reached %d of %d dual vectors" % (len(us), V.dim))
    U = [[us[j].get(k, Fraction(0)) for j in range(V.dim)] for k in range(V.dim)]
    Uinv = dense_inverse(U)
    coeffs: Dict[tuple, Fraction] = {}
    for k in range(V.dim):
        # e_k^* = sum_j Uinv[j][k] u_j
        for j in range(V.dim):
            c = Uinv[j][k]
            if not c:
                continue
            for key, x in images[j].items():
                slots = tuple((key[2 * p + 1], key[2 * p]) for p in range(len(reps)))
                ck = (k, slots)
                coeffs[ck] = coeffs.get(ck, 0) + c * x
    return BidifferentialOperator(m, reps, V, coeffs, name)


def _dual_highest(V: IrrepBasis) -> Dict[int, Fraction]:
    nu = V.weight
    idx = [n for n, w in enumerate(V.weights) if all(a == -b for a, b in zip(w, nu))]
    rows: Dict[tuple, Dict[int, Fraction]] = {}
    for g in simple_raisings(V.m):
        for c, n in enumerate(idx):
            for k, x in dual_act(V, g, {n: Fraction(1)}).items():
                rows.setdefault((g, k), {})[c] = x
    ker = kernel_of_rows([rows[r] for r in sorted(rows)], len(idx))
    if len(ker) != 1:
        raise AssertionError("dual highest vector space has dimension %d" % len(ker))
    return {idx[c]: x for c, x in ker[0].items()}


def extract_all(res: ClassificationResult, name: str = "") -> List[BidifferentialOperator]:
    return [extract_operator(w, res.target, "%s#%d" % (name, n) if name else "")
            for n, w in enumerate(res.symbol_vectors())]


# -- the worked example for lambda = (2, 0, ..., 0) -----------------------------------------

def _dual_apply(rep: IrrepBasis, word: Sequence[SpGenerator], u: Mapping[int, Fraction]) -> Dict[int, Fraction]:
    """Apply a word of generators right to left with the contragredient action."""
    out = dict(u)
    for g in reversed(word):
        out = dual_act(rep, g, out)
    return out


def _outer(a: Mapping[int, Fraction], b: Mapping[int, Fraction], c=1) -> Dict[Tuple[int, int], Fraction]:
    return {(i, j): x * y * c for i, x in a.items() for j, y in b.items() if x * y}


def _addto(acc: Dict, v: Mapping, c=1):
    for k, x in v.items():
        acc[k] = acc.get(k, 0) + c * x


def _seed_vector(m, Rl, Rm, u0, k):
    """Solve for v making u0 (x) v - 1/2 sum_{2<=i<=k} E^i_1 u0 (x) E^1_i v a highest vector.

    Returns (v, seed, solution dimension)."""
    mu = Rm.weight
    target = tuple(mu[a] + (1 if a == k - 1 else 0) - (1 if a == 0 else 0) for a in range(m))
    idx = [n for n, w in enumerate(Rm.weights) if tuple(-x for x in w) == target]
    E = lambda i, j: SpGenerator("mix", i, j)

    def seed_of(v):
        s = _outer(u0, v)
        for i in range(2, k + 1):
            _addto(s, _outer(_dual_apply(Rl, [E(i, 1)], u0), _dual_apply(Rm, [E(1, i)], v)), Fraction(-1, 2))
        return {kk: x for kk, x in s.items() if x}

    def raise_all(s):
        rows = {}
        for g in simple_raisings(m):
            for (i, j), x in s.items():
                for i2, y in dual_act(Rl, g, {i: x}).items():
                    rows[g, i2, j] = rows.get((g, i2, j), 0) + y
                for j2, y in dual_act(Rm, g, {j: x}).items():
                    rows[g, i, j2] = rows.get((g, i, j2), 0) + y
        return rows

    eqs: Dict[tuple, Dict[int, Fraction]] = {}
    for c, n in enumerate(idx):
        for key, x in raise_all(seed_of({n: Fraction(1)})).items():
            if x:
                eqs.setdefault(key, {})[c] = x
    ker = kernel_of_rows([eqs[r] for r in sorted(eqs, key=repr)], len(idx))
    if not ker:
        return None, None, 0
    v = {idx[c]: x for c, x in ker[0].items()}
    return v, seed_of(v), len(ker)


def p8_transcription(m: int, mu: Sequence[int], k: int, reading: str = "A"):
    """The displayed z^0_1, z^1_1 for lambda = (2,0,..,0), nu = mu + e_k.

    E^i_j is mix(i, j) and E_ij is down(i, j), both acting contragrediently
    on V^*.  Two defects of the display are handled as follows: the dangling
    "(nu_i + E^i_1 E^1_i) v" is dropped, and the term
    "1/4 sum E_ii (E^i_1)^2 u0 (x) +" gets partner v (reading "A") or is
    dropped (reading "B").  Returns (z0, z1, u0, v, extras) with extras
    holding the reading-A term on its own.
    """
    lam = (2,) + (0,) * (m - 1)
    Rl, Rm = build_irrep(m, lam), build_irrep(m, mu)
    u0 = _dual_highest(Rl)
    v, _, _ = _seed_vector(m, Rl, Rm, u0, k)
    if v is None:
        raise ValueError("no vector v makes the seed a highest vector")
    E = lambda i, j: SpGenerator("mix", i, j)
    D = lambda i, j: SpGenerator("down", min(i, j), max(i, j))
    nu1 = mu[0] + (1 if k == 1 else 0)
    L = lambda word: _dual_apply(Rl, word, u0)
    R = lambda word: _dual_apply(Rm, word, v)
    z0: Dict[Tuple[int, int], Fraction] = {}
    _addto(z0, _outer(u0, R([D(1, 1)])))
    for i in range(2, k + 1):
        _addto(z0, _outer(L([E(i, 1)]), R([D(1, 1), E(1, i)])), -1)
    for i in range(2, m + 1):
        for j in range(i + 1, m + 1):
            right = R([D(i, j)])
            _addto(right, R([D(1, j), E(i, 1)]))
            _addto(right, R([D(1, i), E(1, j)]))
            _addto(z0, _outer(L([E(i, 1), E(j, 1)]), right), Fraction(-1, 2))
    for i in range(2, k + 1):
        right = R([D(i, i)])
        _addto(right, R([D(1, i), E(1, i)]))
        _addto(z0, _outer(L([E(i, 1), E(i, 1)]), right), Fraction(-1, 2))
    for i in range(2, m + 1):
        for j in range(2, m + 1):
            if i != j:
                right = R([E(j, i)])
                _addto(right, R([E(j, 1), E(1, i)]))
                _addto(z0, _outer(L([E(i, 1), D(1, j)]), right), Fraction(1, 2))
    quarter: Dict[Tuple[int, int], Fraction] = {}
    for i in range(2, m + 1):
        _addto(quarter, _outer(L([D(i, i), E(i, 1), E(i, 1)]), v), Fraction(1, 4))
    if reading == "A":
        _addto(z0, quarter)
    elif reading != "B":
        raise ValueError("reading must be 'A' or 'B'")
    for i in range(2, k + 1):
        _addto(z0, _outer(L([D(1, 1), E(i, 1)]), R([E(1, i)])), Fraction(nu1 - 1, 2))
    z1: Dict[Tuple[int, int], Fraction] = {}
    _addto(z1, _outer(L([D(1, 1)]), v), -1)
    for i in range(2, k + 1):
        _addto(z1, _outer(L([D(1, 1), E(i, 1)]), R([E(1, i)])))
    clean = lambda d: {kk: x for kk, x in d.items() if x}
    return clean(z0), clean(z1), u0, v, {"quarter_term": clean(quarter)}


def _z_blocks(m: int, vec: Mapping[tuple, Fraction]) -> Dict[tuple, Fraction]:
    s1 = tuple(1 if a == 0 else 0 for a in range(2 * m))
    s0 = (0,) * (2 * m)
    out = {}
    for (a1, i, a2, j), x in vec.items():
        if a1 == s1 and a2 == s0:
            out["z0", i, j] = x
        elif a1 == s0 and a2 == s1:
            out["z1", i, j] = x
    return out


def verify_p8_example(m: int, mu: Sequence[int], k: int, cap: int = DEFAULT_CLASSIFY_CAP) -> dict:
    if m < 2:
        raise ValueError("the example needs m >= 2")
    mu = check_dominant(m, mu)
    if not 1 <= k <= m:
        raise ValueError("k must lie in 1..m")
    nu = check_dominant(m, [x + (1 if a == k - 1 else 0) for a, x in enumerate(mu)])
    lam = (2,) + (0,) * (m - 1)
    res = classify(m, lam, mu, nu, 1, cap=cap)
    Rl, Rm = build_irrep(m, lam), build_irrep(m, mu)
    u0 = _dual_highest(Rl)
    v, seed, nsol = _seed_vector(m, Rl, Rm, u0, k)
    # weight of e_i^* (x) e_j^* is -(wt_i + wt_j)
    seed_weights = sorted({tuple(-a - b for a, b in zip(Rl.weights[i], Rm.weights[j])) for (i, j) in (seed or {})})
    expected_seed = tuple(nu[0] + 1 if a == 0 else nu[a] for a in range(m))
    projections = [_z_blocks(m, w) for w in res.basis]
    report = {
        "query": {"m": m, "lambda": list(lam), "mu": list(mu), "nu": list(nu), "k": k},
        "dimension": res.dimension,
        "seed": {"solutions_for_v": nsol, "weights": [list(w) for w in seed_weights],
                 "expected_weight": list(expected_seed),
                 "weight_ok": seed_weights == [expected_seed]},
        "readings": {},
    }
    for reading in ("A", "B"):
        z0, z1, _, _, extras = p8_transcription(m, mu, k, reading)
        target = {("z0",) + kk: x for kk, x in z0.items()}
        target.update({("z1",) + kk: x for kk, x in z1.items()})
        coef = solve_in_span(projections, target) if projections else None
        entry = {"in_kernel": coef is not None}
        # diff: match the z1 block (unambiguous), then compare z0 term by term
        z1_only = [{kk: x for kk, x in p.items() if kk[0] == "z1"} for p in projections]
        c1 = solve_in_span(z1_only, {kk: x for kk, x in target.items() if kk[0] == "z1"}) if projections else None
        if c1 is None:
            entry["z1_matches_kernel"] = False
            entry["diff"] = None
        else:
            entry["z1_matches_kernel"] = True
            fit: Dict[tuple, Fraction] = {}
            for c, p in zip(c1, projections):
                _addto(fit, p, c)
            diff = {kk: target.get(kk, 0) - fit.get(kk, 0) for kk in set(fit) | set(target)}
            entry["diff"] = [[kk[0], kk[1], kk[2], format_rational(x)] for kk, x in sorted(diff.items()) if x]
        # free coefficient on the ambiguous quarter term
        if reading == "B" and extras["quarter_term"] and projections:
            q = {("z0",) + kk: x for kk, x in extras["quarter_term"].items()}
            sol = solve_in_span(projections + [q], target)
            entry["with_free_quarter_term"] = None if sol is None else format_rational(-sol[-1])
        report["readings"][reading] = entry
    return report
