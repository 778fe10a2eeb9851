"""
Polynomial differential forms, the Lefschetz decomposition and the primitive
derivations d_plus, d_minus, d_two.

A p-form is stored as {sorted index tuple: Poly} with indices in Poly
variable order (x_1..x_m, y_1..y_m).  omega = sum_i dx_i ^ dy_i, L is
omega ^ (.), and Lambda is its adjoint for the pairing in which the
monomial forms dz_I are orthonormal (so Lambda(omega) = m).

The Lefschetz decomposition alpha = sum_k beta_{p-2k} ^ omega^k is solved
once per (m, p) as constant linear algebra on the fiber and then applied to
the polynomial coefficients.  All degrees 0 <= p <= 2m are accepted; for
p > m the decomposition starts at k = p - m, which is how the isomorphism
Omega^p ~ Omega^{2m-p} shows up here.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Mapping, Tuple

from .exact import solve_in_span, kernel_of_rows
from .fields import VectorField
from .poly import Poly, random_poly

Key = Tuple[int, ...]
ConstForm = Dict[Key, Fraction]


class UnsupportedDegree(ValueError):
    pass


def _merge(a: Key, b: Key):
    """Sign and sorted key of dz_a ^ dz_b, or (0, None) if they share an index."""
    if set(a) & set(b):
        return 0, None
    seq = list(a) + list(b)
    inv = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return (-1 if inv % 2 else 1), tuple(sorted(seq))


@dataclass
class DifferentialForm:
    m: int
    degree: int
    coeffs: Dict[Key, Poly] = field(default_factory=dict)

    def __post_init__(self):
        if not 0 <= self.degree <= 2 * self.m:
            raise UnsupportedDegree("degree %d outside 0..%d" % (self.degree, 2 * self.m))
        clean = {}
        for k, v in self.coeffs.items():
            k = tuple(k)
            if len(k) != self.degree or list(k) != sorted(set(k)) or (k and not 0 <= k[0] <= k[-1] < 2 * self.m):
                raise ValueError("bad basis key %r for a %d-form" % (k, self.degree))
            if not isinstance(v, Poly):
                v = Poly.const(self.m, v)
            if v:
                clean[k] = v
        self.coeffs = clean

    @classmethod
    def function(cls, f: Poly) -> "DifferentialForm":
        return cls(f.m, 0, {(): f})

    @classmethod
    def basis_form(cls, m: int, key: Key, coeff=1) -> "DifferentialForm":
        c = coeff if isinstance(coeff, Poly) else Poly.const(m, coeff)
        return cls(m, len(key), {tuple(key): c})

    def __add__(self, other: "DifferentialForm") -> "DifferentialForm":
        self._check(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out[k] + v if k in out else v
        return DifferentialForm(self.m, self.degree, out)

    def __neg__(self):
        return DifferentialForm(self.m, self.degree, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "DifferentialForm":
        return DifferentialForm(self.m, self.degree, {k: v * c for k, v in self.coeffs.items()})

    def __eq__(self, other):
        return (isinstance(other, DifferentialForm) and self.degree == other.degree
                and self.m == other.m and self.coeffs == other.coeffs)

    def _check(self, other):
        if self.m != other.m or self.degree != other.degree:
            raise ValueError("form types differ: (m=%d, p=%d) vs (m=%d, p=%d)"
                             % (self.m, self.degree, other.m, other.degree))

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, key: Key) -> Poly:
        return self.coeffs.get(tuple(key), Poly(self.m))

    def wedge(self, other: "DifferentialForm") -> "DifferentialForm":
        if self.m != other.m:
            raise ValueError("rank mismatch")
        out: Dict[Key, Poly] = {}
        for a, f in self.coeffs.items():
            for b, g in other.coeffs.items():
                s, k = _merge(a, b)
                if s:
                    term = f * g * s
                    out[k] = out[k] + term if k in out else term
        return DifferentialForm(self.m, self.degree + other.degree, out)

    def interior(self, xi: VectorField) -> "DifferentialForm":
        if self.degree == 0:
            return DifferentialForm(self.m, 0)
        out: Dict[Key, Poly] = {}
        for key, f in self.coeffs.items():
            for pos, a in enumerate(key):
                comp = xi.components[a]
                if comp:
                    k = key[:pos] + key[pos + 1:]
                    term = f * comp * (-1 if pos % 2 else 1)
                    out[k] = out[k] + term if k in out else term
        return DifferentialForm(self.m, self.degree - 1, out)

    def to_json(self) -> dict:
        return {"m": self.m, "degree": self.degree,
                "coefficients": [{"dirs": list(k), "poly": v.to_json()} for k, v in sorted(self.coeffs.items())]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, data: Mapping) -> "DifferentialForm":
        for key in ("m", "degree", "coefficients"):
            if key not in data:
                raise ValueError("form JSON: missing key %r" % key)
        m = int(data["m"])
        out = {}
        for n, t in enumerate(data["coefficients"]):
            if "dirs" not in t or "poly" not in t:
                raise ValueError("form JSON: coefficients[%d] needs 'dirs' and 'poly'" % n)
            p = t["poly"]
            poly = Poly.parse(m, p) if isinstance(p, str) else Poly.from_json(m, p)
            k = tuple(int(x) for x in t["dirs"])
            out[k] = out[k] + poly if k in out else poly
        return cls(m, int(data["degree"]), out)

    def __repr__(self):
        if not self.coeffs:
            return "DifferentialForm(m=%d, p=%d, 0)" % (self.m, self.degree)
        names = ["dx%d" % i for i in range(1, self.m + 1)] + ["dy%d" % i for i in range(1, self.m + 1)]
        parts = ["(%s)%s" % (v.to_str(), "^".join(names[a] for a in k)) for k, v in sorted(self.coeffs.items())]
        return "DifferentialForm(m=%d, p=%d, %s)" % (self.m, self.degree, " + ".join(parts))


def omega(m: int) -> DifferentialForm:
    return DifferentialForm(m, 2, {(i, m + i): Poly.const(m, 1) for i in range(m)})


def exterior_d(alpha: DifferentialForm) -> DifferentialForm:
    m = alpha.m
    if alpha.degree >= 2 * m:
        raise UnsupportedDegree("d of a top-degree form")
    out: Dict[Key, Poly] = {}
    for key, f in alpha.coeffs.items():
        for a in range(2 * m):
            if a in key:
                continue
            df = f.diff(a)
            if not df:
                continue
            s, k = _merge((a,), key)
            term = df * s
            out[k] = out[k] + term if k in out else term
    return DifferentialForm(m, alpha.degree + 1, out)


def lie_derivative_form(xi: VectorField, alpha: DifferentialForm) -> DifferentialForm:
    """Cartan's formula L_xi = d i_xi + i_xi d."""
    p, m = alpha.degree, alpha.m
    out = DifferentialForm(m, p)
    if p > 0:
        out = out + exterior_d(alpha.interior(xi))
    if p < 2 * m:
        out = out + exterior_d(alpha).interior(xi)
    return out


def lefschetz_L(alpha: DifferentialForm) -> DifferentialForm:
    return alpha.wedge(omega(alpha.m))


def contraction(alpha: DifferentialForm) -> DifferentialForm:
    """Lambda = sum_i i(dy_i) i(dx_i), adjoint of omega ^ (.)."""
    m = alpha.m
    if alpha.degree < 2:
        raise UnsupportedDegree("Lambda lowers degree by 2; got a %d-form" % alpha.degree)
    out: Dict[Key, Poly] = {}
    for key, f in alpha.coeffs.items():
        for i in range(m):
            if i in key and m + i in key:
                # move dx_i, dy_i to the front: dx_i ^ dy_i ^ rest
                rest = tuple(k for k in key if k not in (i, m + i))
                s, k2 = _merge((i, m + i), rest)
                assert k2 == key
                out[rest] = out[rest] + f * s if rest in out else f * s
    return DifferentialForm(m, alpha.degree - 2, out)


def is_primitive(alpha: DifferentialForm) -> bool:
    if alpha.degree > alpha.m:
        return alpha.is_zero()
    if alpha.degree < 2:
        return True
    return contraction(alpha).is_zero()


def _basis_keys(m: int, p: int) -> List[Key]:
    return list(itertools.combinations(range(2 * m), p))


def _const(alpha: DifferentialForm) -> ConstForm:
    return {k: v.eval_at_zero() for k, v in alpha.coeffs.items()}


@lru_cache(maxsize=None)
def primitive_basis(m: int, q: int) -> Tuple[Tuple[Tuple[Key, Fraction], ...], ...]:
    """Basis of constant primitive q-forms (kernel of Lambda), q <= m."""
    keys = _basis_keys(m, q)
    if q < 2:
        return tuple(((k, Fraction(1)),) for k in keys)
    rows: Dict[Key, Dict[int, Fraction]] = {}
    for n, k in enumerate(keys):
        img = contraction(DifferentialForm.basis_form(m, k))
        for k2, v in img.coeffs.items():
            rows.setdefault(k2, {})[n] = v.eval_at_zero()
    ker = kernel_of_rows([rows[r] for r in sorted(rows)], len(keys))
    return tuple(tuple((keys[c], x) for c, x in sorted(v.items())) for v in ker)


def primitive_dim(m: int, q: int) -> int:
    return len(primitive_basis(m, q)) if 0 <= q <= m else 0


@lru_cache(maxsize=None)
def _lefschetz_table(m: int, p: int):
    """For each basis p-form, its primitive components beta_{p-2k} (k >= k0) as constant forms."""
    k0 = max(0, p - m)
    blocks = []
    cols: List[ConstForm] = []
    for k in range(k0, p // 2 + 1):
        q = p - 2 * k
        for b in primitive_basis(m, q):
            form = DifferentialForm(m, q, {kk: Poly.const(m, x) for kk, x in b})
            for _ in range(k):
                form = lefschetz_L(form)
            cols.append(_const(form))
            blocks.append((k, dict(b)))
    table = {}
    for key in _basis_keys(m, p):
        coef = solve_in_span(cols, {key: Fraction(1)})
        if coef is None:
            raise AssertionError("Lefschetz decomposition failed for %r" % (key,))
        comps: Dict[int, ConstForm] = {}
        for c, (k, b) in zip(coef, blocks):
            if c:
                d = comps.setdefault(k, {})
                for kk, x in b.items():
                    d[kk] = d.get(kk, 0) + c * x
        table[key] = {k: {kk: x for kk, x in d.items() if x} for k, d in comps.items()}
    return k0, table


def lefschetz_project(alpha: DifferentialForm) -> List[DifferentialForm]:
    """Primitive components [beta_p, beta_{p-2}, ...] with alpha = sum_k beta_{p-2k} ^ omega^k.

    Entry k of the list is beta_{p-2k}; for p > m the leading entries
    (k < p - m) are zero forms since no primitive forms exist above degree m.
    """
    m, p = alpha.m, alpha.degree
    k0, table = _lefschetz_table(m, p)
    comps = [dict() for _ in range(p // 2 + 1)]
    for key, f in alpha.coeffs.items():
        for k, b in table[key].items():
            d = comps[k]
            for kk, x in b.items():
                d[kk] = d[kk] + f * x if kk in d else f * x
    return [DifferentialForm(m, p - 2 * k, d) for k, d in enumerate(comps)]


def lefschetz_reconstruct(parts: List[DifferentialForm]) -> DifferentialForm:
    out = None
    for k, beta in enumerate(parts):
        term = beta
        for _ in range(k):
            term = lefschetz_L(term)
        out = term if out is None else out + term
    return out


def _require_primitive(beta: DifferentialForm):
    if not is_primitive(beta):
        raise ValueError("form is not primitive")


def d_plus(beta: DifferentialForm) -> DifferentialForm:
    if beta.degree > beta.m - 1:
        raise UnsupportedDegree("d_plus needs degree <= m-1, got %d" % beta.degree)
    _require_primitive(beta)
    return lefschetz_project(exterior_d(beta))[0]


def d_minus(beta: DifferentialForm) -> DifferentialForm:
    if beta.degree < 1 or beta.degree > beta.m:
        raise UnsupportedDegree("d_minus needs 1 <= degree <= m, got %d" % beta.degree)
    _require_primitive(beta)
    return lefschetz_project(exterior_d(beta))[1]


def d_two(beta: DifferentialForm) -> DifferentialForm:
    if beta.degree < 1 or beta.degree > beta.m:
        raise UnsupportedDegree("d_two needs 1 <= degree <= m, got %d" % beta.degree)
    return d_plus(d_minus(beta))


def random_form(m: int, p: int, rng: random.Random, max_deg: int = 3, density: float = 0.4) -> DifferentialForm:
    return DifferentialForm(m, p, {k: random_poly(m, max_deg, rng, density) for k in _basis_keys(m, p)})


def random_primitive(m: int, p: int, rng: random.Random, max_deg: int = 3, density: float = 0.4) -> DifferentialForm:
    """Random primitive p-form: a polynomial combination of the constant primitive basis."""
    out: Dict[Key, Poly] = {}
    for b in primitive_basis(m, p):
        f = random_poly(m, max_deg, rng, density)
        for k, x in b:
            out[k] = out[k] + f * x if k in out else f * x
    return DifferentialForm(m, p, out)
