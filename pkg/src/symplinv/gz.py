"""
Covariant symmetric 2-tensors ("metrics") and the second-order operator Gz.

A metric field is G = sum_{a,b} G_ab dz_a dz_b with G symmetric; for m = 1
this is a dx^2 + 2b dxdy + c dy^2 with (G_xx, G_xy, G_yy) = (a, b, c).
Its Lie derivative along xi is

    (L_xi G)_ab = xi . grad G_ab + sum_c (d_a xi^c) G_cb + G_ac (d_b xi^c).

``solve_gz_ansatz`` finds every constant-coefficient bilinear operator of
total order 2 on metrics that commutes with Hamiltonian Lie derivatives.
Translation invariance lets the residual be tested at the origin only, and
homogeneity limits the test inputs to monomials of degree <= 2 and
Hamiltonians of degree 2..4.  For m = 1 the answer is one-dimensional; the
normalized solution is frozen in ``GZ_TABLE`` and re-derived by the tests.
"""

from __future__ import annotations

from random import Random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Tuple

from .exact import format_rational, kernel_of_rows, solve_in_span
from .fields import VectorField, hamiltonian_field, poisson
from .poly import Poly, monomials, random_poly

Pair = Tuple[int, int]
Mono = Tuple[int, ...]
# (output pair, chi pair, theta pair, derivative on chi, derivative on theta)
GzKey = Tuple[Pair, Pair, Pair, Mono, Mono]


class UnsupportedRank(ValueError):
    pass


def metric_pairs(m: int) -> List[Pair]:
    return [(a, b) for a in range(2 * m) for b in range(a, 2 * m)]


@dataclass
class MetricField:
    m: int
    entries: Dict[Pair, Poly]

    def __post_init__(self):
        clean = {}
        for (a, b), p in self.entries.items():
            if a > b:
                a, b = b, a
            if not (0 <= a and b < 2 * self.m):
                raise ValueError("bad metric index (%d, %d)" % (a, b))
            if not isinstance(p, Poly):
                p = Poly.const(self.m, p)
            if p:
                clean[a, b] = clean[a, b] + p if (a, b) in clean else p
        self.entries = clean

    def get(self, a: int, b: int) -> Poly:
        if a > b:
            a, b = b, a
        return self.entries.get((a, b), Poly(self.m))

    @classmethod
    def abc(cls, a, b, c) -> "MetricField":
        """m = 1 metric a dx^2 + 2b dxdy + c dy^2; entries may be Poly or expression strings."""
        vals = [Poly.parse(1, v) if isinstance(v, str) else v for v in (a, b, c)]
        return cls(1, {(0, 0): vals[0], (0, 1): vals[1], (1, 1): vals[2]})

    def as_abc(self) -> Tuple[Poly, Poly, Poly]:
        if self.m != 1:
            raise UnsupportedRank("a, b, c components exist only for m = 1")
        return self.get(0, 0), self.get(0, 1), self.get(1, 1)

    def __add__(self, other: "MetricField") -> "MetricField":
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out[k] + v if k in out else v
        return MetricField(self.m, out)

    def __sub__(self, other: "MetricField") -> "MetricField":
        return self + other.scale(-1)

    def scale(self, c) -> "MetricField":
        return MetricField(self.m, {k: v * c for k, v in self.entries.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, MetricField) and self.m == other.m and self.entries == other.entries

    def is_zero(self) -> bool:
        return not self.entries

    def polys(self) -> List[Poly]:
        return [self.get(a, b) for a, b in metric_pairs(self.m)]

    def to_json(self) -> dict:
        if self.m == 1:
            a, b, c = self.as_abc()
            return {"m": 1, "a": a.to_str(), "b": b.to_str(), "c": c.to_str()}
        return {"m": self.m, "entries": [{"i": a, "j": b, "poly": self.get(a, b).to_str()}
                                         for a, b in metric_pairs(self.m)]}

    @classmethod
    def from_json(cls, data: Mapping) -> "MetricField":
        m = int(data.get("m", 1))
        if m == 1 and "a" in data:
            for k in "abc":
                if k not in data:
                    raise ValueError("metric JSON: missing key %r" % k)
            return cls.abc(*(str(data[k]) for k in "abc"))
        if "entries" not in data:
            raise ValueError("metric JSON: expected keys a, b, c (m = 1) or entries")
        out = {}
        for n, e in enumerate(data["entries"]):
            try:
                out[int(e["i"]), int(e["j"])] = Poly.parse(m, str(e["poly"]))
            except KeyError as exc:
                raise ValueError("metric JSON: entries[%d] missing %s" % (n, exc))
        return cls(m, out)

    @classmethod
    def random(cls, m: int, rng: Random, max_deg: int = 3, density: float = 0.4) -> "MetricField":
        return cls(m, {p: random_poly(m, max_deg, rng, density) for p in metric_pairs(m)})


def metric_lie_derivative(xi: VectorField, G: MetricField) -> MetricField:
    m = G.m
    out = {}
    for a, b in metric_pairs(m):
        v = xi(G.get(a, b))
        for c in range(2 * m):
            da = xi.components[c].diff(a)
            if da:
                v = v + da * G.get(c, b)
            db = xi.components[c].diff(b)
            if db:
                v = v + G.get(a, c) * db
        out[a, b] = v
    return MetricField(m, out)


# -- constant-coefficient bilinear operators on metrics --------------------------------

def apply_table(table: Mapping[GzKey, Fraction], chi: MetricField, theta: MetricField) -> MetricField:
    m = chi.m
    jc: Dict[tuple, Poly] = {}
    jt: Dict[tuple, Poly] = {}
    out: Dict[Pair, Poly] = {}
    for (o, p, q, al, be), c in sorted(table.items()):
        if (p, al) not in jc:
            jc[p, al] = chi.get(*p).diff_multi(al)
        if (q, be) not in jt:
            jt[q, be] = theta.get(*q).diff_multi(be)
        f, g = jc[p, al], jt[q, be]
        if f and g:
            out[o] = out[o] + f * g * c if o in out else f * g * c
    return MetricField(m, out)


def _split_orders(m: int, d: int) -> List[Tuple[Mono, Mono]]:
    out = []
    for a in range(d, -1, -1):
        for al in monomials(2 * m, a):
            for be in monomials(2 * m, d - a):
                out.append((al, be))
    return out


def ansatz_keys(m: int, order: int = 2) -> List[GzKey]:
    pairs = metric_pairs(m)
    return [(o, p, q, al, be) for o in pairs for p in pairs for q in pairs for al, be in _split_orders(m, order)]


def _jet0(G: MetricField, p: Pair, al: Mono) -> Fraction:
    """d^al G_p at the origin."""
    f = Fraction(1)
    for k in al:
        for j in range(2, k + 1):
            f *= j
    return G.get(*p).coeff(al) * f


def _b_at_zero(m, keys, index, chi: MetricField, theta: MetricField, row_for) -> None:
    """Accumulate B(chi, theta)(0) as linear forms in the unknowns: row_for(o)[n] += value."""
    for n, (o, p, q, al, be) in enumerate(keys):
        u = _jet0(chi, p, al)
        if not u:
            continue
        v = _jet0(theta, q, be)
        if v:
            r = row_for(o)
            r[n] = r.get(n, 0) + u * v


def _monomial_metrics(m: int, max_deg: int) -> List[Tuple[int, MetricField]]:
    out = []
    for d in range(max_deg + 1):
        for e in monomials(2 * m, d):
            for p in metric_pairs(m):
                out.append((d, MetricField(m, {p: Poly(m, {e: 1})})))
    return out


def gz_ansatz_system(m: int, order: int = 2) -> Tuple[List[GzKey], List[Dict[int, Fraction]]]:
    """Linear conditions on the order-`order` ansatz expressing exact invariance.

    The residual L_xi B(chi, theta) - B(L_xi chi, theta) - B(chi, L_xi theta)
    of a constant-coefficient B is translation invariant, so it vanishes
    identically iff it vanishes at the origin for all inputs.  Degree
    counting shows only deg H + deg chi + deg theta = order + 2 contributes,
    with H of degree >= 2 (degree-1 H are translations, satisfied by
    construction).
    """
    keys = ansatz_keys(m, order)
    index = {k: n for n, k in enumerate(keys)}
    inputs = _monomial_metrics(m, order)
    rows: List[Dict[int, Fraction]] = []
    for k in range(2, order + 3):
        for e in monomials(2 * m, k):
            H = Poly(m, {e: 1})
            xi = hamiltonian_field(H)
            A = None
            if k == 2:
                # constant Jacobian: (L_xi B)(0) = A^T B(0) + B(0) A, A_ca = d_a xi^c
                A = {(c, a): xi.components[c].diff(a).eval_at_zero() for c in range(2 * m) for a in range(2 * m)}
            for dc, chi in inputs:
                for dt, theta in inputs:
                    if k + dc + dt != order + 2:
                        continue
                    res: Dict[Pair, Dict[int, Fraction]] = {}

                    def row(o):
                        return res.setdefault(o, {})

                    Lchi = metric_lie_derivative(xi, chi)
                    Ltheta = metric_lie_derivative(xi, theta)
                    neg: Dict[Pair, Dict[int, Fraction]] = {}
                    _b_at_zero(m, keys, index, Lchi, theta, lambda o: neg.setdefault(o, {}))
                    _b_at_zero(m, keys, index, chi, Ltheta, lambda o: neg.setdefault(o, {}))
                    for o, r in neg.items():
                        t = row(o)
                        for n, x in r.items():
                            t[n] = t.get(n, 0) - x
                    if A is not None:
                        B0: Dict[Pair, Dict[int, Fraction]] = {}
                        _b_at_zero(m, keys, index, chi, theta, lambda o: B0.setdefault(o, {}))
                        full = {}
                        for (a, b), r in B0.items():
                            full[a, b] = r
                            if a != b:
                                full[b, a] = r
                        for a, b in metric_pairs(m):
                            t = row((a, b))
                            for c in range(2 * m):
                                for (cb, r) in ((A.get((c, a), 0), full.get((c, b))), (A.get((c, b), 0), full.get((a, c)))):
                                    if cb and r:
                                        for n, x in r.items():
                                            t[n] = t.get(n, 0) + cb * x
                    for o in sorted(res):
                        r = {n: x for n, x in res[o].items() if x}
                        if r:
                            rows.append(r)
    return keys, rows


def solve_gz_ansatz(m: int = 1, order: int = 2) -> List[Dict[GzKey, Fraction]]:
    """Basis of all invariant bilinear operators of the given total order on metrics."""
    keys, rows = gz_ansatz_system(m, order)
    ker = kernel_of_rows(rows, len(keys))
    return [{keys[n]: x for n, x in v.items()} for v in ker]


# -- the printed m = 1 formula, block by block -----------------------------------------

def hessian_block(chi: MetricField, theta: MetricField) -> MetricField:
    """g_xx dx^2 + 2 g_xy dxdy + g_yy dy^2 with g = a c' - 2 b b' + c a'."""
    a, b, c = chi.as_abc()
    a2, b2, c2 = theta.as_abc()
    g = a * c2 - b * b2 * 2 + c * a2
    return MetricField(1, {(0, 0): g.diff(0, 2), (0, 1): g.diff(0).diff(1), (1, 1): g.diff(1, 2)})


def laplace_factor(G: MetricField) -> Poly:
    a, b, c = G.as_abc()
    return a.diff(1, 2) - b.diff(0).diff(1) * 2 + c.diff(0, 2)


def gz_blocks(chi: MetricField, theta: MetricField, bracket_sign: int = 1) -> Dict[str, MetricField]:
    """Candidate blocks of the printed display, with both readings of the suspect terms.

    "dxdy" terms enter the b slot with a factor 1/2 since the dxdy
    coefficient of a dx^2 + 2b dxdy + c dy^2 is 2b.  ``bracket_sign = -1``
    reads {f, g} as f_y g_x - f_x g_y instead of the package convention.
    """
    a, b, c = chi.as_abc()
    a2, b2, c2 = theta.as_abc()
    lap1, lap2 = laplace_factor(chi), laplace_factor(theta)
    half = Fraction(1, 2)

    def pb(f, g):
        return poisson(f, g) * bracket_sign

    return {
        "hessian_g": hessian_block(chi, theta),
        "pb_dxdy": MetricField(1, {(0, 1): (pb(c, a2) - pb(a, c2)) * half}),
        "pb_dx2": MetricField(1, {(0, 0): pb(a, b2) - pb(b, a2)}),
        "pb_dy2": MetricField(1, {(1, 1): pb(b, c2) - pb(c, b2)}),
        "lap_chi_theta_literal": MetricField(1, {(0, 0): lap1 * a2, (0, 1): lap1 * b, (1, 1): lap1 * c2}),
        "lap_chi_theta": MetricField(1, {(0, 0): lap1 * a2, (0, 1): lap1 * b2, (1, 1): lap1 * c2}),
        "lap_chi_chi_literal": MetricField(1, {(0, 0): lap1 * a, (0, 1): lap1 * b, (1, 1): lap1 * c}),
        "lap_theta_chi": MetricField(1, {(0, 0): lap2 * a, (0, 1): lap2 * b, (1, 1): lap2 * c}),
    }


BLOCK_NOTES = {
    "hessian_g": "unambiguous: d^2g/dx^2 dx^2 + 2 d^2g/dxdy dxdy + d^2g/dy^2 dy^2, g = ac' - 2bb' + ca'",
    "pb_dxdy": "unambiguous: ({c,a'} - {a,c'}) dxdy",
    "pb_dx2": "({a,b'} - {b,a'}) dx^2",
    "pb_dy2": "({b,c'} - {c,b'}) dy^2; printed glued to the preceding product with no operation symbol",
    "lap_chi_theta_literal": "printed reading: Delta(a,b,c) (a' dx^2 + 2b dxdy + c' dy^2)",
    "lap_chi_theta": "corrected reading: 2b -> 2b', giving Delta(a,b,c) times the second metric",
    "lap_chi_chi_literal": "printed reading: the same factor Delta(a,b,c) times the first metric again",
    "lap_theta_chi": "corrected reading: Delta(a',b',c') times the first metric",
}

READINGS = {
    "literal": ["hessian_g", "pb_dxdy", "pb_dx2", "pb_dy2", "lap_chi_theta_literal", "lap_chi_chi_literal"],
    "corrected": ["hessian_g", "pb_dxdy", "pb_dx2", "pb_dy2", "lap_chi_theta", "lap_theta_chi"],
}


def _table_from_callable(fn, m: int = 1, order: int = 2) -> Dict[GzKey, Fraction]:
    """Coefficient table of a constant-coefficient operator of homogeneous order
    `order`, read off from its values on monomial inputs."""
    table: Dict[GzKey, Fraction] = {}
    for al, be in _split_orders(m, order):
        f = Fraction(1)
        for k in al + be:
            for j in range(2, k + 1):
                f *= j
        for p in metric_pairs(m):
            for q in metric_pairs(m):
                out = fn(MetricField(m, {p: Poly(m, {al: 1})}), MetricField(m, {q: Poly(m, {be: 1})}))
                for o in metric_pairs(m):
                    c = out.get(*o).eval_at_zero()
                    if c:
                        table[o, p, q, al, be] = c / f
    return table


def block_tables(bracket_sign: int = 1) -> Dict[str, Dict[GzKey, Fraction]]:
    names = list(BLOCK_NOTES)
    return {n: _table_from_callable(lambda x, y, n=n: gz_blocks(x, y, bracket_sign)[n]) for n in names}


def reconcile(solved: Mapping[GzKey, Fraction]) -> dict:
    """Express a solved operator through the printed blocks.

    For each bracket sign convention and each reading of the suspect terms,
    reports whether the operator is a combination of the blocks and with
    which coefficients.  ``unambiguous_scalar`` is the common coefficient of
    the g-Hessian block and the dxdy bracket block when they agree.
    """
    out = {"notes": BLOCK_NOTES, "conventions": {}}
    for sign, label in ((1, "{f,g} = f_x g_y - f_y g_x"), (-1, "{f,g} = f_y g_x - f_x g_y")):
        blocks = block_tables(sign)
        conv = {"bracket": label, "readings": {}}
        for name, use in READINGS.items():
            coef = solve_in_span([blocks[b] for b in use], dict(solved))
            conv["readings"][name] = {
                "representable": coef is not None,
                "coefficients": None if coef is None else {b: format_rational(c) for b, c in zip(use, coef)},
            }
        corr = conv["readings"]["corrected"]["coefficients"]
        scalar = None
        if corr and corr["hessian_g"] == corr["pb_dxdy"] and corr["hessian_g"] != "0":
            scalar = corr["hessian_g"]
        conv["unambiguous_scalar"] = scalar
        out["conventions"]["package" if sign == 1 else "reversed"] = conv
    return out


def normalized_solution() -> Dict[GzKey, Fraction]:
    """The one-dimensional solution of the m = 1 ansatz, scaled so the g-Hessian block has coefficient 1."""
    sol = solve_gz_ansatz(1, 2)
    if len(sol) != 1:
        raise AssertionError("expected a one-dimensional solution space, got %d" % len(sol))
    v = sol[0]
    blocks = block_tables(1)
    use = READINGS["corrected"]
    coef = solve_in_span([blocks[b] for b in use], v)
    if coef is None or not coef[0]:
        raise AssertionError("solution has no g-Hessian component")
    return {k: x / coef[0] for k, x in v.items()}


# -- certified table ---------------------------------------------------------------------

def _load_table(rows) -> Dict[GzKey, Fraction]:
    return {(tuple(o), tuple(p), tuple(q), tuple(al), tuple(be)): Fraction(c) for o, p, q, al, be, c in rows}


def table_rows(table: Mapping[GzKey, Fraction]) -> List[list]:
    return [[list(o), list(p), list(q), list(al), list(be), format_rational(c)]
            for (o, p, q, al, be), c in sorted(table.items())]


# Output of normalized_solution(), frozen; tests re-derive it from scratch.
# Rows: output pair, chi pair, theta pair, d^alpha on chi, d^beta on theta, coefficient.
GZ_TABLE_ROWS: List[list] = [
    [[0, 0], [0, 0], [0, 0], [0, 0], [0, 2], '1'],
    [[0, 0], [0, 0], [0, 0], [0, 2], [0, 0], '1'],
    [[0, 0], [0, 0], [0, 1], [0, 0], [1, 1], '-2'],
    [[0, 0], [0, 0], [0, 1], [0, 1], [1, 0], '-1'],
    [[0, 0], [0, 0], [0, 1], [1, 0], [0, 1], '1'],
    [[0, 0], [0, 0], [1, 1], [0, 0], [2, 0], '2'],
    [[0, 0], [0, 0], [1, 1], [1, 0], [1, 0], '2'],
    [[0, 0], [0, 0], [1, 1], [2, 0], [0, 0], '1'],
    [[0, 0], [0, 1], [0, 0], [0, 1], [1, 0], '1'],
    [[0, 0], [0, 1], [0, 0], [1, 0], [0, 1], '-1'],
    [[0, 0], [0, 1], [0, 0], [1, 1], [0, 0], '-2'],
    [[0, 0], [0, 1], [0, 1], [0, 0], [2, 0], '-2'],
    [[0, 0], [0, 1], [0, 1], [1, 0], [1, 0], '-4'],
    [[0, 0], [0, 1], [0, 1], [2, 0], [0, 0], '-2'],
    [[0, 0], [1, 1], [0, 0], [0, 0], [2, 0], '1'],
    [[0, 0], [1, 1], [0, 0], [1, 0], [1, 0], '2'],
    [[0, 0], [1, 1], [0, 0], [2, 0], [0, 0], '2'],
    [[0, 1], [0, 0], [0, 1], [0, 2], [0, 0], '1'],
    [[0, 1], [0, 0], [1, 1], [0, 0], [1, 1], '1'],
    [[0, 1], [0, 0], [1, 1], [0, 1], [1, 0], '1/2'],
    [[0, 1], [0, 0], [1, 1], [1, 0], [0, 1], '3/2'],
    [[0, 1], [0, 0], [1, 1], [1, 1], [0, 0], '1'],
    [[0, 1], [0, 1], [0, 0], [0, 0], [0, 2], '1'],
    [[0, 1], [0, 1], [0, 1], [0, 0], [1, 1], '-4'],
    [[0, 1], [0, 1], [0, 1], [0, 1], [1, 0], '-2'],
    [[0, 1], [0, 1], [0, 1], [1, 0], [0, 1], '-2'],
    [[0, 1], [0, 1], [0, 1], [1, 1], [0, 0], '-4'],
    [[0, 1], [0, 1], [1, 1], [0, 0], [2, 0], '1'],
    [[0, 1], [1, 1], [0, 0], [0, 0], [1, 1], '1'],
    [[0, 1], [1, 1], [0, 0], [0, 1], [1, 0], '3/2'],
    [[0, 1], [1, 1], [0, 0], [1, 0], [0, 1], '1/2'],
    [[0, 1], [1, 1], [0, 0], [1, 1], [0, 0], '1'],
    [[0, 1], [1, 1], [0, 1], [2, 0], [0, 0], '1'],
    [[1, 1], [0, 0], [1, 1], [0, 0], [0, 2], '1'],
    [[1, 1], [0, 0], [1, 1], [0, 1], [0, 1], '2'],
    [[1, 1], [0, 0], [1, 1], [0, 2], [0, 0], '2'],
    [[1, 1], [0, 1], [0, 1], [0, 0], [0, 2], '-2'],
    [[1, 1], [0, 1], [0, 1], [0, 1], [0, 1], '-4'],
    [[1, 1], [0, 1], [0, 1], [0, 2], [0, 0], '-2'],
    [[1, 1], [0, 1], [1, 1], [0, 1], [1, 0], '-1'],
    [[1, 1], [0, 1], [1, 1], [1, 0], [0, 1], '1'],
    [[1, 1], [0, 1], [1, 1], [1, 1], [0, 0], '-2'],
    [[1, 1], [1, 1], [0, 0], [0, 0], [0, 2], '2'],
    [[1, 1], [1, 1], [0, 0], [0, 1], [0, 1], '2'],
    [[1, 1], [1, 1], [0, 0], [0, 2], [0, 0], '1'],
    [[1, 1], [1, 1], [0, 1], [0, 0], [1, 1], '-2'],
    [[1, 1], [1, 1], [0, 1], [0, 1], [1, 0], '1'],
    [[1, 1], [1, 1], [0, 1], [1, 0], [0, 1], '-1'],
    [[1, 1], [1, 1], [1, 1], [0, 0], [2, 0], '1'],
    [[1, 1], [1, 1], [1, 1], [2, 0], [0, 0], '1'],
]
GZ_TABLE: Dict[GzKey, Fraction] = _load_table(GZ_TABLE_ROWS)


def gz_m1(chi: MetricField, theta: MetricField) -> MetricField:
    if chi.m != 1 or theta.m != 1:
        raise UnsupportedRank("Gz is implemented for m = 1 only")
    return apply_table(GZ_TABLE, chi, theta)


def broken_product(chi: MetricField, theta: MetricField) -> MetricField:
    """Coefficientwise product (a a', b b', c c'): a deliberately non-invariant control."""
    if chi.m != theta.m:
        raise ValueError("rank mismatch")
    return MetricField(chi.m, {p: chi.get(*p) * theta.get(*p) for p in metric_pairs(chi.m)})
