"""
Concrete invariant operators, dualization, and the invariance checker.

Every operator is wrapped as an :class:`InvariantOperator`: a callable
plus a :class:`FieldKind` for each argument and for the result.  A kind
knows how to draw random inputs, how a Hamiltonian field acts on its values
by Lie derivative, and how to serialize them.  ``check_invariance`` only
talks to kinds, so tensor fields in an irrep basis, functions, primitive
forms, symmetric tensors written as momenta polynomials and metric fields
are all checked by the same code.
"""

from __future__ import annotations

import itertools
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from .bidiff import BidifferentialOperator
from .exact import dense_inverse, format_rational, SpanTracker
from .fields import (
    CONVENTIONS,
    PolyTensorField,
    VectorField,
    hamiltonian_field,
    lie_derivative,
    lie_derivative_momenta,
    poly_to_w,
    random_momenta_poly,
    schouten,
    w_to_poly,
)
from .forms import (
    DifferentialForm,
    d_minus,
    d_plus,
    d_two,
    is_primitive,
    lie_derivative_form,
    random_primitive,
)
from .gz import MetricField, broken_product, gz_m1, metric_lie_derivative
from .poly import Poly, monomials, random_poly
from .sprep import IrrepBasis, build_irrep, check_dominant, decompose_tensor

REPORT_SCHEMA = "symplinv-invariance/1"


class NoSuchComponent(ValueError):
    pass


class UnknownOperator(ValueError):
    pass


# -- field kinds ---------------------------------------------------------------------

class FieldKind:
    name = "field"
    m = 0

    def random(self, rng: random.Random, max_deg: int):
        raise NotImplementedError

    def lie(self, xi: VectorField, v):
        raise NotImplementedError

    def polys(self, v) -> List[Poly]:
        raise NotImplementedError

    def to_json(self, v):
        raise NotImplementedError

    def from_json(self, data):
        raise NotImplementedError

    def is_zero(self, v) -> bool:
        return all(p.is_zero() for p in self.polys(v))


class TensorKind(FieldKind):
    """Fields with fiber V_lambda, components in the irrep basis."""

    def __init__(self, fiber: IrrepBasis):
        self.fiber = fiber
        self.m = fiber.m
        self.name = "T%s" % (tuple(fiber.weight),)

    def random(self, rng, max_deg):
        return PolyTensorField.random(self.fiber, rng, max_deg)

    def lie(self, xi, v):
        return lie_derivative(xi, v)

    def polys(self, v):
        return list(v.components)

    def to_json(self, v):
        return v.to_json()

    def from_json(self, data):
        if isinstance(data, str) and self.fiber.dim == 1:
            return PolyTensorField(self.m, self.fiber, [Poly.parse(self.m, data)])
        if isinstance(data, list):
            return PolyTensorField(self.m, self.fiber, [Poly.parse(self.m, str(s)) for s in data])
        f = PolyTensorField.from_json(data)
        if f.fiber.weight != self.fiber.weight:
            raise ValueError("field of weight %r, expected %r" % (list(f.fiber.weight), list(self.fiber.weight)))
        return f


class FormKind(FieldKind):
    def __init__(self, m: int, degree: int):
        self.m, self.degree = m, degree
        self.name = "Pi^%d" % degree

    def random(self, rng, max_deg):
        return random_primitive(self.m, self.degree, rng, max_deg)

    def lie(self, xi, v):
        return lie_derivative_form(xi, v)

    def polys(self, v):
        return [v.coeff(k) for k in itertools.combinations(range(2 * self.m), v.degree)]

    def to_json(self, v):
        return v.to_json()

    def from_json(self, data):
        f = DifferentialForm.from_json(data)
        if f.m != self.m or f.degree != self.degree:
            raise ValueError("expected a primitive %d-form with m=%d" % (self.degree, self.m))
        if not is_primitive(f):
            raise ValueError("form is not primitive")
        return f


class MomentaKind(FieldKind):
    """Symmetric contravariant k-tensors as polynomials homogeneous of degree k in the momenta."""

    def __init__(self, m: int, k: int):
        self.m, self.k = m, k
        self.name = "S^%d" % k

    def random(self, rng, max_deg):
        return random_momenta_poly(self.m, self.k, rng, max_deg)

    def lie(self, xi, v):
        return lie_derivative_momenta(xi, v)

    def polys(self, v):
        return [v]

    def to_json(self, v):
        return v.to_str()

    def from_json(self, data):
        p = Poly.parse(self.m, str(data), 4 * self.m)
        if not p.homogeneous_in(list(range(2 * self.m, 4 * self.m)), self.k):
            raise ValueError("expected a polynomial of degree %d in the momenta" % self.k)
        return p


class MetricKind(FieldKind):
    def __init__(self, m: int):
        self.m = m
        self.name = "metric"

    def random(self, rng, max_deg):
        return MetricField.random(self.m, rng, max_deg)

    def lie(self, xi, v):
        return metric_lie_derivative(xi, v)

    def polys(self, v):
        return v.polys()

    def to_json(self, v):
        return v.to_json()

    def from_json(self, data):
        g = MetricField.from_json(data)
        if g.m != self.m:
            raise ValueError("metric of rank %d, expected %d" % (g.m, self.m))
        return g


# -- operators -----------------------------------------------------------------------

@dataclass
class InvariantOperator:
    name: str
    m: int
    sources: Tuple[FieldKind, ...]
    target: FieldKind
    fn: Callable
    bidiff: Optional[BidifferentialOperator] = None
    registry_key: Optional[Tuple[str, tuple]] = None

    @property
    def arity(self) -> int:
        return len(self.sources)

    def __call__(self, *args):
        if len(args) != self.arity:
            raise ValueError("%s takes %d arguments" % (self.name, self.arity))
        return self.fn(*args)


def from_bidiff(B: BidifferentialOperator, name: str = "") -> InvariantOperator:
    return InvariantOperator(name or B.name or "bidiff", B.m, tuple(TensorKind(s) for s in B.sources),
                             TensorKind(B.target), B, bidiff=B)


def with_trivial_slot(op: InvariantOperator) -> InvariantOperator:
    """Unary D as the binary operator (chi, f) -> f * D(chi) with f a function."""
    if op.arity != 1:
        raise ValueError("expected a unary operator")
    fkind = TensorKind(build_irrep(op.m, (0,) * op.m))
    target = op.target

    def fn(chi, f):
        out = op.fn(chi)
        g = f.components[0]
        if isinstance(target, FormKind):
            return out.scale(g)
        if isinstance(target, TensorKind):
            return PolyTensorField(out.m, out.fiber, [p * g for p in out.components])
        if isinstance(target, MetricKind):
            return MetricField(out.m, {k: p * g for k, p in out.entries.items()})
        raise TypeError("unsupported target kind %s" % target.name)

    key = None if op.registry_key is None else ("trivial-slot", (op.registry_key,))
    return InvariantOperator(op.name + "(x)1", op.m, (op.sources[0], fkind), target, fn, registry_key=key)


# -- fiber bookkeeping -------------------------------------------------------------------

def fiber_tensor(f: PolyTensorField) -> Dict[tuple, Poly]:
    """The field as a W^{(x)k}-valued polynomial: key (w_1..w_k) -> Poly."""
    out: Dict[tuple, Poly] = {}
    for comp, b in zip(f.components, f.fiber.basis):
        if not comp:
            continue
        for key, x in b.items():
            out[key] = out[key] + comp * x if key in out else comp * x
    return {k: v for k, v in out.items() if v}


@lru_cache(maxsize=None)
def _coordinate_map(m: int, lam: tuple):
    """Ambient keys K and the inverse of the basis restricted to K, for reading off coordinates."""
    rep = build_irrep(m, lam)
    span = SpanTracker()
    chosen = []
    keys = sorted({k for b in rep.basis for k in b})
    for k in keys:
        row = {i: b[k] for i, b in enumerate(rep.basis) if b.get(k)}
        if row and span.add(row):
            chosen.append(k)
        if len(chosen) == rep.dim:
            break
    M = [[rep.basis[i].get(k, Fraction(0)) for i in range(rep.dim)] for k in chosen]
    return chosen, dense_inverse(M)


def tensor_to_field(fiber: IrrepBasis, t: Mapping[tuple, Poly]) -> PolyTensorField:
    """Inverse of fiber_tensor for tensors lying in the fiber."""
    m = fiber.m
    keys, inv = _coordinate_map(m, tuple(fiber.weight))
    vals = [t.get(k, Poly(m)) for k in keys]
    comps = []
    for i in range(fiber.dim):
        p = Poly(m)
        for j, v in enumerate(vals):
            if inv[i][j] and v:
                p = p + v * inv[i][j]
        comps.append(p)
    f = PolyTensorField(m, fiber, comps)
    back = fiber_tensor(f)
    if back != {k: v for k, v in t.items() if v}:
        raise ValueError("tensor does not lie in the fiber V%r" % (tuple(fiber.weight),))
    return f


def field_to_momenta(f: PolyTensorField) -> Poly:
    """Symmetric tensor field in V_(k,0,..) as sum T^{w_1..w_k} p_{w_1}...p_{w_k}."""
    m = f.m
    out = Poly(m, None, 4 * m)
    for key, p in fiber_tensor(f).items():
        e = [0] * (2 * m)
        for w in key:
            e[w_to_poly(m, w)] += 1
        mono = Poly(m, {(0,) * (2 * m) + tuple(e): 1}, 4 * m)
        out = out + Poly(m, {t + (0,) * (2 * m): c for t, c in p.terms.items()}, 4 * m) * mono
    return out


def momenta_to_field(P: Poly, k: int) -> PolyTensorField:
    """Inverse of field_to_momenta, spreading each momentum monomial over all orderings."""
    m = P.m
    fiber = build_irrep(m, (k,) + (0,) * (m - 1))
    t: Dict[tuple, Poly] = {}
    for e, c in P.terms.items():
        base, mom = e[:2 * m], e[2 * m:]
        if sum(mom) != k:
            raise ValueError("not homogeneous of degree %d in the momenta" % k)
        ws = []
        for a, n in enumerate(mom):
            ws += [poly_to_w(m, a)] * n
        perms = set(itertools.permutations(ws))
        share = c / len(perms)
        for key in perms:
            q = Poly(m, {base: share})
            t[key] = t[key] + q if key in t else q
    return tensor_to_field(fiber, t)


def vector_field_of(f: PolyTensorField) -> VectorField:
    """A field of type (1,0,..,0) read as a vector field (the fiber is the tangent space W)."""
    m = f.m
    t = fiber_tensor(f)
    return VectorField(m, [t.get((poly_to_w(m, a),), Poly(m)) for a in range(2 * m)])


def field_of_vector(fiber: IrrepBasis, xi: VectorField) -> PolyTensorField:
    m = fiber.m
    return tensor_to_field(fiber, {(poly_to_w(m, a),): c for a, c in enumerate(xi.components) if c})


# -- concrete operators --------------------------------------------------------------------

def poisson_operator(m: int) -> BidifferentialOperator:
    T0 = build_irrep(m, (0,) * m)
    coeffs = {}
    for i in range(m):
        ex = tuple(int(a == i) for a in range(2 * m))
        ey = tuple(int(a == m + i) for a in range(2 * m))
        coeffs[0, ((0, ex), (0, ey))] = 1
        coeffs[0, ((0, ey), (0, ex))] = -1
    return BidifferentialOperator(m, (T0, T0), T0, coeffs, "poisson")


def z_operators(m: int, lam: Sequence[int], mu: Sequence[int], nu: Sequence[int]) -> List[BidifferentialOperator]:
    """Pointwise projections V_lam (x) V_mu -> V_nu, one per multiplicity."""
    from .classifier import classify, extract_all
    lam, mu, nu = (check_dominant(m, w) for w in (lam, mu, nu))
    mult = decompose_tensor(m, lam, mu).get(nu, 0)
    if not mult:
        raise NoSuchComponent("V%r does not occur in V%r (x) V%r" % (nu, lam, mu))
    res = classify(m, lam, mu, nu, 0)
    if res.dimension != mult:
        raise AssertionError("degree-0 kernel %d differs from multiplicity %d" % (res.dimension, mult))
    return extract_all(res, "z:%s" % ",".join(map(str, nu)))


def z_project(chi: PolyTensorField, theta: PolyTensorField, nu: Sequence[int]) -> List[PolyTensorField]:
    """Z(chi, theta): the pointwise projection onto each copy of V_nu in V_lam (x) V_mu."""
    return [Z(chi, theta) for Z in z_operators(chi.m, chi.fiber.weight, theta.fiber.weight, nu)]


def lie_pairing(xi: PolyTensorField, t: PolyTensorField) -> PolyTensorField:
    """L(xi, t): transport along xi minus the sp-part of its Jacobian acting on the fiber."""
    m = xi.m
    if tuple(xi.fiber.weight) != (1,) + (0,) * (m - 1):
        raise ValueError("first argument must have type (1,0,...,0), got %r" % (list(xi.fiber.weight),))
    return lie_derivative(vector_field_of(xi), t, project=True)


def _multinomial_split(alpha):
    """All (gamma, alpha - gamma) with the product of binomial coefficients."""
    for gamma in itertools.product(*(range(a + 1) for a in alpha)):
        c = 1
        for a, g in zip(alpha, gamma):
            c *= math.comb(a, g)
        yield tuple(gamma), tuple(a - g for a, g in zip(alpha, gamma)), c


def dualize(B: BidifferentialOperator, slot: int) -> BidifferentialOperator:
    """Formal adjoint in `slot` (1 or 2) for the pairing int <chi, theta> omega^m.

    Slot 1 yields B* : T(nu) x T(mu) -> T(lam) with
    int <B(chi, theta), eta> = int <B*(eta, theta), chi>; slot 2 yields
    T(lam) x T(nu) -> T(mu) with int <B(chi, theta), eta> = int <B*(chi, eta), theta>.
    The output of either side sits in the left slot of the fiber form,
    which makes dualization an exact involution.
    """
    if B.arity != 2 or slot not in (1, 2):
        raise ValueError("dualize needs a binary operator and slot 1 or 2")
    s = slot - 1
    src = B.sources[s]
    other = B.sources[1 - s]
    Gn = B.target.invariant_form()
    Gs = src.invariant_form()
    Gs_inv = dense_inverse(Gs.to_dense())
    Gn_rows: Dict[int, List[Tuple[int, Fraction]]] = {}
    for (k, k2), v in Gn.entries.items():
        Gn_rows.setdefault(k, []).append((k2, v))
    out: Dict[tuple, Fraction] = {}
    for (k, slots), c in B.coeffs.items():
        i, A = slots[s]
        j, Bm = slots[1 - s]
        sign = -1 if sum(A) % 2 else 1
        for k2, g in Gn_rows.get(k, ()):
            for gamma, rest, binom in _multinomial_split(A):
                # d^A (d^B theta_j * eta_k2): d^gamma on theta, d^rest on eta
                nb = tuple(x + y for x, y in zip(Bm, gamma))
                base = c * sign * binom * g
                for i2 in range(src.dim):
                    w = Gs_inv[i][i2]
                    if not w:
                        continue
                    eta_slot = (k2, rest)
                    new = (eta_slot, (j, nb)) if s == 0 else ((j, nb), eta_slot)
                    key = (i2, new)
                    out[key] = out.get(key, 0) + base * w
    sources = (B.target, other) if s == 0 else (other, B.target)
    name = "%s*%d" % (B.name or "B", slot)
    return BidifferentialOperator(B.m, sources, src, out, name)


# -- invariance checking -------------------------------------------------------------------

@dataclass
class InvarianceReport:
    operator: str
    m: int
    seed: int
    trials: int
    max_h_degree: int
    input_degree: int
    residuals: List[dict]
    mode: str = "random"

    @property
    def passed(self) -> bool:
        return all(r["terms"] == 0 for r in self.residuals)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def to_json(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "operator": self.operator,
            "m": self.m,
            "mode": self.mode,
            "seed": self.seed,
            "trials": self.trials,
            "max_h_degree": self.max_h_degree,
            "input_degree": self.input_degree,
            "verdict": self.verdict,
            "residuals": self.residuals,
            "conventions": CONVENTIONS,
        }


def residual(op: InvariantOperator, H: Poly, args: Sequence) -> list:
    """L_xi B(args) - sum_p B(.., L_xi arg_p, ..) with xi = X_H."""
    xi = hamiltonian_field(H)
    lhs = op.target.lie(xi, op(*args))
    polys = op.target.polys(lhs)
    for p, kind in enumerate(op.sources):
        moved = list(args)
        moved[p] = kind.lie(xi, args[p])
        term = op.target.polys(op(*moved))
        polys = [a - b for a, b in zip(polys, term)]
    return polys


def _norm(polys: Sequence[Poly]) -> dict:
    terms = sum(len(p.terms) for p in polys)
    mx = max((p.max_abs_coeff() for p in polys), default=Fraction(0))
    return {"terms": terms, "max_abs_coeff": format_rational(mx)}


def trial_rng(seed: int, t: int) -> random.Random:
    return random.Random("%d:%d" % (seed, t))


def _run_trial(op: InvariantOperator, seed: int, t: int, max_h: int, input_degree: int) -> dict:
    rng = trial_rng(seed, t)
    H = random_poly(op.m, max_h, rng, density=0.5, min_deg=1)
    args = [k.random(rng, input_degree) for k in op.sources]
    out = _norm(residual(op, H, args))
    out["trial"] = t
    out["h_degree"] = H.degree()
    return out


def _grid_inputs(kind: FieldKind, degree: int):
    """Monomial basis inputs of a kind up to the given polynomial degree."""
    m = kind.m
    monos = [e for d in range(degree + 1) for e in monomials(2 * m, d)]
    if isinstance(kind, TensorKind):
        for i in range(kind.fiber.dim):
            for e in monos:
                comps = [Poly(m) for _ in range(kind.fiber.dim)]
                comps[i] = Poly(m, {e: 1})
                yield PolyTensorField(m, kind.fiber, comps)
    elif isinstance(kind, MetricKind):
        from .gz import metric_pairs
        for p in metric_pairs(m):
            for e in monos:
                yield MetricField(m, {p: Poly(m, {e: 1})})
    else:
        raise ValueError("grid mode supports tensor and metric kinds")


def check_invariance(op: InvariantOperator, trials: int = 20, seed: int = 0, max_h_degree: int = 4,
                     input_degree: int = 3, jobs: int = 1, mode: str = "random") -> InvarianceReport:
    """Exact residual of the Leibniz identity with xi = X_H on random (or grid) inputs.

    In ``grid`` mode H runs over all monomials of degree 2..max_h_degree and
    the inputs over monomial basis fields of degree <= input_degree; by
    multilinearity this settles invariance for operators whose order is at
    most input_degree.
    """
    if mode == "grid":
        results = []
        n = 0
        for d in range(2, max_h_degree + 1):
            for e in monomials(2 * op.m, d):
                H = Poly(op.m, {e: 1})
                for args in itertools.product(*(list(_grid_inputs(k, input_degree)) for k in op.sources)):
                    r = _norm(residual(op, H, args))
                    r["trial"] = n
                    r["h_degree"] = d
                    n += 1
                    if r["terms"]:
                        results.append(r)
        if not results:
            results = [{"trial": -1, "terms": 0, "max_abs_coeff": "0", "h_degree": max_h_degree}]
        return InvarianceReport(op.name, op.m, seed, n, max_h_degree, input_degree, results, mode="grid")
    if jobs > 1 and op.registry_key is not None:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futs = [pool.submit(_registry_trial, op.registry_key, op.m, seed, t, max_h_degree, input_degree)
                    for t in range(trials)]
            results = [f.result() for f in futs]
    else:
        results = [_run_trial(op, seed, t, max_h_degree, input_degree) for t in range(trials)]
    results.sort(key=lambda r: r["trial"])
    return InvarianceReport(op.name, op.m, seed, trials, max_h_degree, input_degree, results)


def _registry_trial(key, m, seed, t, max_h, input_degree):
    return _run_trial(_from_key(key, m), seed, t, max_h, input_degree)


# -- registry ------------------------------------------------------------------------------

def _weight_arg(m: int, w, default) -> tuple:
    if w is None:
        return tuple(default)
    if isinstance(w, str):
        w = [int(x) for x in w.split(",") if x.strip()]
    return check_dominant(m, w)


def operator_names() -> List[str]:
    return ["poisson", "lie", "schouten", "dplus", "dminus", "d2", "gz", "z:<nu>", "broken-product"]


def get_operator(name: str, m: int, lam=None, mu=None, k: Optional[int] = None, l: Optional[int] = None,
                 degree: Optional[int] = None, index: int = 0) -> InvariantOperator:
    """Named operators.  Parameters: ``lam``/``mu`` source weights (z, lie),
    ``k``/``l`` tensor degrees (schouten), ``degree`` of the input form (dplus, dminus, d2)."""
    params = (lam if lam is None else tuple(_weight_arg(m, lam, ())),
              mu if mu is None else tuple(_weight_arg(m, mu, ())), k, l, degree, index)
    op = _build(name, m, lam, mu, k, l, degree, index)
    op.registry_key = (name, params)
    return op


def _from_key(key, m):
    if key[0] == "trivial-slot":
        return with_trivial_slot(_from_key(key[1][0], m))
    name, (lam, mu, k, l, degree, index) = key
    return get_operator(name, m, lam, mu, k, l, degree, index)


def _build(name, m, lam, mu, k, l, degree, index) -> InvariantOperator:
    if m < 1:
        raise ValueError("m must be positive")
    if name == "poisson":
        return from_bidiff(poisson_operator(m), "poisson")
    if name == "lie":
        vec = build_irrep(m, (1,) + (0,) * (m - 1))
        fib = build_irrep(m, _weight_arg(m, lam, (0,) * m))
        return InvariantOperator("lie", m, (TensorKind(vec), TensorKind(fib)), TensorKind(fib), lie_pairing)
    if name == "schouten":
        k = 2 if k is None else k
        l = 2 if l is None else l
        if k < 1 or l < 1:
            raise ValueError("schouten needs tensor degrees >= 1")
        return InvariantOperator("schouten", m, (MomentaKind(m, k), MomentaKind(m, l)),
                                 MomentaKind(m, k + l - 1), schouten)
    if name in ("dplus", "dminus", "d2"):
        fn = {"dplus": d_plus, "dminus": d_minus, "d2": d_two}[name]
        if degree is None:
            degree = {"dplus": 0 if m == 1 else 1, "dminus": 1, "d2": 1}[name]
        lo, hi = {"dplus": (0, m - 1), "dminus": (1, m), "d2": (1, m)}[name]
        if not lo <= degree <= hi:
            raise ValueError("%s is defined on primitive forms of degree %d..%d" % (name, lo, hi))
        out = {"dplus": degree + 1, "dminus": degree - 1, "d2": degree}[name]
        return InvariantOperator(name, m, (FormKind(m, degree),), FormKind(m, out), fn)
    if name in ("gz", "broken-product"):
        if name == "gz" and m != 1:
            raise ValueError("gz is implemented for m = 1 only")
        fn = gz_m1 if name == "gz" else broken_product
        return InvariantOperator(name, m, (MetricKind(m), MetricKind(m)), MetricKind(m), fn)
    if name.startswith("z:"):
        nu = _weight_arg(m, name[2:], ())
        if lam is None or mu is None:
            raise ValueError("z:<nu> needs source weights lam and mu")
        ops = z_operators(m, _weight_arg(m, lam, ()), _weight_arg(m, mu, ()), nu)
        if not 0 <= index < len(ops):
            raise ValueError("component index %d out of range (multiplicity %d)" % (index, len(ops)))
        return from_bidiff(ops[index], name)
    raise UnknownOperator("unknown operator %r; known: %s" % (name, ", ".join(operator_names())))


# -- comparison of operators given in different pictures -----------------------------------

def _omega_flat(m: int, a: int) -> Tuple[int, int]:
    """omega(e_a, .) = sign * dz_b for Poly indices: e_x -> dy, e_y -> -dx."""
    return (a + m, 1) if a < m else (a - m, -1)


def metric_from_field(f: PolyTensorField) -> MetricField:
    """T^{ab} e_a e_b -> T^{ab} omega(e_a, .) omega(e_b, .) for fields of type (2,0,..,0)."""
    m = f.m
    out: Dict[Tuple[int, int], Poly] = {}
    for key, p in fiber_tensor(f).items():
        (a, sa), (b, sb) = (_omega_flat(m, w_to_poly(m, w)) for w in key)
        if a <= b:
            k = (a, b)
            out[k] = out[k] + p * (sa * sb) if k in out else p * (sa * sb)
    return MetricField(m, out)


def field_from_metric(G: MetricField) -> PolyTensorField:
    m = G.m
    fiber = build_irrep(m, (2,) + (0,) * (m - 1))
    inv = {}
    for a in range(2 * m):
        b, s = _omega_flat(m, a)
        inv[b] = (a, s)
    t: Dict[tuple, Poly] = {}
    for c in range(2 * m):
        for d in range(2 * m):
            p = G.get(c, d)
            if p:
                (a, sa), (b, sb) = inv[c], inv[d]
                t[poly_to_w(m, a), poly_to_w(m, b)] = p * (sa * sb)
    return tensor_to_field(fiber, t)


def _ratio(pairs: Sequence[Tuple[Sequence[Poly], Sequence[Poly]]]) -> Optional[Fraction]:
    """s with first == s * second for every pair, or None."""
    s = None
    for first, second in pairs:
        for p, q in zip(first, second):
            for e in set(p.terms) | set(q.terms):
                x, y = p.coeff(e), q.coeff(e)
                if not y:
                    if x:
                        return None
                    continue
                r = x / y
                if s is None:
                    s = r
                elif r != s:
                    return None
    return s


def ratio_to_schouten(B: BidifferentialOperator, degree: Optional[int] = None) -> Optional[Fraction]:
    """s with B == s * schouten after identifying V_(k,0..) with degree-k momenta polynomials."""
    degree = B.total_order if degree is None else degree
    pairs = []
    kinds = [TensorKind(s) for s in B.sources]
    for chi in _grid_inputs(kinds[0], degree):
        for theta in _grid_inputs(kinds[1], degree):
            out = field_to_momenta(B(chi, theta))
            ref = schouten(field_to_momenta(chi), field_to_momenta(theta))
            pairs.append(([out], [ref]))
    return _ratio(pairs)


def ratio_to_gz(B: BidifferentialOperator) -> Optional[Fraction]:
    """s with B == s * Gz after converting (2)-fields to metrics with omega."""
    kind = TensorKind(B.sources[0])
    pairs = []
    for chi in _grid_inputs(kind, 2):
        for theta in _grid_inputs(kind, 2):
            out = metric_from_field(B(chi, theta))
            ref = gz_m1(metric_from_field(chi), metric_from_field(theta))
            pairs.append((out.polys(), ref.polys()))
    return _ratio(pairs)
