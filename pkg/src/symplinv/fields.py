"""
Polynomial tensor fields on the standard symplectic space R^{2m}.

Poly variables are ordered x_1..x_m, y_1..y_m.  Sign conventions:

    {f, g} = sum_i f_{x_i} g_{y_i} - f_{y_i} g_{x_i}
    X_H(g) = {H, g},  i.e.  X_H = sum_i H_{x_i} d/dy_i - H_{y_i} d/dx_i

so that X_{x_1^3} = 3 x_1^2 d/dy_1.  The Lie derivative of a field t with
fiber V_lambda (built inside tensor powers of the tangent space W) is

    L_xi t = xi . grad t - rho(D xi) t

with D xi the Jacobian in W coordinates.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .exact import Q
from .poly import Poly, random_poly
from .sprep import IrrepBasis, SpGenerator, build_irrep, generators, wx, wy

CONVENTION_VERSION = "symplinv-conventions/1"

CONVENTIONS = {
    "version": CONVENTION_VERSION,
    "poisson": "{f,g} = sum_i f_xi g_yi - f_yi g_xi",
    "hamiltonian_field": "X_H(g) = {H,g}",
    "lie_derivative": "L_xi t = xi.grad t - rho(D xi) t (tangent fibers)",
    "W_basis": "x1..xm, ym..y1",
    "weights": "e_xi has weight +eps_i, e_yi has weight -eps_i",
    "d_minus": "coefficient of omega in the Lefschetz decomposition of d(beta)",
    "Lambda": "adjoint of omega^ wrt the monomial-orthonormal pairing, Lambda(omega) = m",
    "volume": "omega^m (no 1/m! factor)",
    "singularity_element": "x1^2 d/dy1 = X_{x1^3/3}",
}


def poly_to_w(m: int, a: int) -> int:
    """W index of the Poly variable a."""
    return a if a < m else wy(m, a - m + 1)


def w_to_poly(m: int, k: int) -> int:
    return k if k < m else (2 * m - k - 1) + m


def _same_rank(*ps: Poly):
    ms = {(p.m, p.nvars) for p in ps}
    if len(ms) != 1:
        raise ValueError("rank mismatch between %r" % sorted(ms))


def poisson(f: Poly, g: Poly) -> Poly:
    _same_rank(f, g)
    m = f.m
    out = f.zero()
    for i in range(m):
        out = out + f.diff(i) * g.diff(m + i) - f.diff(m + i) * g.diff(i)
    return out


# -- vector fields ------------------------------------------------------------------

@dataclass
class VectorField:
    """Polynomial vector field; components indexed by Poly variable order."""

    m: int
    components: List[Poly]

    def __call__(self, g: Poly) -> Poly:
        out = g.zero()
        for a, c in enumerate(self.components):
            if c:
                out = out + c * g.diff(a)
        return out

    def jacobian_w(self) -> Dict[Tuple[int, int], Poly]:
        """D xi in W coordinates: entry (r, c) = d xi^r / d z^c."""
        J = {}
        for a, comp in enumerate(self.components):
            for b in range(2 * self.m):
                d = comp.diff(b)
                if d:
                    J[poly_to_w(self.m, a), poly_to_w(self.m, b)] = d
        return J

    def bracket(self, other: "VectorField") -> "VectorField":
        return VectorField(self.m, [self(o) - other(s) for s, o in zip(self.components, other.components)])

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)


@dataclass
class HamiltonianField(VectorField):
    hamiltonian: Optional[Poly] = None


def hamiltonian_field(H: Poly) -> HamiltonianField:
    m = H.m
    comps = [-H.diff(m + i) for i in range(m)] + [H.diff(i) for i in range(m)]
    return HamiltonianField(m, comps, H)


def _partner(m: int, k: int) -> Tuple[int, int]:
    """(index, sign) with omega(e_k, e_partner) = sign."""
    if k < m:
        return wy(m, k + 1), 1
    return wx(m, 2 * m - k), -1


def sp_project(m: int, A: Mapping[Tuple[int, int], Poly]) -> Dict[Tuple[int, int], Poly]:
    """Projection of a gl(2m)-valued matrix onto sp(2m): (A - A^dagger) / 2."""
    out: Dict[Tuple[int, int], Poly] = {}
    for (r, c), v in A.items():
        out[r, c] = out.get((r, c), v.zero()) + v * Fraction(1, 2)
        # A^dagger_{ab} = s(a) s(b) A_{p(b), p(a)}: entry (r, c) of A feeds (p(c), p(r))
        pc, sc = _partner(m, c)
        pr, sr = _partner(m, r)
        a, b = pc, pr
        sa = _partner(m, a)[1]
        sb = _partner(m, b)[1]
        out[a, b] = out.get((a, b), v.zero()) - v * Fraction(sa * sb, 2)
    return {k: v for k, v in out.items() if v}


def sp_coords_poly(m: int, A: Mapping[Tuple[int, int], Poly]) -> Dict[SpGenerator, Poly]:
    """Expand an sp(2m)-valued polynomial matrix in the generator basis."""
    c: Dict[SpGenerator, Poly] = {}
    for g in generators(m):
        if g.kind == "up":
            v = A.get((wx(m, g.j), wy(m, g.i)))
        elif g.kind == "down":
            v = A.get((wy(m, g.j), wx(m, g.i)))
        else:
            v = A.get((wx(m, g.i), wx(m, g.j)))
        if v:
            c[g] = v
    back: Dict[Tuple[int, int], Poly] = {}
    for g, v in c.items():
        for k, x in g.matrix(m).items():
            back[k] = back.get(k, v.zero()) + v * x
    back = {k: v for k, v in back.items() if v}
    if {k: v for k, v in A.items() if v} != back:
        raise ValueError("Jacobian is not sp(2m)-valued; the vector field is not Hamiltonian")
    return c


# -- tensor fields ------------------------------------------------------------------

@dataclass
class PolyTensorField:
    m: int
    fiber: IrrepBasis
    components: List[Poly]

    def __post_init__(self):
        if len(self.components) != self.fiber.dim:
            raise ValueError("%d components for a fiber of dimension %d" % (len(self.components), self.fiber.dim))

    @property
    def weight(self):
        return self.fiber.weight

    def __add__(self, other: "PolyTensorField") -> "PolyTensorField":
        self._check(other)
        return PolyTensorField(self.m, self.fiber, [a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: "PolyTensorField") -> "PolyTensorField":
        self._check(other)
        return PolyTensorField(self.m, self.fiber, [a - b for a, b in zip(self.components, other.components)])

    def scale(self, c) -> "PolyTensorField":
        return PolyTensorField(self.m, self.fiber, [p * c for p in self.components])

    def __eq__(self, other) -> bool:
        return (isinstance(other, PolyTensorField) and self.fiber.weight == other.fiber.weight
                and self.components == other.components)

    def _check(self, other):
        if self.fiber.weight != other.fiber.weight or self.m != other.m:
            raise ValueError("field types differ")

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.components)

    def diff(self, a: int) -> "PolyTensorField":
        return PolyTensorField(self.m, self.fiber, [p.diff(a) for p in self.components])

    def fiber_action(self, A: Mapping[Tuple[int, int], Poly]) -> "PolyTensorField":
        """Pointwise rho(A) t for an sp(2m)-valued polynomial matrix A."""
        out = [p.zero() for p in self.components]
        for g, coef in sp_coords_poly(self.m, A).items():
            for (r, c), v in self.fiber.matrix(g).entries.items():
                if self.components[c]:
                    out[r] = out[r] + coef * self.components[c] * v
        return PolyTensorField(self.m, self.fiber, out)

    def to_json(self) -> dict:
        return {"m": self.m, "weight": list(self.fiber.weight), "components": [p.to_json() for p in self.components]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, data: Mapping) -> "PolyTensorField":
        for key in ("m", "weight", "components"):
            if key not in data:
                raise ValueError("field JSON: missing key %r" % key)
        m = int(data["m"])
        fiber = build_irrep(m, data["weight"])
        comps = data["components"]
        if len(comps) != fiber.dim:
            raise ValueError("field JSON: %d components, fiber dimension %d" % (len(comps), fiber.dim))
        return cls(m, fiber, [Poly.from_json(m, c) for c in comps])

    @classmethod
    def loads(cls, s: str) -> "PolyTensorField":
        return cls.from_json(json.loads(s))

    @classmethod
    def zero(cls, fiber: IrrepBasis) -> "PolyTensorField":
        return cls(fiber.m, fiber, [Poly(fiber.m) for _ in range(fiber.dim)])

    @classmethod
    def random(cls, fiber: IrrepBasis, rng: random.Random, max_deg: int = 3, density: float = 0.4) -> "PolyTensorField":
        return cls(fiber.m, fiber, [random_poly(fiber.m, max_deg, rng, density) for _ in range(fiber.dim)])

    @classmethod
    def constant(cls, fiber: IrrepBasis, values: Sequence[object]) -> "PolyTensorField":
        return cls(fiber.m, fiber, [Poly.const(fiber.m, Q(v)) for v in values])


def lie_derivative(xi: VectorField, t: PolyTensorField, project: bool = False) -> PolyTensorField:
    """L_xi t.  With ``project`` the Jacobian is first projected onto sp(2m),
    which is the bilinear Lie pairing for arbitrary vector fields."""
    if xi.m != t.m:
        raise ValueError("rank mismatch")
    transport = [xi(p) for p in t.components]
    J = xi.jacobian_w()
    if project:
        J = sp_project(t.m, J)
    rot = t.fiber_action(J)
    return PolyTensorField(t.m, t.fiber, [a - b for a, b in zip(transport, rot.components)])


def lie_derivative_function(xi: VectorField, f: Poly) -> Poly:
    return xi(f)


# -- symmetric contravariant tensors as functions on T*M -----------------------------

def momenta_vars(m: int) -> Tuple[List[int], List[int]]:
    """Indices of (base, momentum) variables in a 4m-variable Poly; p_a is conjugate to z_a."""
    return list(range(2 * m)), list(range(2 * m, 4 * m))


def schouten(P: Poly, Q_: Poly) -> Poly:
    """Canonical cotangent bracket sum_a P_{p_a} Q_{z_a} - P_{z_a} Q_{p_a}."""
    _same_rank(P, Q_)
    m = P.m
    if P.nvars != 4 * m:
        raise ValueError("schouten expects momenta polynomials in 4m variables")
    out = P.zero()
    for a in range(2 * m):
        pa = 2 * m + a
        out = out + P.diff(pa) * Q_.diff(a) - P.diff(a) * Q_.diff(pa)
    return out


def momentum_function(xi: VectorField) -> Poly:
    """xi^ = sum_a xi^a p_a, lifted to 4m variables."""
    m = xi.m
    out = Poly(m, None, 4 * m)
    for a, comp in enumerate(xi.components):
        out = out + lift_to_momenta(comp) * Poly.var(m, 2 * m + a, 4 * m)
    return out


def lift_to_momenta(p: Poly) -> Poly:
    m = p.m
    return Poly(m, {e + (0,) * (2 * m): c for e, c in p.terms.items()}, 4 * m)


def momenta_degree(P: Poly) -> int:
    return P.degree_in(momenta_vars(P.m)[1])


def lie_derivative_momenta(xi: VectorField, P: Poly) -> Poly:
    """Lie derivative of a symmetric contravariant tensor, via {xi^, P}."""
    return schouten(momentum_function(xi), P)


def random_momenta_poly(m: int, k: int, rng: random.Random, max_deg: int = 2, density: float = 0.4) -> Poly:
    """Random polynomial homogeneous of degree k in the momenta."""
    from .poly import monomials
    out = Poly(m, None, 4 * m)
    for pm in monomials(2 * m, k):
        if rng.random() < 0.7:
            c = random_poly(m, max_deg, rng, density)
            out = out + lift_to_momenta(c) * Poly(m, {(0,) * (2 * m) + pm: 1}, 4 * m)
    return out
