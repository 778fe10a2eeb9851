"""Constant-coefficient multilinear differential operators between tensor-field spaces."""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .exact import Q, format_rational
from .fields import PolyTensorField
from .poly import Poly
from .sprep import IrrepBasis, build_irrep

Slot = Tuple[int, Tuple[int, ...]]          # (fiber index, derivative multi-index)
CoeffKey = Tuple[int, Tuple[Slot, ...]]     # (output index, one Slot per argument)


class BidifferentialOperator:
    """B(chi, theta)_k = sum c[k, (i, A), (j, B)] * d^A chi_i * d^B theta_j.

    Multi-indices follow the Poly variable order x_1..x_m, y_1..y_m.  The
    same class carries unary operators (one slot per key).
    """

    def __init__(self, m: int, sources: Sequence[IrrepBasis], target: IrrepBasis,
                 coeffs: Dict[CoeffKey, object], name: str = ""):
        self.m = m
        self.sources = tuple(sources)
        self.target = target
        self.name = name
        self.coeffs: Dict[CoeffKey, Fraction] = {}
        for (k, slots), c in coeffs.items():
            c = Q(c)
            if not c:
                continue
            if len(slots) != len(self.sources):
                raise ValueError("coefficient key has %d slots, operator has arity %d" % (len(slots), self.arity))
            if not 0 <= k < target.dim:
                raise ValueError("output index %d outside target dimension %d" % (k, target.dim))
            for (i, a), src in zip(slots, self.sources):
                if not 0 <= i < src.dim or len(a) != 2 * m:
                    raise ValueError("bad slot %r" % ((i, a),))
            key = (k, tuple((i, tuple(a)) for i, a in slots))
            self.coeffs[key] = self.coeffs.get(key, 0) + c
        self.coeffs = {k: v for k, v in self.coeffs.items() if v}

    @property
    def arity(self) -> int:
        return len(self.sources)

    @property
    def source_weights(self):
        return tuple(s.weight for s in self.sources)

    @property
    def target_weight(self):
        return self.target.weight

    @property
    def order(self) -> Tuple[int, ...]:
        out = [0] * self.arity
        for _, slots in self.coeffs:
            for n, (_, a) in enumerate(slots):
                out[n] = max(out[n], sum(a))
        return tuple(out)

    @property
    def total_order(self) -> int:
        return max((sum(sum(a) for _, a in slots) for _, slots in self.coeffs), default=0)

    def __call__(self, *fields: PolyTensorField) -> PolyTensorField:
        if len(fields) != self.arity:
            raise ValueError("expected %d arguments" % self.arity)
        for f, s in zip(fields, self.sources):
            if f.fiber.weight != s.weight or f.m != self.m:
                raise ValueError("argument of type %r, expected %r" % (f.fiber.weight, s.weight))
        caches: List[Dict[Slot, Poly]] = [{} for _ in fields]

        def jet(n, slot):
            c = caches[n]
            if slot not in c:
                i, a = slot
                c[slot] = fields[n].components[i].diff_multi(a)
            return c[slot]

        out = [Poly(self.m) for _ in range(self.target.dim)]
        # group by output index and all-but-last slot to reuse partial products
        for (k, slots), c in sorted(self.coeffs.items()):
            term = None
            for n, slot in enumerate(slots):
                p = jet(n, slot)
                if not p:
                    term = None
                    break
                term = p if term is None else term * p
            if term is not None:
                out[k] = out[k] + term * c
        return PolyTensorField(self.m, self.target, out)

    def scale(self, c) -> "BidifferentialOperator":
        c = Q(c)
        return BidifferentialOperator(self.m, self.sources, self.target,
                                      {k: v * c for k, v in self.coeffs.items()}, self.name)

    def __add__(self, other: "BidifferentialOperator") -> "BidifferentialOperator":
        self._check(other)
        d = dict(self.coeffs)
        for k, v in other.coeffs.items():
            d[k] = d.get(k, 0) + v
        return BidifferentialOperator(self.m, self.sources, self.target, d, self.name)

    def __sub__(self, other):
        return self + other.scale(-1)

    def __eq__(self, other) -> bool:
        return (isinstance(other, BidifferentialOperator) and self.source_weights == other.source_weights
                and self.target_weight == other.target_weight and self.coeffs == other.coeffs)

    def _check(self, other):
        if self.source_weights != other.source_weights or self.target_weight != other.target_weight:
            raise ValueError("operator types differ")

    def is_zero(self) -> bool:
        return not self.coeffs

    def ratio_to(self, other: "BidifferentialOperator") -> Optional[Fraction]:
        """s with self == s * other, or None if not proportional."""
        self._check(other)
        if set(self.coeffs) != set(other.coeffs):
            return None
        if not self.coeffs:
            return Fraction(1)
        k0 = min(self.coeffs)
        s = self.coeffs[k0] / other.coeffs[k0]
        if all(self.coeffs[k] == s * other.coeffs[k] for k in self.coeffs):
            return s
        return None

    def normalized(self) -> "BidifferentialOperator":
        """Scaled so the first coefficient (in key order) is 1."""
        if not self.coeffs:
            return self
        return self.scale(1 / self.coeffs[min(self.coeffs)])

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "name": self.name,
            "sources": [list(w) for w in self.source_weights],
            "target": list(self.target_weight),
            "order": list(self.order),
            "coefficients": [
                {"out": k, "slots": [[i, list(a)] for i, a in slots], "coeff": format_rational(c)}
                for (k, slots), c in sorted(self.coeffs.items())
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, data) -> "BidifferentialOperator":
        m = int(data["m"])
        sources = [build_irrep(m, w) for w in data["sources"]]
        target = build_irrep(m, data["target"])
        coeffs = {}
        for t in data["coefficients"]:
            key = (int(t["out"]), tuple((int(i), tuple(int(x) for x in a)) for i, a in t["slots"]))
            coeffs[key] = Q(str(t["coeff"]))
        return cls(m, sources, target, coeffs, data.get("name", ""))

    def __repr__(self):
        return "BidifferentialOperator(%s: %s -> %s, order %s, %d terms)" % (
            self.name or "?", list(self.source_weights), list(self.target_weight), self.order, len(self.coeffs))
