"""Sparse multivariate polynomials over Q with exponent-tuple keys."""

from __future__ import annotations

import itertools
import random
import re
from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from .exact import Q, format_rational

Monomial = Tuple[int, ...]


def var_names(m: int, nvars: int) -> List[str]:
    """x1..xm, y1..ym for phase space; px1..pxm, py1..pym appended for momenta."""
    names = ["x%d" % i for i in range(1, m + 1)] + ["y%d" % i for i in range(1, m + 1)]
    if nvars == 4 * m:
        names += ["px%d" % i for i in range(1, m + 1)] + ["py%d" % i for i in range(1, m + 1)]
    elif nvars != 2 * m:
        raise ValueError("unsupported variable count %d for m=%d" % (nvars, m))
    return names


class Poly:
    __slots__ = ("m", "nvars", "terms")

    def __init__(self, m: int, terms: Optional[Mapping[Monomial, object]] = None, nvars: Optional[int] = None):
        self.m = m
        self.nvars = 2 * m if nvars is None else nvars
        self.terms: Dict[Monomial, Fraction] = {}
        if terms:
            for e, c in terms.items():
                e = tuple(e)
                if len(e) != self.nvars or min(e, default=0) < 0:
                    raise ValueError("bad exponent %r" % (e,))
                c = Q(c)
                if c:
                    self.terms[e] = self.terms.get(e, 0) + c
            self.terms = {e: c for e, c in self.terms.items() if c}

    @classmethod
    def _raw(cls, m, nvars, terms):
        p = cls.__new__(cls)
        p.m, p.nvars, p.terms = m, nvars, terms
        return p

    @classmethod
    def const(cls, m: int, c, nvars: Optional[int] = None) -> "Poly":
        nv = 2 * m if nvars is None else nvars
        return cls(m, {(0,) * nv: c}, nv)

    @classmethod
    def var(cls, m: int, a: int, nvars: Optional[int] = None) -> "Poly":
        nv = 2 * m if nvars is None else nvars
        e = [0] * nv
        e[a] = 1
        return cls(m, {tuple(e): 1}, nv)

    @classmethod
    def gens(cls, m: int, nvars: Optional[int] = None) -> List["Poly"]:
        nv = 2 * m if nvars is None else nvars
        return [cls.var(m, a, nv) for a in range(nv)]

    def zero(self) -> "Poly":
        return Poly._raw(self.m, self.nvars, {})

    def _check(self, other: "Poly"):
        if self.m != other.m or self.nvars != other.nvars:
            raise ValueError("rank mismatch: m=%d/%d, nvars=%d/%d" % (self.m, other.m, self.nvars, other.nvars))

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            self._check(other)
            return other
        return Poly.const(self.m, other, self.nvars)

    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            v = t.get(e, 0) + c
            if v:
                t[e] = v
            else:
                t.pop(e, None)
        return Poly._raw(self.m, self.nvars, t)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw(self.m, self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Poly":
        return (-self) + other

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            c = Q(other)
            if not c:
                return self.zero()
            return Poly._raw(self.m, self.nvars, {e: c * v for e, v in self.terms.items()})
        self._check(other)
        t: Dict[Monomial, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        return Poly._raw(self.m, self.nvars, {e: c for e, c in t.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        out = Poly.const(self.m, 1, self.nvars)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        return self == self._coerce(other)

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def diff(self, a: int, k: int = 1) -> "Poly":
        t = {}
        for e, c in self.terms.items():
            if e[a] >= k:
                f = 1
                for j in range(k):
                    f *= e[a] - j
                ne = e[:a] + (e[a] - k,) + e[a + 1:]
                t[ne] = c * f
        return Poly._raw(self.m, self.nvars, t)

    def diff_multi(self, alpha: Sequence[int]) -> "Poly":
        p = self
        for a, k in enumerate(alpha):
            if k:
                p = p.diff(a, k)
        return p

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, vars_: Sequence[int]) -> int:
        return max((sum(e[a] for a in vars_) for e in self.terms), default=-1)

    def homogeneous_in(self, vars_: Sequence[int], k: int) -> bool:
        return all(sum(e[a] for a in vars_) == k for e in self.terms)

    def coeff(self, e: Monomial) -> Fraction:
        return self.terms.get(tuple(e), Fraction(0))

    def eval_at_zero(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def items(self) -> Iterator[Tuple[Monomial, Fraction]]:
        return iter(sorted(self.terms.items()))

    def max_abs_coeff(self) -> Fraction:
        return max((abs(c) for c in self.terms.values()), default=Fraction(0))

    def __repr__(self) -> str:
        return "Poly(%s)" % self.to_str()

    def to_str(self) -> str:
        if not self.terms:
            return "0"
        names = var_names(self.m, self.nvars)
        parts = []
        for e, c in sorted(self.terms.items(), key=lambda t: (-sum(t[0]), tuple(-x for x in t[0]))):
            mon = "*".join(n if k == 1 else "%s^%d" % (n, k) for n, k in zip(names, e) if k)
            if not mon:
                parts.append(format_rational(c))
            elif c == 1:
                parts.append(mon)
            elif c == -1:
                parts.append("-" + mon)
            else:
                parts.append("%s*%s" % (format_rational(c), mon))
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self) -> List[dict]:
        return [{"monomial": list(e), "coeff": format_rational(c)} for e, c in sorted(self.terms.items())]

    @classmethod
    def from_json(cls, m: int, data: Sequence[Mapping], nvars: Optional[int] = None) -> "Poly":
        nv = 2 * m if nvars is None else nvars
        terms: Dict[Monomial, Fraction] = {}
        for n, t in enumerate(data):
            if not isinstance(t, Mapping) or "monomial" not in t or "coeff" not in t:
                raise ValueError("term %d: expected {'monomial': [...], 'coeff': 'p/q'}" % n)
            e = tuple(int(x) for x in t["monomial"])
            if len(e) != nv:
                raise ValueError("term %d: monomial has %d exponents, expected %d" % (n, len(e), nv))
            terms[e] = terms.get(e, 0) + Q(str(t["coeff"]))
        return cls(m, terms, nv)

    @classmethod
    def parse(cls, m: int, s: str, nvars: Optional[int] = None) -> "Poly":
        """Parse expressions such as ``"x1^2 - 3/2*x1*y1 + 1"``."""
        nv = 2 * m if nvars is None else nvars
        idx = {n: a for a, n in enumerate(var_names(m, nv))}
        orig = s
        s = s.replace(" ", "").replace("**", "^")
        if not s:
            raise ValueError("empty polynomial")
        if s[0] not in "+-":
            s = "+" + s
        if not re.fullmatch(r"([+-][^+-]+)+", s):
            raise ValueError("cannot parse polynomial %r" % orig)
        out = Poly(m, None, nv)
        for sign, body in re.findall(r"([+-])([^+-]+)", s):
            coeff = Fraction(1)
            e = [0] * nv
            for fac in body.split("*"):
                if re.fullmatch(r"\d+(/\d+)?", fac):
                    coeff *= Q(fac)
                    continue
                mt = re.fullmatch(r"([a-z]+\d+)(\^(\d+))?", fac)
                if not mt or mt.group(1) not in idx:
                    raise ValueError("cannot parse factor %r" % fac)
                e[idx[mt.group(1)]] += int(mt.group(3) or 1)
            if sign == "-":
                coeff = -coeff
            out = out + Poly(m, {tuple(e): coeff}, nv)
        return out


def monomials(nvars: int, degree: int) -> List[Monomial]:
    """All exponent vectors of the given total degree, lexicographically descending."""
    out = []
    for c in itertools.combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for a in c:
            e[a] += 1
        out.append(tuple(e))
    return sorted(set(out), reverse=True)


def random_poly(m: int, max_deg: int, rng: random.Random, density: float = 0.5,
                coeff_range: int = 3, nvars: Optional[int] = None, min_deg: int = 0) -> Poly:
    nv = 2 * m if nvars is None else nvars
    terms = {}
    for d in range(min_deg, max_deg + 1):
        for e in monomials(nv, d):
            if rng.random() < density:
                c = rng.randint(-coeff_range, coeff_range)
                if c:
                    terms[e] = c
    return Poly(m, terms, nv)
