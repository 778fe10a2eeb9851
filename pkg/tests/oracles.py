"""Independent reference computations used by the tests (sympy based)."""

from fractions import Fraction

import sympy

from symplinv.poly import Poly, var_names


def symbols(m, nvars=None):
    return sympy.symbols(var_names(m, 2 * m if nvars is None else nvars))


def to_sympy(p: Poly):
    xs = symbols(p.m, p.nvars)
    out = sympy.Integer(0)
    for e, c in p.terms.items():
        t = sympy.Rational(c.numerator, c.denominator)
        for x, k in zip(xs, e):
            t *= x ** k
        out += t
    return sympy.expand(out)


def from_sympy(expr, m, nvars=None):
    nv = 2 * m if nvars is None else nvars
    xs = symbols(m, nv)
    P = sympy.Poly(sympy.expand(expr), *xs)
    return Poly(m, {e: Fraction(int(c.p), int(c.q)) for e, c in P.terms()}, nv)


def poisson_ref(f: Poly, g: Poly) -> Poly:
    m = f.m
    xs = symbols(m)
    F, G = to_sympy(f), to_sympy(g)
    expr = sum(sympy.diff(F, xs[i]) * sympy.diff(G, xs[m + i]) - sympy.diff(F, xs[m + i]) * sympy.diff(G, xs[i])
               for i in range(m))
    return from_sympy(expr, m)
