"""
Expected first-order counts compiled from the families P1-P8.

The families live in ``data/expectations.json``: a shape name (matched in
code below) plus arithmetic conditions on the shape parameters, evaluated
by a small AST walker that only knows integer arithmetic, comparisons,
``and``/``or``/``not`` and ``abs``.  Explicit per-cell entries in the same
file override the family rules; each carries a note saying where it comes
from.
"""

from __future__ import annotations

import ast
import itertools
import json
import os
from functools import lru_cache
from typing import Dict, List, Optional

from .sprep import decompose_tensor

DATA_PATH = os.path.join(os.path.dirname(__file__), "data", "expectations.json")


# -- condition language ----------------------------------------------------------------

_BINOPS = {ast.Add: lambda a, b: a + b, ast.Sub: lambda a, b: a - b, ast.Mult: lambda a, b: a * b,
           ast.Mod: lambda a, b: a % b, ast.FloorDiv: lambda a, b: a // b}
_CMPS = {ast.Eq: lambda a, b: a == b, ast.NotEq: lambda a, b: a != b, ast.Lt: lambda a, b: a < b,
         ast.LtE: lambda a, b: a <= b, ast.Gt: lambda a, b: a > b, ast.GtE: lambda a, b: a >= b}


def evaluate(expr: str, env: Dict[str, int]):
    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return node.value
        if isinstance(node, ast.Name):
            if node.id not in env:
                raise ValueError("unknown variable %r in %r" % (node.id, expr))
            return env[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -ev(node.operand)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.Not):
            return not ev(node.operand)
        if isinstance(node, ast.BoolOp):
            vals = [ev(v) for v in node.values]
            return all(vals) if isinstance(node.op, ast.And) else any(vals)
        if isinstance(node, ast.Compare):
            left = ev(node.left)
            for op, right in zip(node.ops, node.comparators):
                r = ev(right)
                if type(op) not in _CMPS or not _CMPS[type(op)](left, r):
                    return False
                left = r
            return True
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id == "abs" and len(node.args) == 1:
            return abs(ev(node.args[0]))
        raise ValueError("unsupported expression %r" % expr)

    return ev(ast.parse(expr, mode="eval"))


# -- weight shapes -------------------------------------------------------------------------

def ones_p(w) -> Optional[int]:
    """p for w = (1^p, 0, ..)."""
    p = sum(1 for x in w if x)
    return p if tuple(w) == (1,) * p + (0,) * (len(w) - p) else None


def hook_p(w) -> Optional[int]:
    """p for w = (2, 1^(p-1), 0, ..), p >= 1."""
    p = sum(1 for x in w if x)
    if p >= 1 and tuple(w) == (2,) + (1,) * (p - 1) + (0,) * (len(w) - p):
        return p
    return None


def sym_k(w) -> Optional[int]:
    return w[0] if all(x == 0 for x in w[1:]) else None


def unit_diff(a, b) -> Optional[int]:
    d = [x - y for x, y in zip(a, b)]
    if any(abs(x) > 1 for x in d):
        return None
    return sum(1 for x in d if x)


def _match(shape: str, lam, mu, nu) -> Optional[Dict[str, int]]:
    m = len(lam)
    if shape == "ones-unit-diff":
        p, r = ones_p(lam), unit_diff(mu, nu)
        return None if p is None or r is None else {"p": p, "r": r, "m": m}
    if shape == "vect-same":
        return {"m": m} if tuple(lam) == (1,) + (0,) * (m - 1) and tuple(mu) == tuple(nu) else None
    if shape == "sym-sym-sym":
        k, l, n = sym_k(lam), sym_k(mu), sym_k(nu)
        return None if None in (k, l, n) else {"k": k, "l": l, "n": n, "m": m}
    if shape == "two-unit-diff":
        ok = tuple(lam) == (2,) + (0,) * (m - 1) and unit_diff(mu, nu) == 1
        return {"m": m} if ok else None
    if shape.startswith("hook-hook-"):
        p, q = hook_p(lam), hook_p(mu)
        if p is None or q is None:
            return None
        kind = shape[len("hook-hook-"):]
        r = None
        nz = sum(1 for x in nu if x)
        if kind == "hook":
            r = hook_p(nu)
        elif kind == "three":
            if nz >= 1 and tuple(nu) == (3,) + (1,) * (nz - 1) + (0,) * (m - nz):
                r = nz
        elif kind == "twotwo":
            if nz >= 2 and tuple(nu) == (2, 2) + (1,) * (nz - 2) + (0,) * (m - nz):
                r = nz
        elif kind == "ones":
            r = ones_p(nu)
        else:
            raise ValueError("unknown shape %r" % shape)
        return None if r is None else {"p": p, "q": q, "r": r, "m": m}
    raise ValueError("unknown shape %r" % shape)


def _has_component(lam, mu, nu, env) -> bool:
    m, p = env["m"], env["p"]
    for q in (p + 1, p - 1):
        if 0 <= q <= m:
            w = (1,) * q + (0,) * (m - q)
            if decompose_tensor(m, w, mu).get(tuple(nu), 0):
                return True
    return False


# -- table -----------------------------------------------------------------------------------

@lru_cache(maxsize=None)
def load_table(path: str = DATA_PATH) -> dict:
    with open(path) as fh:
        return json.load(fh)


def families_at(lam, mu, nu, table: Optional[dict] = None) -> List[dict]:
    """Families matching some permutation of (lam, mu, nu), with their parameters."""
    table = table or load_table()
    out = []
    seen = set()
    for perm in sorted(set(itertools.permutations((tuple(lam), tuple(mu), tuple(nu))))):
        for fam in table["families"]:
            env = _match(fam["shape"], *perm)
            if env is None or not all(evaluate(c, env) for c in fam["conditions"]):
                continue
            if fam.get("needs_component") and not _has_component(*perm, env):
                continue
            key = (fam["id"], perm)
            if key in seen:
                continue
            seen.add(key)
            entry = {"family": fam["id"], "at": [list(w) for w in perm], "params": env}
            cnt = fam["count"]
            if "exact_if" in cnt:
                entry["exact"] = cnt["then"] if evaluate(cnt["exact_if"], env) else cnt["else"]
            else:
                entry["at_least"] = cnt["at_least"]
            out.append(entry)
    return out


def expected(lam, mu, nu, d: int, table: Optional[dict] = None) -> Optional[dict]:
    """Expectation for one cell: {"op": "==" or ">=", "count": n, "source": ...}, or None."""
    table = table or load_table()
    lam, mu, nu = tuple(lam), tuple(mu), tuple(nu)
    for cell in table.get("cells", []):
        if (tuple(cell["lambda"]), tuple(cell["mu"]), tuple(cell["nu"]), cell["order"]) == (lam, mu, nu, d):
            return {"op": cell["op"], "count": cell["count"], "source": "cell", "note": cell.get("note", "")}
    if d == 0:
        m = len(lam)
        return {"op": "==", "count": decompose_tensor(m, lam, mu).get(nu, 0), "source": "Z"}
    if d != table.get("order", 1):
        return None
    fams = families_at(lam, mu, nu, table)
    if not fams:
        return {"op": "==", "count": 0, "source": "completeness"}
    ids = sorted({f["family"] for f in fams})
    exact = [f["exact"] for f in fams if "exact" in f]
    if ids == ["P4"] and len(set(exact)) == 1:
        return {"op": "==", "count": exact[0], "source": "P4"}
    return {"op": ">=", "count": 1, "source": "+".join(ids)}


def compare(measured: int, exp: Optional[dict]) -> Optional[bool]:
    if exp is None:
        return None
    if exp["op"] == "==":
        return measured == exp["count"]
    return measured >= exp["count"]
