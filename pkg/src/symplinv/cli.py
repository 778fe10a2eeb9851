"""Command-line interface: ``symplinv <command> ...``.

Exit codes: 0 success, 1 mathematical failure (invariance fails, scan
mismatch), 2 usage or validation error, 3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
from dataclasses import dataclass
from typing import Optional, Sequence

from .classifier import DEFAULT_CLASSIFY_CAP, SCHEMA_VERSION, classify
from .fields import CONVENTION_VERSION
from .operators import (
    MomentaKind,
    TensorKind,
    UnknownOperator,
    check_invariance,
    get_operator,
    operator_names,
)
from .sprep import ResourceError, check_dominant, weyl_dim

CACHE_ENV = "SYMPLINV_CACHE"
GZ_SCHEMA = "symplinv-gz/1"
APPLY_SCHEMA = "symplinv-apply/1"

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class Config:
    cache_dir: Optional[str]
    cap: int
    seed: int
    jobs: int
    fmt: str

    def __post_init__(self):
        if self.cap <= 0:
            raise UsageError("--cap must be positive")
        if self.jobs <= 0:
            raise UsageError("--jobs must be positive")


# -- helpers ------------------------------------------------------------------------------

def parse_weight(m: int, s: str) -> tuple:
    try:
        w = [int(x) for x in s.split(",") if x.strip() != ""]
    except ValueError:
        raise UsageError("weight %r: expected comma-separated integers" % s)
    try:
        return check_dominant(m, w)
    except ValueError as exc:
        raise UsageError(str(exc))


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def write_atomic(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cache_key(m, sources, target, d, extended) -> str:
    ident = json.dumps([SCHEMA_VERSION, m, [list(s) for s in sources], list(target), d,
                        CONVENTION_VERSION, bool(extended)])
    return hashlib.sha256(ident.encode()).hexdigest()


def cached_classify(cfg: Config, m, lam, mu, nu, d, extended=False):
    """classify with a content-addressed JSON cache; returns (result dict, hit)."""
    path = None
    if cfg.cache_dir:
        path = os.path.join(cfg.cache_dir, cache_key(m, (lam, mu), nu, d, extended) + ".json")
        if os.path.exists(path):
            with open(path) as fh:
                data = json.load(fh)
            if data.get("conventions") == CONVENTION_VERSION and data.get("schema") == SCHEMA_VERSION:
                return data, True
    res = classify(m, lam, mu, nu, d, cap=cfg.cap, extended=extended)
    data = res.to_json(include_basis=True, timing=True)
    data["extended_checked"] = res.extended_checked
    if path:
        write_atomic(path, dumps(data))
    return data, False


def emit(cfg: Config, obj, text: Optional[str] = None, out: Optional[str] = None) -> None:
    s = text if cfg.fmt == "text" and text is not None else dumps(obj)
    if out:
        write_atomic(out, s if s.endswith("\n") else s + "\n")
    else:
        sys.stdout.write(s if s.endswith("\n") else s + "\n")


def render(kind, v):
    if isinstance(kind, TensorKind) and kind.fiber.dim == 1:
        return v.components[0].to_str()
    if isinstance(kind, MomentaKind):
        return v.to_str()
    return kind.to_json(v)


# -- commands -----------------------------------------------------------------------------

def cmd_dim(cfg: Config, a) -> int:
    w = parse_weight(a.m, a.weight)
    n = weyl_dim(a.m, w)
    if cfg.fmt == "json":
        emit(cfg, {"m": a.m, "weight": list(w), "dim": n})
    else:
        print(n)
    return EXIT_OK


def cmd_classify(cfg: Config, a) -> int:
    lam, mu, nu = (parse_weight(a.m, s) for s in (a.lam, a.mu, a.nu))
    if a.order < 0:
        raise UsageError("--order must be non-negative")
    data, hit = cached_classify(cfg, a.m, lam, mu, nu, a.order, a.extended)
    data = dict(data)
    seconds = data.pop("seconds", None)
    if a.timing:
        # compute time of the run that produced the result, which may be a cached one
        data["seconds"] = seconds
        data["cache_hit"] = hit
    data["cumulative"] = sum(cached_classify(cfg, a.m, lam, mu, nu, d)[0]["dimension"]
                             for d in range(a.order + 1))
    if not a.basis:
        data.pop("basis", None)
    text = "dimension %d (order %d), %d for orders <= %d" % (
        data["dimension"], a.order, data["cumulative"], a.order)
    emit(cfg, data, text)
    return EXIT_OK


def _op_from_args(a):
    lam = getattr(a, "lam", None)
    mu = getattr(a, "mu", None)
    return get_operator(a.op, a.m, lam=lam, mu=mu, k=a.k, l=a.l, degree=a.degree, index=a.index)


def cmd_verify(cfg: Config, a) -> int:
    op = _op_from_args(a)
    rep = check_invariance(op, trials=a.trials, seed=cfg.seed if a.seed is None else a.seed,
                           max_h_degree=a.max_degree, input_degree=a.input_degree, jobs=cfg.jobs)
    data = rep.to_json()
    bad = sum(1 for r in rep.residuals if r["terms"])
    emit(cfg, data, "%s: %s (%d/%d trials nonzero)" % (op.name, rep.verdict, bad, rep.trials))
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_scan(cfg: Config, a) -> int:
    from .scan import scan
    table = scan(a.m, a.max_weight, a.max_order, jobs=cfg.jobs, cap=cfg.cap)
    if a.out:
        write_atomic(a.out, dumps(table))
    s = table["summary"]
    lines = ["cells %d, nonzero %d, resource errors %d, mismatches %d, dual violations %d" % (
        s["cells"], s["nonzero"], s["resource_errors"], s["mismatches"], s["dual_violations"])]
    for mm in table["mismatches"]:
        e = mm["expected"]
        lines.append("mismatch %s %s %s order %d: measured %d, expected %s %d (%s)" % (
            mm["lambda"], mm["mu"], mm["nu"], mm["order"], mm["dimension"], e["op"], e["count"], e["source"]))
    summary = {"summary": s, "mismatches": table["mismatches"], "dual_violations": table["dual_violations"]}
    if a.out:
        emit(cfg, summary, "\n".join(lines))
    else:
        emit(cfg, table, "\n".join(lines))
    return EXIT_FAIL if s["mismatches"] else EXIT_OK


HESSIAN_TEXT = "d^2g/dx^2 dx^2 + 2 d^2g/dxdy dxdy + d^2g/dy^2 dy^2"


def cmd_derive_gz(cfg: Config, a) -> int:
    from .gz import BLOCK_NOTES, GZ_TABLE, normalized_solution, reconcile, table_rows
    if a.m != 1:
        raise UsageError("derive-gz supports m = 1 only")
    table = normalized_solution()
    rec = reconcile(table)
    flagged = {n: BLOCK_NOTES[n] for n in ("pb_dy2", "lap_chi_theta_literal", "lap_chi_theta",
                                           "lap_chi_chi_literal", "lap_theta_chi")}
    data = {
        "schema": GZ_SCHEMA,
        "conventions": CONVENTION_VERSION,
        "m": 1,
        "normalization": "g-Hessian block coefficient 1",
        "hessian_block": HESSIAN_TEXT,
        "g": "a c' - 2 b b' + c a'",
        "metric": "a dx^2 + 2b dxdy + c dy^2",
        "matches_frozen_table": table == GZ_TABLE,
        "coefficients": table_rows(table),
        "reconciliation": rec,
        "flagged": flagged,
    }
    lines = ["Gz (m=1), metric a dx^2 + 2b dxdy + c dy^2, normalized so the g-Hessian block has coefficient 1",
             "g-Hessian block: " + HESSIAN_TEXT + ",  g = ac' - 2bb' + ca'"]
    for label, conv in rec["conventions"].items():
        lines.append("bracket %s: %s" % (label, conv["bracket"]))
        for name, r in conv["readings"].items():
            if r["representable"]:
                lines.append("  %s reading: %s" % (name, ", ".join(
                    "%s=%s" % kv for kv in r["coefficients"].items())))
            else:
                lines.append("  %s reading: not a combination of the printed blocks" % name)
    lines.append("flagged terms:")
    lines += ["  %s: %s" % kv for kv in flagged.items()]
    lines.append("%d coefficients; matches frozen table: %s" % (len(table), data["matches_frozen_table"]))
    emit(cfg, data, "\n".join(lines), a.out)
    return EXIT_OK if data["matches_frozen_table"] else EXIT_FAIL


SLOT_NAMES = [("chi", "theta"), ("f", "g"), ("x", "y")]


def _inputs(op, data):
    if not isinstance(data, dict):
        raise UsageError("$: expected a JSON object")
    if "args" in data:
        if not isinstance(data["args"], list) or len(data["args"]) != op.arity:
            raise UsageError("$.args: expected a list of %d inputs" % op.arity)
        items = [("$.args[%d]" % n, v) for n, v in enumerate(data["args"])]
    else:
        items = None
        for names in SLOT_NAMES + [("form",), ("field",)]:
            names = names[:op.arity]
            if len(names) == op.arity and all(n in data for n in names):
                items = [("$." + n, data[n]) for n in names]
                break
        if items is None:
            raise UsageError("$: expected keys %s or 'args'" % " / ".join(
                ",".join(n[:op.arity]) for n in SLOT_NAMES))
    out = []
    for (path, v), kind in zip(items, op.sources):
        try:
            out.append(kind.from_json(v))
        except (ValueError, KeyError, TypeError) as exc:
            raise UsageError("%s: %s" % (path, exc))
    return out


def cmd_apply(cfg: Config, a) -> int:
    op = _op_from_args(a)
    try:
        if a.input == "-":
            data = json.load(sys.stdin)
        elif os.path.exists(a.input):
            with open(a.input) as fh:
                data = json.load(fh)
        else:
            data = json.loads(a.input)
    except json.JSONDecodeError as exc:
        raise UsageError("$: malformed JSON (%s)" % exc)
    args = _inputs(op, data)
    val = op(*args)
    result = render(op.target, val)
    out = {"schema": APPLY_SCHEMA, "conventions": CONVENTION_VERSION, "operator": op.name, "m": op.m,
           "target": op.target.name, "result": result}
    emit(cfg, out, result if isinstance(result, str) else None)
    return EXIT_OK


# -- parser -------------------------------------------------------------------------------

def _add_op_args(p):
    p.add_argument("--op", required=True, help="one of: " + ", ".join(operator_names()))
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--lambda", dest="lam", help="first source weight (lie, z:<nu>)")
    p.add_argument("--mu", help="second source weight (z:<nu>)")
    p.add_argument("--k", type=int, help="first tensor degree (schouten)")
    p.add_argument("--l", type=int, help="second tensor degree (schouten)")
    p.add_argument("--degree", type=int, help="input form degree (dplus, dminus, d2)")
    p.add_argument("--index", type=int, default=0, help="component index when the multiplicity exceeds 1")


def _common() -> argparse.ArgumentParser:
    # accepted both before and after the command name
    c = argparse.ArgumentParser(add_help=False)
    S = argparse.SUPPRESS
    c.add_argument("--format", dest="fmt", choices=["json", "text"], default=S)
    c.add_argument("--cache-dir", default=S, help="overrides $%s" % CACHE_ENV)
    c.add_argument("--no-cache", action="store_true", default=S)
    c.add_argument("--cap", type=int, default=S, help="basis-size cap per classify cell (default %d)"
                   % DEFAULT_CLASSIFY_CAP)
    c.add_argument("--jobs", type=int, default=S, help="worker processes (default 1)")
    return c


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    p = argparse.ArgumentParser(prog="symplinv", parents=[common],
                                description="Invariant bilinear operators on symplectic manifolds.")
    p.add_argument("--seed", dest="global_seed", type=int, default=0, help="default seed")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("dim", parents=[common], help="dimension of an irreducible sp(2m) module")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--weight", required=True)

    s = sub.add_parser("classify", parents=[common], help="invariant operators T(lambda) x T(mu) -> T(nu) of a given order")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--lambda", dest="lam", required=True)
    s.add_argument("--mu", required=True)
    s.add_argument("--nu", required=True)
    s.add_argument("--order", type=int, required=True)
    s.add_argument("--extended", action="store_true", help="also impose all cubic Hamiltonians and assert no change")
    s.add_argument("--no-basis", dest="basis", action="store_false")
    s.add_argument("--timing", action="store_true", help="include compute seconds and cache-hit flag")

    s = sub.add_parser("verify", parents=[common], help="randomized exact invariance check")
    _add_op_args(s)
    s.add_argument("--trials", type=int, default=20)
    s.add_argument("--max-degree", type=int, default=4, help="maximal Hamiltonian degree")
    s.add_argument("--input-degree", type=int, default=3)
    s.add_argument("--seed", type=int, default=None)

    s = sub.add_parser("scan", parents=[common], help="dimension table over all weights with entries <= max-weight")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--max-weight", type=int, required=True)
    s.add_argument("--max-order", type=int, required=True)
    s.add_argument("--out")

    s = sub.add_parser("derive-gz", parents=[common], help="derive and reconcile the second-order metric operator (m=1)")
    s.add_argument("--m", type=int, default=1)
    s.add_argument("--out")

    s = sub.add_parser("apply", parents=[common], help="apply a named operator to fields given as JSON")
    _add_op_args(s)
    s.add_argument("input", help="JSON file, '-' for stdin, or an inline JSON object")
    return p


COMMANDS = {"dim": cmd_dim, "classify": cmd_classify, "verify": cmd_verify, "scan": cmd_scan,
            "derive-gz": cmd_derive_gz, "apply": cmd_apply}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    fmt = getattr(a, "fmt", None) or ("text" if a.command == "dim" else "json")
    cache = None
    if not getattr(a, "no_cache", False):
        cache = getattr(a, "cache_dir", None) or os.environ.get(CACHE_ENV) or None
    try:
        cfg = Config(cache_dir=cache, cap=getattr(a, "cap", DEFAULT_CLASSIFY_CAP), seed=a.global_seed,
                     jobs=getattr(a, "jobs", 1), fmt=fmt)
        return COMMANDS[a.command](cfg, a)
    except ResourceError as exc:
        print("resource cap exceeded: %s" % exc, file=sys.stderr)
        return EXIT_RESOURCE
    except (UsageError, UnknownOperator, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
