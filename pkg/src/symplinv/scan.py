"""Dimension tables over all dominant weight triples, compared with the expected counts."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Tuple

from .classifier import DEFAULT_CLASSIFY_CAP, classify
from .expectations import compare, expected, load_table
from .fields import CONVENTION_VERSION
from .sprep import ResourceError, dominant_weights

SCAN_SCHEMA = "symplinv-scan/1"

Cell = Tuple[Tuple[int, ...], Tuple[int, ...], Tuple[int, ...], int]


def scan_cells(m: int, bound: int, order_bound: int) -> List[Cell]:
    ws = sorted(dominant_weights(m, bound))
    return sorted((a, b, c, d) for a in ws for b in ws for c in ws for d in range(order_bound + 1))


def _run_cell(args) -> dict:
    (lam, mu, nu, d), cap = args
    row = {"lambda": list(lam), "mu": list(mu), "nu": list(nu), "order": d}
    try:
        res = classify(len(lam), lam, mu, nu, d, cap=cap)
        row["dimension"] = res.dimension
        row["columns"] = res.metrics.get("columns", 0)
        row["error"] = None
    except ResourceError as exc:
        row["dimension"] = None
        row["columns"] = None
        row["error"] = str(exc)
    return row


def scan(m: int, bound: int, order_bound: int, jobs: int = 1,
         cap: int = DEFAULT_CLASSIFY_CAP) -> dict:
    """Classify every cell and compare with the expectation table.

    The result is independent of ``jobs``: rows are merged in canonical
    (lambda, mu, nu, order) order and carry no timing.
    """
    if bound < 0 or order_bound < 0:
        raise ValueError("bounds must be non-negative")
    cells = scan_cells(m, bound, order_bound)
    work = [(c, cap) for c in cells]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_run_cell, work, chunksize=max(1, len(work) // (4 * jobs))))
    else:
        rows = [_run_cell(w) for w in work]
    rows.sort(key=lambda r: (tuple(r["lambda"]), tuple(r["mu"]), tuple(r["nu"]), r["order"]))

    table = load_table()
    mismatches = []
    for r in rows:
        exp = expected(r["lambda"], r["mu"], r["nu"], r["order"], table)
        r["expected"] = exp
        r["match"] = None if r["dimension"] is None else compare(r["dimension"], exp)
        if r["match"] is False:
            mismatches.append({k: r[k] for k in ("lambda", "mu", "nu", "order", "dimension", "expected")})

    # 1-dualization swaps the first source with the target
    dims: Dict[Cell, Optional[int]] = {
        (tuple(r["lambda"]), tuple(r["mu"]), tuple(r["nu"]), r["order"]): r["dimension"] for r in rows}
    dual_violations = []
    for (a, b, c, d), x in sorted(dims.items()):
        y = dims.get((c, b, a, d))
        if x is not None and y is not None and x != y and (a, b, c) < (c, b, a):
            dual_violations.append({"cell": [list(a), list(b), list(c), d], "dimension": x, "dual": y})

    errors = sum(1 for r in rows if r["error"])
    return {
        "schema": SCAN_SCHEMA,
        "conventions": CONVENTION_VERSION,
        "expectations": table["version"],
        "query": {"m": m, "max_weight": bound, "max_order": order_bound},
        "summary": {"cells": len(rows), "nonzero": sum(1 for r in rows if r["dimension"]),
                    "resource_errors": errors, "mismatches": len(mismatches),
                    "dual_violations": len(dual_violations)},
        "cells": rows,
        "mismatches": mismatches,
        "dual_violations": dual_violations,
    }


def default_jobs() -> int:
    return os.cpu_count() or 1
