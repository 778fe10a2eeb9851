import json

import pytest

from symplinv.scan import SCAN_SCHEMA, scan, scan_cells


@pytest.fixture(scope="module")
def table_m1():
    return scan(1, 2, 2)


def test_cells_enumeration():
    cells = scan_cells(1, 2, 2)
    assert len(cells) == 27 * 3 and cells == sorted(cells)


def test_m1_summary(table_m1):
    s = table_m1["summary"]
    assert table_m1["schema"] == SCAN_SCHEMA
    assert s["cells"] == 81 and s["resource_errors"] == 0
    assert s["mismatches"] == 0 and s["dual_violations"] == 0
    assert s["nonzero"] == sum(1 for r in table_m1["cells"] if r["dimension"])


def row(table, lam, mu, nu, d):
    for r in table["cells"]:
        if (tuple(r["lambda"]), tuple(r["mu"]), tuple(r["nu"]), r["order"]) == (lam, mu, nu, d):
            return r
    raise KeyError


def test_m1_cells(table_m1):
    assert row(table_m1, (0,), (0,), (0,), 2)["dimension"] == 1
    assert row(table_m1, (2,), (2,), (2,), 2)["dimension"] == 1
    r = row(table_m1, (1,), (2,), (2,), 1)
    assert r["expected"]["source"].startswith("P") and r["match"]


def test_jobs_independent(table_m1):
    par = scan(1, 2, 2, jobs=2)
    assert json.dumps(par, sort_keys=True) == json.dumps(table_m1, sort_keys=True)


def test_resource_errors_recorded():
    t = scan(1, 1, 1, cap=1)
    assert t["summary"]["resource_errors"] > 0
    bad = [r for r in t["cells"] if r["error"]]
    assert all(r["dimension"] is None and r["match"] is None for r in bad)


def test_negative_bounds():
    with pytest.raises(ValueError):
        scan(1, -1, 0)


def test_m2_first_order_consistent_and_jobs_independent():
    serial = scan(2, 2, 1)
    assert serial["summary"]["mismatches"] == 0 and serial["summary"]["dual_violations"] == 0
    assert json.dumps(scan(2, 2, 1, jobs=8), sort_keys=True) == json.dumps(serial, sort_keys=True)
