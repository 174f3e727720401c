"""Acceptance criteria, one test each; every test prints a PASS/FAIL line with its runtime.

Run alone with ``pytest tests/test_acceptance.py -v -s`` or ``python tests/test_acceptance.py``.
"""
import math
import random
import subprocess
import sys
import time
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

sys.path.insert(0, __import__("os").path.dirname(__file__))
from conftest import DATA, bisect  # noqa: E402

from polyreg.edge_pencil import BcPair, SearchBox, count_zeros, find_roots, mu  # noqa: E402
from polyreg.scenarios import SCENARIO_INDEX  # noqa: E402
from polyreg.verification import equivalence_grid, membership_suite  # noqa: E402

F = Fraction


def report(number, title, ok, seconds, limit, detail=""):
    within = limit is None or seconds < limit
    status = "PASS" if ok and within else "FAIL"
    budget = "" if limit is None else f" / {limit:g} s"
    line = f"[{status}] criterion {number}: {title} ({seconds:.2f} s{budget})"
    if detail:
        line += f" {detail}"
    print(line, flush=True)
    return ok and within


def timed(fn):
    start = time.perf_counter()
    ok, detail = fn()
    return ok, detail, time.perf_counter() - start


# 1 ----------------------------------------------------------------------------------

def closed_form_check():
    errs = [abs(mu(BcPair(0, 0), th).value - math.pi / th)
            for th in (math.pi / 3, math.pi / 2, 2 * math.pi / 3, 0.9 * math.pi)]
    return max(errs) < 1e-10, f"max error {max(errs):.1e}"


# 2 ----------------------------------------------------------------------------------

def threshold_check():
    c = 3 * math.acos(0.25)
    err = abs(mu(BcPair(0, 0), c).value - 2 / 3)
    ratio = c / math.pi
    return err < 1e-8 and abs(ratio - 1.2587) < 5e-5, f"mu error {err:.1e}, angle/pi {ratio:.6f}"


# 3 ----------------------------------------------------------------------------------

def reentrant_check():
    ref = bisect(lambda x: math.sin(1.5 * math.pi * x) - x, 0.3, 0.7)
    value = mu(BcPair(0, 0), 1.5 * math.pi).value
    return abs(value - ref) < 1e-10 and value < 2 / 3, f"mu {value:.12f}, bisection {ref:.12f}"


# 4 ----------------------------------------------------------------------------------

TABLE = [
    ("dirichlet_weak", "(2, 3]"),
    ("dirichlet_convex_weak", "(2, inf)"),
    ("dirichlet_lift", "(1, 4/3]"),
    ("dirichlet_lift_angles", "(1, 3/2]"),
    ("dirichlet_convex_lift", "(1, 2]"),
    ("dirichlet_convex_lift_acute", "(1, 3)"),
    ("neumann_weak", "(2, 3)"),
    ("neumann_lift", "(1, 4/3]"),
    ("neumann_lift_angles", "(1, 3/2)"),
    ("mixed_dn_lift", "(1, 8/7]"),
    ("mixed_i_iii_weak", "(2, 8/3]"),
    ("mixed_i_iii_weak_angles", "(2, 3]"),
]


def range_table_check():
    wrong = []
    for key, expected in TABLE:
        r = SCENARIO_INDEX[key].srange()
        if r.main is None or r.main.describe() != expected:
            wrong.append(f"{key}: {r.describe()}")
    flags = {key: dict(SCENARIO_INDEX[key].srange().requirements)
             for key in ("dirichlet_convex_lift", "dirichlet_convex_lift_acute")}
    if flags["dirichlet_convex_lift"].get("condg_0_3") != "s = 2":
        wrong.append("convex lift: condg flag not required at s = 2")
    if "g_edge_trace_zero" not in flags["dirichlet_convex_lift_acute"]:
        wrong.append("acute convex lift: trace flag not required")
    mixed = SCENARIO_INDEX["mixed_i_iii_weak"].srange()
    if mixed.main.hi != F(8, 3) or not mixed.main.hi_closed:
        wrong.append("mixed weak: upper end not 8/3 closed")
    return not wrong, "; ".join(wrong) or f"{len(TABLE)} ranges exact"


# 5 ----------------------------------------------------------------------------------

def equivalence_check():
    cases = equivalence_grid(N=48, tol=1e-6)
    bad = [c.to_dict() for c in cases if not c.ok]
    dev = max(c.max_deviation for c in cases)
    return not bad, f"{len(cases)} cells, {len(bad)} mismatched, max deviation {dev:.1e}"


# 6 ----------------------------------------------------------------------------------

PAIRS = [(0, 0), (3, 3), (0, 1), (0, 2), (0, 3)]


def counting_check():
    mismatches = []
    seen = []

    @settings(max_examples=100, derandomize=True, deadline=None, database=None)
    @given(st.sampled_from(PAIRS), st.floats(0.1, 2 * math.pi - 0.1), st.floats(-2, 4),
           st.floats(0.05, 3), st.floats(-6, 5), st.floats(0.05, 3))
    def prop(pair, theta, re_lo, width, im_lo, height):
        box = SearchBox(re_lo, re_lo + width, im_lo, im_lo + height)
        spectrum = find_roots(BcPair(*pair), theta, box)
        total = sum(r.multiplicity for r in spectrum.roots + spectrum.excluded)
        count = count_zeros(BcPair(*pair), theta, box)
        seen.append(1)
        if count != total:
            mismatches.append((pair, theta, box.as_tuple(), count, total))

    prop()
    return not mismatches and len(seen) >= 100, f"{len(seen)} boxes, {len(mismatches)} mismatched"


# 7 ----------------------------------------------------------------------------------

def membership_check():
    rows = membership_suite(100, seed=20240)
    wrong = [c for c, expected, got in rows if expected != got]
    return not wrong and len(rows) == 100, f"{len(rows)} cases, {len(wrong)} misclassified"


# 8 ----------------------------------------------------------------------------------

def determinism_check():
    cmd = [sys.executable, "-m", "polyreg.cli", "analyze", str(DATA / "cube.json")]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True).stdout
    return first == second and len(first) > 0, f"{len(first)} bytes"


CRITERIA = [
    (1, "Dirichlet closed form", closed_form_check, 1.0),
    (2, "threshold angle identity", threshold_check, 1.0),
    (3, "reentrant exponent", reentrant_check, 1.0),
    (4, "range table", range_table_check, 1.0),
    (5, "oracle equivalence grid", equivalence_check, 60.0),
    (6, "argument-principle consistency", counting_check, 30.0),
    (7, "membership quadrature", membership_check, 30.0),
    (8, "end-to-end determinism", determinism_check, None),
]


@pytest.mark.parametrize("number,title,check,limit", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(number, title, check, limit, capsys):
    ok, detail, seconds = timed(check)
    with capsys.disabled():
        print()
        passed = report(number, title, ok, seconds, limit, detail)
    assert passed, detail


if __name__ == "__main__":
    results = []
    for number, title, check, limit in CRITERIA:
        ok, detail, seconds = timed(check)
        results.append(report(number, title, ok, seconds, limit, detail))
    sys.exit(0 if all(results) else 1)
