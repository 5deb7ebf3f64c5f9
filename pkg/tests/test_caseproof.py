from collections import defaultdict
from itertools import product

import pytest

from cwmlp import caseproof as cp
from cwmlp.caseproof import (
    HOLDS, SKIPPED_UNBOUNDED, VIOLATED, LambdaCase, PhiCase, check_case_lambda, check_case_phi,
    enumerate_lambda_cases, enumerate_phi_cases, run_case_proof,
)

# Frozen from the first full run of the enumeration.
PHI_TOTAL, PHI_HOLDS, PHI_SKIPPED = 101_640, 86_460, 15_180
LAMBDA_TOTAL, LAMBDA_HOLDS, LAMBDA_SKIPPED = 8_505, 6_795, 1_710


@pytest.fixture(scope="module")
def report():
    return run_case_proof()


def test_golden_counts(report):
    assert (report.phi.total, report.phi.holds, report.phi.skipped, report.phi.violated) == \
        (PHI_TOTAL, PHI_HOLDS, PHI_SKIPPED, 0)
    assert (report.lam.total, report.lam.holds, report.lam.skipped, report.lam.violated) == \
        (LAMBDA_TOTAL, LAMBDA_HOLDS, LAMBDA_SKIPPED, 0)
    assert report.ok and report.first_violation is None


def test_parallel_run_identical(report):
    assert run_case_proof(jobs=3) == report


def test_enumeration_counts_and_uniqueness():
    phi = list(enumerate_phi_cases())
    lam = list(enumerate_lambda_cases())
    assert len(phi) == len(set(phi)) == PHI_TOTAL
    assert len(lam) == len(set(lam)) == LAMBDA_TOTAL


def test_membership():
    cases = set(enumerate_phi_cases())
    assert PhiCase(1, 5, 2, (1, -1), (3, 4), 0) in cases
    assert not any(c.lo == 3 and c.hi == 2 for c in cases)
    for c in cases:
        assert c.lo is None or c.hi is None or c.lo < c.hi
        for coef, t in zip(c.coeffs, c.breaks):
            assert (coef == 0) == (t is None)


def test_strictly_increasing_goes_to_lower_bound():
    for lo in range(1, 5):
        v = check_case_phi(PhiCase(lo, None, 3, (0, 0), (None, None), 4))
        assert v.status == HOLDS
        assert v.point2 == 2 * lo
        assert v.duals2["y"] > 0 and v.duals2["z"] == 0


def test_strictly_decreasing_goes_to_upper_bound():
    for hi in range(2, 6):
        v = check_case_phi(PhiCase(None, hi, 3, (1, -1), (2, 4), -3))
        assert v.status == HOLDS
        assert v.point2 == 2 * hi
        assert v.duals2["z"] < 0 and v.duals2["y"] == 0


def test_unbounded_cases_skipped():
    assert check_case_phi(PhiCase(None, 3, 2, (0, 0), (None, None), 2)).status == SKIPPED_UNBOUNDED
    assert check_case_lambda(LambdaCase(1, None, (0, 0), (None, None), -1)).status == SKIPPED_UNBOUNDED


def test_half_infinite_region_is_checked():
    # max{2 - phi, 0} on [1, inf): minimizers [2, inf), checked at 2 + delta
    v = check_case_phi(PhiCase(1, None, 2, (0, 0), (None, None), 0))
    assert v.status == HOLDS and v.point2 == 6


def test_lambda_slope_three_uses_q():
    seen = 0
    for case in enumerate_lambda_cases(slopes=(3,)):
        v = check_case_lambda(case)
        if v.status == SKIPPED_UNBOUNDED:
            continue
        seen += 1
        assert v.status == HOLDS
        assert v.duals2["q"] > 0 and v.duals2["r"] == 0
    assert seen > 0


def test_all_arithmetic_is_integer():
    for case in list(enumerate_phi_cases())[::97]:
        v = check_case_phi(case)
        if v.status == HOLDS:
            vals = [v.point2, v.residual2, *v.duals2["x"], v.duals2["s"], v.duals2["y"], v.duals2["z"]]
            assert all(type(x) is int for x in vals)


def _weak_orders(k):
    """Every weak ordering of k items as a tuple of dense ranks."""
    out = set()
    for ranks in product(range(k), repeat=k):
        used = sorted(set(ranks))
        if used == list(range(len(used))):
            out.add(ranks)
    return out


def _dense_ranks(values):
    order = sorted(set(values))
    return tuple(order.index(x) for x in values)


def _order_type_coverage(cases, with_w):
    realized = defaultdict(set)
    for c in cases:
        names, values = [], []
        for name, val in (("lo", c.lo), ("hi", c.hi)):
            if val is not None:
                names.append(name)
                values.append(val)
        if with_w:
            names.append("w")
            values.append(c.w)
        for k, (coef, t) in enumerate(zip(c.coeffs, c.breaks)):
            if coef:
                names.append(f"b{k}")
                values.append(t)
        key = (tuple(names), c.coeffs)
        realized[key].add(_dense_ranks(values))
    for (names, _), got in realized.items():
        expected = set()
        for ranks in _weak_orders(len(names)):
            r = dict(zip(names, ranks))
            if "lo" in r and "hi" in r and not r["lo"] < r["hi"]:
                continue
            expected.add(ranks)
        assert got == expected, names
    return len(realized)


def test_grid_realizes_every_ordering():
    assert _order_type_coverage(enumerate_phi_cases(slopes=(0,)), with_w=True) > 0
    assert _order_type_coverage(enumerate_lambda_cases(slopes=(0,)), with_w=False) > 0


def _pattern(cases, check):
    out = []
    for c in cases:
        v = check(c)
        out.append((v.status, v.point2, v.duals2.get("x"), v.duals2.get("s")))
    return out


@pytest.mark.parametrize("slopes", [(4, 5, 6), (-3, -4, -5)])
def test_representative_phi_slopes(slopes):
    patterns = [_pattern(enumerate_phi_cases(slopes=(a,)), check_case_phi) for a in slopes]
    assert all(p == patterns[0] for p in patterns)
    assert all(s != VIOLATED for s, *_ in patterns[0])


@pytest.mark.parametrize("slopes", [(3, 4, 5), (-3, -4, -5)])
def test_representative_lambda_slopes(slopes):
    patterns = [_pattern(enumerate_lambda_cases(slopes=(b,)), check_case_lambda) for b in slopes]
    assert all(p == patterns[0] for p in patterns)


def test_three_hinges_can_violate():
    # Rows with three non-zeros are outside the guarantee; the checker finds it.
    v = check_case_lambda(LambdaCase(None, 1, (-1, -1, -1), (1, 1, 1), 2))
    assert v.status == VIOLATED
    assert v.residual2 != 0


def test_endpoint_rule_would_fail(monkeypatch):
    # Picking an endpoint of the minimizer set instead of a relative-interior
    # point breaks the dual constraints, so the check is not vacuous.
    monkeypatch.setattr(cp, "_ri_point2", lambda L, U: L if L is not None else (U if U is not None else 0))
    rep = run_case_proof()
    assert rep.violated > 0
    assert rep.first_violation is not None
