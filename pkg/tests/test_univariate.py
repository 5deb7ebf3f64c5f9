import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from cwmlp import MinimizerSet, PiecewiseAffine, ProblemSpec, minimize_on_box, ri_point
from cwmlp.oracle import brute_force_univariate
from cwmlp.univariate import (
    ALL_REALS, HALF_INFINITE_LEFT, HALF_INFINITE_RIGHT, INTERVAL, SINGLETON, UNBOUNDED_BELOW,
    UnboundedError, build_restriction_lambda, build_restriction_phi,
)

from generators import random_pwa

INF = math.inf


def test_restriction_phi_example():
    spec = ProblemSpec.build(1, 0, 1, A=[(0, 0, 1)], w=[2])
    for x in (-3.0, 0.0, 4.5):
        f = build_restriction_phi(spec, [x], [], spec.activity([x], []), 0)
        assert sorted(f.hinges) == [(-1.0, 2.0), (1.0, 0.0)]
        assert f.slope == 0


def test_restriction_phi_empty_row():
    spec = ProblemSpec.build(1, 0, 2, a=[3], w=[-1])
    f = build_restriction_phi(spec, [0.0], [], spec.activity([0.0], []), 0)
    assert f.hinges == ((-1.0, -1.0),)
    assert f.slope == 3


def test_restriction_lambda_examples():
    spec = ProblemSpec.build(0, 1, 3, B=[(0, 0, 1), (0, 1, -1), (0, 2, -1)], v=[0, 1, 2], b=[0])
    f = build_restriction_lambda(spec, [], [0.0], spec.activity([], [0.0]), 0)
    assert f.hinges == ((1.0, 0.0), (-1.0, 1.0), (-1.0, 2.0))
    assert f.slope == 0
    empty = ProblemSpec.build(0, 1, 2, b=[-2])
    g = build_restriction_lambda(empty, [], [1.0], empty.activity([], [1.0]), 0)
    assert g.hinges == () and g.slope == -2


def test_restriction_index_errors():
    spec = ProblemSpec.build(1, 1, 0)
    with pytest.raises(IndexError):
        build_restriction_phi(spec, [0.0], [0.0], [], 1)
    with pytest.raises(IndexError):
        build_restriction_lambda(spec, [0.0], [0.0], [], -1)


def test_restriction_agrees_with_objective():
    rng = random.Random(11)
    from generators import random_general_spec, random_point
    from cwmlp import objective
    for _ in range(50):
        spec = random_general_spec(rng)
        phi, lam = random_point(rng, spec)
        act = spec.activity(phi, lam)
        for i in range(spec.m):
            f = build_restriction_phi(spec, phi, lam, act, i)
            y = rng.uniform(spec.phi_lo[i], spec.phi_hi[i])
            moved = list(phi)
            moved[i] = y
            diff = objective(spec, moved, lam) - objective(spec, phi, lam)
            assert f(y) - f(phi[i]) == pytest.approx(diff, abs=1e-9)
        for i in range(spec.n):
            f = build_restriction_lambda(spec, phi, lam, act, i)
            y = rng.uniform(spec.lam_lo[i], spec.lam_hi[i])
            moved = list(lam)
            moved[i] = y
            diff = objective(spec, phi, moved) - objective(spec, phi, lam)
            assert f(y) - f(lam[i]) == pytest.approx(diff, abs=1e-9)


def test_minimize_examples():
    assert minimize_on_box(PiecewiseAffine((), 1.0), 0, 5) == MinimizerSet(SINGLETON, 0, 0)
    f3 = PiecewiseAffine(((1, 0), (-1, 1), (-1, 2)))
    assert minimize_on_box(f3) == MinimizerSet(INTERVAL, 1, 2)
    assert minimize_on_box(PiecewiseAffine(((1, 0),), -1.0)) == MinimizerSet(HALF_INFINITE_RIGHT, 0, INF)
    assert minimize_on_box(PiecewiseAffine(((-1, 0),), 1.0)) == MinimizerSet(HALF_INFINITE_LEFT, -INF, 0)
    assert minimize_on_box(PiecewiseAffine()).kind == ALL_REALS
    assert minimize_on_box(PiecewiseAffine((), -1.0), 0, INF).kind == UNBOUNDED_BELOW
    assert minimize_on_box(PiecewiseAffine((), 1.0), -INF, 3).kind == UNBOUNDED_BELOW
    # projection of the unconstrained interval [1, 2] onto boxes
    assert minimize_on_box(f3, 1.5, 9) == MinimizerSet(INTERVAL, 1.5, 2)
    assert minimize_on_box(f3, 3, 9) == MinimizerSet(SINGLETON, 3, 3)
    assert minimize_on_box(f3, -5, 0.5) == MinimizerSet(SINGLETON, 0.5, 0.5)


def test_coincident_breakpoints_merge():
    f = PiecewiseAffine(((1, -1), (1, -1), (-1, 1)), -1.0)
    # slope left of 1 is -2, right of 1 is +1: unique minimizer at 1
    assert minimize_on_box(f) == MinimizerSet(SINGLETON, 1, 1)


def test_degenerate_box_rejected():
    with pytest.raises(ValueError):
        minimize_on_box(PiecewiseAffine(), 1.0, 1.0)


def test_zero_coefficient_rejected():
    with pytest.raises(ValueError):
        PiecewiseAffine(((0.0, 1.0),))


def test_ri_point_examples():
    assert ri_point(MinimizerSet(INTERVAL, 1, 2)) == 1.5
    assert ri_point(MinimizerSet(HALF_INFINITE_RIGHT, 3, INF), 1.0) == 4
    assert ri_point(MinimizerSet(HALF_INFINITE_LEFT, -INF, 3), 0.5) == 2.5
    assert ri_point(MinimizerSet(SINGLETON, 7, 7)) == 7
    assert ri_point(MinimizerSet(ALL_REALS)) == 0.0
    with pytest.raises(UnboundedError):
        ri_point(MinimizerSet(UNBOUNDED_BELOW))
    with pytest.raises(ValueError):
        ri_point(MinimizerSet(INTERVAL, 0, 1), 0.0)


def _box(rng):
    kind = rng.randrange(4)
    lo = float(rng.randint(-7, 6))
    hi = lo + rng.randint(1, 8)
    return [(lo, hi), (-INF, hi), (lo, INF), (-INF, INF)][kind]


def _same_set(S: MinimizerSet, ref) -> bool:
    if ref.unbounded or S.kind == UNBOUNDED_BELOW:
        return ref.unbounded and S.kind == UNBOUNDED_BELOW

    def close(x, y):
        return x == y or (math.isfinite(x) and math.isfinite(y) and abs(x - y) <= 1e-12)

    return close(S.lo, float(ref.lo)) and close(S.hi, float(ref.hi))


@settings(max_examples=2000, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_minimize_matches_brute_force(seed):
    rng = random.Random(seed)
    f = random_pwa(rng)
    lo, hi = _box(rng)
    assert _same_set(minimize_on_box(f, lo, hi), brute_force_univariate(f, lo, hi))


@settings(max_examples=500, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_minimize_matches_brute_force_real_coefficients(seed):
    rng = random.Random(seed)
    hinges = tuple((rng.choice([-1, 1]) * rng.choice([0.5, 1.0, 2.0, 3.0]), rng.randint(-10, 10) / 4)
                   for _ in range(rng.randint(0, 5)))
    f = PiecewiseAffine(hinges, rng.randint(-8, 8) / 2)
    lo, hi = _box(rng)
    assert _same_set(minimize_on_box(f, lo, hi), brute_force_univariate(f, lo, hi))


def no_breakpoint_inside(f: PiecewiseAffine, lo: float, hi: float) -> bool:
    """No breakpoint and no box end strictly inside a non-degenerate minimizer interval."""
    S = minimize_on_box(f, lo, hi)
    if S.kind in (UNBOUNDED_BELOW, SINGLETON):
        return True
    inside = [t for t in f.breakpoints if S.lo < t < S.hi]
    inside += [b for b in (lo, hi) if S.lo < b < S.hi]
    return not inside


@settings(max_examples=2000, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_no_breakpoint_inside_minimizer_interval(seed):
    rng = random.Random(seed)
    f = random_pwa(rng)
    lo, hi = _box(rng)
    assert no_breakpoint_inside(f, lo, hi)


@settings(max_examples=1000, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([0.25, 1.0, 3.0]))
def test_ri_point_in_relative_interior(seed, delta):
    rng = random.Random(seed)
    f = random_pwa(rng)
    lo, hi = _box(rng)
    S = minimize_on_box(f, lo, hi)
    if S.kind == UNBOUNDED_BELOW:
        return
    x = ri_point(S, delta)
    if S.kind == SINGLETON:
        assert x == S.lo
    else:
        assert S.lo < x < S.hi
    # the chosen point is a minimizer
    ref = brute_force_univariate(f, lo, hi)
    assert f(x) == pytest.approx(float(ref.value), abs=1e-12)
