"""Cyclic coordinate-wise minimization with the relative-interior update rule."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .model import ProblemSpec, box_tolerance, objective_from_activity, validate_spec
from .univariate import (
    HALF_INFINITE_LEFT, HALF_INFINITE_RIGHT, INTERVAL, SINGLETON, UNBOUNDED_BELOW,
    MinimizerSet, PiecewiseAffine, build_restriction_lambda, build_restriction_phi,
    minimize_on_box, ri_point,
)

log = logging.getLogger(__name__)

CONVERGED = "converged"
MAX_SWEEPS = "max_sweeps"
UNBOUNDED = "unbounded"

DRIFT_RTOL = 1e-8
MONOTONE_RTOL = 1e-12


@dataclass(frozen=True)
class SolverConfig:
    eps: float = 1e-7
    delta: float = 1.0
    max_sweeps: int = 1_000_000
    recompute_period: int = 100
    # A sweep with improvement below eps only ends the run if the point is
    # also an interior local minimum (tolerance 10 * eps).  A zero-improvement
    # sweep can still leave coordinates on the boundary of their minimizer sets.
    require_interior: bool = True
    # Raise AssertionError if a coordinate update increases its restriction.
    check_updates: bool = False

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be at least 1")
        if self.recompute_period < 1:
            raise ValueError("recompute_period must be at least 1")


@dataclass(frozen=True)
class SolveResult:
    phi: tuple[float, ...]
    lam: tuple[float, ...]
    objective_value: float
    sweeps: int
    termination: str
    # objective_trace[0] is the starting value, entry k the value after sweep k.
    objective_trace: tuple[float, ...] = field(repr=False, default=())


def _check_start(spec: ProblemSpec, phi: Sequence[float], lam: Sequence[float]):
    if len(phi) != spec.m or len(lam) != spec.n:
        raise ValueError("start point has wrong dimensions")
    for name, x, los, his in (("phi", phi, spec.phi_lo, spec.phi_hi), ("lam", lam, spec.lam_lo, spec.lam_hi)):
        for i, (xi, lo, hi) in enumerate(zip(x, los, his)):
            if not math.isfinite(xi):
                raise ValueError(f"start {name}[{i}] is not finite")
            if xi < lo - box_tolerance(lo) or xi > hi + box_tolerance(hi):
                raise ValueError(f"start {name}[{i}] = {xi!r} outside [{lo!r}, {hi!r}]")


class _State:
    """Mutable iterate with incrementally maintained column activities."""

    def __init__(self, spec: ProblemSpec, phi: list[float], lam: list[float]):
        self.spec = spec
        self.phi = phi
        self.lam = lam
        self.act = spec.activity(phi, lam)
        self.drift_warned = False

    def recompute(self) -> float:
        fresh = self.spec.activity(self.phi, self.lam)
        worst = 0.0
        for old, new in zip(self.act, fresh):
            worst = max(worst, abs(old - new) / (1.0 + abs(new)))
        self.act = fresh
        return worst

    def objective(self) -> float:
        return objective_from_activity(self.spec, self.phi, self.lam, self.act)

    def update(self, rows, x: list[float], i: int, f: PiecewiseAffine, lo: float, hi: float,
               delta: float, check: bool) -> bool:
        S = minimize_on_box(f, lo, hi)
        if S.kind == UNBOUNDED_BELOW:
            return False
        old = x[i]
        new = ri_point(S, delta)
        if new != old:
            if check:
                before, after = f(old), f(new)
                scale = 1.0 + abs(before)
                assert after <= before + MONOTONE_RTOL * scale, (
                    f"update of coordinate {i} increased restriction {before!r} -> {after!r}")
            diff = new - old
            act = self.act
            for j, c in rows[i]:
                act[j] += c * diff
            x[i] = new
        return True


def solve(spec: ProblemSpec, config: SolverConfig | None = None,
          start: tuple[Sequence[float], Sequence[float]] | None = None,
          callback: Callable[[int, float], None] | None = None) -> SolveResult:
    """Sweep phi_1..phi_m then lam_1..lam_n until a sweep improves by less than eps.

    Each coordinate is moved to a relative-interior point of its exact
    minimizer set.  ``callback(sweep, objective)`` is called after every sweep.
    """
    config = config or SolverConfig()
    report = validate_spec(spec)
    if not report.valid:
        raise ValueError("invalid spec: " + "; ".join(str(v) for v in report.violations[:5]))
    if start is None:
        phi, lam = spec.default_start()
    else:
        _check_start(spec, start[0], start[1])
        phi, lam = [float(x) for x in start[0]], [float(x) for x in start[1]]

    st = _State(spec, phi, lam)
    A_rows, B_rows = spec.A.rows, spec.B.rows
    period = config.recompute_period
    check = config.check_updates
    delta = config.delta
    trace = [st.objective()]
    termination = MAX_SWEEPS
    sweeps = 0

    while sweeps < config.max_sweeps:
        ok = True
        for i in range(spec.m):
            f = build_restriction_phi(spec, st.phi, st.lam, st.act, i)
            if not st.update(A_rows, st.phi, i, f, spec.phi_lo[i], spec.phi_hi[i], delta, check):
                ok = False
                break
        if ok:
            for i in range(spec.n):
                f = build_restriction_lambda(spec, st.phi, st.lam, st.act, i)
                if not st.update(B_rows, st.lam, i, f, spec.lam_lo[i], spec.lam_hi[i], delta, check):
                    ok = False
                    break
        sweeps += 1
        if not ok:
            termination = UNBOUNDED
            break
        if sweeps % period == 0:
            drift = st.recompute()
            if drift > DRIFT_RTOL:
                if not st.drift_warned:
                    log.warning("activity drift %.3g exceeds %.1g; recomputing every sweep", drift, DRIFT_RTOL)
                    st.drift_warned = True
                period = 1
        value = st.objective()
        trace.append(value)
        if callback is not None:
            callback(sweeps, value)
        if trace[-2] - value < config.eps:
            if not config.require_interior or is_interior_local_min(spec, st.phi, st.lam, 10 * config.eps)[0]:
                termination = CONVERGED
                break

    st.recompute()
    value = st.objective()
    if termination != UNBOUNDED:
        trace[-1] = value
    return SolveResult(tuple(st.phi), tuple(st.lam), value, sweeps, termination, tuple(trace))


@dataclass(frozen=True)
class CoordinateCheck:
    block: str  # "phi" or "lam"
    index: int
    value: float
    minimizers: MinimizerSet
    ok: bool


def _in_relative_interior(x: float, S: MinimizerSet, tol: float) -> bool:
    if S.kind == UNBOUNDED_BELOW:
        return False
    if S.kind == SINGLETON:
        return abs(x - S.lo) <= tol
    if S.kind == INTERVAL and S.hi - S.lo <= 2 * tol:
        return abs(x - 0.5 * (S.lo + S.hi)) <= tol
    if S.kind in (INTERVAL, HALF_INFINITE_RIGHT) and not x > S.lo + tol:
        return False
    if S.kind in (INTERVAL, HALF_INFINITE_LEFT) and not x < S.hi - tol:
        return False
    return True


def is_interior_local_min(spec: ProblemSpec, phi: Sequence[float], lam: Sequence[float],
                          tol: float = 1e-6) -> tuple[bool, list[CoordinateCheck]]:
    """Check that every coordinate sits in the relative interior of its
    restricted minimizer set.  Returns the verdict and a per-coordinate report."""
    act = spec.activity(phi, lam)
    checks = []
    for i in range(spec.m):
        S = minimize_on_box(build_restriction_phi(spec, phi, lam, act, i), spec.phi_lo[i], spec.phi_hi[i])
        checks.append(CoordinateCheck("phi", i, phi[i], S, _in_relative_interior(phi[i], S, tol)))
    for i in range(spec.n):
        S = minimize_on_box(build_restriction_lambda(spec, phi, lam, act, i), spec.lam_lo[i], spec.lam_hi[i])
        checks.append(CoordinateCheck("lam", i, lam[i], S, _in_relative_interior(lam[i], S, tol)))
    return all(c.ok for c in checks), checks
