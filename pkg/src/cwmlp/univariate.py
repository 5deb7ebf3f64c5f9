"""One-variable restrictions of the objective and their exact minimizer sets."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .model import ProblemSpec

INF = math.inf

SINGLETON = "singleton"
INTERVAL = "interval"
HALF_INFINITE_LEFT = "half_infinite_left"
HALF_INFINITE_RIGHT = "half_infinite_right"
ALL_REALS = "all_reals"
UNBOUNDED_BELOW = "unbounded_below"


class UnboundedError(ArithmeticError):
    """The restricted function has no minimum on its box."""


@dataclass(frozen=True)
class PiecewiseAffine:
    """``sum_k max{c_k x + d_k, 0} + slope * x + offset``."""

    hinges: tuple[tuple[float, float], ...] = ()
    slope: float = 0.0
    offset: float = 0.0

    def __post_init__(self):
        hinges = tuple((c, d) for c, d in self.hinges)
        for c, _ in hinges:
            if c == 0:
                raise ValueError("hinge with zero coefficient; fold it into the offset")
        object.__setattr__(self, "hinges", hinges)

    def __call__(self, x):
        total = self.offset + self.slope * x
        for c, d in self.hinges:
            total += max(c * x + d, 0)
        return total

    @property
    def breakpoints(self) -> list[float]:
        return [-d / c for c, d in self.hinges]


@dataclass(frozen=True)
class MinimizerSet:
    kind: str
    lo: float = -INF
    hi: float = INF

    @property
    def bounded(self) -> bool:
        return self.kind != UNBOUNDED_BELOW

    def contains(self, x: float, tol: float = 0.0) -> bool:
        if self.kind == UNBOUNDED_BELOW:
            return False
        return self.lo - tol <= x <= self.hi + tol


def _is_integral(x: float) -> bool:
    return float(x).is_integer()


def minimize_on_box(f: PiecewiseAffine, lo: float = -INF, hi: float = INF) -> MinimizerSet:
    """Exact minimizer set of ``f`` on ``[lo, hi]``.

    Coincident breakpoints are merged before the segment scan.  Slope sums are
    compared with zero exactly when every coefficient is integral, otherwise
    with a 1e-12 relative tolerance.
    """
    if not lo < hi:
        raise ValueError(f"empty or degenerate box [{lo!r}, {hi!r}]")
    integral = _is_integral(f.slope) and all(_is_integral(c) for c, _ in f.hinges)
    if integral:
        tol = 0.0
    else:
        tol = 1e-12 * (1.0 + abs(f.slope) + sum(abs(c) for c, _ in f.hinges))

    jumps: dict[float, float] = {}
    left_slope = f.slope
    for c, d in f.hinges:
        t = -d / c
        jumps[t] = jumps.get(t, 0.0) + abs(c)
        if c < 0:
            left_slope += c

    # x_lo: leftmost point whose right derivative is >= 0.
    # x_hi: leftmost point whose right derivative is > 0.
    x_lo = -INF if left_slope >= -tol else None
    x_hi = -INF if left_slope > tol else None
    s = left_slope
    if x_hi is None:
        for t in sorted(jumps):
            s += jumps[t]
            if x_lo is None and s >= -tol:
                x_lo = t
            if s > tol:
                x_hi = t
                break
    if x_lo is None:
        x_lo = INF
    if x_hi is None:
        x_hi = INF

    if (x_lo == INF and hi == INF) or (x_hi == -INF and lo == -INF):
        return MinimizerSet(UNBOUNDED_BELOW, -INF, INF)

    L = min(max(x_lo, lo), hi)
    U = min(max(x_hi, lo), hi)
    if L == U:
        return MinimizerSet(SINGLETON, L, U)
    if L == -INF and U == INF:
        return MinimizerSet(ALL_REALS, L, U)
    if L == -INF:
        return MinimizerSet(HALF_INFINITE_LEFT, L, U)
    if U == INF:
        return MinimizerSet(HALF_INFINITE_RIGHT, L, U)
    return MinimizerSet(INTERVAL, L, U)


def ri_point(S: MinimizerSet, delta: float = 1.0) -> float:
    """A point in the relative interior of ``S``: the midpoint, or ``delta`` away
    from the finite end of a half-infinite set."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    kind = S.kind
    if kind == SINGLETON:
        return S.lo
    if kind == INTERVAL:
        return 0.5 * (S.lo + S.hi)
    if kind == HALF_INFINITE_RIGHT:
        return S.lo + delta
    if kind == HALF_INFINITE_LEFT:
        return S.hi - delta
    if kind == ALL_REALS:
        return 0.0
    raise UnboundedError("restriction is unbounded below")


def build_restriction_phi(spec: ProblemSpec, phi: Sequence[float], lam: Sequence[float],
                          activity: Sequence[float], i: int) -> PiecewiseAffine:
    """Restriction of the objective to ``phi[i]`` (up to an additive constant).

    ``activity`` must hold the current column activities; the breakpoint offsets
    are ``activity[j] - A[i, j] * phi[i]`` and so do not depend on ``phi[i]``.
    """
    if not 0 <= i < spec.m:
        raise IndexError(f"phi index {i} out of range for m={spec.m}")
    x = phi[i]
    hinges = [(-1.0, spec.w[i])]
    hinges.extend((c, activity[j] - c * x) for j, c in spec.A.rows[i] if c != 0)
    return PiecewiseAffine(tuple(hinges), spec.a[i], 0.0)


def build_restriction_lambda(spec: ProblemSpec, phi: Sequence[float], lam: Sequence[float],
                             activity: Sequence[float], i: int) -> PiecewiseAffine:
    """Restriction of the objective to ``lam[i]`` (up to an additive constant)."""
    if not 0 <= i < spec.n:
        raise IndexError(f"lambda index {i} out of range for n={spec.n}")
    x = lam[i]
    hinges = tuple((c, activity[j] - c * x) for j, c in spec.B.rows[i] if c != 0)
    return PiecewiseAffine(hinges, spec.b[i], 0.0)
