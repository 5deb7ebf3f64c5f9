"""Exhaustive case check of the dual constraints for single-coordinate minima.

Every restriction of the objective to one phi (or lam) coordinate in the
guarantee class is the sum of at most three hinges plus a linear term.  Only
the relative order of the breakpoints and bounds matters, so placing them on
the grid {1, ..., 5} (resp. {1, ..., 4}) with explicit infinite sentinels
covers every ordering.  For each case we locate the minimizer region, move to
its relative-interior point, assign the duals from the sign pattern and check
the equality constraint and the ranges of the duals.

Positions and dual values are multiplied by 2 so that midpoints and halves
stay integral.  No floating point is used here.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Iterator, Optional, Sequence

HOLDS = "holds"
SKIPPED_UNBOUNDED = "skipped_unbounded"
VIOLATED = "violated"

PHI_POSITIONS = (1, 2, 3, 4, 5)
LAMBDA_POSITIONS = (1, 2, 3, 4)
PHI_SLOPES = tuple(range(-3, 5))
LAMBDA_SLOPES = tuple(range(-3, 4))
# Distance from the finite end of a half-infinite region, in grid units.
DELTA = 1


@dataclass(frozen=True)
class PhiCase:
    """``max{w - phi, 0} + sum_k max{A_k (phi - b_k), 0} + a phi`` on ``[lo, hi]``.

    ``lo``/``hi`` of None stand for -inf/+inf.  ``breaks[k]`` is None exactly
    when ``coeffs[k] == 0``.
    """

    lo: Optional[int]
    hi: Optional[int]
    w: int
    coeffs: tuple[int, int]
    breaks: tuple[Optional[int], Optional[int]]
    slope: int


@dataclass(frozen=True)
class LambdaCase:
    """``sum_k max{B_k (lam - b_k), 0} + b lam`` on ``[lo, hi]``."""

    lo: Optional[int]
    hi: Optional[int]
    coeffs: tuple[int, int]
    breaks: tuple[Optional[int], Optional[int]]
    slope: int


@dataclass(frozen=True)
class CaseVerdict:
    status: str
    # The remaining fields are doubled values; None when skipped.
    point2: Optional[int] = None
    duals2: dict = field(default_factory=dict, compare=False)
    residual2: int = 0
    range_ok: bool = True


@dataclass
class FamilyCounts:
    total: int = 0
    holds: int = 0
    skipped: int = 0
    violated: int = 0

    def add(self, other: "FamilyCounts"):
        self.total += other.total
        self.holds += other.holds
        self.skipped += other.skipped
        self.violated += other.violated


@dataclass
class ProofReport:
    phi: FamilyCounts
    lam: FamilyCounts
    first_violation: Optional[tuple] = None
    seconds: float = field(default=0.0, compare=False)

    @property
    def violated(self) -> int:
        return self.phi.violated + self.lam.violated

    @property
    def ok(self) -> bool:
        return self.violated == 0

    def lines(self) -> list[str]:
        out = []
        for name, c in (("phi (a-constraints)", self.phi), ("lambda (b-constraints)", self.lam)):
            out.append(f"{name}: total={c.total} holds={c.holds} "
                       f"skipped_unbounded={c.skipped} violated={c.violated}")
        if self.first_violation is not None:
            out.append(f"first violation: {self.first_violation[0]!r} -> {self.first_violation[1]!r}")
        out.append(f"result: {'PASS' if self.ok else 'FAIL'} ({self.seconds:.2f}s)")
        return out


def _boxes(positions: Sequence[int]) -> list[tuple[Optional[int], Optional[int]]]:
    los = [None, *positions]
    his = [*positions, None]
    return [(lo, hi) for lo in los for hi in his if lo is None or hi is None or lo < hi]


def _hinge_choices(positions: Sequence[int]) -> list[tuple[int, Optional[int]]]:
    return [(0, None)] + [(c, t) for c in (-1, 1) for t in positions]


def enumerate_phi_cases(slopes: Sequence[int] = PHI_SLOPES,
                        positions: Sequence[int] = PHI_POSITIONS) -> Iterator[PhiCase]:
    """Every admissible (bounds, w, hinges, slope) combination, each once."""
    hinges = _hinge_choices(positions)
    for lo, hi in _boxes(positions):
        for w in positions:
            for (c1, t1), (c2, t2) in product(hinges, hinges):
                for a in slopes:
                    yield PhiCase(lo, hi, w, (c1, c2), (t1, t2), a)


def enumerate_lambda_cases(slopes: Sequence[int] = LAMBDA_SLOPES,
                           positions: Sequence[int] = LAMBDA_POSITIONS) -> Iterator[LambdaCase]:
    hinges = _hinge_choices(positions)
    for lo, hi in _boxes(positions):
        for (c1, t1), (c2, t2) in product(hinges, hinges):
            for b in slopes:
                yield LambdaCase(lo, hi, (c1, c2), (t1, t2), b)


def _argmin_region(hinges: list[tuple[int, int]], slope: int, lo2: Optional[int],
                   hi2: Optional[int]) -> Optional[tuple[Optional[int], Optional[int]]]:
    """Minimizer region of ``sum max{c (x - t), 0} + slope x`` on the box.

    Arguments are doubled positions.  Returns ``(L, U)`` with None for an
    infinite end, or None when the function is unbounded below.
    """
    left_tail = slope + sum(c for c, _ in hinges if c < 0)
    right_tail = slope + sum(c for c, _ in hinges if c > 0)
    if (lo2 is None and left_tail > 0) or (hi2 is None and right_tail < 0):
        return None

    def f(x):
        return slope * x + sum(max(c * (x - t), 0) for c, t in hinges)

    pts = {t for _, t in hinges
           if (lo2 is None or t >= lo2) and (hi2 is None or t <= hi2)}
    if lo2 is not None:
        pts.add(lo2)
    if hi2 is not None:
        pts.add(hi2)
    if not pts:
        # No hinges on the whole line with zero slope: f is constant.
        return None, None
    pts = sorted(pts)
    vals = [f(x) for x in pts]
    best = min(vals)
    arg = [x for x, v in zip(pts, vals) if v == best]
    L, U = arg[0], arg[-1]
    if lo2 is None and left_tail == 0 and L == pts[0]:
        L = None
    if hi2 is None and right_tail == 0 and U == pts[-1]:
        U = None
    return L, U


def _ri_point2(L: Optional[int], U: Optional[int]) -> int:
    if L is not None and U is not None:
        # Doubled grid positions are even, so the midpoint is integral.
        return (L + U) // 2
    if L is not None:
        return L + 2 * DELTA
    if U is not None:
        return U - 2 * DELTA
    return 0


def _column_duals2(x2: int, coeffs, breaks) -> list[int]:
    """Doubled column duals: 2 if the column activity is positive, 0 if
    negative, 1 at the breakpoint or for an absent entry."""
    out = []
    for c, t in zip(coeffs, breaks):
        if c == 0:
            out.append(1)
            continue
        act = c * (x2 - 2 * t)
        out.append(2 if act > 0 else 0 if act < 0 else 1)
    return out


def _dbl(v: Optional[int]) -> Optional[int]:
    return None if v is None else 2 * v


def check_case_phi(case: PhiCase) -> CaseVerdict:
    lo2, hi2 = _dbl(case.lo), _dbl(case.hi)
    w2 = 2 * case.w
    hinges = [(-1, w2)] + [(c, 2 * t) for c, t in zip(case.coeffs, case.breaks) if c != 0]
    region = _argmin_region(hinges, case.slope, lo2, hi2)
    if region is None:
        return CaseVerdict(SKIPPED_UNBOUNDED)
    p2 = _ri_point2(*region)
    x2 = _column_duals2(p2, case.coeffs, case.breaks)
    g2 = 2 * case.slope + sum(c * xk for c, xk in zip(case.coeffs, x2))
    if w2 > p2:
        s2 = 2
    elif w2 < p2:
        s2 = 0
    else:
        s2 = min(2, max(g2, 0))
    z2 = min(g2 - s2, 0) if hi2 is not None and p2 == hi2 else 0
    y2 = max(g2 - s2, 0) if lo2 is not None and p2 == lo2 else 0
    residual2 = s2 + z2 + y2 - sum(c * xk for c, xk in zip(case.coeffs, x2)) - 2 * case.slope
    range_ok = 0 <= s2 <= 2 and y2 >= 0 and z2 <= 0 and all(0 <= xk <= 2 for xk in x2)
    status = HOLDS if residual2 == 0 and range_ok else VIOLATED
    return CaseVerdict(status, p2, {"x": tuple(x2), "s": s2, "y": y2, "z": z2}, residual2, range_ok)


def check_case_lambda(case: LambdaCase) -> CaseVerdict:
    lo2, hi2 = _dbl(case.lo), _dbl(case.hi)
    hinges = [(c, 2 * t) for c, t in zip(case.coeffs, case.breaks) if c != 0]
    region = _argmin_region(hinges, case.slope, lo2, hi2)
    if region is None:
        return CaseVerdict(SKIPPED_UNBOUNDED)
    p2 = _ri_point2(*region)
    x2 = _column_duals2(p2, case.coeffs, case.breaks)
    g2 = 2 * case.slope + sum(c * xk for c, xk in zip(case.coeffs, x2))
    r2 = min(g2, 0) if hi2 is not None and p2 == hi2 else 0
    q2 = max(g2, 0) if lo2 is not None and p2 == lo2 else 0
    residual2 = r2 + q2 - g2
    range_ok = q2 >= 0 and r2 <= 0 and all(0 <= xk <= 2 for xk in x2)
    status = HOLDS if residual2 == 0 and range_ok else VIOLATED
    return CaseVerdict(status, p2, {"x": tuple(x2), "q": q2, "r": r2}, residual2, range_ok)


def _tally(cases, check) -> tuple[FamilyCounts, Optional[tuple]]:
    counts = FamilyCounts()
    first = None
    for case in cases:
        v = check(case)
        counts.total += 1
        if v.status == HOLDS:
            counts.holds += 1
        elif v.status == SKIPPED_UNBOUNDED:
            counts.skipped += 1
        else:
            counts.violated += 1
            if first is None:
                first = (case, v)
    return counts, first


def _phi_chunk(box) -> tuple[FamilyCounts, Optional[tuple]]:
    lo, hi = box
    hinges = _hinge_choices(PHI_POSITIONS)
    cases = (PhiCase(lo, hi, w, (c1, c2), (t1, t2), a)
             for w in PHI_POSITIONS
             for (c1, t1), (c2, t2) in product(hinges, hinges)
             for a in PHI_SLOPES)
    return _tally(cases, check_case_phi)


def _lambda_chunk(box) -> tuple[FamilyCounts, Optional[tuple]]:
    lo, hi = box
    hinges = _hinge_choices(LAMBDA_POSITIONS)
    cases = (LambdaCase(lo, hi, (c1, c2), (t1, t2), b)
             for (c1, t1), (c2, t2) in product(hinges, hinges)
             for b in LAMBDA_SLOPES)
    return _tally(cases, check_case_lambda)


def run_case_proof(jobs: int = 1) -> ProofReport:
    """Check both constraint families.  Work is split by bounding box; the
    merged counts do not depend on ``jobs``."""
    start = time.perf_counter()
    phi_boxes = _boxes(PHI_POSITIONS)
    lam_boxes = _boxes(LAMBDA_POSITIONS)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            phi_parts = list(pool.map(_phi_chunk, phi_boxes))
            lam_parts = list(pool.map(_lambda_chunk, lam_boxes))
    else:
        phi_parts = [_phi_chunk(b) for b in phi_boxes]
        lam_parts = [_lambda_chunk(b) for b in lam_boxes]

    first = None
    phi, lam = FamilyCounts(), FamilyCounts()
    for counts, parts in ((phi, phi_parts), (lam, lam_parts)):
        for c, viol in parts:
            counts.add(c)
            if first is None and viol is not None:
                first = viol
    return ProofReport(phi, lam, first, time.perf_counter() - start)
