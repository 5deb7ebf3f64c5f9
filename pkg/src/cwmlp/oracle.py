"""Reference solvers used to validate the coordinate-wise method.

* :func:`lp_solve_exact` solves the explicit LP (with alpha, beta restored)
  by a two-phase simplex over :class:`fractions.Fraction` with Bland's rule.
* :func:`maxflow_reference` is Edmonds-Karp on exact rationals.
* :func:`brute_force_univariate` minimizes a one-variable hinge sum by
  evaluating it at every breakpoint, box end and segment midpoint.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from .model import ProblemSpec, validate_spec
from .univariate import PiecewiseAffine

INF = math.inf
MAX_ORACLE_SIZE = 300


class UnboundedLPError(ArithmeticError):
    pass


class InfeasibleLPError(ArithmeticError):
    pass


@dataclass
class DenseLP:
    """``min c.z  s.t.  rows[r].z >= rhs[r],  lo <= z <= hi`` over rationals.

    Rows are dicts ``{var: coef}``.  Bounds use ``None`` for infinity.
    """

    c: list[Fraction]
    rows: list[dict[int, Fraction]]
    rhs: list[Fraction]
    lo: list[Fraction | None]
    hi: list[Fraction | None]
    names: list[str] = field(default_factory=list)

    @property
    def nvars(self) -> int:
        return len(self.c)


def _frac_bound(x: float) -> Fraction | None:
    return None if math.isinf(x) else Fraction(x)


def to_dense_lp(spec: ProblemSpec) -> DenseLP:
    """Explicit LP in variables (phi, lam, alpha, beta)."""
    m, n, p = spec.m, spec.n, spec.p
    iphi = lambda i: i  # noqa: E731
    ilam = lambda i: m + i  # noqa: E731
    ialpha = lambda i: m + n + i  # noqa: E731
    ibeta = lambda j: 2 * m + n + j  # noqa: E731

    c = ([Fraction(x) for x in spec.a] + [Fraction(x) for x in spec.b]
         + [Fraction(1)] * m + [Fraction(1)] * p)
    rows: list[dict[int, Fraction]] = []
    rhs: list[Fraction] = []
    for j in range(p):
        row = {ibeta(j): Fraction(1)}
        for i, val in spec.A.cols[j]:
            row[iphi(i)] = row.get(iphi(i), 0) - Fraction(val)
        for i, val in spec.B.cols[j]:
            row[ilam(i)] = row.get(ilam(i), 0) - Fraction(val)
        rows.append({k: v for k, v in row.items() if v != 0})
        rhs.append(Fraction(spec.v[j]))
    for i in range(m):
        rows.append({ialpha(i): Fraction(1), iphi(i): Fraction(1)})
        rhs.append(Fraction(spec.w[i]))
    lo = ([_frac_bound(x) for x in spec.phi_lo] + [_frac_bound(x) for x in spec.lam_lo]
          + [Fraction(0)] * (m + p))
    hi = [_frac_bound(x) for x in spec.phi_hi] + [_frac_bound(x) for x in spec.lam_hi] + [None] * (m + p)
    names = ([f"phi{i}" for i in range(m)] + [f"lam{i}" for i in range(n)]
             + [f"alpha{i}" for i in range(m)] + [f"beta{j}" for j in range(p)])
    return DenseLP(c, rows, rhs, lo, hi, names)


class _Tableau:
    """Sparse simplex dictionary: ``u_basis[r] + sum_k rows[r][k] u_k = rhs[r]``.

    Only non-basic coefficients are stored.  ``colrows[k]`` indexes the rows
    with a non-zero in column ``k`` so pivots touch only affected rows.
    """

    def __init__(self, rows, rhs, basis, ncols):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.colrows: list[set[int]] = [set() for _ in range(ncols)]
        for r, row in enumerate(rows):
            for k in row:
                self.colrows[k].add(r)
        self.d: dict[int, Fraction] = {}
        self.z0 = Fraction(0)
        self.pivots = 0

    def set_objective(self, cost: dict[int, Fraction]):
        d = {k: v for k, v in cost.items() if v != 0}
        z0 = Fraction(0)
        for r, b in enumerate(self.basis):
            cb = cost.get(b, 0)
            if cb == 0:
                continue
            z0 += cb * self.rhs[r]
            for k, val in self.rows[r].items():
                d[k] = d.get(k, 0) - cb * val
        for b in self.basis:
            d.pop(b, None)
        self.d = {k: v for k, v in d.items() if v != 0}
        self.z0 = z0

    def pivot(self, p: int, e: int):
        row_p = self.rows[p]
        piv = row_p.pop(e)
        leave = self.basis[p]
        self.colrows[e].discard(p)
        new = {k: v / piv for k, v in row_p.items()}
        new[leave] = 1 / piv
        rhs_p = self.rhs[p] / piv
        self.rows[p] = new
        self.rhs[p] = rhs_p
        self.basis[p] = e
        self.colrows[leave].add(p)

        for r in list(self.colrows[e]):
            row_r = self.rows[r]
            a = row_r.pop(e)
            for k, val in new.items():
                nv = row_r.get(k, 0) - a * val
                if nv == 0:
                    if k in row_r:
                        del row_r[k]
                        self.colrows[k].discard(r)
                else:
                    if k not in row_r:
                        self.colrows[k].add(r)
                    row_r[k] = nv
            self.rhs[r] -= a * rhs_p
        self.colrows[e] = set()

        de = self.d.pop(e, 0)
        if de != 0:
            d = self.d
            for k, val in new.items():
                nv = d.get(k, 0) - de * val
                if nv == 0:
                    d.pop(k, None)
                else:
                    d[k] = nv
            self.z0 += de * rhs_p
        self.pivots += 1

    def run(self, allowed=None) -> str:
        """Bland's rule: lowest-index improving column, lowest-index leaving row on ties."""
        while True:
            cands = [k for k, v in self.d.items() if v < 0 and (allowed is None or k in allowed)]
            if not cands:
                return "optimal"
            e = min(cands)
            best = None
            for r in self.colrows[e]:
                a = self.rows[r][e]
                if a > 0:
                    key = (self.rhs[r] / a, self.basis[r])
                    if best is None or key < best[0]:
                        best = (key, r)
            if best is None:
                return "unbounded"
            self.pivot(best[1], e)


class LPSolution(NamedTuple):
    value: Fraction
    z: list[Fraction]
    pivots: int

    @property
    def float_value(self) -> float:
        return float(self.value)


def solve_dense_lp(lp: DenseLP) -> LPSolution:
    """Two-phase exact simplex with Bland's rule.

    Variables are shifted/negated/split to be non-negative; a row gets an
    artificial only when no slack or singleton column can start basic.
    """
    # Standard form columns: maps each original var to [(col, sign)], shift.
    ncols = 0
    var_cols: list[list[tuple[int, int]]] = []
    shift: list[Fraction] = []
    cost: dict[int, Fraction] = {}
    ub_rows: list[tuple[int, Fraction]] = []
    for k in range(lp.nvars):
        lo, hi = lp.lo[k], lp.hi[k]
        if lo is not None:
            var_cols.append([(ncols, 1)])
            shift.append(lo)
            if hi is not None:
                if hi <= lo:
                    raise InfeasibleLPError(f"empty bound interval for {k}")
                ub_rows.append((ncols, hi - lo))
            ncols += 1
        elif hi is not None:
            var_cols.append([(ncols, -1)])
            shift.append(hi)
            ncols += 1
        else:
            var_cols.append([(ncols, 1), (ncols + 1, -1)])
            shift.append(Fraction(0))
            ncols += 2
        for col, sign in var_cols[k]:
            if lp.c[k] != 0:
                cost[col] = sign * lp.c[k]
    const = sum((lp.c[k] * shift[k] for k in range(lp.nvars)), Fraction(0))
    nstruct = ncols

    eq_rows: list[dict[int, Fraction]] = []
    eq_rhs: list[Fraction] = []
    surplus: list[int | None] = []
    for row, rhs in zip(lp.rows, lp.rhs):
        out: dict[int, Fraction] = {}
        r = rhs
        for k, coef in row.items():
            r -= coef * shift[k]
            for col, sign in var_cols[k]:
                out[col] = out.get(col, 0) + sign * coef
        out = {k: v for k, v in out.items() if v != 0}
        out[ncols] = Fraction(-1)
        surplus.append(ncols)
        ncols += 1
        eq_rows.append(out)
        eq_rhs.append(r)
    for col, width in ub_rows:
        eq_rows.append({col: Fraction(1), ncols: Fraction(1)})
        eq_rhs.append(width)
        surplus.append(None)
        ncols += 1

    occurrences = [0] * ncols
    for row in eq_rows:
        for k in row:
            occurrences[k] += 1

    basis: list[int] = []
    artificial = set()
    rows_out: list[dict[int, Fraction]] = []
    rhs_out: list[Fraction] = []
    for r, (row, rhs) in enumerate(zip(eq_rows, eq_rhs)):
        if surplus[r] is None:
            slack = max(row)
            basis.append(slack)
            rows_out.append({k: v for k, v in row.items() if k != slack})
            rhs_out.append(rhs)
            continue
        if rhs <= 0:
            row = {k: -v for k, v in row.items()}
            rhs = -rhs
            start = surplus[r]
        else:
            start = None
            for k in sorted(row):
                if k < nstruct and occurrences[k] == 1 and row[k] > 0:
                    start = k
                    break
        if start is None:
            start = ncols
            ncols += 1
            artificial.add(start)
            row = dict(row)
            row[start] = Fraction(1)
        scale = row[start]
        if scale != 1:
            row = {k: v / scale for k, v in row.items()}
            rhs = rhs / scale
        basis.append(start)
        rows_out.append({k: v for k, v in row.items() if k != start})
        rhs_out.append(rhs)

    tab = _Tableau(rows_out, rhs_out, basis, ncols)
    if artificial:
        tab.set_objective({k: Fraction(1) for k in artificial})
        tab.run()
        if tab.z0 != 0:
            raise InfeasibleLPError("phase one ended with positive infeasibility")
        for r in range(len(tab.basis)):
            if tab.basis[r] in artificial:
                cand = [k for k in tab.rows[r] if k not in artificial]
                if cand:
                    tab.pivot(r, min(cand))
        keep = [r for r in range(len(tab.basis)) if tab.basis[r] not in artificial]
        if len(keep) != len(tab.basis):
            tab = _Tableau([tab.rows[r] for r in keep], [tab.rhs[r] for r in keep],
                           [tab.basis[r] for r in keep], ncols)
        for row in tab.rows:
            for k in artificial & row.keys():
                del row[k]
        for k in artificial:
            tab.colrows[k] = set()
    tab.set_objective(cost)
    status = tab.run(allowed=None if not artificial else set(range(ncols)) - artificial)
    if status == "unbounded":
        raise UnboundedLPError("LP objective is unbounded below")

    u = [Fraction(0)] * ncols
    for r, b in enumerate(tab.basis):
        u[b] = tab.rhs[r]
    z = []
    for k in range(lp.nvars):
        z.append(shift[k] + sum((sign * u[col] for col, sign in var_cols[k]), Fraction(0)))
    value = tab.z0 + const
    return LPSolution(value, z, tab.pivots)


class ExactOptimum(NamedTuple):
    value: float
    exact: Fraction
    phi: list[Fraction]
    lam: list[Fraction]


def lp_solve_exact(spec: ProblemSpec) -> ExactOptimum:
    """Exact optimum of the instance via rational simplex (desk scale only)."""
    if spec.m + spec.n + spec.p > MAX_ORACLE_SIZE:
        raise ValueError(f"instance too large for the exact oracle (m+n+p > {MAX_ORACLE_SIZE})")
    if not validate_spec(spec).valid:
        raise ValueError("invalid spec")
    sol = solve_dense_lp(to_dense_lp(spec))
    phi = sol.z[:spec.m]
    lam = sol.z[spec.m:spec.m + spec.n]
    return ExactOptimum(float(sol.value), sol.value, phi, lam)


def maxflow_reference(num_nodes: int, arcs: Iterable[tuple[int, int, float]], source: int, sink: int) -> Fraction:
    """Edmonds-Karp (shortest augmenting paths) on exact rationals."""
    cap: dict[int, dict[int, Fraction]] = {u: {} for u in range(num_nodes)}
    for u, v, c in arcs:
        if c < 0:
            raise ValueError("negative capacity")
        if u == v:
            continue
        cap[u][v] = cap[u].get(v, Fraction(0)) + Fraction(c)
        cap[v].setdefault(u, Fraction(0))
    flow = Fraction(0)
    while True:
        parent = {source: None}
        queue = deque([source])
        while queue and sink not in parent:
            u = queue.popleft()
            for v, c in cap[u].items():
                if c > 0 and v not in parent:
                    parent[v] = u
                    queue.append(v)
        if sink not in parent:
            return flow
        bottleneck = None
        v = sink
        while parent[v] is not None:
            u = parent[v]
            bottleneck = cap[u][v] if bottleneck is None else min(bottleneck, cap[u][v])
            v = u
        v = sink
        while parent[v] is not None:
            u = parent[v]
            cap[u][v] -= bottleneck
            cap[v][u] += bottleneck
            v = u
        flow += bottleneck


class BruteForceResult(NamedTuple):
    value: Fraction | None
    lo: Fraction | float
    hi: Fraction | float
    unbounded: bool


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def brute_force_univariate(f: PiecewiseAffine, lo: float = -INF, hi: float = INF) -> BruteForceResult:
    """Minimize ``f`` on ``[lo, hi]`` by exact evaluation at candidate points.

    Candidates are the breakpoints inside the box, the finite box ends and the
    midpoints between consecutive candidates; one extra point beyond each
    infinite end measures the tail slope.
    """
    hinges = [(_frac(c), _frac(d)) for c, d in f.hinges]
    slope, offset = _frac(f.slope), _frac(f.offset)

    def F(x: Fraction) -> Fraction:
        total = offset + slope * x
        for c, d in hinges:
            total += max(c * x + d, Fraction(0))
        return total

    flo = None if lo == -INF else _frac(lo)
    fhi = None if hi == INF else _frac(hi)
    pts = {-d / c for c, d in hinges}
    pts = {t for t in pts if (flo is None or t >= flo) and (fhi is None or t <= fhi)}
    if flo is not None:
        pts.add(flo)
    if fhi is not None:
        pts.add(fhi)
    if not pts:
        pts.add(Fraction(0))
    base = sorted(pts)
    cand = list(base)
    cand.extend((x + y) / 2 for x, y in zip(base, base[1:]))
    cand.sort()
    values = [F(x) for x in cand]

    left_flat = right_flat = False
    if flo is None:
        outer = F(cand[0] - 1)
        if outer < values[0]:
            return BruteForceResult(None, -INF, INF, True)
        left_flat = outer == values[0]
    if fhi is None:
        outer = F(cand[-1] + 1)
        if outer < values[-1]:
            return BruteForceResult(None, -INF, INF, True)
        right_flat = outer == values[-1]

    best = min(values)
    arg = [x for x, val in zip(cand, values) if val == best]
    L: Fraction | float = arg[0]
    U: Fraction | float = arg[-1]
    if left_flat and arg[0] == cand[0]:
        L = -INF
    if right_flat and arg[-1] == cand[-1]:
        U = INF
    return BruteForceResult(best, L, U, False)
