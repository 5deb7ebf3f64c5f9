"""Problem representation for hinge-sum linear programs.

An instance minimizes

    sum_i max{w_i - phi_i, 0} + a.phi + b.lam + sum_j max{v_j + A[:, j].phi + B[:, j].lam, 0}

over box-constrained ``phi`` (length m) and ``lam`` (length n).  ``A`` is m x p
and ``B`` is n x p; both are sparse and kept with row and column adjacency so a
single-coordinate update touches only the columns incident to that coordinate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

INF = math.inf

# Values allowed for entries of ``a`` and ``b`` inside the open gaps.
_A_GAP = (-2.0, 3.0)
_A_ALLOWED_INSIDE = {-1.0, 0.0, 1.0, 2.0}
_B_GAP = (-2.0, 2.0)
_B_ALLOWED_INSIDE = {-1.0, 0.0, 1.0}

COMPENSATED_SUM_THRESHOLD = 10_000


@dataclass(frozen=True)
class SparseMatrix:
    """Coordinate-list matrix with precomputed row and column adjacency.

    ``entries`` keeps the raw triples in the order supplied so validation can
    report duplicates and out-of-range indices.  Adjacency lists skip entries
    whose indices are out of range.
    """

    nrows: int
    ncols: int
    entries: tuple[tuple[int, int, float], ...] = ()
    rows: tuple[tuple[tuple[int, float], ...], ...] = field(init=False, repr=False, compare=False)
    cols: tuple[tuple[tuple[int, float], ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        entries = tuple((int(r), int(c), float(val)) for r, c, val in self.entries)
        object.__setattr__(self, "entries", entries)
        rows: list[list[tuple[int, float]]] = [[] for _ in range(max(self.nrows, 0))]
        cols: list[list[tuple[int, float]]] = [[] for _ in range(max(self.ncols, 0))]
        for r, c, val in entries:
            if 0 <= r < self.nrows and 0 <= c < self.ncols:
                rows[r].append((c, val))
                cols[c].append((r, val))
        object.__setattr__(self, "rows", tuple(tuple(x) for x in rows))
        object.__setattr__(self, "cols", tuple(tuple(x) for x in cols))

    @classmethod
    def from_dense(cls, dense: Sequence[Sequence[float]], ncols: int | None = None) -> SparseMatrix:
        nrows = len(dense)
        if ncols is None:
            ncols = len(dense[0]) if nrows else 0
        entries = [(i, j, val) for i, row in enumerate(dense) for j, val in enumerate(row) if val != 0]
        return cls(nrows, ncols, tuple(entries))

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def to_dense(self) -> list[list[float]]:
        out = [[0.0] * self.ncols for _ in range(self.nrows)]
        for r, c, val in self.entries:
            out[r][c] += val
        return out


@dataclass(frozen=True)
class ProblemSpec:
    """A complete instance: sparse ``A`` (m x p), ``B`` (n x p), vectors and boxes.

    Use :meth:`build` for a constructor with defaults (zero vectors, infinite
    bounds).  The instance is immutable; construction never validates, call
    :func:`validate_spec` for that.
    """

    m: int
    n: int
    p: int
    A: SparseMatrix
    B: SparseMatrix
    a: tuple[float, ...]
    b: tuple[float, ...]
    w: tuple[float, ...]
    v: tuple[float, ...]
    phi_lo: tuple[float, ...]
    phi_hi: tuple[float, ...]
    lam_lo: tuple[float, ...]
    lam_hi: tuple[float, ...]

    @classmethod
    def build(
        cls,
        m: int = 0,
        n: int = 0,
        p: int = 0,
        *,
        A: Iterable[tuple[int, int, float]] | SparseMatrix = (),
        B: Iterable[tuple[int, int, float]] | SparseMatrix = (),
        a: Sequence[float] | None = None,
        b: Sequence[float] | None = None,
        w: Sequence[float] | None = None,
        v: Sequence[float] | None = None,
        phi_lo: Sequence[float] | float | None = None,
        phi_hi: Sequence[float] | float | None = None,
        lam_lo: Sequence[float] | float | None = None,
        lam_hi: Sequence[float] | float | None = None,
    ) -> ProblemSpec:
        def vec(x, size, default):
            if x is None:
                return (float(default),) * size
            if isinstance(x, (int, float)):
                return (float(x),) * size
            return tuple(float(t) for t in x)

        if not isinstance(A, SparseMatrix):
            A = SparseMatrix(m, p, tuple(A))
        if not isinstance(B, SparseMatrix):
            B = SparseMatrix(n, p, tuple(B))
        return cls(
            m=m, n=n, p=p, A=A, B=B,
            a=vec(a, m, 0.0), b=vec(b, n, 0.0), w=vec(w, m, 0.0), v=vec(v, p, 0.0),
            phi_lo=vec(phi_lo, m, -INF), phi_hi=vec(phi_hi, m, INF),
            lam_lo=vec(lam_lo, n, -INF), lam_hi=vec(lam_hi, n, INF),
        )

    def activity(self, phi: Sequence[float], lam: Sequence[float]) -> list[float]:
        """Column activities ``v_j + A[:, j].phi + B[:, j].lam``."""
        act = list(self.v)
        for j in range(self.p):
            t = act[j]
            for i, c in self.A.cols[j]:
                t += c * phi[i]
            for i, c in self.B.cols[j]:
                t += c * lam[i]
            act[j] = t
        return act

    def default_start(self) -> tuple[list[float], list[float]]:
        """Componentwise projection of the origin onto the box."""
        phi = [min(max(0.0, lo), hi) for lo, hi in zip(self.phi_lo, self.phi_hi)]
        lam = [min(max(0.0, lo), hi) for lo, hi in zip(self.lam_lo, self.lam_hi)]
        return phi, lam


@dataclass
class Violation:
    condition: str
    location: tuple
    value: object = None

    def __str__(self):
        loc = ",".join(str(x) for x in self.location)
        return f"{self.condition} at ({loc}): {self.value!r}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.valid


@dataclass
class GuaranteeReport:
    """Outcome of the structural optimality-guarantee check.

    Condition ids: ``coefficient`` (matrix entry outside {-1, 0, 1}),
    ``row_nnz`` (more than two non-zeros in a row), ``a_value`` and ``b_value``
    (linear coefficient inside a forbidden gap).
    """

    violations: list[Violation] = field(default_factory=list)

    @property
    def satisfied(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.satisfied


def _check_matrix_storage(name: str, M: SparseMatrix, nrows: int, ncols: int, out: list[Violation]):
    if M.nrows != nrows or M.ncols != ncols:
        out.append(Violation("shape mismatch", (name,), (M.nrows, M.ncols)))
    seen = set()
    for r, c, val in M.entries:
        if not (0 <= r < nrows and 0 <= c < ncols):
            out.append(Violation("sparse index out of range", (name, r, c), val))
            continue
        if (r, c) in seen:
            out.append(Violation("duplicate sparse entry", (name, r, c), val))
        seen.add((r, c))
        if not math.isfinite(val):
            out.append(Violation("non-finite matrix entry", (name, r, c), val))
    by_row = {(r, c, val) for r in range(len(M.rows)) for c, val in M.rows[r]}
    by_col = {(r, c, val) for c in range(len(M.cols)) for r, val in M.cols[c]}
    if by_row != by_col:
        out.append(Violation("row and column views differ", (name,), None))


def validate_spec(spec: ProblemSpec) -> ValidationReport:
    """Report every storage and invariant violation; never raises."""
    out: list[Violation] = []
    if spec.m < 0 or spec.n < 0 or spec.p < 0:
        out.append(Violation("negative dimension", ("dims",), (spec.m, spec.n, spec.p)))
    _check_matrix_storage("A", spec.A, spec.m, spec.p, out)
    _check_matrix_storage("B", spec.B, spec.n, spec.p, out)
    for name, size in (("a", spec.m), ("w", spec.m), ("phi_lo", spec.m), ("phi_hi", spec.m),
                       ("b", spec.n), ("lam_lo", spec.n), ("lam_hi", spec.n), ("v", spec.p)):
        vec = getattr(spec, name)
        if len(vec) != size:
            out.append(Violation("vector length mismatch", (name,), len(vec)))
            continue
        for i, x in enumerate(vec):
            if math.isnan(x):
                out.append(Violation("NaN entry", (name, i), x))
            elif name in ("a", "b", "w", "v") and not math.isfinite(x):
                out.append(Violation("non-finite entry", (name, i), x))
    for lo_name, hi_name in (("phi_lo", "phi_hi"), ("lam_lo", "lam_hi")):
        lo, hi = getattr(spec, lo_name), getattr(spec, hi_name)
        for i, (l, h) in enumerate(zip(lo, hi)):
            if l == INF or h == -INF:
                out.append(Violation("bound has wrong infinite sign", (lo_name, i), (l, h)))
            if not l < h:
                out.append(Violation("bounds not strictly ordered", (lo_name, i), (l, h)))
    return ValidationReport(out)


def _in_allowed(x: float, gap: tuple[float, float], inside: set[float]) -> bool:
    return x <= gap[0] or x >= gap[1] or x in inside


def check_guarantee(spec: ProblemSpec) -> GuaranteeReport:
    """Check the structural conditions under which interior local minima are global."""
    out: list[Violation] = []
    for name, M in (("A", spec.A), ("B", spec.B)):
        for r, c, val in M.entries:
            if val not in (-1.0, 0.0, 1.0):
                out.append(Violation("coefficient", (name, r, c), val))
        for r, row in enumerate(M.rows):
            nnz = sum(1 for _, val in row if val != 0)
            if nnz > 2:
                out.append(Violation("row_nnz", (name, r), nnz))
    for i, x in enumerate(spec.a):
        if not _in_allowed(x, _A_GAP, _A_ALLOWED_INSIDE):
            out.append(Violation("a_value", ("a", i), x))
    for i, x in enumerate(spec.b):
        if not _in_allowed(x, _B_GAP, _B_ALLOWED_INSIDE):
            out.append(Violation("b_value", ("b", i), x))
    return GuaranteeReport(out)


def box_tolerance(bound: float) -> float:
    return 1e-9 * (1.0 + abs(bound))


def _check_point(spec: ProblemSpec, phi: Sequence[float], lam: Sequence[float]):
    if len(phi) != spec.m or len(lam) != spec.n:
        raise ValueError(f"point dimensions ({len(phi)}, {len(lam)}) do not match spec ({spec.m}, {spec.n})")
    for name, x, lo, hi in (("phi", phi, spec.phi_lo, spec.phi_hi), ("lam", lam, spec.lam_lo, spec.lam_hi)):
        for i, (xi, l, h) in enumerate(zip(x, lo, hi)):
            if (l > -INF and xi < l - box_tolerance(l)) or (h < INF and xi > h + box_tolerance(h)):
                raise ValueError(f"{name}[{i}] = {xi!r} outside box [{l!r}, {h!r}]")


def objective_from_activity(spec: ProblemSpec, phi: Sequence[float], lam: Sequence[float],
                            act: Sequence[float]) -> float:
    terms = [max(w - x, 0.0) for w, x in zip(spec.w, phi)]
    terms.extend(c * x for c, x in zip(spec.a, phi))
    terms.extend(c * x for c, x in zip(spec.b, lam))
    terms.extend(max(t, 0.0) for t in act)
    if spec.p > COMPENSATED_SUM_THRESHOLD:
        return math.fsum(terms)
    total = 0.0
    for t in terms:
        total += t
    return total


def objective(spec: ProblemSpec, phi: Sequence[float], lam: Sequence[float]) -> float:
    """Evaluate the hinge-sum objective at a box-feasible point."""
    _check_point(spec, phi, lam)
    return objective_from_activity(spec, phi, lam, spec.activity(phi, lam))
