"""Dual certificates proving global optimality of a coordinate-wise minimum.

The explicit LP pairs the primal (phi, lam, alpha, beta) with dual variables
x (columns), s (w-hinges), y/z (phi lower/upper bounds) and q/r (lam
lower/upper bounds).  :func:`build_certificate` assigns the duals from the
sign pattern at the primal point; :func:`verify` checks feasibility and
complementary slackness.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

from .model import ProblemSpec, objective_from_activity
from .solver import is_interior_local_min

log = logging.getLogger(__name__)

INF = math.inf


def clip(x: float, lo: float, hi: float) -> float:
    return min(hi, max(x, lo))


@dataclass(frozen=True)
class DualCertificate:
    x: tuple[float, ...]
    s: tuple[float, ...]
    y: tuple[float, ...]
    z: tuple[float, ...]
    q: tuple[float, ...]
    r: tuple[float, ...]
    alpha: tuple[float, ...]
    beta: tuple[float, ...]
    # False when the point was not an interior local minimum at build time.
    precondition_ok: bool = True


@dataclass
class CertificateReport:
    max_eq_residual_phi: float
    max_eq_residual_lam: float
    range_violations: list = field(default_factory=list)
    cs_violations: list = field(default_factory=list)
    primal: float = 0.0
    dual: float = 0.0
    gap: float = 0.0
    verdict: bool = False

    @property
    def max_eq_residual(self) -> float:
        return max(self.max_eq_residual_phi, self.max_eq_residual_lam)


def _row_dot(row, x) -> float:
    total = 0.0
    for j, c in row:
        total += c * x[j]
    return total


def build_certificate(spec: ProblemSpec, phi: Sequence[float], lam: Sequence[float],
                      tol_eq: float = 1e-6) -> DualCertificate:
    """Dual assignment from the sign pattern at ``(phi, lam)``.

    Quantities within ``tol_eq`` of zero (activities, ``w_i - phi_i``, distance
    to a bound) are classified as ties.  Infinite bounds pin their dual to 0.
    """
    ok, _ = is_interior_local_min(spec, phi, lam, tol_eq)
    if not ok:
        log.warning("point is not an interior local minimum; certificate may be infeasible")
    act = spec.activity(phi, lam)

    x = [1.0 if t > tol_eq else 0.0 if t < -tol_eq else 0.5 for t in act]

    s, y, z = [], [], []
    for i in range(spec.m):
        g = spec.a[i] + _row_dot(spec.A.rows[i], x)
        gap_w = spec.w[i] - phi[i]
        if gap_w > tol_eq:
            si = 1.0
        elif gap_w < -tol_eq:
            si = 0.0
        else:
            si = clip(g, 0.0, 1.0)
        lo, hi = spec.phi_lo[i], spec.phi_hi[i]
        zi = min(g - si, 0.0) if hi < INF and abs(phi[i] - hi) <= tol_eq else 0.0
        yi = max(g - si, 0.0) if lo > -INF and abs(phi[i] - lo) <= tol_eq else 0.0
        s.append(si)
        y.append(yi)
        z.append(zi)

    q, r = [], []
    for i in range(spec.n):
        g = spec.b[i] + _row_dot(spec.B.rows[i], x)
        lo, hi = spec.lam_lo[i], spec.lam_hi[i]
        r.append(min(g, 0.0) if hi < INF and abs(lam[i] - hi) <= tol_eq else 0.0)
        q.append(max(g, 0.0) if lo > -INF and abs(lam[i] - lo) <= tol_eq else 0.0)

    alpha = [max(w - p, 0.0) for w, p in zip(spec.w, phi)]
    beta = [max(t, 0.0) for t in act]
    return DualCertificate(tuple(x), tuple(s), tuple(y), tuple(z), tuple(q), tuple(r),
                           tuple(alpha), tuple(beta), ok)


def _bound_term(bound: float, var: float, name: str, i: int) -> float:
    if math.isinf(bound):
        if var != 0:
            raise ValueError(f"{name}[{i}] = {var!r} is paired with an infinite bound")
        return 0.0
    return bound * var


def dual_objective(spec: ProblemSpec, cert: DualCertificate) -> float:
    """``phi_hi.z + phi_lo.y + w.s + lam_hi.r + lam_lo.q + v.x``."""
    terms = []
    for i in range(spec.m):
        terms.append(_bound_term(spec.phi_hi[i], cert.z[i], "z", i))
        terms.append(_bound_term(spec.phi_lo[i], cert.y[i], "y", i))
        terms.append(spec.w[i] * cert.s[i])
    for i in range(spec.n):
        terms.append(_bound_term(spec.lam_hi[i], cert.r[i], "r", i))
        terms.append(_bound_term(spec.lam_lo[i], cert.q[i], "q", i))
    terms.extend(vj * xj for vj, xj in zip(spec.v, cert.x))
    return math.fsum(terms)


def _cs_product(var: float, slack: float) -> float:
    # An infinite bound is only paired with a zero dual; the product is 0 then.
    if var == 0:
        return 0.0
    return var * slack


def verify(spec: ProblemSpec, phi: Sequence[float], lam: Sequence[float],
           cert: DualCertificate, tol: float = 1e-6) -> CertificateReport:
    """Check dual feasibility, complementary slackness and the duality gap.

    The verdict requires every residual, range excess and slackness product to
    be at most ``tol`` and ``|gap| <= tol * (1 + |primal|)``.
    """
    m, n, p = spec.m, spec.n, spec.p
    sizes = {"x": p, "s": m, "y": m, "z": m, "q": n, "r": n, "alpha": m, "beta": p}
    for name, size in sizes.items():
        if len(getattr(cert, name)) != size:
            raise ValueError(f"certificate field {name} has length {len(getattr(cert, name))}, expected {size}")
    if len(phi) != m or len(lam) != n:
        raise ValueError("point dimensions do not match spec")

    x = cert.x
    res_g = 0.0
    for i in range(m):
        lhs = cert.s[i] + cert.z[i] + cert.y[i] - _row_dot(spec.A.rows[i], x)
        res_g = max(res_g, abs(lhs - spec.a[i]))
    res_h = 0.0
    for i in range(n):
        lhs = cert.r[i] + cert.q[i] - _row_dot(spec.B.rows[i], x)
        res_h = max(res_h, abs(lhs - spec.b[i]))

    ranges = []

    def need(name, i, excess):
        if excess > tol:
            ranges.append((name, i, excess))

    for j in range(p):
        need("x>=0", j, -x[j])
        need("x<=1", j, x[j] - 1.0)
        need("beta>=0", j, -cert.beta[j])
    for i in range(m):
        need("s>=0", i, -cert.s[i])
        need("s<=1", i, cert.s[i] - 1.0)
        need("y>=0", i, -cert.y[i])
        need("z<=0", i, cert.z[i])
        need("alpha>=0", i, -cert.alpha[i])
        need("alpha+phi>=w", i, spec.w[i] - cert.alpha[i] - phi[i])
        need("phi>=lo", i, spec.phi_lo[i] - phi[i])
        need("phi<=hi", i, phi[i] - spec.phi_hi[i])
        if math.isinf(spec.phi_lo[i]):
            need("y=0 (infinite bound)", i, abs(cert.y[i]))
        if math.isinf(spec.phi_hi[i]):
            need("z=0 (infinite bound)", i, abs(cert.z[i]))
    for i in range(n):
        need("q>=0", i, -cert.q[i])
        need("r<=0", i, cert.r[i])
        need("lam>=lo", i, spec.lam_lo[i] - lam[i])
        need("lam<=hi", i, lam[i] - spec.lam_hi[i])
        if math.isinf(spec.lam_lo[i]):
            need("q=0 (infinite bound)", i, abs(cert.q[i]))
        if math.isinf(spec.lam_hi[i]):
            need("r=0 (infinite bound)", i, abs(cert.r[i]))

    act = spec.activity(phi, lam)
    for j in range(p):
        need("beta>=activity", j, act[j] - cert.beta[j])

    cs = []

    def slack(name, i, value):
        if abs(value) > tol:
            cs.append((f"{name}[{i}]", value))

    for j in range(p):
        slack("x*(beta-activity)", j, _cs_product(x[j], cert.beta[j] - act[j]))
        slack("(1-x)*beta", j, _cs_product(1.0 - x[j], cert.beta[j]))
    for i in range(m):
        slack("s*(alpha+phi-w)", i, _cs_product(cert.s[i], cert.alpha[i] + phi[i] - spec.w[i]))
        slack("(1-s)*alpha", i, _cs_product(1.0 - cert.s[i], cert.alpha[i]))
        slack("y*(phi-lo)", i, _cs_product(cert.y[i], phi[i] - spec.phi_lo[i]))
        slack("z*(phi-hi)", i, _cs_product(cert.z[i], phi[i] - spec.phi_hi[i]))
    for i in range(n):
        slack("q*(lam-lo)", i, _cs_product(cert.q[i], lam[i] - spec.lam_lo[i]))
        slack("r*(lam-hi)", i, _cs_product(cert.r[i], lam[i] - spec.lam_hi[i]))

    primal = objective_from_activity(spec, phi, lam, act)
    try:
        dual = dual_objective(spec, cert)
    except ValueError as exc:
        ranges.append(("infinite bound pairing", -1, str(exc)))
        dual = math.nan
    gap = primal - dual
    verdict = (res_g <= tol and res_h <= tol and not ranges and not cs
               and abs(gap) <= tol * (1.0 + abs(primal)))
    return CertificateReport(res_g, res_h, ranges, cs, primal, dual, gap, verdict)
