"""Encoders from combinatorial problems to hinge-sum instances, and decoders back.

Each encoder returns an :class:`EncodedInstance` whose ``sign`` and ``offset``
relate the optimum of the encoded instance to the application's LP value:
``application = sign * lp + offset``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .duality import DualCertificate, dual_objective
from .model import ProblemSpec, SparseMatrix
from .solver import SolveResult

INF = math.inf


@dataclass(frozen=True)
class Clause:
    literals: tuple[int, ...]  # DIMACS style: +v / -v, variables numbered from 1
    weight: float = 1.0
    hard: bool = False


@dataclass
class MaxSatFormula:
    num_vars: int
    clauses: list[Clause] = field(default_factory=list)


@dataclass
class VertexCoverGraph:
    weights: list[float]
    edges: list[tuple[int, int]] = field(default_factory=list)


@dataclass
class FlowNetwork:
    num_nodes: int
    arcs: list[tuple[int, int, float]]
    source: int
    sink: int

    @property
    def total_capacity(self) -> float:
        return math.fsum(c for _, _, c in self.arcs)


@dataclass
class PottsModel:
    """Pairwise model with interaction ``-[k != l]`` on every edge.

    ``unary[i][k]`` is the unary potential of node ``i`` with label ``k``.
    """

    num_nodes: int
    num_labels: int
    unary: list[list[float]]
    edges: list[tuple[int, int]] = field(default_factory=list)


@dataclass
class EncodedInstance:
    kind: str
    spec: ProblemSpec
    # Keys "phi", "lam", "col" map spec indices to application objects.
    decoder: dict[str, list]
    sign: float = 1.0
    offset: float = 0.0
    source: object = None
    notes: list[str] = field(default_factory=list)

    def application_value(self, lp_value: float) -> float:
        return self.sign * lp_value + self.offset


def encode_maxsat(formula: MaxSatFormula, min_ones: bool = False) -> EncodedInstance:
    """Weighted partial Max-SAT LP relaxation.

    Soft clause c becomes ``phi_c >= 0`` with w-hinge weight ``w_c``, row
    ``A[c, :] = S[c, :]`` and ``a_c`` = number of negated literals.  Hard clause
    h becomes ``lam_h <= 0`` with ``B[h, :] = -H[h, :]`` and ``b_h = 1 - n_h``.
    With ``min_ones`` the soft clauses must be absent and every column gets
    ``v_j = -1``.
    """
    p = formula.num_vars
    soft_rows: list[dict[int, float]] = []
    soft_w: list[float] = []
    soft_ids: list[int] = []
    hard_rows: list[dict[int, float]] = []
    hard_ids: list[int] = []
    offset = 0.0
    notes = []
    for idx, cl in enumerate(formula.clauses):
        row: dict[int, float] = {}
        tautology = False
        for lit in cl.literals:
            var = abs(lit)
            if lit == 0 or var > p:
                raise ValueError(f"clause {idx} references variable {lit} outside 1..{p}")
            sign = 1.0 if lit > 0 else -1.0
            prev = row.get(var - 1)
            if prev is not None and prev != sign:
                tautology = True
            row[var - 1] = sign
        if not cl.hard and cl.weight < 0:
            raise ValueError(f"clause {idx} has negative weight {cl.weight}")
        if tautology:
            if not cl.hard:
                offset += cl.weight
            notes.append(f"clause {idx} is a tautology")
            continue
        if not row:
            if cl.hard:
                raise ValueError(f"hard clause {idx} is empty (unsatisfiable)")
            notes.append(f"empty soft clause {idx} dropped")
            continue
        if cl.hard:
            hard_rows.append(row)
            hard_ids.append(idx)
        else:
            soft_rows.append(row)
            soft_w.append(float(cl.weight))
            soft_ids.append(idx)
    if min_ones and soft_rows:
        raise ValueError("min-ones encoding takes hard clauses only")

    m, n = len(soft_rows), len(hard_rows)
    A = [(i, j, s) for i, row in enumerate(soft_rows) for j, s in sorted(row.items())]
    B = [(i, j, -s) for i, row in enumerate(hard_rows) for j, s in sorted(row.items())]
    a = [float(sum(1 for s in row.values() if s < 0)) for row in soft_rows]
    b = [1.0 - sum(1 for s in row.values() if s < 0) for row in hard_rows]
    v = [-1.0] * p if min_ones else [0.0] * p
    spec = ProblemSpec.build(m, n, p, A=A, B=B, a=a, b=b, w=soft_w, v=v,
                             phi_lo=0.0, phi_hi=INF, lam_lo=-INF, lam_hi=0.0)
    has_unit = any(len(row) == 1 for row in soft_rows + hard_rows)
    if not has_unit and not min_ones:
        notes.append("no unit clauses: x = 1/2 is a trivial LP optimum")
    decoder = {"phi": soft_ids, "lam": hard_ids, "col": list(range(1, p + 1))}
    inst = EncodedInstance("maxsat", spec, decoder, -1.0 if min_ones else 1.0, offset, formula, notes)
    return inst


def encode_vertex_cover(graph: VertexCoverGraph) -> EncodedInstance:
    """Weighted vertex cover LP; cover value = -(optimum)."""
    p = len(graph.weights)
    for j, wt in enumerate(graph.weights):
        if wt < 0:
            raise ValueError(f"node {j} has negative weight")
    seen = set()
    B = []
    for e, (u, v) in enumerate(graph.edges):
        if u == v:
            raise ValueError(f"self-loop at node {u}")
        if not (0 <= u < p and 0 <= v < p):
            raise ValueError(f"edge {e} references a missing node")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ValueError(f"duplicate edge {key}")
        seen.add(key)
        B.append((e, u, 1.0))
        B.append((e, v, 1.0))
    n = len(graph.edges)
    spec = ProblemSpec.build(0, n, p, B=B, b=[-1.0] * n, v=[-float(x) for x in graph.weights],
                             lam_lo=0.0, lam_hi=INF)
    decoder = {"phi": [], "lam": list(graph.edges), "col": list(range(p))}
    return EncodedInstance("vertex_cover", spec, decoder, -1.0, 0.0, graph)


def encode_maxflow(net: FlowNetwork) -> EncodedInstance:
    """Max-flow as a hinge sum over arc variables (one column per inner node).

    Min-cut value = sum of capacities - optimum.
    """
    s, t = net.source, net.sink
    if s == t:
        raise ValueError("source equals sink")
    inner = [u for u in range(net.num_nodes) if u not in (s, t)]
    col = {u: j for j, u in enumerate(inner)}
    A = []
    a = []
    w = []
    for e, (u, v, cap) in enumerate(net.arcs):
        if not (0 <= u < net.num_nodes and 0 <= v < net.num_nodes):
            raise ValueError(f"arc {e} references a missing node")
        if u == v:
            raise ValueError(f"arc {e} is a self-loop")
        if u == s and v == t:
            raise ValueError("arc from source to sink is not allowed")
        if v == s:
            raise ValueError(f"arc {e} enters the source")
        if u == t:
            raise ValueError(f"arc {e} leaves the sink")
        if cap < 0:
            raise ValueError(f"arc {e} has negative capacity")
        if v in col:
            A.append((e, col[v], 1.0))
        if u in col:
            A.append((e, col[u], -1.0))
        a.append(0.0 if u == s else 1.0)
        w.append(float(cap))
    m = len(net.arcs)
    spec = ProblemSpec.build(m, 0, len(inner), A=A, a=a, w=w, phi_lo=0.0, phi_hi=INF)
    decoder = {"phi": [(u, v) for u, v, _ in net.arcs], "lam": [], "col": inner}
    return EncodedInstance("maxflow", spec, decoder, -1.0, net.total_capacity, net)


def _orient(edges: Sequence[tuple[int, int]], lexicographic: bool) -> list[tuple[int, int]]:
    if lexicographic:
        return [(min(i, j), max(i, j)) for i, j in edges]
    return [tuple(e) for e in edges]


def encode_potts(model: PottsModel, lexicographic: bool = True) -> EncodedInstance:
    """Dual LP relaxation of Potts MAP inference.

    Two labels: one column per node with ``v_i = theta_i(0) - theta_i(1)``,
    edge variables in [-1/2, 1/2] and constant ``sum_i theta_i(1)``.  This is
    an exact encoding that meets the structural guarantee.

    K >= 3: columns (node, label) for every label but the last, whose unary
    serves as reference, plus a per-node ``mu_i >= 0`` that turns the sum of
    hinges into the exact maximum.  Rows then carry more than two non-zeros.
    """
    K = model.num_labels
    if K < 2:
        raise ValueError("Potts model needs at least two labels")
    N = model.num_nodes
    if len(model.unary) != N or any(len(u) != K for u in model.unary):
        raise ValueError("unary table has the wrong shape")
    edges = _orient(model.edges, lexicographic)
    for i, j in edges:
        if i == j or not (0 <= i < N and 0 <= j < N):
            raise ValueError(f"bad edge ({i}, {j})")
    ref = K - 1
    offset = math.fsum(u[ref] for u in model.unary)
    E = len(edges)
    B = []
    lam_map = [(e, k) for e in range(E) for k in range(K)]
    if K == 2:
        p = N
        v = [u[0] - u[1] for u in model.unary]
        for e, (i, j) in enumerate(edges):
            B.append((2 * e, i, 1.0))
            B.append((2 * e, j, -1.0))
            B.append((2 * e + 1, i, -1.0))
            B.append((2 * e + 1, j, 1.0))
        n = 2 * E
        spec = ProblemSpec.build(0, n, p, B=B, v=v, lam_lo=-0.5, lam_hi=0.5)
        cols = list(range(N))
    else:
        L = K - 1
        p = N * L
        cols = [(i, k) for i in range(N) for k in range(L)]
        v = [model.unary[i][k] - model.unary[i][ref] for i, k in cols]
        for e, (i, j) in enumerate(edges):
            for k in range(L):
                B.append((K * e + k, i * L + k, 1.0))
                B.append((K * e + k, j * L + k, -1.0))
                B.append((K * e + ref, i * L + k, -1.0))
                B.append((K * e + ref, j * L + k, 1.0))
        for i in range(N):
            for k in range(L):
                B.append((K * E + i, i * L + k, -1.0))
        n = K * E + N
        lam_lo = [-0.5] * (K * E) + [0.0] * N
        lam_hi = [0.5] * (K * E) + [INF] * N
        b = [0.0] * (K * E) + [1.0] * N
        spec = ProblemSpec.build(0, n, p, B=B, b=b, v=v, lam_lo=lam_lo, lam_hi=lam_hi)
        lam_map = lam_map + [("mu", i) for i in range(N)]
    decoder = {"phi": [], "lam": lam_map, "col": cols, "edges": edges}
    return EncodedInstance("potts", spec, decoder, 1.0, offset, model)


@dataclass
class MaxSatSolution:
    assignment: list[float]
    lp_value: float
    hard_ok: bool
    degenerate: bool


@dataclass
class VertexCoverSolution:
    x: list[float]
    value: float


@dataclass
class CutSolution:
    cut_value: float
    # Dual x per node: 1 = source side, 0 = sink side, 1/2 undecided.
    side: dict[int, float]

    @property
    def source_side(self) -> list[int]:
        return sorted(u for u, x in self.side.items() if x == 1.0)


@dataclass
class PottsSolution:
    reparametrized: list[list[float]]
    labeling: list[int]
    lp_bound: float


def decode(inst: EncodedInstance, result: SolveResult, cert: DualCertificate):
    """Translate a solve result and its certificate back to the application."""
    spec = inst.spec
    if len(result.phi) != spec.m or len(result.lam) != spec.n or len(cert.x) != spec.p:
        raise ValueError("result does not belong to this instance")
    if inst.kind == "maxsat":
        return _decode_maxsat(inst, cert)
    if inst.kind == "vertex_cover":
        x = list(cert.x)
        weights = inst.source.weights
        return VertexCoverSolution(x, math.fsum(wt * xi for wt, xi in zip(weights, x)))
    if inst.kind == "maxflow":
        net: FlowNetwork = inst.source
        side = {u: cert.x[j] for j, u in enumerate(inst.decoder["col"])}
        side[net.source] = 1.0
        side[net.sink] = 0.0
        cut = net.total_capacity - dual_objective(spec, cert)
        return CutSolution(cut, side)
    if inst.kind == "potts":
        return _decode_potts(inst, result)
    raise ValueError(f"unknown instance kind {inst.kind!r}")


def _decode_maxsat(inst: EncodedInstance, cert: DualCertificate) -> MaxSatSolution:
    formula: MaxSatFormula = inst.source
    x = list(cert.x)
    if inst.sign < 0:
        # min-ones: the LP bound on the number of true variables
        value = math.fsum(x)
    else:
        value = inst.offset + math.fsum(
            formula.clauses[c].weight * s for c, s in zip(inst.decoder["phi"], cert.s))
    hard_ok = True
    for c in inst.decoder["lam"]:
        lits = formula.clauses[c].literals
        sat = sum(x[l - 1] if l > 0 else 1.0 - x[-l - 1] for l in set(lits))
        if sat < 1.0 - 1e-9:
            hard_ok = False
    degenerate = any("no unit clauses" in note for note in inst.notes)
    return MaxSatSolution(x, value, hard_ok, degenerate)


def reparametrized_unaries(model: PottsModel, edges: Sequence[tuple[int, int]],
                           edge_lam: Sequence[Sequence[float]]) -> list[list[float]]:
    """``theta_i(k) + sum_{(i,j)} lam_ij(k) - sum_{(j,i)} lam_ji(k)``."""
    out = [list(map(float, u)) for u in model.unary]
    for (i, j), lam_e in zip(edges, edge_lam):
        for k, val in enumerate(lam_e):
            out[i][k] += val
            out[j][k] -= val
    return out


def _decode_potts(inst: EncodedInstance, result: SolveResult) -> PottsSolution:
    model: PottsModel = inst.source
    K = model.num_labels
    edges = inst.decoder["edges"]
    lam = result.lam
    if K == 2:
        edge_lam = [(lam[2 * e], lam[2 * e + 1]) for e in range(len(edges))]
    else:
        edge_lam = [tuple(lam[K * e + k] for k in range(K)) for e in range(len(edges))]
    theta = reparametrized_unaries(model, edges, edge_lam)
    labeling = [max(range(K), key=lambda k: (row[k], -k)) for row in theta]
    bound = math.fsum(max(row) for row in theta)
    return PottsSolution(theta, labeling, bound)
