import math
import random
from fractions import Fraction

import pytest
from scipy.optimize import linprog

from cwmlp import PiecewiseAffine, ProblemSpec
from cwmlp.encoders import VertexCoverGraph, encode_vertex_cover
from cwmlp.oracle import (
    MAX_ORACLE_SIZE, DenseLP, InfeasibleLPError, UnboundedLPError, brute_force_univariate,
    lp_solve_exact, maxflow_reference, solve_dense_lp, to_dense_lp,
)

from generators import random_general_spec, random_network, random_spec

INF = math.inf


def test_small_examples():
    assert lp_solve_exact(ProblemSpec.build(0, 2, 0, b=[1, 1], lam_lo=0.0)).exact == 0
    ex3 = ProblemSpec.build(0, 1, 3, B=[(0, 0, 1), (0, 1, -1), (0, 2, -1)], v=[0, 1, 2])
    opt = lp_solve_exact(ex3)
    assert opt.exact == 2
    assert 1 <= opt.lam[0] <= 2
    tri = encode_vertex_cover(VertexCoverGraph([1, 1, 1], [(0, 1), (1, 2), (0, 2)])).spec
    assert lp_solve_exact(tri).exact == Fraction(-3, 2)


def test_unbounded_and_size_limit():
    with pytest.raises(UnboundedLPError):
        lp_solve_exact(ProblemSpec.build(1, 0, 0, a=[-1.0]))
    big = ProblemSpec.build(0, 0, MAX_ORACLE_SIZE + 1)
    with pytest.raises(ValueError):
        lp_solve_exact(big)


def test_dense_lp_infeasible():
    # x >= 2 with x <= 1
    lp = DenseLP(c=[Fraction(1)], rows=[{0: Fraction(1)}], rhs=[Fraction(2)],
                 lo=[None], hi=[Fraction(1)], names=["x"])
    with pytest.raises(InfeasibleLPError):
        solve_dense_lp(lp)


def test_maxflow_reference_examples():
    assert maxflow_reference(3, [(0, 1, 2), (1, 2, 1)], 0, 2) == 1
    assert maxflow_reference(4, [(0, 1, 1), (1, 3, 1), (0, 2, 1), (2, 3, 1)], 0, 3) == 2
    assert maxflow_reference(4, [(0, 1, 0), (1, 3, 0)], 0, 3) == 0


def test_maxflow_reference_matches_scipy():
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import maximum_flow
    rng = random.Random(21)
    for _ in range(30):
        net = random_network(rng, max_nodes=30, max_arcs=80)
        cap = {}
        for u, v, c in net.arcs:
            cap[(u, v)] = cap.get((u, v), 0) + int(c)
        rows, cols = zip(*cap) if cap else ((), ())
        graph = csr_matrix((list(cap.values()), (rows, cols)), shape=(net.num_nodes, net.num_nodes))
        ref = maximum_flow(graph, net.source, net.sink).flow_value
        assert maxflow_reference(net.num_nodes, net.arcs, net.source, net.sink) == ref


def test_brute_force_golden():
    f3 = PiecewiseAffine(((1, 0), (-1, 1), (-1, 2)))
    r = brute_force_univariate(f3)
    assert (r.value, r.lo, r.hi) == (2, 1, 2)
    const = brute_force_univariate(PiecewiseAffine((), 0.0, 4.0), -1.0, 3.0)
    assert (const.value, const.lo, const.hi) == (4, -1, 3)
    down = brute_force_univariate(PiecewiseAffine((), -1.0), 0.0, 1.0)
    assert (down.value, down.lo, down.hi) == (-1, 1, 1)
    assert brute_force_univariate(PiecewiseAffine((), -1.0), 0.0, INF).unbounded


def _scipy_optimum(spec: ProblemSpec):
    """The same linearization solved in floating point by HiGHS."""
    lp = to_dense_lp(spec)
    N = lp.nvars
    A_ub, b_ub = [], []
    for row, rhs in zip(lp.rows, lp.rhs):
        dense = [0.0] * N
        for k, val in row.items():
            dense[k] = -float(val)
        A_ub.append(dense)
        b_ub.append(-float(rhs))
    bounds = [(None if lo is None else float(lo), None if hi is None else float(hi))
              for lo, hi in zip(lp.lo, lp.hi)]
    return linprog([float(c) for c in lp.c], A_ub=A_ub or None, b_ub=b_ub or None,
                   bounds=bounds, method="highs")


def test_exact_oracle_matches_highs():
    rng = random.Random(7)
    for k in range(80):
        spec = random_spec(rng) if k % 2 else random_general_spec(rng)
        exact = lp_solve_exact(spec)
        res = _scipy_optimum(spec)
        assert res.status == 0
        assert float(exact.exact) == pytest.approx(res.fun, abs=1e-7)

