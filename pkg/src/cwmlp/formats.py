"""Text formats: the native instance format and the application inputs.

Native instance format (indices are 0-based)::

    cwm 1
    dims <m> <n> <p>
    a <i> <val>        b <i> <val>        w <i> <val>        v <j> <val>
    A <i> <j> <val>    B <i> <j> <val>
    philo <i> <val|-inf>   phihi <i> <val|inf>
    lamlo <i> <val|-inf>   lamhi <i> <val|inf>

Absent vector entries are 0 and absent bounds infinite.  ``#`` starts a
comment.  Values are written with ``repr`` so a write/read round trip is
bit-exact.
"""

from __future__ import annotations

import math
from typing import Iterable, TextIO

from .duality import DualCertificate
from .encoders import Clause, FlowNetwork, MaxSatFormula, PottsModel, VertexCoverGraph
from .model import ProblemSpec

FORMAT_VERSION = 1

_VECTORS = {"a": "m", "b": "n", "w": "m", "v": "p"}
_BOUNDS = {"philo": ("m", -math.inf), "phihi": ("m", math.inf),
           "lamlo": ("n", -math.inf), "lamhi": ("n", math.inf)}


class ParseError(ValueError):
    def __init__(self, lineno: int, message: str, source: str = "<input>"):
        super().__init__(f"{source}:{lineno}: {message}")
        self.lineno = lineno


def _lines(text: str) -> Iterable[tuple[int, list[str]]]:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _num(tok: str, lineno: int, source: str) -> float:
    try:
        x = float(tok)
    except ValueError:
        raise ParseError(lineno, f"not a number: {tok!r}", source) from None
    if math.isnan(x):
        raise ParseError(lineno, "NaN is not allowed", source)
    return x


def _int(tok: str, lineno: int, source: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(lineno, f"not an integer: {tok!r}", source) from None


def _index(tok: str, size: int, lineno: int, source: str) -> int:
    i = _int(tok, lineno, source)
    if not 0 <= i < size:
        raise ParseError(lineno, f"index {i} out of range 0..{size - 1}", source)
    return i


def parse_spec(text: str, source: str = "<input>") -> ProblemSpec:
    it = iter(_lines(text))
    try:
        lineno, toks = next(it)
    except StopIteration:
        raise ParseError(0, "empty input", source) from None
    if toks != ["cwm", str(FORMAT_VERSION)]:
        raise ParseError(lineno, f"expected header 'cwm {FORMAT_VERSION}'", source)
    try:
        lineno, toks = next(it)
    except StopIteration:
        raise ParseError(lineno, "missing 'dims' line", source) from None
    if len(toks) != 4 or toks[0] != "dims":
        raise ParseError(lineno, "expected 'dims m n p'", source)
    dims = {"m": _int(toks[1], lineno, source), "n": _int(toks[2], lineno, source),
            "p": _int(toks[3], lineno, source)}
    if min(dims.values()) < 0:
        raise ParseError(lineno, "negative dimension", source)

    vectors = {k: [0.0] * dims[d] for k, d in _VECTORS.items()}
    bounds = {k: [default] * dims[d] for k, (d, default) in _BOUNDS.items()}
    seen: set[tuple] = set()
    mats = {"A": [], "B": []}
    mat_rows = {"A": "m", "B": "n"}
    for lineno, toks in it:
        key = toks[0]
        if key in _VECTORS or key in _BOUNDS:
            if len(toks) != 3:
                raise ParseError(lineno, f"expected '{key} index value'", source)
            size = dims[_VECTORS[key] if key in _VECTORS else _BOUNDS[key][0]]
            i = _index(toks[1], size, lineno, source)
            if (key, i) in seen:
                raise ParseError(lineno, f"duplicate record {key} {i}", source)
            seen.add((key, i))
            x = _num(toks[2], lineno, source)
            if key in _VECTORS:
                if math.isinf(x):
                    raise ParseError(lineno, f"{key} must be finite", source)
                vectors[key][i] = x
            else:
                bounds[key][i] = x
        elif key in mats:
            if len(toks) != 4:
                raise ParseError(lineno, f"expected '{key} row col value'", source)
            i = _index(toks[1], dims[mat_rows[key]], lineno, source)
            j = _index(toks[2], dims["p"], lineno, source)
            if (key, i, j) in seen:
                raise ParseError(lineno, f"duplicate entry {key} {i} {j}", source)
            seen.add((key, i, j))
            x = _num(toks[3], lineno, source)
            if not math.isfinite(x):
                raise ParseError(lineno, f"{key} entries must be finite", source)
            if x != 0:
                mats[key].append((i, j, x))
        else:
            raise ParseError(lineno, f"unknown record {key!r}", source)

    return ProblemSpec.build(dims["m"], dims["n"], dims["p"], A=mats["A"], B=mats["B"],
                             phi_lo=bounds["philo"], phi_hi=bounds["phihi"],
                             lam_lo=bounds["lamlo"], lam_hi=bounds["lamhi"], **vectors)


def format_spec(spec: ProblemSpec, comments: Iterable[str] = ()) -> str:
    out = [f"# {c}" for c in comments]
    out.append(f"cwm {FORMAT_VERSION}")
    out.append(f"dims {spec.m} {spec.n} {spec.p}")
    for key in ("a", "b", "w", "v"):
        for i, x in enumerate(getattr(spec, key)):
            if x != 0:
                out.append(f"{key} {i} {x!r}")
    for key, M in (("A", spec.A), ("B", spec.B)):
        for i, row in enumerate(M.rows):
            for j, x in row:
                out.append(f"{key} {i} {j} {x!r}")
    for key, attr in (("philo", "phi_lo"), ("phihi", "phi_hi"), ("lamlo", "lam_lo"), ("lamhi", "lam_hi")):
        default = _BOUNDS[key][1]
        for i, x in enumerate(getattr(spec, attr)):
            if x != default:
                out.append(f"{key} {i} {x!r}")
    return "\n".join(out) + "\n"


def read_spec(path: str) -> ProblemSpec:
    with open(path) as fh:
        return parse_spec(fh.read(), source=path)


def write_spec(spec: ProblemSpec, path: str, comments: Iterable[str] = ()):
    with open(path, "w") as fh:
        fh.write(format_spec(spec, comments))


def write_certificate(cert: DualCertificate, fh: TextIO):
    """One line per dual vector: ``<name> <v_0> <v_1> ...``."""
    fh.write("cwmcert 1\n")
    for name in ("x", "s", "y", "z", "q", "r", "alpha", "beta"):
        vals = " ".join(repr(v) for v in getattr(cert, name))
        fh.write(f"{name} {vals}".rstrip() + "\n")


def parse_certificate(text: str, source: str = "<input>") -> DualCertificate:
    it = iter(_lines(text))
    try:
        lineno, toks = next(it)
    except StopIteration:
        raise ParseError(0, "empty input", source) from None
    if toks != ["cwmcert", "1"]:
        raise ParseError(lineno, "expected header 'cwmcert 1'", source)
    fields = {}
    for lineno, toks in it:
        name = toks[0]
        if name not in ("x", "s", "y", "z", "q", "r", "alpha", "beta"):
            raise ParseError(lineno, f"unknown certificate field {name!r}", source)
        fields[name] = tuple(_num(t, lineno, source) for t in toks[1:])
    for name in ("x", "s", "y", "z", "q", "r", "alpha", "beta"):
        fields.setdefault(name, ())
    return DualCertificate(**fields)


def parse_wcnf(text: str, source: str = "<input>") -> MaxSatFormula:
    """DIMACS WCNF (``p wcnf nvars nclauses [top]``) or plain CNF.

    A clause whose weight equals ``top`` is hard.  Plain CNF clauses are soft
    with weight 1.  Without a ``p`` line the headerless format is assumed:
    ``h`` marks a hard clause, otherwise the first token is the weight.  Each
    clause must end with ``0`` on its own line.
    """
    header = None
    clauses: list[Clause] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = raw.split()
        if not toks or toks[0] == "c" or toks[0].startswith("%"):
            continue
        if toks[0] == "p":
            if header is not None:
                raise ParseError(lineno, "second 'p' line", source)
            if len(toks) < 4 or toks[1] not in ("wcnf", "cnf"):
                raise ParseError(lineno, "expected 'p wcnf nvars nclauses [top]'", source)
            nvars, ncl = _int(toks[2], lineno, source), _int(toks[3], lineno, source)
            top = _num(toks[4], lineno, source) if toks[1] == "wcnf" and len(toks) > 4 else None
            header = (toks[1], nvars, ncl, top)
            continue
        if header is None:
            header = ("headerless", None, None, None)
        kind, nvars, _, top = header
        if toks[-1] != "0":
            raise ParseError(lineno, "clause must end with 0", source)
        body = toks[:-1]
        hard = False
        if kind == "headerless" and body and body[0] == "h":
            hard = True
            weight = 1.0
            body = body[1:]
        elif kind != "cnf":
            if not body:
                raise ParseError(lineno, "missing clause weight", source)
            weight = _num(body[0], lineno, source)
            body = body[1:]
            if weight < 0:
                raise ParseError(lineno, "negative weight", source)
        else:
            weight = 1.0
        lits = []
        for tok in body:
            lit = _int(tok, lineno, source)
            if lit == 0 or (nvars is not None and abs(lit) > nvars):
                raise ParseError(lineno, f"literal {lit} out of range 1..{nvars}", source)
            lits.append(lit)
        hard = hard or (top is not None and weight >= top)
        clauses.append(Clause(tuple(lits), weight, hard))
    if header is None:
        raise ParseError(0, "no clauses and no 'p' line", source)
    if header[0] == "headerless":
        nvars = max((abs(l) for c in clauses for l in c.literals), default=0)
        return MaxSatFormula(nvars, clauses)
    if len(clauses) != header[2]:
        raise ParseError(0, f"header declares {header[2]} clauses, found {len(clauses)}", source)
    return MaxSatFormula(header[1], clauses)


def parse_dimacs_flow(text: str, source: str = "<input>") -> FlowNetwork:
    """DIMACS max-flow: ``p max n m``, ``n id s``, ``n id t``, ``a u v cap``
    with 1-based node ids."""
    n = narcs = None
    s = t = None
    arcs = []
    for lineno, toks in _lines(text):
        key = toks[0]
        if key == "c":
            continue
        if key == "p":
            if len(toks) != 4 or toks[1] != "max":
                raise ParseError(lineno, "expected 'p max nodes arcs'", source)
            n, narcs = _int(toks[2], lineno, source), _int(toks[3], lineno, source)
        elif n is None:
            raise ParseError(lineno, "record before 'p' line", source)
        elif key == "n":
            if len(toks) != 3 or toks[2] not in ("s", "t"):
                raise ParseError(lineno, "expected 'n id s|t'", source)
            node = _int(toks[1], lineno, source)
            if not 1 <= node <= n:
                raise ParseError(lineno, f"node {node} out of range 1..{n}", source)
            if toks[2] == "s":
                s = node - 1
            else:
                t = node - 1
        elif key == "a":
            if len(toks) != 4:
                raise ParseError(lineno, "expected 'a u v cap'", source)
            u, v = _int(toks[1], lineno, source), _int(toks[2], lineno, source)
            for node in (u, v):
                if not 1 <= node <= n:
                    raise ParseError(lineno, f"node {node} out of range 1..{n}", source)
            cap = _num(toks[3], lineno, source)
            if cap < 0 or math.isinf(cap):
                raise ParseError(lineno, "capacity must be finite and non-negative", source)
            arcs.append((u - 1, v - 1, cap))
        else:
            raise ParseError(lineno, f"unknown record {key!r}", source)
    if n is None:
        raise ParseError(0, "missing 'p' line", source)
    if s is None or t is None:
        raise ParseError(0, "source or sink not declared", source)
    if len(arcs) != narcs:
        raise ParseError(0, f"header declares {narcs} arcs, found {len(arcs)}", source)
    return FlowNetwork(n, arcs, s, t)


def parse_vertex_cover(text: str, source: str = "<input>") -> tuple[VertexCoverGraph, list[int]]:
    """Lines ``n <id> <weight>`` and ``e <u> <v>``.

    Node ids are arbitrary integers; they are numbered 0.. in order of
    declaration.  Returns the graph and the list of original ids.
    """
    ids: dict[int, int] = {}
    weights: list[float] = []
    edges = []
    for lineno, toks in _lines(text):
        key = toks[0]
        if key == "c":
            continue
        if key == "n":
            if len(toks) != 3:
                raise ParseError(lineno, "expected 'n id weight'", source)
            node = _int(toks[1], lineno, source)
            if node in ids:
                raise ParseError(lineno, f"node {node} declared twice", source)
            wt = _num(toks[2], lineno, source)
            if wt < 0 or math.isinf(wt):
                raise ParseError(lineno, "weight must be finite and non-negative", source)
            ids[node] = len(weights)
            weights.append(wt)
        elif key == "e":
            if len(toks) != 3:
                raise ParseError(lineno, "expected 'e u v'", source)
            u, v = _int(toks[1], lineno, source), _int(toks[2], lineno, source)
            for node in (u, v):
                if node not in ids:
                    raise ParseError(lineno, f"edge uses undeclared node {node}", source)
            if u == v:
                raise ParseError(lineno, "self-loop", source)
            edges.append((ids[u], ids[v]))
        else:
            raise ParseError(lineno, f"unknown record {key!r}", source)
    return VertexCoverGraph(weights, edges), list(ids)


def parse_potts(text: str, source: str = "<input>") -> PottsModel:
    """``potts V E K`` then ``theta i k val`` and ``edge i j`` (0-based).
    Missing unaries are 0."""
    header = None
    unary: list[list[float]] = []
    edges = []
    seen = set()
    for lineno, toks in _lines(text):
        key = toks[0]
        if key == "potts":
            if header is not None or len(toks) != 4:
                raise ParseError(lineno, "expected a single 'potts V E K' line", source)
            header = tuple(_int(t, lineno, source) for t in toks[1:])
            V, _, K = header
            if V < 0 or K < 2:
                raise ParseError(lineno, "need V >= 0 and K >= 2", source)
            unary = [[0.0] * K for _ in range(V)]
        elif header is None:
            raise ParseError(lineno, "record before 'potts' line", source)
        elif key == "theta":
            if len(toks) != 4:
                raise ParseError(lineno, "expected 'theta i k val'", source)
            i = _index(toks[1], header[0], lineno, source)
            k = _index(toks[2], header[2], lineno, source)
            if (i, k) in seen:
                raise ParseError(lineno, f"duplicate theta {i} {k}", source)
            seen.add((i, k))
            x = _num(toks[3], lineno, source)
            if math.isinf(x):
                raise ParseError(lineno, "unary must be finite", source)
            unary[i][k] = x
        elif key == "edge":
            if len(toks) != 3:
                raise ParseError(lineno, "expected 'edge i j'", source)
            i = _index(toks[1], header[0], lineno, source)
            j = _index(toks[2], header[0], lineno, source)
            if i == j:
                raise ParseError(lineno, "self-loop", source)
            edges.append((i, j))
        else:
            raise ParseError(lineno, f"unknown record {key!r}", source)
    if header is None:
        raise ParseError(0, "missing 'potts' line", source)
    if len(edges) != header[1]:
        raise ParseError(0, f"header declares {header[1]} edges, found {len(edges)}", source)
    return PottsModel(header[0], header[2], unary, edges)
