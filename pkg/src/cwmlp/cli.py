"""Command-line front end.

Exit codes: 0 success, 1 violation or certificate failure, 2 input error,
3 unbounded instance.
"""

from __future__ import annotations

import argparse
import csv
import glob
import io
import logging
import math
import os
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Optional, Sequence

from .caseproof import run_case_proof
from .duality import build_certificate, verify
from .encoders import encode_maxflow, encode_maxsat, encode_potts, encode_vertex_cover
from .formats import (
    ParseError, parse_dimacs_flow, parse_potts, parse_vertex_cover, parse_wcnf, read_spec,
    write_certificate, write_spec,
)
from .model import check_guarantee
from .oracle import MAX_ORACLE_SIZE, InfeasibleLPError, UnboundedLPError, lp_solve_exact
from .solver import UNBOUNDED, SolverConfig, solve

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INPUT = 2
EXIT_UNBOUNDED = 3


@dataclass
class RunReport:
    instance: str
    primal: float
    dual: float
    gap: float
    optimum: Optional[float]
    rd: Optional[float]
    sweeps: int
    termination: str
    verdict: bool
    guarantee: bool
    seconds: float

    def deterministic(self) -> tuple:
        """Every field except the wall time."""
        return tuple(getattr(self, f.name) for f in fields(self) if f.name != "seconds")


def relative_difference(value: float, optimum: float) -> float:
    return abs(value - optimum) / max(1.0, abs(optimum))


def _config(args) -> SolverConfig:
    return SolverConfig(eps=args.eps, delta=args.delta, max_sweeps=args.max_sweeps)


def run_instance(path: str, config: SolverConfig, tol_eq: float = 1e-6, tol: float = 1e-6,
                 use_oracle: bool = True) -> RunReport:
    spec = read_spec(path)
    start = time.perf_counter()
    res = solve(spec, config)
    seconds = time.perf_counter() - start
    guarantee = check_guarantee(spec).satisfied
    name = os.path.basename(path)
    if res.termination == UNBOUNDED:
        return RunReport(name, -math.inf, math.nan, math.nan, None, None, res.sweeps,
                         res.termination, False, guarantee, seconds)
    cert = build_certificate(spec, res.phi, res.lam, tol_eq)
    rep = verify(spec, res.phi, res.lam, cert, tol)
    optimum = rd = None
    if use_oracle and spec.m + spec.n + spec.p <= MAX_ORACLE_SIZE:
        optimum = lp_solve_exact(spec).value
        rd = relative_difference(res.objective_value, optimum)
    return RunReport(name, res.objective_value, rep.dual, rep.gap, optimum, rd, res.sweeps,
                     res.termination, rep.verdict, guarantee, seconds)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def format_reports(reports: Sequence[RunReport], fmt: str) -> str:
    names = [f.name for f in fields(RunReport)]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(names)
        for r in reports:
            writer.writerow([_fmt(v) for v in asdict(r).values()])
        return buf.getvalue()
    lines = []
    for r in reports:
        rd = "-" if r.rd is None else f"{r.rd:.3e}"
        lines.append(f"{r.instance}: primal={r.primal!r} dual={r.dual!r} gap={r.gap:.3e} "
                     f"rd={rd} sweeps={r.sweeps} {r.termination} "
                     f"certified={'yes' if r.verdict else 'no'} time={r.seconds:.3f}s")
    return "\n".join(lines) + ("\n" if lines else "")


def summarize(reports: Sequence[RunReport]) -> str:
    rds = [r.rd for r in reports if r.rd is not None]
    cert = sum(r.verdict for r in reports)
    out = [f"instances: {len(reports)}", f"certified: {cert}"]
    if rds:
        out.append(f"mean RD: {statistics.fmean(rds):.3e}")
        out.append(f"median RD: {statistics.median(rds):.3e}")
        out.append(f"max RD: {max(rds):.3e}")
    return "\n".join(out) + "\n"


def cmd_solve(args) -> int:
    spec = read_spec(args.spec)
    res = solve(spec, _config(args))
    if res.termination == UNBOUNDED:
        print("objective: unbounded below")
    else:
        print(f"objective: {res.objective_value!r}")
    print(f"sweeps: {res.sweeps}")
    print(f"termination: {res.termination}")
    g = check_guarantee(spec)
    print(f"guarantee: {'satisfied' if g.satisfied else f'violated ({len(g.violations)} conditions)'}")
    if args.point:
        print("phi: " + " ".join(repr(x) for x in res.phi))
        print("lam: " + " ".join(repr(x) for x in res.lam))
    return EXIT_UNBOUNDED if res.termination == UNBOUNDED else EXIT_OK


def cmd_certify(args) -> int:
    spec = read_spec(args.spec)
    res = solve(spec, _config(args))
    if res.termination == UNBOUNDED:
        print("termination: unbounded")
        return EXIT_UNBOUNDED
    cert = build_certificate(spec, res.phi, res.lam, args.tol_eq)
    rep = verify(spec, res.phi, res.lam, cert, args.tol)
    print(f"primal: {rep.primal!r}")
    print(f"dual: {rep.dual!r}")
    print(f"gap: {rep.gap!r}")
    print(f"max equality residual: {rep.max_eq_residual!r}")
    print(f"range violations: {len(rep.range_violations)}")
    print(f"slackness violations: {len(rep.cs_violations)}")
    print(f"sweeps: {res.sweeps}")
    print(f"termination: {res.termination}")
    print(f"verdict: {'certified' if rep.verdict else 'not certified'}")
    if args.cert_out:
        with open(args.cert_out, "w") as fh:
            write_certificate(cert, fh)
    return EXIT_OK if rep.verdict else EXIT_VIOLATION


def cmd_encode(args) -> int:
    with open(args.input) as fh:
        text = fh.read()
    comments = []
    if args.kind == "maxsat":
        inst = encode_maxsat(parse_wcnf(text, args.input), min_ones=args.min_ones)
    elif args.kind == "vc":
        graph, ids = parse_vertex_cover(text, args.input)
        inst = encode_vertex_cover(graph)
        comments.append("column j is node " + " ".join(str(i) for i in ids))
    elif args.kind == "maxflow":
        inst = encode_maxflow(parse_dimacs_flow(text, args.input))
    else:
        inst = encode_potts(parse_potts(text, args.input))
    comments.insert(0, f"encoded {inst.kind} instance from {os.path.basename(args.input)}")
    comments.insert(1, f"application value = {inst.sign!r} * optimum + {inst.offset!r}")
    comments.extend(inst.notes)
    write_spec(inst.spec, args.output, comments)
    g = check_guarantee(inst.spec)
    print(f"wrote {args.output}: m={inst.spec.m} n={inst.spec.n} p={inst.spec.p} "
          f"guarantee={'satisfied' if g.satisfied else 'violated'}")
    for note in inst.notes:
        print(f"note: {note}")
    return EXIT_OK


def cmd_prove_cases(args) -> int:
    report = run_case_proof(jobs=args.jobs)
    for line in report.lines():
        print(line)
    print(f"violated: {report.violated}")
    return EXIT_OK if report.ok else EXIT_VIOLATION


def cmd_oracle(args) -> int:
    spec = read_spec(args.spec)
    try:
        opt = lp_solve_exact(spec)
    except UnboundedLPError:
        print("optimum: unbounded")
        return EXIT_UNBOUNDED
    except InfeasibleLPError:
        print("optimum: infeasible")
        return EXIT_INPUT
    print(f"optimum: {opt.value!r}")
    print(f"exact: {opt.exact}")
    return EXIT_OK


def _bench_one(job):
    path, config, tol_eq, tol, use_oracle = job
    return run_instance(path, config, tol_eq, tol, use_oracle)


def cmd_bench(args) -> int:
    paths = sorted(glob.glob(os.path.join(args.dir, "*.cwm")))
    if not paths:
        print(f"no *.cwm files in {args.dir}", file=sys.stderr)
        return EXIT_INPUT
    jobs = [(p, _config(args), args.tol_eq, args.tol, not args.no_oracle) for p in paths]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(_bench_one, jobs))
    else:
        reports = [_bench_one(j) for j in jobs]
    sys.stdout.write(format_reports(reports, args.format))
    if args.format == "text":
        sys.stdout.write(summarize(reports))
    failed = [r for r in reports if r.guarantee and not r.verdict]
    return EXIT_VIOLATION if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    solver_opts = argparse.ArgumentParser(add_help=False)
    solver_opts.add_argument("--eps", type=float, default=1e-7,
                             help="stop when a sweep improves the objective by less than this")
    solver_opts.add_argument("--delta", type=float, default=1.0,
                             help="step from the finite end of a half-infinite minimizer set")
    solver_opts.add_argument("--max-sweeps", type=int, default=1_000_000)
    cert_opts = argparse.ArgumentParser(add_help=False)
    cert_opts.add_argument("--tol-eq", type=float, default=1e-6,
                           help="tie tolerance when reading the sign pattern")
    cert_opts.add_argument("--tol", type=float, default=1e-6, help="verification tolerance")

    parser = argparse.ArgumentParser(prog="cwmlp", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[solver_opts], help="run coordinate-wise minimization")
    p.add_argument("spec")
    p.add_argument("--point", action="store_true", help="also print the final point")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("certify", parents=[solver_opts, cert_opts],
                       help="solve and verify a dual certificate")
    p.add_argument("spec")
    p.add_argument("--cert-out", help="write the certificate to this file")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("encode", help="encode an application instance")
    p.add_argument("kind", choices=["maxsat", "vc", "maxflow", "potts"])
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--min-ones", action="store_true", help="maxsat: minimize true variables")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("prove-cases", help="run the exhaustive case check")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_prove_cases)

    p = sub.add_parser("oracle", help="exact optimum by rational simplex")
    p.add_argument("spec")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("bench", parents=[solver_opts, cert_opts], help="run every *.cwm in a directory")
    p.add_argument("dir")
    p.add_argument("--format", choices=["text", "csv"], default="text")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--no-oracle", action="store_true", help="skip the exact optimum")
    p.set_defaults(func=cmd_bench)
    return parser


def run_cli(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
