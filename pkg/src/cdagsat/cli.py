"""Command-line front end: solve, oracle, diff, fuzz, demo and bench."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Any, Sequence, TextIO

from .cdag import DEFAULT_NODE_BUDGET
from .cnf_io import Formula, read_dimacs
from .core import CdagSatError
from .harness import PLANTED, UNIFORM, GenParams, run_bench, run_campaign, run_diff
from .oracle import brute_force, clause_set_oracle
from .render import demo
from .solver import SolveOptions, solve
from .trace import dumps_record, dumps_records

SAT, UNSAT, ERROR = 10, 20, 1
AGREE, DISAGREE = 0, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; 2 means "disagreement" here
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def v_line(assignment: Sequence[bool]) -> str:
    lits = [str(v if val else -v) for v, val in enumerate(assignment, start=1)]
    return "v " + " ".join([*lits, "0"])


def parse_solver_output(text: str) -> tuple[bool | None, list[int] | None]:
    """Read "s ..." and "v ..." lines back; v lines may be split across several."""
    status: bool | None = None
    lits: list[int] | None = None
    for line in text.splitlines():
        if line.startswith("s "):
            word = line[2:].strip()
            if word == "SATISFIABLE":
                status = True
            elif word == "UNSATISFIABLE":
                status = False
            else:
                raise ValueError(f"unknown status {word!r}")
        elif line.startswith("v "):
            lits = (lits or []) + [int(tok) for tok in line[2:].split()]
    if lits is not None:
        if not lits or lits[-1] != 0:
            raise ValueError("value line is not terminated by 0")
        lits = lits[:-1]
    return status, lits


def _m_range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    try:
        a = int(lo)
        b = int(hi) if sep else a
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected M or LO..HI, got {text!r}") from None
    if a < 0 or b < a:
        raise argparse.ArgumentTypeError(f"bad clause range {text!r}")
    return a, b


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cdagsat", description="Clause-matrix 3-SAT decision procedure with a verification harness.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="decide a DIMACS 3-CNF file")
    s.add_argument("file")
    s.add_argument("--trace", action="store_true", help="print the phase trace")
    s.add_argument("--certificate", action="store_true", help="print the satisfying assignment")
    s.add_argument("--budget", type=int, default=DEFAULT_NODE_BUDGET, help="node budget for certificate search")
    s.add_argument("--machine", action="store_true", help="emit structured records")

    o = sub.add_parser("oracle", help="decide by enumeration")
    o.add_argument("file")
    o.add_argument("--method", choices=("truth-table", "clause-set"), default="truth-table")

    d = sub.add_parser("diff", help="compare solver and oracle on one file")
    d.add_argument("file")
    d.add_argument("--budget", type=int, default=DEFAULT_NODE_BUDGET)
    d.add_argument("--machine", action="store_true")

    f = sub.add_parser("fuzz", help="seeded differential campaign")
    f.add_argument("--vars", type=int, required=True)
    f.add_argument("--clauses", type=_m_range, required=True, help="M or LO..HI")
    f.add_argument("--trials", type=int, default=100)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--out", required=True)
    f.add_argument("--planted", action="store_true")
    f.add_argument("--exhaustive", action="store_true", help="every formula with the given clause count (n <= 4)")
    f.add_argument("--jobs", type=int, default=1)
    f.add_argument("--budget", type=int, default=DEFAULT_NODE_BUDGET)
    f.add_argument("--machine", action="store_true")

    m = sub.add_parser("demo", help="walk the six-variable worked example")
    m.add_argument("--out", help="also write demo.txt and demo.meta here")
    m.add_argument("--machine", action="store_true")

    b = sub.add_parser("bench", help="solve one seeded instance per size")
    b.add_argument("--max-vars", type=int, required=True)
    b.add_argument("--ratio", type=float, required=True)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--machine", action="store_true")
    b.add_argument("--timings", action="store_true", help="include wall-clock fields (not reproducible)")
    return p


def _load(path: str) -> Formula:
    f = read_dimacs(path)
    for w in f.warnings:
        print(f"c warning: {w}", file=sys.stderr)
    return f


def cmd_solve(args: argparse.Namespace, out: TextIO) -> int:
    f = _load(args.file)
    if args.budget < 1:
        raise UsageError("--budget must be positive")
    v = solve(f, SolveOptions(trace=args.trace or args.machine, extract_certificate=True, node_budget=args.budget))
    if args.machine:
        rec: dict[str, Any] = {
            "record": "verdict",
            "satisfiable": v.satisfiable,
            "certificate": list(v.certificate) if v.certificate is not None else None,
            "certificateStatus": v.certificate_status.value,
            "unsatReason": v.stats.unsat_reason,
            "rootColumn": v.stats.root_column,
            "rootsTried": v.stats.roots_tried,
            "restarts": v.stats.restarts,
            "removed": v.stats.removed,
        }
        recs = [*(v.trace.records if args.trace and v.trace else []), rec]
        out.write(dumps_records(recs))
    else:
        if args.trace and v.trace is not None:
            for r in v.trace.records:
                out.write("c " + dumps_record(r) + "\n")
        if v.satisfiable:
            out.write(f"c certificate {v.certificate_status.value}\n")
        else:
            out.write(f"c reason {v.stats.unsat_reason}\n")
        out.write("s SATISFIABLE\n" if v.satisfiable else "s UNSATISFIABLE\n")
        if v.satisfiable and args.certificate and v.certificate is not None:
            out.write(v_line(v.certificate) + "\n")
    return SAT if v.satisfiable else UNSAT


def cmd_oracle(args: argparse.Namespace, out: TextIO) -> int:
    f = _load(args.file)
    r = brute_force(f) if args.method == "truth-table" else clause_set_oracle(f)
    out.write(f"c checked {r.assignments_checked}\n")
    out.write("s SATISFIABLE\n" if r.satisfiable else "s UNSATISFIABLE\n")
    if r.witness is not None:
        out.write(v_line(r.witness) + "\n")
    return SAT if r.satisfiable else UNSAT


def cmd_diff(args: argparse.Namespace, out: TextIO) -> int:
    f = _load(args.file)
    d = run_diff(f, node_budget=args.budget)
    if args.machine:
        out.write(dumps_record({"record": "diff", **d.record()}) + "\n")
    else:
        word = "agree" if d.agree else "DISAGREE"
        solver = "SAT" if d.solver.satisfiable else "UNSAT"
        oracle = "SAT" if d.oracle.satisfiable else "UNSAT"
        out.write(f"{word}: solver {solver}, oracle {oracle}, anomaly {d.anomaly.value}, digest {d.digest}\n")
    return AGREE if d.anomaly.value == "none" else DISAGREE


def cmd_fuzz(args: argparse.Namespace, out: TextIO) -> int:
    lo, hi = args.clauses
    mode = PLANTED if args.planted else UNIFORM
    p = GenParams(args.vars, lo, mode, args.seed)
    rng = (lo, hi) if hi != lo else None
    report = run_campaign(p, args.trials, args.out, args.exhaustive, m_range=rng, jobs=args.jobs,
                          node_budget=args.budget)
    if args.machine:
        out.write(dumps_record(report.record(timings=False)) + "\n")
    else:
        out.write(f"trials {report.trials}, agreements {report.agreements}, disagreements {report.disagreements}\n")
        out.write(f"agreement rate {report.agreement_rate:.4f}\n")
        out.write("anomalies " + ", ".join(f"{k}={v}" for k, v in report.anomalies.items()) + "\n")
        out.write(f"empty-row UNSAT {report.empty_row_unsat} (agree {report.empty_row_agree})\n")
        out.write(f"verified certificates {report.certificates_verified} (sound {report.certificates_sound})\n")
        for name in report.counterexamples:
            out.write(f"counterexample {name}\n")
        out.write(f"digest {report.digest}\n")
        print(f"c wall time {report.wall_time:.3f}s", file=sys.stderr)
    clean = report.disagreements == 0 and set(report.anomalies) <= {"none"}
    return AGREE if clean else DISAGREE


def cmd_demo(args: argparse.Namespace, out: TextIO) -> int:
    text, records = demo()
    machine = dumps_records(records)
    out.write(machine if args.machine else text)
    if args.out:
        d = Path(args.out)
        d.mkdir(parents=True, exist_ok=True)
        (d / "demo.txt").write_text(text, encoding="ascii")
        (d / "demo.meta").write_text(machine, encoding="ascii")
    return 0


def cmd_bench(args: argparse.Namespace, out: TextIO) -> int:
    if args.max_vars < 3 or args.max_vars > 26:
        raise UsageError("--max-vars must be in 3..26")
    if args.ratio < 0:
        raise UsageError("--ratio must be non-negative")
    records = run_bench(args.max_vars, args.ratio, args.seed, args.timings)
    if args.machine:
        out.write(dumps_records(records))
    else:
        for r in records:
            oracle = "-" if r["oracleSat"] is None else ("SAT" if r["oracleSat"] else "UNSAT")
            line = (f"n={r['n']:>2} m={r['m']:>3} solver={'SAT' if r['solverSat'] else 'UNSAT':<5} "
                    f"oracle={oracle:<5} cert={r['certificate']} roots={r['rootsTried']} restarts={r['restarts']}")
            if "solverTime" in r:
                line += f" time={r['solverTime']:.4f}s"
            out.write(line + "\n")
    return 0


COMMANDS = {
    "solve": cmd_solve,
    "oracle": cmd_oracle,
    "diff": cmd_diff,
    "fuzz": cmd_fuzz,
    "demo": cmd_demo,
    "bench": cmd_bench,
}


def main(argv: Sequence[str] | None = None, out: TextIO | None = None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args, out)
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return ERROR
    except (CdagSatError, OSError, ValueError) as e:
        print(f"cdagsat: error: {e}", file=sys.stderr)
        return ERROR


def entry() -> None:
    sys.exit(main())
