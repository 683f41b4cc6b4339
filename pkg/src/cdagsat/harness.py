"""Random instances, solver-vs-oracle differential runs, shrinking and campaigns."""

from __future__ import annotations

import enum
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import combinations
from math import comb
from pathlib import Path
from typing import Any, Callable, Iterator

from .cdag import DEFAULT_NODE_BUDGET
from .cnf_io import Formula, emit_dimacs, parse_dimacs
from .core import Assignment, Clause3, clause_at, clause_value, triples
from .oracle import OracleVerdict, brute_force, eval_formula
from .prng import SplitMix64, digest_hex
from .solver import EMPTY_ROW, CertificateStatus, SolveOptions, Verdict, solve
from .trace import dumps_record, dumps_records, loads_records

log = logging.getLogger(__name__)

UNIFORM = "uniform"
PLANTED = "planted"

Solver = Callable[[Formula, SolveOptions], Verdict]


@dataclass(frozen=True)
class GenParams:
    n: int
    m: int
    mode: str = UNIFORM
    seed: int = 0
    replacement: bool = False


@dataclass(frozen=True)
class Instance:
    formula: Formula
    hidden: Assignment | None = None


def formula_digest(f: Formula) -> str:
    return digest_hex(emit_dimacs(f).encode("ascii"))


def _clause_of_index(idx: int, n: int) -> Clause3:
    return clause_at(triples(n)[idx // 8], idx % 8 + 1)


def _shuffled_indices(rng: SplitMix64, total: int) -> Iterator[int]:
    """Lazy Fisher-Yates: yields a uniform permutation of range(total)."""
    pool = list(range(total))
    for t in range(total):
        j = t + rng.below(total - t)
        pool[t], pool[j] = pool[j], pool[t]
        yield pool[t]


def generate(p: GenParams) -> Instance:
    if not 3 <= p.n <= 26:
        raise ValueError(f"n must lie in 3..26, got {p.n}")
    if p.m < 0:
        raise ValueError("m must be non-negative")
    rng = SplitMix64(p.seed)
    total = 8 * comb(p.n, 3)

    if p.mode == UNIFORM:
        if p.replacement:
            picks = [rng.below(total) for _ in range(p.m)]
        else:
            if p.m > total:
                raise ValueError(f"m={p.m} exceeds the {total} distinct clauses over {p.n} variables")
            stream = _shuffled_indices(rng, total)
            picks = [next(stream) for _ in range(p.m)]
        return Instance(Formula.of(p.n, (_clause_of_index(i, p.n) for i in picks)))

    if p.mode == PLANTED:
        hidden = tuple(rng.below(2) == 1 for _ in range(p.n))
        if p.m > 7 * comb(p.n, 3):
            raise ValueError(f"m={p.m} exceeds the clauses a planted assignment satisfies")
        clauses: list[Clause3] = []
        for i in _shuffled_indices(rng, total):
            if len(clauses) == p.m:
                break
            c = _clause_of_index(i, p.n)
            if clause_value(c, hidden):
                clauses.append(c)
        return Instance(Formula.of(p.n, clauses), hidden)

    raise ValueError(f"unknown generation mode {p.mode!r}")


def gen_random(p: GenParams) -> Formula:
    return generate(p).formula


# -- differential runs ---------------------------------------------------------


class Anomaly(str, enum.Enum):
    NONE = "none"
    VERDICT_MISMATCH = "verdictMismatch"
    CERTIFICATE_FAILED = "certificateFailed"
    CERTIFICATE_NOT_FOUND = "certificateNotFound"
    BUDGET_EXHAUSTED = "budgetExhausted"


@dataclass
class DiffResult:
    digest: str
    solver: Verdict
    oracle: OracleVerdict
    agree: bool
    anomaly: Anomaly
    solver_time: float = 0.0
    oracle_time: float = 0.0

    def record(self, timings: bool = False) -> dict[str, Any]:
        rec: dict[str, Any] = {
            "digest": self.digest,
            "solverSat": self.solver.satisfiable,
            "oracleSat": self.oracle.satisfiable,
            "agree": self.agree,
            "anomaly": self.anomaly.value,
            "certificate": self.solver.certificate_status.value,
            "unsatReason": self.solver.stats.unsat_reason,
            "rootsTried": self.solver.stats.roots_tried,
            "restarts": self.solver.stats.restarts,
        }
        if timings:
            rec["solverTime"] = round(self.solver_time, 6)
            rec["oracleTime"] = round(self.oracle_time, 6)
        return rec


def classify(solver: Verdict, oracle: OracleVerdict) -> Anomaly:
    if solver.satisfiable != oracle.satisfiable:
        return Anomaly.VERDICT_MISMATCH
    if solver.satisfiable:
        status = solver.certificate_status
        if status is CertificateStatus.FAILED:
            return Anomaly.CERTIFICATE_FAILED
        if status is CertificateStatus.NOT_FOUND:
            return Anomaly.CERTIFICATE_NOT_FOUND
        if status is CertificateStatus.BUDGET_EXHAUSTED:
            return Anomaly.BUDGET_EXHAUSTED
    return Anomaly.NONE


def run_diff(f: Formula, solver: Solver = solve, node_budget: int = DEFAULT_NODE_BUDGET) -> DiffResult:
    t0 = time.perf_counter()
    oracle = brute_force(f)
    t1 = time.perf_counter()
    verdict = solver(f, SolveOptions(extract_certificate=True, node_budget=node_budget))
    t2 = time.perf_counter()
    return DiffResult(
        formula_digest(f),
        verdict,
        oracle,
        verdict.satisfiable == oracle.satisfiable,
        classify(verdict, oracle),
        t2 - t1,
        t1 - t0,
    )


# -- shrinking -------------------------------------------------------------------


@dataclass
class ShrinkResult:
    formula: Formula
    held: bool
    evaluations: int


def compact_variables(f: Formula) -> Formula:
    """Renumber used variables to 1..k, keeping their relative order."""
    used = sorted({lit.var for c in f.clauses for lit in c.lits})
    remap = {v: i for i, v in enumerate(used, start=1)}
    clauses = [
        Clause3(tuple(lit._replace(var=remap[lit.var]) for lit in c.lits))  # type: ignore[arg-type]
        for c in f.clauses
    ]
    return Formula(len(used), tuple(clauses))


def shrink(f: Formula, predicate: Callable[[Formula], bool]) -> ShrinkResult:
    """Greedy one-clause-at-a-time reduction to a 1-minimal formula.

    Passes repeat until a whole pass removes nothing; then unused variables
    are renamed away if the predicate survives the renaming.
    """
    evaluations = 1
    if not predicate(f):
        return ShrinkResult(f, False, evaluations)
    current = f
    while True:
        progress = True
        while progress:
            progress = False
            i = 0
            while i < current.m:
                candidate = Formula(current.n, current.clauses[:i] + current.clauses[i + 1 :])
                evaluations += 1
                if predicate(candidate):
                    current = candidate
                    progress = True
                else:
                    i += 1
        renamed = compact_variables(current)
        if renamed == current:
            break
        evaluations += 1
        if not predicate(renamed):
            break
        current = renamed
    return ShrinkResult(current, True, evaluations)


@dataclass(frozen=True)
class AnomalyPredicate:
    """Picklable "this formula still shows anomaly ``kind``" test."""

    kind: Anomaly
    solver: Solver = solve
    node_budget: int = DEFAULT_NODE_BUDGET

    def __call__(self, f: Formula) -> bool:
        if f.n > 26:
            return False
        if f.m and f.n < 3:
            return False
        return run_diff(f, self.solver, self.node_budget).anomaly is self.kind


# -- campaigns -------------------------------------------------------------------


@dataclass
class Report:
    params: dict[str, Any]
    trials: int = 0
    agreements: int = 0
    disagreements: int = 0
    anomalies: dict[str, int] = field(default_factory=dict)
    counterexamples: list[str] = field(default_factory=list)
    empty_row_unsat: int = 0
    empty_row_agree: int = 0
    certificates_verified: int = 0
    certificates_sound: int = 0
    wall_time: float = 0.0
    digest: str = ""

    @property
    def agreement_rate(self) -> float:
        return self.agreements / self.trials if self.trials else 1.0

    def record(self, timings: bool = True) -> dict[str, Any]:
        rec = {"record": "report", **asdict(self), "agreementRate": round(self.agreement_rate, 6)}
        rec["counterexamples"] = list(self.counterexamples)
        if not timings:
            rec.pop("wall_time")
        return rec


@dataclass
class _Job:
    index: int
    seed: int | None
    formula_text: str
    solver: Solver
    node_budget: int


@dataclass
class _TrialOutcome:
    index: int
    record: dict[str, Any]
    anomaly: Anomaly
    original: str
    shrunk: str | None
    certificate_sound: bool


def _run_job(job: _Job) -> _TrialOutcome:
    f = parse_dimacs(job.formula_text)
    diff = run_diff(f, job.solver, job.node_budget)
    rec = {"record": "trial", "index": job.index, "seed": job.seed, "n": f.n, "m": f.m, **diff.record()}
    shrunk = None
    if diff.anomaly is not Anomaly.NONE:
        result = shrink(f, AnomalyPredicate(diff.anomaly, job.solver, job.node_budget))
        shrunk = emit_dimacs(result.formula)
    cert = diff.solver.certificate
    sound = True
    if diff.solver.certificate_status is CertificateStatus.VERIFIED:
        sound = cert is not None and eval_formula(f, cert)
    return _TrialOutcome(job.index, rec, diff.anomaly, job.formula_text, shrunk, sound)


def _campaign_jobs(
    p: GenParams,
    trials: int,
    exhaustive: bool,
    m_range: tuple[int, int] | None,
    solver: Solver,
    node_budget: int,
) -> list[_Job]:
    jobs = []
    if exhaustive:
        if p.n > 4:
            raise ValueError("exhaustive campaigns are limited to n <= 4")
        ms = range(m_range[0], m_range[1] + 1) if m_range else [p.m]
        total = 8 * comb(p.n, 3)
        idx = 0
        for m in ms:
            for picks in combinations(range(total), m):
                f = Formula(p.n, tuple(_clause_of_index(i, p.n) for i in picks))
                jobs.append(_Job(idx, None, emit_dimacs(f), solver, node_budget))
                idx += 1
        return jobs
    master = SplitMix64(p.seed)
    for t in range(trials):
        seed = master.next_u64()
        m = master.between(*m_range) if m_range else p.m
        f = gen_random(GenParams(p.n, m, p.mode, seed, p.replacement))
        jobs.append(_Job(t, seed, emit_dimacs(f), solver, node_budget))
    return jobs


def run_campaign(
    p: GenParams,
    trials: int,
    out_dir: str | Path,
    exhaustive: bool = False,
    *,
    m_range: tuple[int, int] | None = None,
    jobs: int = 1,
    solver: Solver = solve,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> Report:
    """Run a seeded differential campaign and persist every anomaly, shrunk.

    Trial i draws its seed and (with ``m_range``) its clause count from a
    master SplitMix64 stream seeded with ``p.seed``, so results do not depend
    on ``jobs``. Outcomes are committed in trial order.
    """
    started = time.perf_counter()
    out = Path(out_dir)
    params = {
        "n": p.n,
        "m": list(m_range) if m_range else p.m,
        "mode": p.mode,
        "seed": p.seed,
        "trials": trials,
        "exhaustive": exhaustive,
        "nodeBudget": node_budget,
    }
    report = Report(params)
    work = _campaign_jobs(p, trials, exhaustive, m_range, solver, node_budget)
    if not work:
        return report

    out.mkdir(parents=True, exist_ok=True)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_run_job, work, chunksize=max(1, len(work) // (jobs * 8))))
    else:
        outcomes = [_run_job(job) for job in work]

    trial_records = []
    for o in sorted(outcomes, key=lambda o: o.index):
        rec = o.record
        report.trials += 1
        if rec["agree"]:
            report.agreements += 1
        else:
            report.disagreements += 1
        report.anomalies[o.anomaly.value] = report.anomalies.get(o.anomaly.value, 0) + 1
        if rec["unsatReason"] == EMPTY_ROW:
            report.empty_row_unsat += 1
            report.empty_row_agree += rec["agree"]
        if rec["certificate"] == CertificateStatus.VERIFIED.value:
            report.certificates_verified += 1
            report.certificates_sound += o.certificate_sound
        if o.shrunk is not None:
            name = _persist_counterexample(out, o, params)
            rec["counterexample"] = name
            if name not in report.counterexamples:
                report.counterexamples.append(name)
        trial_records.append(rec)

    report.anomalies = dict(sorted(report.anomalies.items()))
    report.digest = digest_hex(dumps_records(trial_records).encode("ascii"))
    report.wall_time = round(time.perf_counter() - started, 3)
    (out / "report.meta").write_text(dumps_records([*trial_records, report.record(timings=False)]), encoding="ascii")
    return report


def _persist_counterexample(out: Path, o: _TrialOutcome, params: dict[str, Any]) -> str:
    assert o.shrunk is not None
    dig = digest_hex(o.shrunk.encode("ascii"))
    cnf = out / f"cex-{dig}.cnf"
    if not cnf.exists():
        cnf.write_text(o.shrunk, encoding="ascii")
        meta = {
            "record": "counterexample",
            "digest": dig,
            "anomaly": o.anomaly.value,
            "trial": o.index,
            "seed": o.record["seed"],
            "originalDigest": o.record["digest"],
            "original": o.original,
            "campaign": params,
        }
        (out / f"cex-{dig}.meta").write_text(dumps_record(meta) + "\n", encoding="ascii")
    return cnf.name


def validate_corpus(
    out_dir: str | Path, solver: Solver = solve, node_budget: int = DEFAULT_NODE_BUDGET
) -> dict[str, bool]:
    """Re-run each persisted counterexample; True where its anomaly reappears."""
    results = {}
    for meta_path in sorted(Path(out_dir).glob("cex-*.meta")):
        meta = loads_records(meta_path.read_text(encoding="ascii"))[0]
        f = parse_dimacs(meta_path.with_suffix(".cnf").read_text(encoding="ascii"))
        diff = run_diff(f, solver, node_budget)
        results[meta_path.with_suffix(".cnf").name] = diff.anomaly.value == meta["anomaly"]
    return results


# -- bench -------------------------------------------------------------------------

BENCH_ORACLE_MAX_VARS = 16


def run_bench(max_vars: int, ratio: float, seed: int, timings: bool = False) -> list[dict[str, Any]]:
    """Solve one seeded uniform instance per n in 3..max_vars at m = round(ratio * n)."""
    master = SplitMix64(seed)
    records = []
    for n in range(3, max_vars + 1):
        m = min(round(ratio * n), 8 * comb(n, 3))
        inst_seed = master.next_u64()
        f = gen_random(GenParams(n, m, UNIFORM, inst_seed))
        t0 = time.perf_counter()
        v = solve(f, SolveOptions(extract_certificate=True))
        elapsed = time.perf_counter() - t0
        rec: dict[str, Any] = {
            "record": "bench",
            "n": n,
            "m": m,
            "seed": inst_seed,
            "digest": formula_digest(f),
            "solverSat": v.satisfiable,
            "certificate": v.certificate_status.value,
            "rootsTried": v.stats.roots_tried,
            "restarts": v.stats.restarts,
            "oracleSat": None,
            "agree": None,
        }
        if n <= BENCH_ORACLE_MAX_VARS:
            o = brute_force(f)
            rec["oracleSat"] = o.satisfiable
            rec["agree"] = o.satisfiable == v.satisfiable
        if timings:
            rec["solverTime"] = round(elapsed, 6)
        records.append(rec)
    return records
