"""Top-level decision procedure: propagate on the clause matrix, then try each root."""

from __future__ import annotations

import enum
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .cdag import DEFAULT_NODE_BUDGET, CdagOutcome, Extraction, extract_certificate, generate_cdag
from .cnf_io import Formula
from .core import Assignment, Clause3, InvalidArity, column_of, triple_rank
from .matrix import (
    ROOT,
    ClauseMatrix,
    RemovalConditions,
    find_removal_conditions,
    garbage_collect,
    generate_cm,
    matrix_is_valid,
    subtract,
)
from .trace import Trace


class CertificateStatus(str, enum.Enum):
    VERIFIED = "verified"
    FAILED = "failed"
    NOT_FOUND = "notFound"
    BUDGET_EXHAUSTED = "budgetExhausted"
    NOT_APPLICABLE = "notApplicable"


# why an UNSAT verdict was reached
EMPTY_ROW = "emptyRow"  # propagation on the clause matrix alone emptied a row
ROOTS_EXHAUSTED = "rootsExhausted"  # every root failed or the failures emptied a row


@dataclass
class SolveOptions:
    trace: bool = False
    extract_certificate: bool = True
    node_budget: int = DEFAULT_NODE_BUDGET


@dataclass
class SolveStats:
    removed: dict[str, int] = field(default_factory=dict)
    restarts: int = 0
    roots_tried: int = 0
    root_column: int | None = None
    unsat_reason: str | None = None
    extraction_visits: int = 0
    elapsed: float = 0.0


@dataclass
class Verdict:
    satisfiable: bool
    certificate: Assignment | None = None
    certificate_status: CertificateStatus = CertificateStatus.NOT_APPLICABLE
    trace: Trace | None = None
    stats: SolveStats = field(default_factory=SolveStats)

    def __post_init__(self) -> None:
        if not self.satisfiable and (
            self.certificate is not None or self.certificate_status is not CertificateStatus.NOT_APPLICABLE
        ):
            raise ValueError("an UNSAT verdict carries no certificate")


def check_certificate(f: Formula, a: Sequence[bool]) -> bool:
    """True iff every clause has a literal made true by ``a``."""
    if len(a) != f.n:
        raise ValueError(f"assignment covers {len(a)} variables, formula has {f.n}")
    for clause in f.clauses:
        for lit in clause.lits:
            value = a[lit.var - 1]
            if value != lit.negated:
                break
        else:
            return False
    return True


def sort_clauses(f: Formula) -> list[Clause3]:
    return sorted(f.clauses, key=lambda c: (triple_rank(c.triple, f.n), column_of(c)))


def solve(f: Formula, opts: SolveOptions | None = None) -> Verdict:
    opts = opts or SolveOptions()
    started = time.perf_counter()
    trace = Trace() if opts.trace else None
    stats = SolveStats()

    def finish(v: Verdict) -> Verdict:
        v.stats.elapsed = time.perf_counter() - started
        return v

    if f.m == 0:
        cert = (False,) * f.n
        status = CertificateStatus.VERIFIED if check_certificate(f, cert) else CertificateStatus.FAILED
        if trace is not None:
            trace.emit("verdict", satisfiable=True, reason="emptyFormula")
        return finish(Verdict(True, cert if opts.extract_certificate else None,
                              status if opts.extract_certificate else CertificateStatus.NOT_APPLICABLE,
                              trace, stats))
    if f.n < 3:
        raise InvalidArity(f"{f.m} clause(s) over only {f.n} variables")

    ordered = Formula(f.n, tuple(sort_clauses(f)))
    cm = generate_cm(f.n)
    subtract(cm, ordered)
    prc = RemovalConditions(f.n)
    garbage_collect(cm, prc)
    if trace is not None:
        trace.emit(
            "propagated",
            alive=cm.alive_count(),
            units=[str(u) for u in prc.units()],
            pairs=len(prc.pairs()),
            valid=matrix_is_valid(cm),
        )

    def unsat(reason: str) -> Verdict:
        stats.unsat_reason = reason
        stats.removed = _phase_counts(cm)
        if trace is not None:
            trace.emit("verdict", satisfiable=False, reason=reason)
        return finish(Verdict(False, trace=trace, stats=stats))

    if not matrix_is_valid(cm):
        return unsat(EMPTY_ROW)

    for col in range(1, 9):
        if not cm.alive_cell(1, col):
            continue
        stats.roots_tried += 1
        outcome = generate_cdag(cm, prc, col, trace)
        stats.restarts += outcome.restarts
        if outcome.success:
            stats.root_column = col
            stats.removed = _phase_counts(cm)
            verdict = Verdict(True, trace=trace, stats=stats)
            if opts.extract_certificate:
                _attach_certificate(verdict, f, outcome, opts.node_budget)
            if trace is not None:
                trace.emit("verdict", satisfiable=True, root_column=col,
                           certificate=verdict.certificate_status.value)
            return finish(verdict)
        cm.kill(1, col, ROOT)
        find_removal_conditions(cm, prc)
        garbage_collect(cm, prc)
        if not matrix_is_valid(cm):
            return unsat(ROOTS_EXHAUSTED)
    return unsat(ROOTS_EXHAUSTED)


def _attach_certificate(verdict: Verdict, f: Formula, outcome: CdagOutcome, budget: int) -> None:
    assert outcome.cdag is not None
    found = extract_certificate(outcome.cdag, f.n, budget)
    verdict.stats.extraction_visits = found.visits
    if found.status is Extraction.NOT_FOUND:
        verdict.certificate_status = CertificateStatus.NOT_FOUND
    elif found.status is Extraction.BUDGET_EXHAUSTED:
        verdict.certificate_status = CertificateStatus.BUDGET_EXHAUSTED
    else:
        verdict.certificate = found.assignment
        ok = check_certificate(f, found.assignment)
        verdict.certificate_status = CertificateStatus.VERIFIED if ok else CertificateStatus.FAILED
        assert ok == check_certificate(f, verdict.certificate)


def _phase_counts(cm: ClauseMatrix) -> dict[str, int]:
    return dict(sorted(Counter(cm.removed.values()).items()))
