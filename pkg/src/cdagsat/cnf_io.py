"""DIMACS CNF ingestion and canonical emission for 3-CNF formulas."""

from __future__ import annotations

import io
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, TextIO

from .core import CdagSatError, Clause3, DuplicateVariable, Literal, make_clause

log = logging.getLogger(__name__)


class DimacsError(CdagSatError, ValueError):
    def __init__(self, message: str, line: int | None = None, token: int | None = None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", token {token}" if token is not None else "") + ": "
        super().__init__(where + message)
        self.line = line
        self.token = token


class DimacsSyntaxError(DimacsError):
    pass


class NotThreeCnf(DimacsError):
    pass


class EmptyInput(DimacsError):
    pass


@dataclass(frozen=True)
class Formula:
    n: int
    clauses: tuple[Clause3, ...]
    warnings: tuple[str, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("variable count must be non-negative")
        if len(set(self.clauses)) != len(self.clauses):
            raise ValueError("formula holds duplicate clauses")
        for c in self.clauses:
            if c.lits[2].var > self.n:
                raise ValueError(f"{c} uses a variable beyond n={self.n}")

    @classmethod
    def of(cls, n: int, clauses: Iterable[Clause3 | tuple[int, int, int]]) -> Formula:
        """Normalize, deduplicate (first occurrence wins) and widen n if needed."""
        seen: dict[Clause3, None] = {}
        for c in clauses:
            if not isinstance(c, Clause3):
                c = Clause3.from_ints(*c)
            seen.setdefault(c, None)
        top = max((c.lits[2].var for c in seen), default=0)
        return cls(max(n, top), tuple(seen))

    @property
    def m(self) -> int:
        return len(self.clauses)

    def __len__(self) -> int:
        return len(self.clauses)


def parse_dimacs(source: str | TextIO) -> Formula:
    """Parse strict 3-CNF DIMACS.

    Clauses may span lines; each must hold exactly three distinct variables.
    The header clause count is advisory and the variable count grows to cover
    every variable actually used. A line holding only ``%`` ends the input
    (SATLIB convention).
    """
    stream = io.StringIO(source) if isinstance(source, str) else source
    header: tuple[int, int] | None = None
    clauses: list[Clause3] = []
    seen: set[Clause3] = set()
    pending: list[tuple[int, int, int]] = []  # (literal, line, token)
    warnings: list[str] = []
    max_var = 0
    duplicates = 0
    saw_content = False

    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line:
            continue
        if line[0] == "c":
            continue
        saw_content = True
        if line == "%":
            break
        if line[0] == "p":
            if header is not None:
                raise DimacsSyntaxError("second problem line", lineno)
            if pending or clauses:
                raise DimacsSyntaxError("problem line after clauses", lineno)
            fields = line.split()
            if len(fields) != 4 or fields[0] != "p" or fields[1] != "cnf":
                raise DimacsSyntaxError(f"malformed problem line {line!r}", lineno)
            try:
                n, m = int(fields[2]), int(fields[3])
            except ValueError:
                raise DimacsSyntaxError(f"non-integer counts in {line!r}", lineno) from None
            if n < 0 or m < 0:
                raise DimacsSyntaxError("negative counts in problem line", lineno)
            header = (n, m)
            continue
        if header is None:
            raise DimacsSyntaxError("clause data before the problem line", lineno)
        for tokno, tok in enumerate(line.split(), start=1):
            try:
                value = int(tok)
            except ValueError:
                raise DimacsSyntaxError(f"bad token {tok!r}", lineno, tokno) from None
            if value != 0:
                pending.append((value, lineno, tokno))
                continue
            clause = _close_clause(pending, lineno, tokno)
            pending = []
            max_var = max(max_var, clause.lits[2].var)
            if clause in seen:
                duplicates += 1
                continue
            seen.add(clause)
            clauses.append(clause)

    if not saw_content:
        raise EmptyInput("no DIMACS content")
    if header is None:
        raise DimacsSyntaxError("missing problem line")
    if pending:
        _, lineno, tokno = pending[0]
        raise DimacsSyntaxError("clause not terminated by 0", lineno, tokno)

    n, m = header
    if duplicates:
        warnings.append(f"dropped {duplicates} duplicate clause(s)")
    if m != len(clauses) + duplicates:
        warnings.append(f"header declares {m} clauses, found {len(clauses) + duplicates}")
    if max_var > n:
        warnings.append(f"header declares {n} variables, clauses use up to {max_var}")
    for w in warnings:
        log.warning(w)
    return Formula(max(n, max_var), tuple(clauses), tuple(warnings))


def _close_clause(pending: list[tuple[int, int, int]], lineno: int, tokno: int) -> Clause3:
    if len(pending) != 3:
        raise NotThreeCnf(f"clause has {len(pending)} literals, expected 3", lineno, tokno)
    a, b, c = (Literal.from_int(v) for v, _, _ in pending)
    try:
        return make_clause(a, b, c)
    except DuplicateVariable as exc:
        raise NotThreeCnf(str(exc), lineno, tokno) from None


def emit_dimacs(f: Formula) -> str:
    lines = [f"p cnf {f.n} {f.m}"]
    lines.extend(" ".join(str(v) for v in c.to_ints()) + " 0" for c in f.clauses)
    return "\n".join(lines) + "\n"


def read_dimacs(path: str | Path) -> Formula:
    with open(path, encoding="utf-8") as fh:
        return parse_dimacs(fh)


def write_dimacs(f: Formula, path: str | Path) -> None:
    Path(path).write_text(emit_dimacs(f), encoding="utf-8")
