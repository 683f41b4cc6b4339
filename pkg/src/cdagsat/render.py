"""Text and record renderings of matrices and graphs, and the worked-example demo."""

from __future__ import annotations

from typing import Any

from .cdag import Cdag, extract_certificate, generate_cdag
from .cnf_io import Formula
from .core import Clause3, Literal, clause_at, clause_value, literal_of_index, triples
from .matrix import (
    CDAG_GC,
    PAIR,
    ROOT,
    SOURCE,
    SUBTRACT,
    UNIT,
    ClauseMatrix,
    RemovalConditions,
    garbage_collect,
    generate_cm,
    subtract,
)
from .trace import Trace

PHASE_MARK = {SUBTRACT: "S", PAIR: "P", UNIT: "U", SOURCE: "R", CDAG_GC: "G", ROOT: "X"}
PHASE_TEXT = {
    SUBTRACT: "subtracted formula clause",
    PAIR: "removed by a pair condition",
    UNIT: "removed by a unit condition",
    SOURCE: "incompatible with the root",
    CDAG_GC: "dropped by graph collection",
    ROOT: "failed root",
}

SAMPLE_CLAUSES = ((-1, -2, -3), (-2, -3, 4), (-2, -3, -4), (1, -2, 5), (-2, 3, -5), (-1, -2, -6))


def sample_formula() -> Formula:
    """The six-variable worked example used by ``demo`` and the goldens."""
    return Formula.of(6, SAMPLE_CLAUSES)


def lit_ascii(lit: Literal) -> str:
    return f"~x{lit.var}" if lit.negated else f"x{lit.var}"


def clause_ascii(c: Clause3) -> str:
    return " ".join(lit_ascii(lit) for lit in c.lits)


def condition_ascii(a: int, b: int) -> str:
    if a == b:
        return f"unit {lit_ascii(literal_of_index(a))}"
    return f"pair {lit_ascii(literal_of_index(a))} {lit_ascii(literal_of_index(b))}"


def render_matrix(m: ClauseMatrix) -> str:
    """Grid with one row per triple; dead cells carry a one-letter phase mark."""
    width = max(len(clause_ascii(clause_at(t, 8))) for t in triples(m.n)) + 2
    lines = []
    for r, t in enumerate(triples(m.n), start=1):
        cells = []
        for col in range(1, 9):
            text = clause_ascii(clause_at(t, col))
            if m.alive_cell(r, col):
                cells.append(f" {text}".ljust(width))
            else:
                mark = PHASE_MARK.get(m.removed.get((r, col), ""), "?")
                cells.append(f"{mark}{text}".ljust(width))
        lines.append(f"{r:>4} |" + "|".join(cells).rstrip())
    return "\n".join(lines) + "\n"


def render_conditions(rc: RemovalConditions) -> str:
    if not rc.history:
        return "  (none)\n"
    return "".join(f"  {k:>2}. {condition_ascii(a, b)}\n" for k, (a, b) in enumerate(rc.history, start=1))


def matrix_records(m: ClauseMatrix, label: str) -> list[dict[str, Any]]:
    out = []
    for r, t in enumerate(triples(m.n), start=1):
        for col in range(1, 9):
            alive = m.alive_cell(r, col)
            out.append(
                {
                    "record": "cell",
                    "matrix": label,
                    "rank": r,
                    "triple": list(t),
                    "column": col,
                    "clause": list(clause_at(t, col).to_ints()),
                    "alive": alive,
                    "removedBy": None if alive else m.removed.get((r, col)),
                }
            )
    return out


def render_cdag(g: Cdag) -> str:
    lines = []
    for r in g.ranks:
        t = triples(g.n)[r - 1]
        nodes = g.column(r)
        lines.append(f"  col {r:>3} {t}: " + " | ".join(clause_ascii(x.clause) for x in nodes))
    return "\n".join(lines) + "\n"


def cdag_records(g: Cdag, label: str) -> list[dict[str, Any]]:
    out = []
    for x in g.nodes():
        out.append(
            {
                "record": "node",
                "graph": label,
                "rank": x.rank,
                "clause": list(x.clause.to_ints()),
                "side": x.side,
                "left": [list(z.clause.to_ints()) for z in x.left],
                "right": [list(z.clause.to_ints()) for z in x.right],
            }
        )
    return out


def demo(root_column: int = 1) -> tuple[str, list[dict[str, Any]]]:
    """Walk the worked example; returns the text report and its record stream."""
    f = sample_formula()
    text: list[str] = []
    records: list[dict[str, Any]] = []
    text.append("Formula: " + " & ".join("(" + clause_ascii(c) + ")" for c in f.clauses) + "\n")
    text.append("Marks: " + ", ".join(f"{PHASE_MARK[p]} = {PHASE_TEXT[p]}" for p in PHASE_MARK) + "\n\n")

    cm = generate_cm(f.n)
    subtract(cm, f)
    prc = RemovalConditions(f.n)
    garbage_collect(cm, prc)
    text.append("Clause matrix after subtraction and propagation\n")
    text.append(render_matrix(cm))
    text.append("Removal conditions in discovery order\n")
    text.append(render_conditions(prc))
    records.extend(matrix_records(cm, "cm"))
    records.extend({"record": "condition", "grid": "prc", "a": a, "b": b} for a, b in prc.history)

    trace = Trace()
    stages: list[tuple[str, int, str, list[dict[str, Any]]]] = []

    def observe(step: str, i: int, g: Cdag) -> None:
        stages.append((step, i, render_cdag(g), cdag_records(g, f"{step}-{i}")))

    outcome = generate_cdag(cm, prc, root_column, trace, observe)
    src = outcome.source
    text.append(f"\nSource matrix for root {clause_ascii(src.root)}\n")
    text.append(render_matrix(src.sm))
    text.append("Local removal conditions beyond the global ones\n")
    local = RemovalConditions(f.n)
    for a, b in src.lrc.history[len(prc.history):]:
        local.forbid(a, b)
    text.append(render_conditions(local))
    text.append("Local unit conditions: " + ", ".join(lit_ascii(u) for u in src.lrc.units()) + "\n")
    records.extend(matrix_records(src.sm, "sm"))
    records.extend({"record": "condition", "grid": "lrc", "a": a, "b": b} for a, b in src.lrc.history)

    titles = {"left": "insert (l1 l2 x{i}) into first copy", "right": "insert (l1 l2 ~x{i}) into second copy",
              "merge": "merge of both copies"}
    for step, i, body, recs in stages:
        text.append(f"\nStage {i}: " + titles[step].format(i=i) + "\n")
        text.append(body)
        records.extend(recs)
    records.extend(trace.records)

    text.append(f"\nConstruction {'succeeded' if outcome.success else 'failed'}")
    text.append(f" after {outcome.restarts} restart(s)\n")
    if outcome.success and outcome.cdag is not None:
        found = extract_certificate(outcome.cdag, f.n)
        if found.assignment is not None:
            text.append("Clause set on the extracted path:\n")
            for c in found.path:
                text.append(f"  ({clause_ascii(c)})\n")
            text.append("Assignment: " + ", ".join(
                f"x{v}={'true' if val else 'false'}" for v, val in enumerate(found.assignment, start=1)) + "\n")
            for c in f.clauses:
                text.append(f"  value({clause_ascii(c)}) = {str(clause_value(c, found.assignment)).lower()}\n")
            records.append({"record": "certificate", "assignment": list(found.assignment)})
    return "".join(text), records
