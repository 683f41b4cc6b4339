"""Layered clause DAG built per root clause, plus its source matrix.

Columns are keyed by triple rank. A node's children are the nodes of the
next populated column whose clauses are compatible with it; edges are
re-derived after every structural change (``Cdag.relink``), so the graph is
layered and acyclic by construction. Left/right child lists only record
which insertion side created the child.
"""

from __future__ import annotations

import bisect
import enum
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Callable, Iterator, Sequence

from .core import (
    Assignment,
    Clause3,
    Literal,
    assignment_of_string,
    clause_at,
    compatible,
    literals_compatible,
    string_of_clause_set,
    triple_rank,
    triples,
)
from .matrix import (
    CDAG_GC,
    SOURCE,
    ClauseMatrix,
    RemovalConditions,
    find_removal_conditions,
    garbage_collect,
    matrix_is_valid,
)
from .trace import Trace

LEFT = "left"
RIGHT = "right"


@dataclass(eq=False)
class Node:
    clause: Clause3
    rank: int
    side: str | None = None
    left: list[Node] = field(default_factory=list)
    right: list[Node] = field(default_factory=list)

    @property
    def children(self) -> list[Node]:
        return self.left + self.right

    def __repr__(self) -> str:
        return f"Node({self.clause}, rank={self.rank})"


class Cdag:
    def __init__(self, n: int, root: Clause3) -> None:
        self.n = n
        node = Node(root, triple_rank(root.triple, n))
        self.root: Node | None = node
        self.columns: dict[int, list[Node]] = {node.rank: [node]}
        self._ranks: list[int] = [node.rank]

    @property
    def length(self) -> int:
        return len(self._ranks)

    @property
    def ranks(self) -> list[int]:
        return list(self._ranks)

    def column(self, rank: int) -> list[Node]:
        return self.columns.get(rank, [])

    def nodes(self) -> Iterator[Node]:
        for r in self._ranks:
            yield from self.columns[r]

    def node_count(self) -> int:
        return sum(len(col) for col in self.columns.values())

    def find(self, clause: Clause3) -> Node | None:
        rank = triple_rank(clause.triple, self.n)
        for node in self.columns.get(rank, ()):
            if node.clause == clause:
                return node
        return None

    def __contains__(self, clause: Clause3) -> bool:
        return self.find(clause) is not None

    def add(self, clause: Clause3, side: str | None) -> Node:
        """Place ``clause`` in its column unless already present. Call ``relink`` afterwards."""
        existing = self.find(clause)
        if existing is not None:
            return existing
        rank = triple_rank(clause.triple, self.n)
        node = Node(clause, rank, side)
        if rank not in self.columns:
            self.columns[rank] = []
            bisect.insort(self._ranks, rank)
        self.columns[rank].append(node)
        return node

    def remove(self, node: Node) -> None:
        col = self.columns[node.rank]
        col.remove(node)
        pos = self._ranks.index(node.rank)
        if pos > 0:
            for parent in self.columns[self._ranks[pos - 1]]:
                parent.left = [x for x in parent.left if x is not node]
                parent.right = [x for x in parent.right if x is not node]
        if not col:
            del self.columns[node.rank]
            self._ranks.pop(pos)
        if node is self.root:
            self.root = None

    def relink(self) -> None:
        for a, b in zip(self._ranks, self._ranks[1:]):
            nxt = self.columns[b]
            for y in self.columns[a]:
                kids = [z for z in nxt if compatible(y.clause, z.clause)]
                y.left = [z for z in kids if z.side != RIGHT]
                y.right = [z for z in kids if z.side == RIGHT]
        if self._ranks:
            for y in self.columns[self._ranks[-1]]:
                y.left, y.right = [], []

    def copy(self) -> Cdag:
        out = Cdag.__new__(Cdag)
        out.n = self.n
        out.root = None
        out.columns = {}
        out._ranks = list(self._ranks)
        for r in self._ranks:
            out.columns[r] = [Node(x.clause, x.rank, x.side) for x in self.columns[r]]
        if self.root is not None:
            out.root = out.find(self.root.clause)
        out.relink()
        return out

    def snapshot(self) -> tuple[tuple[int, tuple[Clause3, ...]], ...]:
        """Column contents in rank order; equal snapshots mean equal graphs."""
        return tuple((r, tuple(x.clause for x in self.columns[r])) for r in self._ranks)

    def edges(self) -> set[tuple[Clause3, Clause3]]:
        return {(y.clause, z.clause) for y in self.nodes() for z in y.children}


# -- source matrix ------------------------------------------------------------


@dataclass
class SourceMatrix:
    sm: ClauseMatrix
    lrc: RemovalConditions
    valid: bool
    root: Clause3


def _compatible_mask(root: Clause3, t: tuple[int, int, int]) -> int:
    mask = 0
    for col in range(1, 9):
        if compatible(root, clause_at(t, col)):
            mask |= 1 << (col - 1)
    return mask


def generate_sm(cm: ClauseMatrix, prc: RemovalConditions, root_column: int) -> SourceMatrix:
    """Restrict ``cm`` to clauses compatible with the chosen first-row root and propagate."""
    ts = triples(cm.n)
    root = clause_at(ts[0], root_column)
    if not cm.alive_cell(1, root_column):
        raise ValueError(f"root cell (1, {root_column}) is not alive")
    rows = [1 << (root_column - 1)]
    for t, mask in zip(ts[1:], cm.rows[1:]):
        rows.append(mask & _compatible_mask(root, t))
    sm = ClauseMatrix(cm.n, rows, dict(cm.removed))
    for r, (before, after) in enumerate(zip(cm.rows, rows), start=1):
        for col in range(1, 9):
            bit = 1 << (col - 1)
            if before & bit and not after & bit:
                sm.removed[(r, col)] = SOURCE
    lrc = prc.copy()
    find_removal_conditions(sm, lrc)
    garbage_collect(sm, lrc)
    return SourceMatrix(sm, lrc, matrix_is_valid(sm), root)


# -- insertion, merge, collection ---------------------------------------------


def list_clauses_of_d(d: Sequence[Literal]) -> list[Clause3]:
    lits = sorted(d)
    if len({lit.var for lit in lits}) != len(lits):
        raise ValueError(f"literal set repeats a variable: {lits}")
    return [Clause3(trip) for trip in combinations(lits, 3)]


def compatible_d_with_cdag(d: Sequence[Literal], cdag: Cdag, target: Node, lrc: RemovalConditions) -> bool:
    """Frontier sweep from the root through nodes compatible with ``d``; does it reach ``target``?"""
    if lrc.forbids_literals(tuple(d)) or cdag.root is None:
        return False
    frontier = [cdag.root]
    while frontier and not any(x is target for x in frontier):
        nxt: list[Node] = []
        for x in frontier:
            if literals_compatible(d, x.clause.lits):
                for child in x.children:
                    if not any(child is y for y in nxt):
                        nxt.append(child)
        frontier = nxt
    return any(x is target for x in frontier)


def insert_clause(
    c: Clause3,
    cdag: Cdag,
    sm: ClauseMatrix,
    lrc: RemovalConditions,
    side: str,
    trace: Trace | None = None,
) -> bool:
    """Sweep the columns from the root, combining ``c`` with each reachable node.

    A node is accepted when its clause agrees with ``c`` and the combined
    literal set passes ``compatible_d_with_cdag``; the clauses of that set
    missing from the graph are added. Fails if any such clause is dead in
    ``sm``, if the sweep stops before the last populated column, or if ``c``
    itself never made it into the graph.
    """
    if not sm.alive(c):
        if trace is not None:
            trace.emit("insert_blocked", clause=str(c), side=side, dead=str(c))
        return False
    count = cdag.length
    frontier = [cdag.root] if cdag.root is not None else []
    added = 0
    while frontier and count > 0:
        nxt: list[Node] = []
        for x in frontier:
            if not compatible(x.clause, c):
                continue
            d = sorted(set(x.clause.lits) | set(c.lits))
            if not compatible_d_with_cdag(d, cdag, x, lrc):
                continue
            wanted = list_clauses_of_d(d)
            for clause in wanted:
                if not sm.alive(clause):
                    if trace is not None:
                        trace.emit("insert_blocked", clause=str(c), side=side, dead=str(clause))
                    return False
            for child in x.children:
                if not any(child is y for y in nxt):
                    nxt.append(child)
            for clause in wanted:
                if clause not in cdag:
                    cdag.add(clause, side)
                    added += 1
        frontier = nxt
        count -= 1
    cdag.relink()
    # a one-column graph finishes its sweep trivially, so also demand c was placed
    ok = count == 0 and c in cdag
    if trace is not None:
        trace.emit("insert", clause=str(c), side=side, ok=ok, added=added)
    return ok


def merge(a: Cdag | None, b: Cdag | None) -> Cdag | None:
    """Column-wise union; nodes holding the same clause in the same column are one node."""
    if a is None:
        return b
    if b is None:
        return a
    if a.root is None or b.root is None or a.root.clause != b.root.clause:
        raise ValueError("merged graphs must share their root clause")
    out = a.copy()
    for node in b.nodes():
        out.add(node.clause, node.side)
    out.relink()
    return out


def gc_cdag(cdag: Cdag, sm: ClauseMatrix, lrc: RemovalConditions, trace: Trace | None = None) -> bool:
    """Drop childless non-final nodes (last column first), killing their clauses in ``sm``."""
    removed = 0
    ranks = cdag.ranks
    for rank in reversed(ranks[:-1]):
        for node in list(cdag.column(rank)):
            if not node.children:
                sm.kill_clause(node.clause, CDAG_GC)
                cdag.remove(node)
                removed += 1
    garbage_collect(sm, lrc)
    for node in list(cdag.nodes()):
        if not sm.alive(node.clause):
            cdag.remove(node)
            removed += 1
    cdag.relink()
    if trace is not None and removed:
        trace.emit("gc", removed=removed, sm_alive=sm.alive_count())
    return removed > 0


# -- construction --------------------------------------------------------------


@dataclass
class CdagOutcome:
    success: bool
    cdag: Cdag | None
    source: SourceMatrix
    restarts: int = 0


def generate_cdag(
    cm: ClauseMatrix,
    prc: RemovalConditions,
    root_column: int,
    trace: Trace | None = None,
    observer: Callable[[str, int, Cdag], None] | None = None,
) -> CdagOutcome:
    """Grow the graph stage by stage (variables 4..n) from one first-row root.

    Each stage inserts ``(l1 ∨ l2 ∨ x_i)`` into one copy and ``(l1 ∨ l2 ∨ x̄_i)``
    into another, merges the survivors and garbage-collects. Any collection
    restarts the stages from a bare root on the shrunken source matrix.
    """
    source = generate_sm(cm, prc, root_column)
    sm, lrc, root = source.sm, source.lrc, source.root
    if trace is not None:
        trace.emit(
            "source",
            root=str(root),
            column=root_column,
            valid=source.valid,
            alive=sm.alive_count(),
            units=[str(u) for u in lrc.units()],
        )
    if not source.valid:
        return CdagOutcome(False, None, source)

    l1, l2 = root.lits[0], root.lits[1]
    restarts = 0
    while True:
        cdag = Cdag(cm.n, root)
        restarted = False
        for i in range(4, cm.n + 1):
            if trace is not None:
                trace.emit("stage", i=i, restart=restarts)
            c1 = Clause3((l1, l2, Literal(i, False)))
            c2 = Clause3((l1, l2, Literal(i, True)))
            left = right = None
            if sm.alive(c1):
                attempt = cdag.copy()
                if insert_clause(c1, attempt, sm, lrc, LEFT, trace):
                    left = attempt
                    if observer is not None:
                        observer(LEFT, i, attempt)
            if sm.alive(c2):
                attempt = cdag.copy()
                if insert_clause(c2, attempt, sm, lrc, RIGHT, trace):
                    right = attempt
                    if observer is not None:
                        observer(RIGHT, i, attempt)
            merged = merge(left, right)
            if merged is None:
                if trace is not None:
                    trace.emit("stage_failed", i=i)
                return CdagOutcome(False, None, source, restarts)
            cdag = merged
            if trace is not None:
                trace.emit("merge", i=i, columns=cdag.length, nodes=cdag.node_count())
            if observer is not None:
                observer("merge", i, cdag)
            if gc_cdag(cdag, sm, lrc, trace):
                if not matrix_is_valid(sm):
                    if trace is not None:
                        trace.emit("source_invalid", i=i)
                    return CdagOutcome(False, None, source, restarts)
                restarts += 1
                restarted = True
                if trace is not None:
                    trace.emit("restart", count=restarts, sm_alive=sm.alive_count())
                break
        if not restarted:
            return CdagOutcome(matrix_is_valid(sm), cdag, source, restarts)


# -- certificate extraction ------------------------------------------------------


class Extraction(enum.Enum):
    FOUND = "found"
    NOT_FOUND = "notFound"
    BUDGET_EXHAUSTED = "budgetExhausted"


@dataclass
class ExtractionResult:
    status: Extraction
    assignment: Assignment | None
    visits: int
    path: list[Clause3] = field(default_factory=list)


DEFAULT_NODE_BUDGET = 10**6


def extract_certificate(cdag: Cdag, n: int, node_budget: int = DEFAULT_NODE_BUDGET) -> ExtractionResult:
    """Depth-first search for a root-to-leaf path of pairwise compatible clauses."""
    if cdag.root is None or cdag.length != comb(n, 3):
        return ExtractionResult(Extraction.NOT_FOUND, None, 0)
    depth_needed = cdag.length
    root = cdag.root
    polarity: dict[int, bool] = {lit.var: lit.negated for lit in root.clause.lits}
    path = [root]
    newly_set: list[list[int]] = [[]]
    stack = [iter(root.children)]
    visits = 1
    while len(path) < depth_needed:
        if not stack:
            return ExtractionResult(Extraction.NOT_FOUND, None, visits)
        for child in stack[-1]:
            visits += 1
            if visits > node_budget:
                return ExtractionResult(Extraction.BUDGET_EXHAUSTED, None, visits)
            if all(polarity.get(lit.var, lit.negated) == lit.negated for lit in child.clause.lits):
                fresh = [lit.var for lit in child.clause.lits if lit.var not in polarity]
                for lit in child.clause.lits:
                    polarity[lit.var] = lit.negated
                path.append(child)
                newly_set.append(fresh)
                stack.append(iter(child.children))
                break
        else:
            stack.pop()
            path.pop()
            for var in newly_set.pop():
                del polarity[var]
            if not path:
                return ExtractionResult(Extraction.NOT_FOUND, None, visits)
    clauses = [x.clause for x in path]
    w = string_of_clause_set(clauses, n)
    return ExtractionResult(Extraction.FOUND, assignment_of_string(w), visits, clauses)
