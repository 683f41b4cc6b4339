"""Clause matrix, removal-condition grid and their propagation to fixpoint.

A matrix row is one variable triple; its eight cells are the eight sign
patterns of that triple, stored as a bitmask (bit ``col - 1`` set while the
cell is alive). A cell dies when its clause is subtracted as part of the
formula or when it carries a forbidden literal or literal pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

from .cnf_io import Formula
from .core import Clause3, InvalidArity, Literal, clause_at, literal_index, literal_of_index, triple_rank, triples

FULL_ROW = 0xFF

# phases recorded for removed cells
SUBTRACT = "subtract"
PAIR = "pair"
UNIT = "unit"
ROOT = "root"
SOURCE = "source"
CDAG_GC = "cdag"


def _bit(col: int) -> int:
    return 1 << (col - 1)


def _build_patterns() -> tuple[list[tuple[int, tuple[int, bool], tuple[int, bool]]], list[tuple[int, tuple[int, bool]]]]:
    # cell col-1 encodes polarities (pos0, pos1, pos2) as bits (4, 2, 1)
    def cols_where(fixed: dict[int, bool]) -> int:
        mask = 0
        for bits in range(8):
            negs = (bool(bits & 4), bool(bits & 2), bool(bits & 1))
            if all(negs[p] == v for p, v in fixed.items()):
                mask |= 1 << bits
        return mask

    pairs = []
    for a, b in ((0, 1), (0, 2), (1, 2)):
        for na in (False, True):
            for nb in (False, True):
                pairs.append((cols_where({a: na, b: nb}), (a, na), (b, nb)))
    units = []
    for p in (0, 1, 2):
        for neg in (False, True):
            units.append((cols_where({p: neg}), (p, neg)))

    def col_key(mask: int) -> list[int]:
        return [c for c in range(8) if mask >> c & 1]

    pairs.sort(key=lambda pat: col_key(pat[0]))
    return pairs, units


PAIR_PATTERNS, UNIT_PATTERNS = _build_patterns()


@lru_cache(maxsize=32)
def _cell_indices(n: int) -> tuple[tuple[tuple[int, int, int], ...], ...]:
    """Per row, per column: the grid indices of the cell clause's three literals."""
    out = []
    for i, j, k in triples(n):
        row = []
        for bits in range(8):
            row.append(
                (
                    2 * i if bits & 4 else 2 * i - 1,
                    2 * j if bits & 2 else 2 * j - 1,
                    2 * k if bits & 1 else 2 * k - 1,
                )
            )
        out.append(tuple(row))
    return tuple(out)


@dataclass(eq=False)
class ClauseMatrix:
    n: int
    rows: list[int]
    removed: dict[tuple[int, int], str] = field(default_factory=dict)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ClauseMatrix):
            return NotImplemented
        return self.n == other.n and self.rows == other.rows

    @property
    def row_count(self) -> int:
        return len(self.rows)

    def copy(self) -> ClauseMatrix:
        return ClauseMatrix(self.n, list(self.rows), dict(self.removed))

    def alive_cell(self, rank: int, col: int) -> bool:
        return bool(self.rows[rank - 1] & _bit(col))

    def alive(self, c: Clause3) -> bool:
        if c.lits[2].var > self.n:
            return False
        return self.alive_cell(triple_rank(c.triple, self.n), c.column)

    def kill(self, rank: int, col: int, phase: str) -> bool:
        bit = _bit(col)
        if not self.rows[rank - 1] & bit:
            return False
        self.rows[rank - 1] &= ~bit
        self.removed[(rank, col)] = phase
        return True

    def kill_clause(self, c: Clause3, phase: str) -> bool:
        return self.kill(triple_rank(c.triple, self.n), c.column, phase)

    def alive_count(self) -> int:
        return sum(bin(mask).count("1") for mask in self.rows)

    def alive_clauses(self, rank: int) -> list[Clause3]:
        t = triples(self.n)[rank - 1]
        return [clause_at(t, col) for col in range(1, 9) if self.alive_cell(rank, col)]


class RemovalConditions:
    """Symmetric 2n x 2n grid; the diagonal forbids literals, the rest forbids pairs.

    Indices are the 1-based literal indices (``x_i`` -> 2i-1, ``x̄_i`` -> 2i).
    """

    def __init__(self, n: int) -> None:
        self.n = n
        self._grid = [bytearray(2 * n + 1) for _ in range(2 * n + 1)]
        self.history: list[tuple[int, int]] = []

    @property
    def size(self) -> int:
        return 2 * self.n

    def __getitem__(self, key: tuple[int, int]) -> bool:
        a, b = key
        return bool(self._grid[a][b])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RemovalConditions):
            return NotImplemented
        return self.n == other.n and self._grid == other._grid

    def copy(self) -> RemovalConditions:
        rc = RemovalConditions.__new__(RemovalConditions)
        rc.n = self.n
        rc._grid = [bytearray(row) for row in self._grid]
        rc.history = list(self.history)
        return rc

    def forbid(self, a: int, b: int) -> bool:
        """Set entry (a, b) and its mirror; True if it was not set before."""
        if self._grid[a][b]:
            return False
        self._grid[a][b] = self._grid[b][a] = 1
        self.history.append((min(a, b), max(a, b)))
        return True

    def forbid_literal(self, lit: Literal) -> bool:
        i = literal_index(lit)
        return self.forbid(i, i)

    def forbid_pair(self, l1: Literal, l2: Literal) -> bool:
        return self.forbid(literal_index(l1), literal_index(l2))

    def units(self) -> list[Literal]:
        return [literal_of_index(i) for i in range(1, self.size + 1) if self._grid[i][i]]

    def pairs(self) -> set[frozenset[Literal]]:
        out = set()
        for a in range(1, self.size + 1):
            row = self._grid[a]
            for b in range(a + 1, self.size + 1):
                if row[b]:
                    out.add(frozenset((literal_of_index(a), literal_of_index(b))))
        return out

    def is_empty(self) -> bool:
        return not any(any(row) for row in self._grid)

    def hits(self, indices: tuple[int, ...]) -> str | None:
        """Which kind of condition a literal-index set carries: UNIT, PAIR or None."""
        g = self._grid
        if any(g[i][i] for i in indices):
            return UNIT
        for x in range(len(indices)):
            row = g[indices[x]]
            for y in range(x + 1, len(indices)):
                if row[indices[y]]:
                    return PAIR
        return None

    def forbids_literals(self, lits: tuple[Literal, ...] | list[Literal]) -> bool:
        return self.hits(tuple(literal_index(lit) for lit in lits)) is not None


def generate_cm(n: int) -> ClauseMatrix:
    if n < 3:
        raise InvalidArity(f"clause matrix needs at least 3 variables, got {n}")
    return ClauseMatrix(n, [FULL_ROW] * comb(n, 3))


def subtract(cm: ClauseMatrix, f: Formula) -> int:
    """Remove the formula's own clauses; returns how many cells died."""
    return sum(cm.kill_clause(c, SUBTRACT) for c in f.clauses)


def clause_matches_condition(c: Clause3, rc: RemovalConditions) -> bool:
    return rc.forbids_literals(c.lits)


def find_removal_conditions(matrix: ClauseMatrix, rc: RemovalConditions) -> bool:
    """Record every pair and unit condition implied by dead cells.

    Two dead cells agreeing on two literals and differing only in the third
    forbid that literal pair; four dead cells agreeing on one literal forbid
    that literal. All 12 pair and 6 unit sign patterns are checked.
    """
    new = False
    for rank, (mask, (i, j, k)) in enumerate(zip(matrix.rows, triples(matrix.n)), start=1):
        dead = ~mask & FULL_ROW
        if not dead:
            continue
        vars_ = (i, j, k)
        for pat, (pa, na), (pb, nb) in PAIR_PATTERNS:
            if dead & pat == pat:
                a = 2 * vars_[pa] if na else 2 * vars_[pa] - 1
                b = 2 * vars_[pb] if nb else 2 * vars_[pb] - 1
                new |= rc.forbid(a, b)
        for pat, (p, neg) in UNIT_PATTERNS:
            if dead & pat == pat:
                a = 2 * vars_[p] if neg else 2 * vars_[p] - 1
                new |= rc.forbid(a, a)
    return new


def remove_matching(matrix: ClauseMatrix, rc: RemovalConditions) -> int:
    removed = 0
    cells = _cell_indices(matrix.n)
    for r, mask in enumerate(matrix.rows):
        if not mask:
            continue
        for bits in range(8):
            if mask >> bits & 1:
                kind = rc.hits(cells[r][bits])
                if kind is not None:
                    matrix.kill(r + 1, bits + 1, kind)
                    removed += 1
    return removed


def garbage_collect(matrix: ClauseMatrix, rc: RemovalConditions) -> int:
    """Alternate removal and condition discovery until no new condition appears."""
    removed = 0
    while True:
        removed += remove_matching(matrix, rc)
        if not find_removal_conditions(matrix, rc):
            return removed


def matrix_is_valid(matrix: ClauseMatrix) -> bool:
    return all(matrix.rows)


def empty_rows(matrix: ClauseMatrix) -> list[int]:
    return [r for r, mask in enumerate(matrix.rows, start=1) if not mask]
