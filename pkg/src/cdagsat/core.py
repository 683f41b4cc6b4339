"""Literals, 3-clauses, triple ranking and the string/clause-set correspondence.

A *string* lists, for every variable, the literal that an assignment makes
false: ``x_p`` appears when ``x_p = false`` and ``x̄_p`` when ``x_p = true``.
The clause set of a string is every 3-clause built from its literals, which
is exactly the set of 3-clauses the assignment falsifies.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Iterable, NamedTuple, Sequence

Assignment = tuple[bool, ...]

BAR = "̄"  # combining macron


class CdagSatError(Exception):
    """Base class for every error raised by this package."""


class DuplicateVariable(CdagSatError, ValueError):
    pass


class IncompatibleSet(CdagSatError, ValueError):
    pass


class IncompleteCover(CdagSatError, ValueError):
    pass


class InvalidArity(CdagSatError, ValueError):
    pass


class Literal(NamedTuple):
    var: int
    negated: bool = False

    @classmethod
    def from_int(cls, value: int) -> Literal:
        if value == 0:
            raise ValueError("0 is not a literal")
        return cls(abs(value), value < 0)

    def to_int(self) -> int:
        return -self.var if self.negated else self.var

    def complement(self) -> Literal:
        return Literal(self.var, not self.negated)

    @property
    def index(self) -> int:
        return literal_index(self)

    def __str__(self) -> str:
        return f"x{BAR}_{self.var}" if self.negated else f"x_{self.var}"


def literal_index(lit: Literal) -> int:
    """Row/column of ``lit`` in a removal-condition grid (1-based)."""
    return 2 * lit.var if lit.negated else 2 * lit.var - 1


def literal_of_index(index: int) -> Literal:
    return Literal((index + 1) // 2, index % 2 == 0)


@dataclass(frozen=True, slots=True)
class Clause3:
    lits: tuple[Literal, Literal, Literal]

    def __post_init__(self) -> None:
        if len(self.lits) != 3:
            raise ValueError("a 3-clause holds exactly three literals")
        a, b, c = self.lits
        if not (a.var < b.var < c.var):
            raise ValueError(f"clause literals not normalized: {self.lits}")
        if a.var < 1:
            raise ValueError("variables are numbered from 1")

    @property
    def triple(self) -> tuple[int, int, int]:
        a, b, c = self.lits
        return (a.var, b.var, c.var)

    @property
    def column(self) -> int:
        return column_of(self)

    def to_ints(self) -> tuple[int, int, int]:
        a, b, c = self.lits
        return (a.to_int(), b.to_int(), c.to_int())

    @classmethod
    def from_ints(cls, a: int, b: int, c: int) -> Clause3:
        return make_clause(Literal.from_int(a), Literal.from_int(b), Literal.from_int(c))

    def __str__(self) -> str:
        return "(" + " ∨ ".join(str(lit) for lit in self.lits) + ")"


def make_clause(a: Literal, b: Literal, c: Literal) -> Clause3:
    """Build the variable-ascending clause over three distinct variables."""
    if len({a.var, b.var, c.var}) != 3:
        raise DuplicateVariable(f"clause repeats a variable: {a}, {b}, {c}")
    return Clause3(tuple(sorted((a, b, c))))  # type: ignore[arg-type]


def compatible(c1: Clause3, c2: Clause3) -> bool:
    """True iff no variable occurs with opposite polarity in the two clauses."""
    return literals_compatible(c1.lits, c2.lits)


def literals_compatible(xs: Iterable[Literal], ys: Iterable[Literal]) -> bool:
    polarity = {lit.var: lit.negated for lit in xs}
    return all(polarity.get(lit.var, lit.negated) == lit.negated for lit in ys)


# -- triple ranking -----------------------------------------------------------


@lru_cache(maxsize=64)
def triples(n: int) -> tuple[tuple[int, int, int], ...]:
    """All triples ``i < j < k`` over ``1..n`` in lexicographic order."""
    return tuple(combinations(range(1, n + 1), 3))


@lru_cache(maxsize=64)
def _rank_table(n: int) -> dict[tuple[int, int, int], int]:
    return {t: r for r, t in enumerate(triples(n), start=1)}


def triple_rank(t: Sequence[int], n: int) -> int:
    try:
        return _rank_table(n)[tuple(t)]  # type: ignore[index]
    except KeyError:
        raise ValueError(f"{tuple(t)} is not a valid triple for n={n}") from None


def rank_to_triple(r: int, n: int) -> tuple[int, int, int]:
    if not 1 <= r <= comb(n, 3):
        raise ValueError(f"rank {r} out of range 1..{comb(n, 3)}")
    return triples(n)[r - 1]


def column_of(c: Clause3) -> int:
    """Sign-pattern column 1..8; the first literal's negation is the high bit."""
    a, b, d = c.lits
    return 1 + 4 * a.negated + 2 * b.negated + d.negated


def clause_at(t: Sequence[int], col: int) -> Clause3:
    if not 1 <= col <= 8:
        raise ValueError(f"column {col} out of range 1..8")
    bits = col - 1
    i, j, k = t
    return Clause3((Literal(i, bool(bits & 4)), Literal(j, bool(bits & 2)), Literal(k, bool(bits & 1))))


# -- strings, clause sets, assignments ----------------------------------------


@dataclass(frozen=True, slots=True)
class StringW:
    """Polarity sequence; ``negated[p-1]`` tells whether position p holds x̄_p."""

    negated: tuple[bool, ...]

    @property
    def n(self) -> int:
        return len(self.negated)

    @property
    def lits(self) -> tuple[Literal, ...]:
        return tuple(Literal(p, neg) for p, neg in enumerate(self.negated, start=1))

    @classmethod
    def from_lits(cls, lits: Sequence[Literal]) -> StringW:
        for p, lit in enumerate(lits, start=1):
            if lit.var != p:
                raise ValueError(f"position {p} holds a literal over x_{lit.var}")
        return cls(tuple(lit.negated for lit in lits))

    @classmethod
    def parse(cls, text: str) -> StringW:
        """Inverse of ``str``: accepts ``"x_1x̄_2x_3"``."""
        negs: list[bool] = []
        for p, chunk in enumerate(text.split("x")[1:], start=1):
            neg = chunk.startswith(BAR)
            var = int(chunk.lstrip(BAR).lstrip("_"))
            if var != p:
                raise ValueError(f"position {p} holds x_{var}")
            negs.append(neg)
        return cls(tuple(negs))

    def __str__(self) -> str:
        return "".join(str(lit) for lit in self.lits)


def clause_set_of_string(w: StringW) -> list[Clause3]:
    """All C(n,3) clauses over w's literals, in triple-rank order."""
    lits = w.lits
    return [Clause3((lits[i - 1], lits[j - 1], lits[k - 1])) for i, j, k in triples(w.n)]


def string_of_clause_set(cs: Iterable[Clause3], n: int) -> StringW:
    """Recover the unique string whose clause set contains every clause of ``cs``."""
    slots: list[Literal | None] = [None] * n
    for clause in cs:
        for lit in clause.lits:
            if lit.var > n:
                raise ValueError(f"{clause} mentions x_{lit.var} beyond n={n}")
            seen = slots[lit.var - 1]
            if seen is not None and seen != lit:
                raise IncompatibleSet(f"{seen} conflicts with {lit} in {clause}")
            slots[lit.var - 1] = lit
    missing = [p for p, lit in enumerate(slots, start=1) if lit is None]
    if missing:
        raise IncompleteCover(f"variables never covered: {missing}")
    return StringW.from_lits(slots)  # type: ignore[arg-type]


def assignment_of_string(w: StringW) -> Assignment:
    # x̄_p in the string is the literal made false, so x_p is true
    return tuple(w.negated)


def string_of_assignment(a: Sequence[bool]) -> StringW:
    return StringW(tuple(bool(v) for v in a))


def clause_value(c: Clause3, a: Sequence[bool]) -> bool:
    return any(a[lit.var - 1] != lit.negated for lit in c.lits)
