"""
Clausal formula model.

Atoms are boolean variables or comparisons ``p >= 0``, ``p <= 0``, ``p = 0``; strict
comparisons are negated atoms (p > 0 is not(p <= 0)). Clauses are immutable; their
weights, truth counts and relaxation flags are search state and live in the scoreboard.
"""

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Sequence, Tuple, Union

from app.models.numeric import Value
from app.models.poly import Polynomial


class AtomKind(str, enum.Enum):
    GE = "ge"
    LE = "le"
    EQ = "eq"


@dataclass(frozen=True)
class BoolAtom:
    var: int


@dataclass(frozen=True)
class CmpAtom:
    """poly kind 0"""

    poly: Polynomial
    kind: AtomKind


Atom = Union[BoolAtom, CmpAtom]


def sign_satisfies(kind: AtomKind, s: int) -> bool:
    if kind is AtomKind.GE:
        return s >= 0
    if kind is AtomKind.LE:
        return s <= 0
    return s == 0


def relaxed_bands(kind: AtomKind, eps_p: Fraction) -> List[Tuple[Fraction, int]]:
    """The relaxed atom as (offset, required sign of p + offset) conjuncts.

    p = 0 becomes -eps_p < p < eps_p, p >= 0 becomes p > -eps_p, p <= 0 becomes
    p < eps_p.
    """
    if kind is AtomKind.GE:
        return [(eps_p, 1)]
    if kind is AtomKind.LE:
        return [(-eps_p, -1)]
    return [(-eps_p, -1), (eps_p, 1)]


@dataclass(frozen=True)
class Literal:
    atom: Atom
    negated: bool = False

    @property
    def is_arith(self) -> bool:
        return isinstance(self.atom, CmpAtom)

    @property
    def real_vars(self) -> FrozenSet[int]:
        if isinstance(self.atom, CmpAtom):
            return self.atom.poly.variables
        return frozenset()

    @property
    def relaxable(self) -> bool:
        """Only non-negated comparisons can be loosened into bands."""
        return isinstance(self.atom, CmpAtom) and not self.negated

    def negate(self) -> "Literal":
        return Literal(self.atom, not self.negated)

    def holds(
        self, asg: "Assignment", relaxed: bool = False, eps_p: Fraction = Fraction(0)
    ) -> bool:
        """Truth under asg, reading the atom in its relaxed form when asked."""
        atom = self.atom
        if isinstance(atom, BoolAtom):
            return asg.bools[atom.var] != self.negated
        if relaxed and not self.negated:
            return all(
                atom.poly.sign_at(asg.reals, offset) == want
                for offset, want in relaxed_bands(atom.kind, eps_p)
            )
        s = atom.poly.sign_at(asg.reals)
        return sign_satisfies(atom.kind, s) != self.negated


@dataclass(frozen=True)
class Clause:
    cid: int
    literals: Tuple[Literal, ...]
    real_vars: FrozenSet[int] = field(init=False)
    bool_vars: FrozenSet[int] = field(init=False)

    def __post_init__(self) -> None:
        reals: set = set()
        bools: set = set()
        for lit in self.literals:
            if isinstance(lit.atom, BoolAtom):
                bools.add(lit.atom.var)
            else:
                reals |= lit.atom.poly.variables
        object.__setattr__(self, "real_vars", frozenset(reals))
        object.__setattr__(self, "bool_vars", frozenset(bools))

    def holds(self, asg: "Assignment") -> bool:
        return any(lit.holds(asg) for lit in self.literals)


@dataclass
class Assignment:
    """Complete assignment: booleans by id and exact values for real variables."""

    bools: Dict[int, bool] = field(default_factory=dict)
    reals: Dict[int, Value] = field(default_factory=dict)

    def copy(self) -> "Assignment":
        return Assignment(dict(self.bools), dict(self.reals))


@dataclass
class Problem:
    """A clause set over named variables, as produced by the parser."""

    real_names: List[str]
    bool_names: List[str]
    clauses: List[Clause]

    def with_clauses(self, clauses: Sequence[Clause]) -> "Problem":
        renumbered = [Clause(i, c.literals) for i, c in enumerate(clauses)]
        return Problem(list(self.real_names), list(self.bool_names), renumbered)


__all__ = [
    "Assignment",
    "Atom",
    "AtomKind",
    "BoolAtom",
    "Clause",
    "CmpAtom",
    "Literal",
    "Problem",
    "relaxed_bands",
    "sign_satisfies",
]
