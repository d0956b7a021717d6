"""
Negation normal form and bounded CNF conversion.

Formulas arrive as NNF trees over ``Literal`` leaves. ``to_cnf`` distributes
disjunctions over conjunctions while the product of the operand clause counts stays
within ``blowup_factor`` times their sum; past that, each multi-clause operand is named
by a fresh boolean ``__def<k>`` tied to it in both directions.
"""

from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

import structlog

from app.models.formula import BoolAtom, Literal

logger = structlog.get_logger(__name__)

DEF_PREFIX = "__def"


@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Lit:
    literal: Literal


@dataclass(frozen=True)
class And:
    args: Tuple["BoolExpr", ...]


@dataclass(frozen=True)
class Or:
    args: Tuple["BoolExpr", ...]


BoolExpr = Union[Const, Lit, And, Or]
ClauseLits = List[Literal]


def mk_and(args: Sequence[BoolExpr]) -> BoolExpr:
    flat: List[BoolExpr] = []
    for a in args:
        if isinstance(a, Const):
            if not a.value:
                return a
            continue
        flat.extend(a.args if isinstance(a, And) else (a,))
    if not flat:
        return Const(True)
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def mk_or(args: Sequence[BoolExpr]) -> BoolExpr:
    flat: List[BoolExpr] = []
    for a in args:
        if isinstance(a, Const):
            if a.value:
                return a
            continue
        flat.extend(a.args if isinstance(a, Or) else (a,))
    if not flat:
        return Const(False)
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


def negate(e: BoolExpr) -> BoolExpr:
    """NNF of the negation."""
    if isinstance(e, Const):
        return Const(not e.value)
    if isinstance(e, Lit):
        return Lit(e.literal.negate())
    if isinstance(e, And):
        return mk_or([negate(a) for a in e.args])
    return mk_and([negate(a) for a in e.args])


class CnfBuilder:
    """Stateful converter; definition variables are appended to ``bool_names``."""

    def __init__(self, bool_names: List[str], blowup_factor: int = 8) -> None:
        self.bool_names = bool_names
        self.blowup_factor = blowup_factor
        self.definitions = 0

    def _fresh(self) -> Literal:
        name = f"{DEF_PREFIX}{self.definitions}"
        self.definitions += 1
        self.bool_names.append(name)
        return Literal(BoolAtom(len(self.bool_names) - 1))

    def clauses(self, e: BoolExpr) -> List[ClauseLits]:
        if isinstance(e, Const):
            return [] if e.value else [[]]
        if isinstance(e, Lit):
            return [[e.literal]]
        if isinstance(e, And):
            out: List[ClauseLits] = []
            for a in e.args:
                out.extend(self.clauses(a))
            return out
        return self._disjunction(e)

    def _disjunction(self, e: Or) -> List[ClauseLits]:
        parts = [self.clauses(a) for a in e.args]
        if any(not p for p in parts):
            return []
        product = 1
        for p in parts:
            product *= len(p)
        if product <= self.blowup_factor * sum(len(p) for p in parts):
            acc: List[ClauseLits] = [[]]
            for p in parts:
                acc = [a + b for a in acc for b in p]
            return acc
        head: ClauseLits = []
        extra: List[ClauseLits] = []
        for arg, p in zip(e.args, parts):
            if len(p) == 1:
                head.extend(p[0])
                continue
            d = self._fresh()
            head.append(d)
            extra.extend([d.negate()] + c for c in p)
            extra.extend([d] + c for c in self.clauses(negate(arg)))
        logger.debug("Introduced definitions", total=self.definitions)
        return [head] + extra


def to_cnf(e: BoolExpr, bool_names: List[str], blowup_factor: int = 8) -> List[ClauseLits]:
    """Clauses equisatisfiable with e; new definition names are appended to bool_names."""
    return CnfBuilder(bool_names, blowup_factor).clauses(e)


__all__ = [
    "And",
    "BoolExpr",
    "CnfBuilder",
    "Const",
    "DEF_PREFIX",
    "Lit",
    "Or",
    "mk_and",
    "mk_or",
    "negate",
    "to_cnf",
]
