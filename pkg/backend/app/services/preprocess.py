"""
Clause-set simplification before search.

Runs to a fixpoint: ground literals are folded, unit boolean clauses are propagated,
unit bounds p >= 0 and p <= 0 on the same polynomial are merged into p = 0, and
variables are eliminated through unit equations c*x + q = 0 with rational c and a
linear q over at most two variables. Every elimination is recorded so a model of the
simplified problem can be carried back to the original variables.
"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

import structlog

from app.core.errors import PreprocessContradiction
from app.models.formula import (
    Assignment,
    AtomKind,
    BoolAtom,
    Clause,
    CmpAtom,
    Literal,
    Problem,
)
from app.models.poly import Polynomial

logger = structlog.get_logger(__name__)

Work = List[List[Literal]]


@dataclass(frozen=True)
class Elimination:
    """x := definition, the definition free of x."""

    var: int
    definition: Polynomial


@dataclass
class PreprocessResult:
    problem: Problem
    script: List[Elimination] = field(default_factory=list)
    fixed_bools: Dict[int, bool] = field(default_factory=dict)
    rational_only: FrozenSet[int] = frozenset()

    @property
    def eliminated(self) -> FrozenSet[int]:
        return frozenset(e.var for e in self.script)


def _fold_ground(work: Work) -> Tuple[Work, bool]:
    out: Work = []
    changed = False
    empty = Assignment()
    for lits in work:
        kept: List[Literal] = []
        satisfied = False
        for lit in lits:
            atom = lit.atom
            if isinstance(atom, CmpAtom) and atom.poly.is_constant():
                changed = True
                if lit.holds(empty):
                    satisfied = True
                    break
                continue
            kept.append(lit)
        if satisfied:
            continue
        if not kept:
            raise PreprocessContradiction("a clause folded to false")
        out.append(kept)
    return out, changed


def _propagate_bools(work: Work, fixed: Dict[int, bool]) -> Tuple[Work, bool]:
    units: Dict[int, bool] = {}
    for lits in work:
        if len(lits) == 1 and isinstance(lits[0].atom, BoolAtom):
            var = lits[0].atom.var
            value = not lits[0].negated
            if units.get(var, value) != value:
                raise PreprocessContradiction(f"boolean {var} forced both ways")
            units[var] = value
    if not units:
        return work, False
    fixed.update(units)
    out: Work = []
    for lits in work:
        kept: List[Literal] = []
        satisfied = False
        for lit in lits:
            atom = lit.atom
            if isinstance(atom, BoolAtom) and atom.var in units:
                if units[atom.var] != lit.negated:
                    satisfied = True
                    break
                continue
            kept.append(lit)
        if satisfied:
            continue
        if not kept:
            raise PreprocessContradiction("unit propagation derived the empty clause")
        out.append(kept)
    return out, True


def _as_lower_bound(lit: Literal) -> Optional[Polynomial]:
    """q with lit equivalent to q >= 0, for non-negated bound literals."""
    atom = lit.atom
    if lit.negated or not isinstance(atom, CmpAtom):
        return None
    if atom.kind is AtomKind.GE:
        return atom.poly
    if atom.kind is AtomKind.LE:
        return -atom.poly
    return None


def _merge_bounds(work: Work) -> Tuple[Work, bool]:
    seen: Dict[Polynomial, int] = {}
    merged: Dict[int, Polynomial] = {}
    dropped: Set[int] = set()
    for i, lits in enumerate(work):
        if len(lits) != 1:
            continue
        q = _as_lower_bound(lits[0])
        if q is None:
            continue
        partner = seen.get(-q)
        if partner is not None and partner not in dropped and partner not in merged:
            merged[partner] = lits[0].atom.poly
            dropped.add(i)
        else:
            seen.setdefault(q, i)
    if not merged:
        return work, False
    out: Work = []
    for i, lits in enumerate(work):
        if i in dropped:
            continue
        if i in merged:
            out.append([Literal(CmpAtom(merged[i], AtomKind.EQ))])
        else:
            out.append(lits)
    return out, True


def _elimination_of(lit: Literal) -> Optional[Elimination]:
    atom = lit.atom
    if lit.negated or not isinstance(atom, CmpAtom) or atom.kind is not AtomKind.EQ:
        return None
    p = atom.poly
    for x in sorted(p.variables):
        if p.degree_in(x) != 1:
            continue
        parts = p.coefficients_in(x)
        c = parts[1]
        if not c.is_constant():
            continue
        q = parts.get(0, Polynomial())
        if q.total_degree > 1 or len(q.variables) > 2:
            continue
        return Elimination(x, q * (-1 / c.constant_term))
    return None


def _eliminate(work: Work, script: List[Elimination]) -> Tuple[Work, bool]:
    for i, lits in enumerate(work):
        if len(lits) != 1:
            continue
        elim = _elimination_of(lits[0])
        if elim is None:
            continue
        script.append(elim)
        out: Work = []
        for j, other in enumerate(work):
            if j == i:
                continue
            out.append([_substitute(lit, elim) for lit in other])
        logger.debug("Eliminated variable", var=elim.var, definition=repr(elim.definition))
        return out, True
    return work, False


def _substitute(lit: Literal, elim: Elimination) -> Literal:
    atom = lit.atom
    if not isinstance(atom, CmpAtom) or elim.var not in atom.poly.variables:
        return lit
    poly = atom.poly.substitute(elim.var, elim.definition)
    return Literal(CmpAtom(poly, atom.kind), lit.negated)


def preprocess(problem: Problem) -> PreprocessResult:
    """Simplify the clause set to a fixpoint.

    Raises:
        PreprocessContradiction: If the empty clause is derived.
    """
    work: Work = [list(c.literals) for c in problem.clauses]
    if any(not lits for lits in work):
        raise PreprocessContradiction("input contains the empty clause")
    fixed: Dict[int, bool] = {}
    script: List[Elimination] = []
    changed = True
    while changed:
        work, folded = _fold_ground(work)
        work, propagated = _propagate_bools(work, fixed)
        changed = folded or propagated
        if not changed:
            work, changed = _merge_bounds(work)
        if not changed:
            work, changed = _eliminate(work, script)

    deduped = [list(dict.fromkeys(lits)) for lits in work]
    rational_only: Set[int] = set()
    for elim in script:
        rational_only |= elim.definition.variables
    simplified = problem.with_clauses([Clause(0, tuple(lits)) for lits in deduped])
    logger.info(
        "Preprocessed",
        clauses_before=len(problem.clauses),
        clauses_after=len(simplified.clauses),
        eliminated=len(script),
        fixed_bools=len(fixed),
    )
    return PreprocessResult(simplified, script, fixed, frozenset(rational_only))


def back_substitute(result: PreprocessResult, asg: Assignment) -> Assignment:
    """Extend a model of the simplified problem to the original variables."""
    out = asg.copy()
    out.bools.update(result.fixed_bools)
    for elim in reversed(result.script):
        out.reals[elim.var] = elim.definition.evaluate(out.reals)
    return out


__all__ = ["Elimination", "PreprocessResult", "back_substitute", "preprocess"]
