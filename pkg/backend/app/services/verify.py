"""
Model checking.

``verify_model`` evaluates clauses exactly with the original, unrelaxed atoms.
``independent_check`` re-evaluates the pre-CNF formula through pysmt's substituter and
simplifier, which shares no code with our polynomial evaluation.
"""

from fractions import Fraction
from typing import Dict, Optional, Sequence

import structlog
from pysmt.fnode import FNode

from app.core.errors import MoveUnavailable, UnassignedVariableError
from app.models.formula import Assignment, Clause
from app.services.smt_parser import ParsedInput

logger = structlog.get_logger(__name__)


def verify_model(clauses: Sequence[Clause], asg: Assignment) -> bool:
    """True iff every clause holds under asg with exact arithmetic."""
    try:
        for cls in clauses:
            if not cls.holds(asg):
                logger.debug("Clause violated by model", cid=cls.cid)
                return False
    except (MoveUnavailable, UnassignedVariableError) as exc:
        logger.warning("Model cannot be evaluated exactly", error=str(exc))
        return False
    return True


def independent_check(parsed: ParsedInput, asg: Assignment) -> Optional[bool]:
    """Truth of the original formula under a rational model, or None if a value is irrational."""
    mgr = parsed.env.formula_manager
    real_ids = {name: i for i, name in enumerate(parsed.problem.real_names)}
    bool_ids = {name: i for i, name in enumerate(parsed.problem.bool_names)}
    subs: Dict[FNode, FNode] = {}
    for name, sym in parsed.symbols.items():
        if name in real_ids:
            v = asg.reals.get(real_ids[name], Fraction(0))
            if not isinstance(v, Fraction):
                return None
            subs[sym] = mgr.Real((v.numerator, v.denominator))
        elif name in bool_ids:
            subs[sym] = mgr.Bool(asg.bools.get(bool_ids[name], True))
    ground = parsed.env.substituter.substitute(parsed.formula, subs)
    result = parsed.env.simplifier.simplify(ground)
    if not result.is_bool_constant():
        logger.warning("Independent check did not reduce to a constant", residue=str(result))
        return False
    return result.is_true()


__all__ = ["independent_check", "verify_model"]
