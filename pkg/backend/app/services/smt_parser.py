"""
SMT-LIB v2 front end for QF_NRA scripts.

The script is read with pysmt's ``SmtLibParser`` in a fresh environment, the asserted
conjunction is translated into negation normal form over our polynomial atoms, and
``to_cnf`` turns it into a clause list. Anything outside the supported fragment raises
``SmtParseError`` naming the construct.

Example:
    from app.services.smt_parser import parse_file
    parsed = parse_file("backend/benchmarks/curated/circle.smt2")
    parsed.problem.clauses
"""

from dataclasses import dataclass, field
from fractions import Fraction
from io import StringIO
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import structlog
from pysmt.environment import Environment, reset_env
from pysmt.exceptions import PysmtException
from pysmt.fnode import FNode
from pysmt.smtlib import commands as smtcmd
from pysmt.smtlib.parser import SmtLibParser

from app.core.config import get_settings
from app.core.errors import SmtParseError
from app.models.formula import AtomKind, BoolAtom, Clause, CmpAtom, Literal, Problem
from app.models.poly import Polynomial
from app.services.cnf import BoolExpr, Const, Lit, mk_and, mk_or, to_cnf

logger = structlog.get_logger(__name__)

# Atoms are stored with a positive leading coefficient
_FLIPPED = {AtomKind.GE: AtomKind.LE, AtomKind.LE: AtomKind.GE, AtomKind.EQ: AtomKind.EQ}


@dataclass
class ParsedInput:
    """Clausal problem together with the original (pre-CNF) formula."""

    problem: Problem
    formula: FNode
    env: Environment
    symbols: Dict[str, FNode] = field(default_factory=dict)


def _rational(node: FNode) -> Fraction:
    v = node.constant_value()
    if node.is_int_constant():
        return Fraction(int(v))
    return Fraction(int(v.numerator), int(v.denominator))


class _Translator:
    """pysmt terms to polynomials, pysmt formulas to NNF."""

    def __init__(
        self,
        env: Environment,
        real_index: Dict[FNode, int],
        bool_index: Dict[FNode, int],
    ) -> None:
        self.env = env
        self.real_index = real_index
        self.bool_index = bool_index
        self._terms: Dict[FNode, Polynomial] = {}
        self._formulas: Dict[Tuple[FNode, bool], BoolExpr] = {}

    # ====================
    # TERMS
    # ====================

    def term(self, node: FNode) -> Polynomial:
        cached = self._terms.get(node)
        if cached is None:
            cached = self._term(node)
            self._terms[node] = cached
        return cached

    def _term(self, node: FNode) -> Polynomial:
        if node.is_symbol():
            if node in self.real_index:
                return Polynomial.var(self.real_index[node])
            if node.symbol_type().is_int_type():
                raise SmtParseError("Int sort", node.symbol_name())
            raise SmtParseError("symbol", f"{node.symbol_name()} is not a declared Real")
        if node.is_real_constant() or node.is_int_constant():
            return Polynomial.const(_rational(node))
        if node.is_toreal():
            return self.term(node.arg(0))
        if node.is_plus():
            out = Polynomial.const(0)
            for a in node.args():
                out = out + self.term(a)
            return out
        if node.is_minus():
            return self.term(node.arg(0)) - self.term(node.arg(1))
        if node.is_times():
            out = Polynomial.const(1)
            for a in node.args():
                out = out * self.term(a)
            return out
        if node.is_div():
            den = self.term(node.arg(1))
            if not den.is_constant():
                raise SmtParseError("division by non-constant", str(node.arg(1)))
            c = den.constant_term
            if c == 0:
                raise SmtParseError("division by zero", str(node))
            return self.term(node.arg(0)) * (1 / c)
        if node.is_pow():
            exp = self.term(node.arg(1))
            k = exp.constant_term if exp.is_constant() else None
            if k is None or k.denominator != 1 or k < 0:
                raise SmtParseError("non-natural exponent", str(node.arg(1)))
            return self.term(node.arg(0)) ** int(k)
        if node.is_ite():
            raise SmtParseError("ite over Real", "branches must both be constants")
        if node.is_function_application():
            raise SmtParseError("uninterpreted function", str(node.function_name()))
        raise SmtParseError(str(node.node_type()), str(node))

    # ====================
    # FORMULAS
    # ====================

    def formula(self, node: FNode, positive: bool = True) -> BoolExpr:
        key = (node, positive)
        cached = self._formulas.get(key)
        if cached is None:
            cached = self._formula(node, positive)
            self._formulas[key] = cached
        return cached

    def _formula(self, node: FNode, positive: bool) -> BoolExpr:
        f = self.formula
        if node.is_bool_constant():
            return Const(node.is_true() == positive)
        if node.is_symbol():
            if node not in self.bool_index:
                raise SmtParseError("symbol", f"{node.symbol_name()} is not a declared Bool")
            return Lit(Literal(BoolAtom(self.bool_index[node]), not positive))
        if node.is_not():
            return f(node.arg(0), not positive)
        if node.is_and() or node.is_or():
            parts = [f(a, positive) for a in node.args()]
            conj = node.is_and() == positive
            return mk_and(parts) if conj else mk_or(parts)
        if node.is_implies():
            a, b = node.args()
            if positive:
                return mk_or([f(a, False), f(b, True)])
            return mk_and([f(a, True), f(b, False)])
        if node.is_iff() or (node.is_equals() and node.arg(0).get_type().is_bool_type()):
            a, b = node.args()
            return mk_and(
                [
                    mk_or([f(a, False), f(b, positive)]),
                    mk_or([f(a, True), f(b, not positive)]),
                ]
            )
        if node.is_ite() and node.get_type().is_bool_type():
            c, a, b = node.args()
            return mk_and(
                [mk_or([f(c, False), f(a, positive)]), mk_or([f(c, True), f(b, positive)])]
            )
        if node.is_forall() or node.is_exists():
            raise SmtParseError("quantifier", "forall" if node.is_forall() else "exists")
        if node.is_le() or node.is_lt() or node.is_equals():
            return self._comparison(node, positive)
        raise SmtParseError(str(node.node_type()), str(node))

    def _comparison(self, node: FNode, positive: bool) -> BoolExpr:
        ite = _find_real_ite(node)
        if ite is not None:
            return self._lift_ite(node, ite, positive)
        p = self.term(node.arg(0)) - self.term(node.arg(1))
        if node.is_lt():
            # a < b is not(a - b >= 0)
            kind, negated = AtomKind.GE, positive
        else:
            kind = AtomKind.LE if node.is_le() else AtomKind.EQ
            negated = not positive
        if p.leading_coefficient < 0:
            p = -p
            kind = _FLIPPED[kind]
        return Lit(Literal(CmpAtom(p, kind), negated))

    def _lift_ite(self, atom: FNode, ite: FNode, positive: bool) -> BoolExpr:
        cond, then, other = ite.args()
        for branch in (then, other):
            if not self.term(branch).is_constant():
                raise SmtParseError("ite over Real", "branches must both be constants")
        sub = self.env.substituter.substitute
        on_then = sub(atom, {ite: then})
        on_else = sub(atom, {ite: other})
        return mk_or(
            [
                mk_and([self.formula(cond, True), self.formula(on_then, positive)]),
                mk_and([self.formula(cond, False), self.formula(on_else, positive)]),
            ]
        )


def _find_real_ite(node: FNode) -> Optional[FNode]:
    stack = list(node.args())
    seen = set()
    while stack:
        n = stack.pop()
        if n in seen:
            continue
        seen.add(n)
        if n.is_ite() and not n.get_type().is_bool_type():
            return n
        stack.extend(n.args())
    return None


def _clause_of(cid: int, lits: List[Literal]) -> Optional[Clause]:
    unique = list(dict.fromkeys(lits))
    present = set(unique)
    if any(lit.negate() in present for lit in unique):
        return None
    return Clause(cid, tuple(unique))


def parse_smt2(text: str, blowup_factor: Optional[int] = None) -> ParsedInput:
    """Parse a QF_NRA script into a clausal problem.

    Raises:
        SmtParseError: On malformed input or constructs outside the supported fragment.
    """
    factor = blowup_factor or get_settings().CNF_BLOWUP_FACTOR
    env = reset_env()
    try:
        script = SmtLibParser(environment=env).get_script(StringIO(text))
        formula = script.get_last_formula(env.formula_manager)
    except (PysmtException, ValueError, StopIteration) as exc:
        raise SmtParseError("syntax", str(exc)) from exc

    real_names: List[str] = []
    bool_names: List[str] = []
    real_index: Dict[FNode, int] = {}
    bool_index: Dict[FNode, int] = {}
    symbols: Dict[str, FNode] = {}
    for cmd in script.commands:
        if cmd.name not in (smtcmd.DECLARE_FUN, smtcmd.DECLARE_CONST):
            continue
        sym = cmd.args[0]
        name = sym.symbol_name()
        typ = sym.symbol_type()
        if typ.is_function_type():
            raise SmtParseError("uninterpreted function", name)
        if typ.is_real_type():
            real_index[sym] = len(real_names)
            real_names.append(name)
        elif typ.is_bool_type():
            bool_index[sym] = len(bool_names)
            bool_names.append(name)
        else:
            raise SmtParseError(f"{typ} sort", name)
        symbols[name] = sym

    try:
        nnf = _Translator(env, real_index, bool_index).formula(formula, True)
    except PysmtException as exc:
        raise SmtParseError("typing", str(exc)) from exc

    clauses: List[Clause] = []
    for lits in to_cnf(nnf, bool_names, factor):
        cls = _clause_of(len(clauses), lits)
        if cls is not None:
            clauses.append(cls)
    problem = Problem(real_names, bool_names, clauses)
    logger.info(
        "Parsed script",
        reals=len(real_names),
        bools=len(bool_names),
        clauses=len(clauses),
    )
    return ParsedInput(problem, formula, env, symbols)


def parse_file(path: Union[str, Path], blowup_factor: Optional[int] = None) -> ParsedInput:
    text = Path(path).read_text(encoding="utf-8")
    return parse_smt2(text, blowup_factor)


__all__ = ["ParsedInput", "parse_file", "parse_smt2"]
