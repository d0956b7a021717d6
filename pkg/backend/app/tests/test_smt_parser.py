from fractions import Fraction

import pytest

from app.core.errors import SmtParseError
from app.models.formula import Assignment, BoolAtom, Literal
from app.services.smt_parser import parse_smt2
from app.services.verify import verify_model
from app.tests.factories import X, Y, eq, gt, lt

HEADER = "(set-logic QF_NRA)\n(declare-fun x () Real)\n(declare-fun y () Real)\n"


def parse(body: str):
    return parse_smt2(HEADER + body + "\n(check-sat)\n")


def test_circle_instance():
    parsed = parse(
        "(assert (= (+ (* x x) (* y y)) 25.0))\n(assert (> x 2.0))\n(assert (< x 4))"
    )
    problem = parsed.problem
    assert problem.real_names == ["x", "y"]
    literals = {c.literals for c in problem.clauses}
    assert literals == {
        (eq(X * X + Y * Y - 25),),
        (gt(X - 2),),
        (lt(X - 4),),
    }


def test_atoms_get_a_positive_leading_coefficient():
    parsed = parse("(assert (<= (- 1 x) 0))")
    (cls,) = parsed.problem.clauses
    (lit,) = cls.literals
    assert lit.atom.poly.leading_coefficient > 0
    assert verify_model(parsed.problem.clauses, Assignment({}, {0: Fraction(1), 1: Fraction(0)}))
    assert not verify_model(
        parsed.problem.clauses, Assignment({}, {0: Fraction(1, 2), 1: Fraction(0)})
    )


def test_booleans_and_connectives():
    parsed = parse_smt2(
        HEADER
        + "(declare-fun p () Bool)\n"
        + "(assert (=> p (> x 0)))\n"
        + "(assert (or p (< y 0)))\n"
    )
    problem = parsed.problem
    assert problem.bool_names == ["p"]
    flat = {lit for c in problem.clauses for lit in c.literals}
    assert Literal(BoolAtom(0), True) in flat
    assert Literal(BoolAtom(0), False) in flat
    assert gt(X) in flat and lt(Y) in flat


def test_define_fun_and_division():
    parsed = parse("(define-fun half () Real (/ x 2))\n(assert (>= half 1))")
    (cls,) = parsed.problem.clauses
    asg = Assignment({}, {0: Fraction(2), 1: Fraction(0)})
    assert cls.holds(asg)
    asg.reals[0] = Fraction(19, 10)
    assert not cls.holds(asg)


def test_ite_over_constants_is_lifted():
    parsed = parse_smt2(
        HEADER + "(declare-fun p () Bool)\n(assert (> (ite p 1.0 2.0) x))\n"
    )
    clauses = parsed.problem.clauses
    assert parsed.problem.bool_names == ["p"]
    x = Fraction(3, 2)
    assert not verify_model(clauses, Assignment({0: True}, {0: x, 1: Fraction(0)}))
    assert verify_model(clauses, Assignment({0: False}, {0: x, 1: Fraction(0)}))


def test_tautology_yields_no_clause():
    parsed = parse("(assert (or (> x 0) (not (> x 0))))")
    assert parsed.problem.clauses == []


@pytest.mark.parametrize(
    "script,construct",
    [
        ("(declare-fun f (Real) Real)\n(assert (> (f x) 0))", "uninterpreted function"),
        ("(assert (forall ((u Real)) (> u x)))", "quantifier"),
        ("(declare-fun n () Int)\n(assert (> n 0))", "Int sort"),
        ("(assert (> (/ x y) 1))", "division by non-constant"),
        ("(assert (> x", "syntax"),
    ],
)
def test_unsupported_input_names_the_construct(script, construct):
    with pytest.raises(SmtParseError) as info:
        parse(script)
    assert info.value.construct == construct
