import random
from fractions import Fraction

import pytest

from app.core.errors import PreprocessContradiction
from app.models.formula import Assignment
from app.models.poly import Polynomial
from app.services.preprocess import back_substitute, preprocess
from app.services.verify import verify_model
from app.tests.factories import (
    X,
    Y,
    Z,
    boolean,
    eq,
    ge,
    gt,
    le,
    planted_problem,
    problem_of,
)

F = Fraction


def test_bounds_merge_then_eliminate():
    problem = problem_of(
        [[eq(X * X + Y * Y - 25)], [ge(X - 3)], [le(X - 3)]], n_real=2
    )
    result = preprocess(problem)
    assert [c.literals for c in result.problem.clauses] == [(eq(Y * Y - 16),)]
    assert result.eliminated == frozenset({0})
    assert result.script[0].definition == Polynomial.const(3)

    full = back_substitute(result, Assignment({}, {1: F(-4)}))
    assert full.reals == {0: F(3), 1: F(-4)}
    assert verify_model(problem.clauses, full)


def test_bounds_inside_larger_clauses_are_kept():
    problem = problem_of([[ge(X - 3), boolean(0)], [le(X - 3)]], n_real=1, n_bool=1)
    result = preprocess(problem)
    assert len(result.problem.clauses) == 2
    assert not result.script


def test_linear_definition_marks_rational_only():
    problem = problem_of([[eq(Z - X - Y)], [gt(X * Y - 1)]], n_real=3)
    result = preprocess(problem)
    assert result.eliminated == frozenset({0})
    assert result.rational_only == frozenset({1, 2})
    (cls,) = result.problem.clauses
    assert 0 not in cls.real_vars

    full = back_substitute(result, Assignment({}, {1: F(1), 2: F(3)}))
    assert full.reals[0] == 2
    assert verify_model(problem.clauses, full)


def test_nonlinear_equalities_stay():
    problem = problem_of([[eq(X * Y - 1)]], n_real=2)
    assert not preprocess(problem).script


def test_unit_booleans_propagate():
    problem = problem_of([[boolean(0)], [boolean(0, True), gt(X)]], n_real=1, n_bool=1)
    result = preprocess(problem)
    assert result.fixed_bools == {0: True}
    assert [c.literals for c in result.problem.clauses] == [(gt(X),)]
    full = back_substitute(result, Assignment({}, {0: F(1)}))
    assert verify_model(problem.clauses, full)


def test_ground_literals_fold():
    problem = problem_of(
        [[ge(Polynomial.const(1))], [le(Polynomial.const(1)), gt(X)]], n_real=1
    )
    result = preprocess(problem)
    assert [c.literals for c in result.problem.clauses] == [(gt(X),)]


@pytest.mark.parametrize(
    "clauses",
    [
        [[eq(Polynomial.const(2))]],
        [[boolean(0)], [boolean(0, True)]],
        [[boolean(0)], [boolean(0, True), eq(Polynomial.const(1))]],
    ],
)
def test_contradictions(clauses):
    with pytest.raises(PreprocessContradiction):
        preprocess(problem_of(clauses, n_real=1, n_bool=1))


def test_back_substitution_extends_planted_models():
    rng = random.Random(8)
    eliminated = 0
    for _ in range(60):
        problem, model = planted_problem(rng)
        result = preprocess(problem)
        assert verify_model(result.problem.clauses, model)
        kept = {x: v for x, v in model.reals.items() if x not in result.eliminated}
        full = back_substitute(result, Assignment(dict(model.bools), kept))
        assert verify_model(problem.clauses, full)
        for x in result.eliminated:
            assert full.reals[x] == model.reals[x]
        eliminated += len(result.eliminated)
    assert eliminated >= 60
