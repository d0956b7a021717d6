import random
from fractions import Fraction
from typing import List

import pytest

from app.core.errors import RootEndpointError, ZeroPolynomialError
from app.models.formula import Assignment, Clause
from app.models.intervals import Interval, IntervalSet
from app.models.numeric import AlgebraicNumber, cmp_value, negate, refine, value_eq
from app.models.upoly import UnivariatePoly, sturm_count
from app.services.roots import (
    clause_feasible_set,
    feasible_set,
    isolate_roots,
    sign_structure,
    solve_linear,
    unit_infeasible_set,
)
from app.tests.factories import (
    X,
    Y,
    eq,
    ge,
    gt,
    le,
    lt,
    neq,
    random_literal,
    random_rational,
    sqrt,
)

F = Fraction
PRIMES = [2, 3, 5, 7, 11, 13]


# ====================
# ROOT ISOLATION
# ====================


def _factored(rng: random.Random):
    p = UnivariatePoly([1])
    rationals = set()
    for _ in range(rng.randint(1, 3)):
        r = random_rational(rng)
        p = p * UnivariatePoly.linear_root(r)
        rationals.add(r)
    surds = rng.sample(PRIMES, rng.randint(0, 2))
    for q in surds:
        p = p * UnivariatePoly([-q, 0, 1])
    if rng.random() < 0.3:
        p = p * UnivariatePoly([1, 0, 1])
    return p, rationals, surds


def test_isolation_matches_known_factors():
    rng = random.Random(11)
    for _ in range(200):
        p, rationals, surds = _factored(rng)
        roots = isolate_roots(p)
        assert len(roots) == len(rationals) + 2 * len(surds)
        for a, b in zip(roots, roots[1:]):
            assert cmp_value(a, b) < 0
        assert {r for r in roots if isinstance(r, Fraction)} == rationals
        for r in roots:
            if not isinstance(r, AlgebraicNumber):
                continue
            assert (p % r.minpoly).is_zero()
            assert sturm_count(r.minpoly, r.lo, r.hi) == 1
            assert any(
                value_eq(r, sqrt(q)) or value_eq(r, negate(sqrt(q))) for q in surds
            )


def test_isolating_zero_polynomial():
    with pytest.raises(ZeroPolynomialError):
        isolate_roots(UnivariatePoly())


def test_sturm_count_rejects_root_endpoints():
    with pytest.raises(RootEndpointError):
        sturm_count(UnivariatePoly.linear_root(1), F(1), F(2))


@pytest.mark.parametrize(
    "coeffs,root",
    [([-3, 1], F(3)), ([1, 2], F(-1, 2)), ([1, 1], F(-1))],
)
def test_solve_linear(coeffs, root):
    assert solve_linear(UnivariatePoly(coeffs)) == root


def test_solve_linear_needs_degree_one():
    with pytest.raises(ValueError):
        solve_linear(UnivariatePoly([1, 0, 1]))


def test_sign_structure_of_rational_polynomial():
    st = sign_structure(UnivariatePoly([-2, 0, 1]))
    assert len(st.roots) == 2
    assert value_eq(st.roots[0], sqrt(2, positive=False))
    assert value_eq(st.roots[1], sqrt(2))
    assert st.gap_signs == (1, -1, 1)


def test_sign_structure_over_algebraic_parameter():
    q = (X * X - Y).substitute_except({0: F(0), 1: sqrt(2)}, 0)
    st = sign_structure(q)
    assert st.gap_signs == (1, -1, 1)
    assert cmp_value(st.roots[1], F(118, 100)) > 0
    assert cmp_value(st.roots[1], F(119, 100)) < 0
    assert value_eq(st.roots[0], negate(st.roots[1]))


# ====================
# FEASIBLE SETS
# ====================


def test_unit_circle_slice_is_a_point():
    asg = Assignment({}, {0: F(1), 1: F(1)})
    cls = Clause(0, (le(X * X + Y * Y - 1),))
    assert clause_feasible_set(cls, asg, 0) == IntervalSet.point(F(0))


def test_clause_union_of_literals():
    cls = Clause(0, (lt(X), gt(X - 1)))
    expected = IntervalSet(
        [Interval(None, F(0), True, True), Interval(F(1), None, True, True)]
    )
    assert clause_feasible_set(cls, Assignment({}, {0: F(0)}), 0) == expected


def test_satisfied_literal_without_x_frees_the_clause():
    cls = Clause(0, (gt(Y), gt(X - 5)))
    asg = Assignment({}, {0: F(0), 1: F(1)})
    assert clause_feasible_set(cls, asg, 0).is_full()


@pytest.mark.parametrize(
    "lit,expected",
    [
        (ge(X), IntervalSet([Interval(None, F(0), True, True)])),
        (
            le(X * X - 4),
            IntervalSet(
                [Interval(None, F(-2), True, True), Interval(F(2), None, True, True)]
            ),
        ),
        (neq(X - 1), IntervalSet.point(F(1))),
    ],
)
def test_unit_infeasible_set(lit, expected):
    x, bad = unit_infeasible_set(Clause(0, (lit,)))
    assert x == 0
    assert bad == expected


def test_unit_infeasible_needs_single_variable():
    with pytest.raises(ValueError):
        unit_infeasible_set(Clause(0, (ge(X + Y),)))


def test_algebraic_parameter():
    s = feasible_set(ge(X * Y - 2), Assignment({}, {0: F(0), 1: sqrt(2)}), 0)
    assert s.contains(sqrt(2))
    assert not s.contains(F(141, 100))
    assert s.contains(F(142, 100))


def test_double_root_over_algebraic_parameter():
    asg = Assignment({}, {0: F(0), 1: sqrt(2)})
    s = feasible_set(le((X - Y) ** 2), asg, 0)
    assert len(s) == 1
    (iv,) = s
    assert iv.is_point
    assert value_eq(iv.lo, sqrt(2))
    assert feasible_set(gt((X - Y) ** 2), asg, 0) == s.complement()


def test_conjugate_root_of_the_norm_is_not_a_root():
    q = ((X - Y) ** 2).substitute_except({1: sqrt(2)}, 0)
    st = sign_structure(q)
    assert len(st.roots) == 1
    assert value_eq(st.roots[0], sqrt(2))
    assert st.gap_signs == (1, 1)


def test_relaxed_equality_is_a_band():
    lit = eq(X * X - 2)
    asg = Assignment({}, {0: F(0)})
    strict = feasible_set(lit, asg, 0)
    band = feasible_set(lit, asg, 0, relaxed=True, eps_p=F(1, 10000))
    assert len(strict) == 2 and all(iv.is_point for iv in strict)
    assert len(band) == 2 and not any(iv.is_point for iv in band)
    assert band.contains(F(14142, 10000))
    assert not band.contains(F(0))
    assert band.contains(sqrt(2))


def _sample_points(s: IntervalSet, rng: random.Random, count: int) -> List[Fraction]:
    out = [random_rational(rng, span=8, den=16) for _ in range(count)]
    tiny = F(1, 10**6)
    for e in s.endpoints():
        if isinstance(e, Fraction):
            out.extend([e - tiny, e, e + tiny])
        else:
            r = refine(e, tiny)
            out.extend([r.lo, r.hi])
    return out


def _check_oracle(triples: int, points: int, seed: int) -> None:
    rng = random.Random(seed)
    for _ in range(triples):
        variables = rng.sample(range(3), rng.randint(1, 3))
        lit = random_literal(rng, variables, max_degree=4)
        x = rng.choice(sorted(lit.real_vars))
        asg = Assignment({}, {v: random_rational(rng) for v in range(3)})
        s = feasible_set(lit, asg, x)
        complement = feasible_set(lit.negate(), asg, x)
        assert s.intersection(complement).is_empty()
        assert s.union(complement).is_full()
        trial = asg.copy()
        for v in _sample_points(s, rng, points):
            trial.reals[x] = v
            assert s.contains(v) == lit.holds(trial), (lit, x, v)


def test_feasible_set_agrees_with_evaluation():
    _check_oracle(triples=100, points=100, seed=5)


@pytest.mark.slow
def test_feasible_set_agrees_with_evaluation_at_scale():
    _check_oracle(triples=500, points=1000, seed=17)
