from fractions import Fraction

import pytest

from app.core.errors import MoveUnavailable, UnassignedVariableError
from app.models.extension import ExtensionPoly
from app.models.numeric import cmp_value
from app.models.poly import Polynomial
from app.models.upoly import UnivariatePoly, gcd, sturm_count, value_annihilator
from app.tests.factories import X, Y, Z, sqrt

F = Fraction


def test_arithmetic_and_degrees():
    p = (X + Y) ** 2 - X * X
    assert p == Y * Y + X * Y * 2
    assert p.degree_in(0) == 1
    assert p.degree_in(1) == 2
    assert p.total_degree == 2
    assert (p - p).is_zero()
    assert p.is_linear_in(0)
    assert not p.is_linear_in(1)
    assert p.is_linear_in(2)


def test_leading_coefficient_and_constant_term():
    p = X * X * -3 + Y + 7
    assert p.leading_coefficient == -3
    assert p.constant_term == 7
    assert Polynomial.const(5).leading_coefficient == 5


def test_coefficients_in():
    p = X * X * Y + X * 3 + Y - 1
    parts = p.coefficients_in(0)
    assert parts[2] == Y
    assert parts[1] == Polynomial.const(3)
    assert parts[0] == Y - 1


def test_substitute():
    p = X * Y + Z
    assert p.substitute(0, Y + 1) == Y * Y + Y + Z


def test_evaluate_rational():
    p = X * X * Y - Z
    assert p.evaluate({0: F(1, 2), 1: F(4), 2: F(3)}) == -2


def test_evaluate_with_algebraic_value():
    p = X * X * Y
    assert p.evaluate({0: sqrt(2), 1: F(3)}) == 6
    q = X + 1
    v = q.evaluate({0: sqrt(2)})
    assert cmp_value(v, F(12, 5)) == 1 and cmp_value(v, F(5, 2)) == -1


def test_sign_at():
    r2 = sqrt(2)
    assert (X * X - 2).sign_at({0: r2}) == 0
    assert (X * Y).sign_at({0: r2, 1: F(-1)}) == -1
    assert (X * X - 2).sign_at({0: r2}, F(1, 10)) == 1


def test_substitute_except_rational():
    p = X * X * Y + Y * 2 - 1
    q = p.substitute_except({1: F(3)}, 0)
    assert q == UnivariatePoly([5, 0, 3])


def test_substitute_except_algebraic_parameter():
    q = (X * Y - 2).substitute_except({1: sqrt(2)}, 0)
    assert isinstance(q, ExtensionPoly)
    assert q.sign_at(F(2)) == 1
    assert q.sign_at(F(1)) == -1


def test_two_distinct_algebraic_values():
    with pytest.raises(MoveUnavailable):
        (X * Y).evaluate({0: sqrt(2), 1: sqrt(3)})


def test_missing_variable():
    with pytest.raises(UnassignedVariableError):
        (X + Y).evaluate({0: F(1)})


# ====================
# RATIONAL UNIVARIATE ALGEBRA
# ====================


def test_square_free_part_and_gcd():
    x1 = UnivariatePoly.linear_root(1)
    p = x1**2 * UnivariatePoly([-2, 0, 1])
    assert p.square_free() == x1 * UnivariatePoly([-2, 0, 1])
    assert gcd(x1 * UnivariatePoly.linear_root(-2), x1 * UnivariatePoly.linear_root(3)) == x1
    assert gcd(UnivariatePoly([1, 0, 1]), x1).is_constant()


def test_division_shift_and_derivative():
    p = UnivariatePoly([-2, 0, 1])
    q, r = divmod(p * UnivariatePoly.linear_root(3) + 5, p)
    assert q == UnivariatePoly.linear_root(3)
    assert r == UnivariatePoly.constant(5)
    assert p.shift(1) == UnivariatePoly([-1, 2, 1])
    assert p.derivative() == UnivariatePoly([0, 2])
    assert UnivariatePoly([F(1, 2), F(-3, 4)]).primitive() == UnivariatePoly([-2, 3])


def test_sturm_count_distinct_roots():
    p = UnivariatePoly([0, -2, 0, 1])
    assert sturm_count(p, F(-2), F(2)) == 3
    assert sturm_count(p * p, F(-2), F(2)) == 3
    assert sturm_count(p, F(1, 2), F(2)) == 1


def test_norm_of_extension_polynomial():
    q = (X * X - Y).substitute_except({1: sqrt(2)}, 0)
    assert isinstance(q, ExtensionPoly)
    assert q.norm().primitive() == UnivariatePoly([-2, 0, 0, 0, 1])


def test_value_annihilator_of_a_sum():
    rows = [UnivariatePoly([0, 1]), UnivariatePoly([1])]
    ann = value_annihilator(
        UnivariatePoly([-2, 0, 1]), UnivariatePoly([-3, 0, 1]), rows
    )
    assert ann.primitive() == UnivariatePoly([1, 0, -10, 0, 1])


def test_vanishes_at_decides_double_roots():
    q = ((X - Y) ** 2).substitute_except({1: sqrt(2)}, 0)
    assert isinstance(q, ExtensionPoly)
    assert q.vanishes_at(sqrt(2))
    assert not q.vanishes_at(sqrt(2, positive=False))
    assert not q.vanishes_at(sqrt(3))
