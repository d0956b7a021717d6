from fractions import Fraction

from app.models.intervals import Interval, IntervalSet
from app.models.numeric import negate
from app.tests.factories import sqrt

F = Fraction


def closed(lo, hi):
    return Interval(lo, hi)


def test_of_merges_touching_pieces():
    s = IntervalSet.of([Interval(F(1), F(2), True, True), closed(F(0), F(1))])
    assert s == IntervalSet([Interval(F(0), F(2), False, True)])


def test_of_keeps_a_missing_point_apart():
    s = IntervalSet.of([Interval(F(0), F(1), False, True), Interval(F(1), F(2), True, False)])
    assert len(s) == 2
    assert not s.contains(F(1))


def test_complement_of_point():
    s = IntervalSet.point(F(1)).complement()
    assert s == IntervalSet(
        [Interval(None, F(1), True, True), Interval(F(1), None, True, True)]
    )


def test_full_and_empty():
    assert IntervalSet.full().complement().is_empty()
    assert IntervalSet.empty().complement().is_full()


def test_intersection_and_union():
    a = IntervalSet([closed(F(0), F(3))])
    b = IntervalSet([Interval(F(2), None, True, True)])
    assert a.intersection(b) == IntervalSet([Interval(F(2), F(3), True, False)])
    assert a.union(b) == IntervalSet([Interval(F(0), None, False, True)])


def test_difference():
    a = IntervalSet([closed(F(0), F(4))])
    b = IntervalSet([closed(F(1), F(2))])
    assert a.difference(b) == IntervalSet(
        [Interval(F(0), F(1), False, True), Interval(F(2), F(4), True, False)]
    )


def test_algebraic_endpoints():
    r2 = sqrt(2)
    s = IntervalSet([Interval(negate(r2), r2, False, False)])
    assert s.contains(r2)
    assert s.contains(F(7, 5))
    assert not s.contains(F(3, 2))
    assert not s.complement().contains(F(0))
    assert s.complement().contains(F(-3, 2))


def test_point_interval_flags():
    assert closed(F(1), F(1)).is_point
    assert not Interval(None, F(1)).is_point
    assert Interval(None, None).lo_open and Interval(None, None).hi_open
