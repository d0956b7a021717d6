"""
Candidate values for literals that no single move can satisfy.

The three classes of candidates, in order: values just inside each finite endpoint of
the variable's feasible set (plus the nearest integers inside), the integers next to the
current value, and uniform draws between half and twice the current value.
"""

import random
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import structlog

from app.core.errors import EmptyIntervalError, MoveUnavailable, NoMovableVariable
from app.models.formula import Assignment, CmpAtom, Literal
from app.models.intervals import Interval, IntervalSet
from app.models.numeric import (
    Value,
    cmp_value,
    enclosure,
    exceeds_threshold,
    floor_value,
    negate,
    refine,
    shift,
    simplest_rational_in,
)
from app.services.roots import feasible_set

logger = structlog.get_logger(__name__)


def movable_vars(lit: Literal, asg: Assignment) -> List[int]:
    """Variables of lit whose polynomial stays non-constant once the others are fixed."""
    atom = lit.atom
    if not isinstance(atom, CmpAtom):
        return []
    out = []
    for x in sorted(atom.poly.variables):
        try:
            q = atom.poly.substitute_except(asg.reals, x)
        except MoveUnavailable:
            continue
        if q.degree >= 1:
            out.append(x)
    return out


def _near_lower(iv: Interval, offset: Fraction) -> List[Value]:
    lo = iv.lo
    assert lo is not None
    out: List[Value] = []
    if isinstance(lo, Fraction):
        out.append(lo + offset)
    else:
        out.append(simplest_rational_in(lo, shift(lo, offset), True, False))
    n = floor_value(lo)
    if not (isinstance(lo, Fraction) and lo == n and not iv.lo_open):
        n += 1
    out.append(Fraction(n))
    return out


def _near_upper(iv: Interval, offset: Fraction) -> List[Value]:
    hi = iv.hi
    assert hi is not None
    out: List[Value] = []
    if isinstance(hi, Fraction):
        out.append(hi - offset)
    else:
        out.append(simplest_rational_in(shift(hi, -offset), hi, False, True))
    n = -floor_value(negate(hi))
    if not (isinstance(hi, Fraction) and hi == n and not iv.hi_open):
        n -= 1
    out.append(Fraction(n))
    return out


def boundary_candidates(region: IntervalSet, offset: Fraction) -> List[Value]:
    """Rationals within offset of each finite endpoint, and the nearest integers, inside region."""
    out: List[Value] = []
    for iv in region:
        near: List[Value] = []
        try:
            if iv.lo is not None:
                near.extend(_near_lower(iv, offset))
            if iv.hi is not None:
                near.extend(_near_upper(iv, offset))
        except EmptyIntervalError:
            continue
        out.extend(v for v in near if iv.contains(v))
    return out


def neighbour_integers(x0: Value) -> List[Value]:
    below = -floor_value(negate(x0)) - 1
    above = floor_value(x0) + 1
    return [Fraction(below), Fraction(above)]


def uniform_candidates(x0: Value, rng: random.Random, resolution: int) -> List[Value]:
    """Three draws between x0/2 and x0, three between x0 and 2*x0, x0 excluded."""
    if isinstance(x0, Fraction):
        c = x0
    else:
        # narrow enough that c sits closer to x0 than the smallest step
        a = x0
        while a.lo <= 0 <= a.hi:
            a = a.bisect()
        narrow = refine(a, min(abs(a.lo), abs(a.hi)) / (4 * resolution))
        lo, hi = enclosure(narrow)
        c = simplest_rational_in(lo, hi)
    if c == 0:
        return []
    out: List[Value] = []
    for step in (-c / 2, c):
        for _ in range(3):
            k = rng.randint(1, resolution)
            out.append(c + step * Fraction(k, resolution))
    return out


def _dedupe(values: Sequence[Value]) -> List[Value]:
    out: List[Value] = []
    for v in values:
        if all(cmp_value(v, w) != 0 for w in out):
            out.append(v)
    return out


def stuck_candidates(
    lit: Literal,
    asg: Assignment,
    rng: random.Random,
    *,
    relaxed: bool = False,
    eps_p: Fraction = Fraction(0),
    offset: Fraction = Fraction(1, 10000),
    resolution: int = 1000,
    allowed: Optional[IntervalSet] = None,
    value_cap: Optional[Fraction] = None,
    var: Optional[int] = None,
) -> Tuple[int, List[Value]]:
    """Pick a variable of lit (``var`` when given) and list candidate values for it.

    ``allowed`` restricts candidates of that variable (values outside are dropped) and
    doubles as the region whose endpoints seed the first class when lit itself gives
    none.

    Raises:
        NoMovableVariable: If fixing the other variables leaves lit constant in each.
    """
    if var is None:
        movable = movable_vars(lit, asg)
        if not movable:
            raise NoMovableVariable(f"no variable of {lit} has a nonzero coefficient")
        var = rng.choice(movable)
    x = var
    x0 = asg.reals[x]
    try:
        region = feasible_set(lit, asg, x, relaxed, eps_p)
    except MoveUnavailable:
        region = IntervalSet.empty()
    if region.is_empty():
        region = allowed if allowed is not None else IntervalSet.full()

    raw = boundary_candidates(region, offset)
    raw.extend(neighbour_integers(x0))
    raw.extend(uniform_candidates(x0, rng, resolution))
    values = [v for v in _dedupe(raw) if cmp_value(v, x0) != 0]
    if allowed is not None:
        values = [v for v in values if allowed.contains(v)]
    if value_cap is not None:
        values = [v for v in values if not exceeds_threshold(v, value_cap)]
    if not values:
        values = neighbour_integers(x0)
    logger.debug("Stuck candidates", var=x, count=len(values))
    return x, values


def lookahead_pick(
    lit: Literal,
    asg: Assignment,
    x: int,
    candidates: Sequence[Value],
    rng: random.Random,
    *,
    relaxed: bool = False,
    eps_p: Fraction = Fraction(0),
) -> Value:
    """First candidate after which some variable of lit has a nonempty feasible set."""
    if len(candidates) == 1:
        return candidates[0]
    trial = asg.copy()
    for v in candidates:
        trial.reals[x] = v
        for y in sorted(lit.real_vars):
            try:
                if not feasible_set(lit, trial, y, relaxed, eps_p).is_empty():
                    return v
            except MoveUnavailable:
                continue
    return rng.choice(list(candidates))


__all__ = [
    "boundary_candidates",
    "lookahead_pick",
    "movable_vars",
    "neighbour_integers",
    "stuck_candidates",
    "uniform_candidates",
]
