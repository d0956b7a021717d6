"""
Exact values assigned to arithmetic variables.

A value is either a ``fractions.Fraction`` or an ``AlgebraicNumber``: a square-free
integer polynomial together with a rational isolating interval (lo, hi) that contains
exactly one of its real roots. Algebraic numbers are only ever built through
``make_algebraic``, which returns a ``Fraction`` whenever the root is rational, so an
``AlgebraicNumber`` instance is always irrational.

Comparisons against rationals are decided exactly by one sign test of the minimal
polynomial; comparisons between two algebraic numbers first check whether the
isolating intervals are already disjoint, then use a gcd zero test, and fall back to
bisection until the intervals separate. Refined bounds stay on the instance.
"""

import enum
import math
from fractions import Fraction
from functools import cmp_to_key, lru_cache
from typing import Any, Dict, List, Optional, Tuple, Union

from app.core.errors import EmptyIntervalError
from app.models.upoly import UnivariatePoly, gcd, sturm_count, sturm_sequence


class AlgebraicNumber:
    """Irrational real algebraic number (minpoly, lo, hi).

    The number itself never changes. Its isolating interval only narrows: ``bisect``
    and every comparison that splits the interval store the tighter bounds on the
    instance, so later comparisons start from them.
    """

    __slots__ = ("minpoly", "lo", "hi", "_lo_sign")

    def __init__(self, minpoly: UnivariatePoly, lo: Fraction, hi: Fraction) -> None:
        object.__setattr__(self, "minpoly", minpoly)
        object.__setattr__(self, "lo", Fraction(lo))
        object.__setattr__(self, "hi", Fraction(hi))
        object.__setattr__(self, "_lo_sign", minpoly.sign_at(self.lo))

    def __setattr__(self, name: str, value: Any) -> None:
        raise AttributeError("AlgebraicNumber is immutable")

    def __repr__(self) -> str:
        return f"AlgebraicNumber({self.minpoly}, {self.lo}, {self.hi})"

    def __str__(self) -> str:
        return f"root({self.minpoly}, {self.lo}, {self.hi})"

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def lo_sign(self) -> int:
        return self._lo_sign

    def narrow_at(self, r: Fraction, s: int) -> None:
        """Keep the half of the interval holding the root, given s = sign of minpoly at r."""
        # s == 0 would make r a second root in (lo, hi)
        if s == self._lo_sign:
            object.__setattr__(self, "lo", r)
        else:
            object.__setattr__(self, "hi", r)

    def bisect(self) -> "AlgebraicNumber":
        """Halve the isolating interval in place."""
        mid = (self.lo + self.hi) / 2
        self.narrow_at(mid, self.minpoly.sign_at(mid))
        return self

    def __reduce__(self) -> Tuple[Any, ...]:
        return (AlgebraicNumber, (self.minpoly, self.lo, self.hi))


Value = Union[Fraction, AlgebraicNumber]


class Complexity(enum.Enum):
    """Result of comparing two values under the complexity preorder."""

    PREC = "prec"
    SUCC = "succ"
    SIM = "sim"


# ====================
# CONSTRUCTION
# ====================


def _rational_root_in(m: UnivariatePoly, lo: Fraction, hi: Fraction) -> Optional[Fraction]:
    """The root of primitive square-free m in (lo, hi), if it is rational.

    A rational root p/q of an integer polynomial has q dividing the leading
    coefficient, so once the interval is narrower than 1/lc at most one candidate
    k/lc remains.
    """
    lc = int(m.lc)
    step = Fraction(1, lc)
    lo_sign = m.sign_at(lo)
    while hi - lo >= step:
        mid = (lo + hi) / 2
        s = m.sign_at(mid)
        if s == 0:
            return mid
        if s == lo_sign:
            lo = mid
        else:
            hi = mid
    k = math.floor(lo * lc) + 1
    candidate = Fraction(k, lc)
    if candidate < hi and m(candidate) == 0:
        return candidate
    return None


def make_algebraic(m: UnivariatePoly, lo: Fraction, hi: Fraction) -> Value:
    """Value of the unique root of m in (lo, hi).

    m must be nonzero at lo and hi and have exactly one root in between. Linear and
    rational cases are normalized to ``Fraction``.
    """
    m = m.square_free()
    if m.degree == 1:
        return -m.coeffs[0] / m.coeffs[1]
    r = _rational_root_in(m, Fraction(lo), Fraction(hi))
    if r is not None:
        return r
    return AlgebraicNumber(m, lo, hi)


def real_roots(p: UnivariatePoly) -> List[Value]:
    """All distinct real roots of a nonzero p, in increasing order.

    Sturm bisection from the Cauchy bound isolates the roots of the square-free part;
    rational roots are then divided out so every remaining isolating interval carries
    a minimal polynomial free of rational roots.
    """
    s = p.square_free()
    if s.degree < 1:
        return []
    seq = sturm_sequence(s)
    bound = s.cauchy_bound()
    pending = [(-bound, bound)]
    isolated: List[Tuple[Fraction, Fraction]] = []
    while pending:
        lo, hi = pending.pop()
        n = sturm_count(seq, lo, hi)
        if n == 0:
            continue
        if n == 1:
            isolated.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        while s(mid) == 0:
            mid = (mid + hi) / 2
        pending.append((lo, mid))
        pending.append((mid, hi))
    isolated.sort()

    rational: Dict[Fraction, Fraction] = {}
    for lo, hi in isolated:
        r = _rational_root_in(s, lo, hi)
        if r is not None:
            rational[lo] = r
    reduced = s
    for r in rational.values():
        reduced = reduced // UnivariatePoly.linear_root(r)
    reduced = reduced.primitive()

    roots: List[Value] = []
    for lo, hi in isolated:
        if lo in rational:
            roots.append(rational[lo])
        else:
            roots.append(AlgebraicNumber(reduced, lo, hi))
    return roots


# ====================
# ORDER
# ====================


def _cmp_alg_rational(a: AlgebraicNumber, r: Fraction) -> int:
    if r <= a.lo:
        return 1
    if r >= a.hi:
        return -1
    s = a.minpoly.sign_at(r)
    if s == 0:
        return 0
    a.narrow_at(r, s)
    return 1 if s == a.lo_sign() else -1


@lru_cache(maxsize=4096)
def _sturm(p: UnivariatePoly) -> Tuple[UnivariatePoly, ...]:
    return tuple(sturm_sequence(p))


@lru_cache(maxsize=4096)
def _common_factor(p: UnivariatePoly, q: UnivariatePoly) -> UnivariatePoly:
    return p if p == q else gcd(p, q)


def _same_root(a: AlgebraicNumber, b: AlgebraicNumber) -> bool:
    lo = max(a.lo, b.lo)
    hi = min(a.hi, b.hi)
    if lo >= hi:
        return False
    g = _common_factor(a.minpoly, b.minpoly)
    if g.degree < 1:
        return False
    return sturm_count(_sturm(g), lo, hi) >= 1


def cmp_value(a: Value, b: Value) -> int:
    """-1, 0 or 1 according to the real order of a and b."""
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return (a > b) - (a < b)
    if isinstance(a, AlgebraicNumber) and isinstance(b, Fraction):
        return _cmp_alg_rational(a, b)
    if isinstance(a, Fraction) and isinstance(b, AlgebraicNumber):
        return -_cmp_alg_rational(b, a)
    assert isinstance(a, AlgebraicNumber) and isinstance(b, AlgebraicNumber)
    if a is b:
        return 0
    if a.hi <= b.lo:
        return -1
    if b.hi <= a.lo:
        return 1
    if _same_root(a, b):
        return 0
    while True:
        if a.hi <= b.lo:
            return -1
        if b.hi <= a.lo:
            return 1
        if a.width >= b.width:
            a.bisect()
        else:
            b.bisect()


value_key = cmp_to_key(cmp_value)


def value_eq(a: Value, b: Value) -> bool:
    return cmp_value(a, b) == 0


def refine(a: Value, width: Fraction) -> Value:
    """Narrow the isolating interval of a to at most ``width``; rationals pass through."""
    if width <= 0:
        raise ValueError("width must be positive")
    if isinstance(a, Fraction):
        return a
    while a.width > width:
        a = a.bisect()
    return a


def enclosure(a: Value) -> Tuple[Fraction, Fraction]:
    if isinstance(a, Fraction):
        return a, a
    return a.lo, a.hi


def sign(a: Value) -> int:
    return cmp_value(a, Fraction(0))


# ====================
# COMPLEXITY
# ====================


def complexity_key(v: Value) -> Tuple[int, int]:
    """Sort key of the complexity preorder: rationals by denominator, then irrationals."""
    if isinstance(v, Fraction):
        return 0, v.denominator
    return 1, 0


def cmp_complexity(a: Value, b: Value) -> Complexity:
    ka, kb = complexity_key(a), complexity_key(b)
    if ka < kb:
        return Complexity.PREC
    if ka > kb:
        return Complexity.SUCC
    return Complexity.SIM


def exceeds_threshold(v: Value, eps_v: Fraction) -> bool:
    """Irrational, or a rational whose denominator is larger than 1/eps_v."""
    if isinstance(v, AlgebraicNumber):
        return True
    return v.denominator > 1 / eps_v


# ====================
# ARITHMETIC ON SINGLE VALUES
# ====================


def negate(a: Value) -> Value:
    if isinstance(a, Fraction):
        return -a
    return AlgebraicNumber(a.minpoly.reflect().primitive(), -a.hi, -a.lo)


def shift(a: Value, c: Fraction) -> Value:
    """a + c"""
    if isinstance(a, Fraction):
        return a + c
    return AlgebraicNumber(a.minpoly.shift(-c).primitive(), a.lo + c, a.hi + c)


def reciprocal(a: Value) -> Value:
    """1 / a for nonzero a."""
    if isinstance(a, Fraction):
        if a == 0:
            raise ZeroDivisionError("reciprocal of zero")
        return 1 / a
    while a.lo <= 0 <= a.hi:
        a = a.bisect()
    return AlgebraicNumber(a.minpoly.reverse().primitive(), 1 / a.hi, 1 / a.lo)


def floor_value(a: Value) -> int:
    if isinstance(a, Fraction):
        return math.floor(a)
    a = refine(a, Fraction(1))
    k = math.floor(a.lo)
    return k + 1 if _cmp_alg_rational(a, Fraction(k + 1)) > 0 else k


def to_decimal(a: Value, digits: int = 6) -> str:
    """Decimal approximation, rounded to ``digits`` places (display only)."""
    if isinstance(a, AlgebraicNumber):
        a = refine(a, Fraction(1, 10 ** (digits + 1)))
        x = (a.lo + a.hi) / 2
    else:
        x = a
    scaled = round(x * 10**digits)
    neg = scaled < 0
    whole, frac = divmod(abs(scaled), 10**digits)
    text = f"{whole}.{frac:0{digits}d}" if digits else str(whole)
    return f"-{text}" if neg else text


# ====================
# SIMPLEST RATIONAL
# ====================


def _contains_zero(
    lo: Optional[Value], hi: Optional[Value], lo_open: bool, hi_open: bool
) -> bool:
    above = lo is None or (sign(lo) < 0 or (sign(lo) == 0 and not lo_open))
    below = hi is None or (sign(hi) > 0 or (sign(hi) == 0 and not hi_open))
    return above and below


def _smallest_integer_above(lo: Value, lo_open: bool) -> int:
    k = floor_value(lo)
    if isinstance(lo, Fraction) and lo == k and not lo_open:
        return k
    return k + 1


def _simplest_positive(
    lo: Value, hi: Optional[Value], lo_open: bool, hi_open: bool
) -> Fraction:
    """Simplest rational in a nonempty interval with lo >= 0 that contains no zero."""
    n = _smallest_integer_above(lo, lo_open)
    if hi is None:
        return Fraction(n)
    c = cmp_value(Fraction(n), hi)
    if c < 0 or (c == 0 and not hi_open):
        return Fraction(n)
    # (lo, hi) lies within [k, k + 1]: recurse on the reciprocals of the fractional parts
    k = floor_value(lo)
    lo_frac = shift(lo, Fraction(-k))
    hi_frac = shift(hi, Fraction(-k))
    new_lo = reciprocal(hi_frac)
    new_hi = None if sign(lo_frac) == 0 else reciprocal(lo_frac)
    inner = _simplest_positive(new_lo, new_hi, hi_open, lo_open)
    return k + 1 / inner


def simplest_rational_in(
    lo: Optional[Value],
    hi: Optional[Value],
    lo_open: bool = False,
    hi_open: bool = False,
) -> Fraction:
    """Rational of minimal denominator in the interval, ties to smallest |numerator|.

    ``None`` stands for an infinite endpoint (always open). Integers are preferred,
    0 first when it is inside.

    Raises:
        EmptyIntervalError: If the interval contains no rational.
    """
    lo_open = lo_open or lo is None
    hi_open = hi_open or hi is None
    if lo is not None and hi is not None:
        c = cmp_value(lo, hi)
        if c > 0 or (c == 0 and (lo_open or hi_open)):
            raise EmptyIntervalError(f"empty interval ({lo}, {hi})")
        if c == 0:
            if isinstance(lo, Fraction):
                return lo
            raise EmptyIntervalError(f"irrational point {lo} holds no rational")
    if _contains_zero(lo, hi, lo_open, hi_open):
        return Fraction(0)
    if hi is not None and sign(hi) <= 0:
        assert lo is None or sign(lo) < 0
        if lo is None:
            return -_simplest_positive(negate(hi), None, hi_open, True)
        return -_simplest_positive(negate(hi), negate(lo), hi_open, lo_open)
    assert lo is not None
    return _simplest_positive(lo, hi, lo_open, hi_open)


__all__ = [
    "AlgebraicNumber",
    "Complexity",
    "Value",
    "cmp_complexity",
    "cmp_value",
    "complexity_key",
    "enclosure",
    "exceeds_threshold",
    "floor_value",
    "make_algebraic",
    "negate",
    "real_roots",
    "reciprocal",
    "refine",
    "shift",
    "sign",
    "simplest_rational_in",
    "to_decimal",
    "value_eq",
    "value_key",
]
