"""
Polynomials whose coefficients are expressions in one algebraic number.

Fixing every variable of a polynomial but x, with exactly one of the fixed values
irrational (alpha), leaves a polynomial in x whose coefficients lie in Q(alpha). Each
coefficient is kept as a rational polynomial in y reduced modulo the minimal polynomial
of alpha and stands for its value at y = alpha.

Minimal polynomials are only known to be square-free, so every zero test also splits
the minimal polynomial with a gcd: the factor holding alpha replaces it when the
coefficient vanishes, the cofactor otherwise. After normalization every surviving
coefficient is coprime to the minimal polynomial, which keeps the norm nonzero.
"""

from fractions import Fraction
from typing import List, Sequence, Tuple, Union

from app.models.numeric import (
    AlgebraicNumber,
    Value,
    cmp_value,
    make_algebraic,
    real_roots,
)
from app.models.upoly import (
    Enclosure,
    UnivariatePoly,
    gcd,
    interval_add,
    interval_mul,
    resultant_y,
    sturm_count,
    value_annihilator,
)


def split_alpha(c: UnivariatePoly, alpha: AlgebraicNumber) -> Tuple[Value, bool]:
    """Decide whether c(alpha) = 0, returning alpha with a possibly smaller minpoly."""
    m = alpha.minpoly
    c = c % m
    if c.is_zero():
        return alpha, True
    if c.is_constant():
        return alpha, False
    g = gcd(c, m)
    if g.degree < 1:
        return alpha, False
    if sturm_count(g, alpha.lo, alpha.hi) >= 1:
        return make_algebraic(g, alpha.lo, alpha.hi), True
    return make_algebraic(m // g, alpha.lo, alpha.hi), False


def alg_sign(c: UnivariatePoly, alpha: AlgebraicNumber) -> int:
    """Sign of c(alpha)."""
    reduced, vanishes = split_alpha(c, alpha)
    if vanishes:
        return 0
    if isinstance(reduced, Fraction):
        return c.sign_at(reduced)
    c = c % reduced.minpoly
    a = reduced
    while True:
        lo, hi = c.interval_eval(a.lo, a.hi)
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        a = a.bisect()


def alg_value(c: UnivariatePoly, alpha: AlgebraicNumber) -> Value:
    """The number c(alpha), located among the real roots of its norm."""
    reduced, vanishes = split_alpha(c, alpha)
    if vanishes:
        return Fraction(0)
    if isinstance(reduced, Fraction):
        return c(reduced)
    c = c % reduced.minpoly
    if c.is_constant():
        return c.coeff(0)
    rows = [UnivariatePoly([-c.coeff(0), 1])]
    rows.extend(UnivariatePoly.constant(-cj) for cj in c.coeffs[1:])
    candidates = real_roots(resultant_y(reduced.minpoly, rows))
    a = reduced
    while True:
        lo, hi = c.interval_eval(a.lo, a.hi)
        inside = [r for r in candidates if cmp_value(r, lo) >= 0 and cmp_value(r, hi) <= 0]
        if len(inside) == 1:
            return inside[0]
        a = a.bisect()


class ExtensionPoly:
    """Polynomial in x with coefficients in Q(alpha): coeffs[i] is a polynomial in y."""

    __slots__ = ("alpha", "coeffs")

    def __init__(self, alpha: AlgebraicNumber, coeffs: Sequence[UnivariatePoly]) -> None:
        cs = [c % alpha.minpoly for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.alpha = alpha
        self.coeffs = tuple(cs)

    def __repr__(self) -> str:
        return f"ExtensionPoly({self.alpha!r}, {[str(c) for c in self.coeffs]})"

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def normalized(self) -> Union[UnivariatePoly, "ExtensionPoly"]:
        """Drop vanishing coefficients; collapse to a rational polynomial when possible."""
        alpha: Value = self.alpha
        kept: List[UnivariatePoly] = []
        for c in self.coeffs:
            if c.is_constant():
                kept.append(c)
                continue
            assert isinstance(alpha, AlgebraicNumber)
            alpha, vanishes = split_alpha(c, alpha)
            if isinstance(alpha, Fraction):
                return UnivariatePoly([c(alpha) for c in self.coeffs])
            kept.append(UnivariatePoly() if vanishes else c)
        assert isinstance(alpha, AlgebraicNumber)
        kept = [c % alpha.minpoly for c in kept]
        if all(c.is_constant() for c in kept):
            return UnivariatePoly([c.coeff(0) for c in kept])
        return ExtensionPoly(alpha, kept)

    def add_constant(self, k: Fraction) -> "ExtensionPoly":
        coeffs = list(self.coeffs) or [UnivariatePoly()]
        coeffs[0] = coeffs[0] + k
        return ExtensionPoly(self.alpha, coeffs)

    def at_rational(self, x: Fraction) -> UnivariatePoly:
        """The coefficient polynomial in y of this polynomial at x."""
        acc = UnivariatePoly()
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def sign_at(self, x: Fraction) -> int:
        return alg_sign(self.at_rational(x), self.alpha)

    def norm(self) -> UnivariatePoly:
        """Res_y(minpoly(y), q(x, y)); every root of q is a root of the norm."""
        height = max((c.degree for c in self.coeffs), default=0) + 1
        rows = [
            UnivariatePoly([c.coeff(j) for c in self.coeffs]) for j in range(height)
        ]
        return resultant_y(self.alpha.minpoly, rows)

    def enclosure(
        self, x_lo: Fraction, x_hi: Fraction, alpha: AlgebraicNumber
    ) -> Enclosure:
        """Enclosure of q over [x_lo, x_hi] with y ranging over alpha's interval."""
        total: Enclosure = (Fraction(0), Fraction(0))
        power: Enclosure = (Fraction(1), Fraction(1))
        for c in self.coeffs:
            term = interval_mul(c.interval_eval(alpha.lo, alpha.hi), power)
            total = interval_add(total, term)
            power = interval_mul(power, (x_lo, x_hi))
        return total

    def vanishes_at(self, rho: AlgebraicNumber) -> bool:
        """Whether q(rho) = 0, decided exactly.

        q(rho) is a root of the annihilator below, whose nonzero roots all have modulus
        above ``gap``; enclosures of q(rho) narrower than ``gap`` that contain 0 pin it.
        """
        ann = value_annihilator(rho.minpoly, self.alpha.minpoly, self.coeffs)
        if ann(0) != 0:
            return False
        k = 0
        while ann.coeff(k) == 0:
            k += 1
        rest = UnivariatePoly(ann.coeffs[k:])
        if rest.is_constant():
            return True
        gap = 1 / rest.reverse().cauchy_bound()
        a = self.alpha
        while True:
            lo, hi = self.enclosure(rho.lo, rho.hi, a)
            if lo > 0 or hi < 0:
                return False
            if hi - lo < gap:
                return True
            rho.bisect()
            a.bisect()


__all__ = ["ExtensionPoly", "alg_sign", "alg_value", "split_alpha"]
