"""
Univariate polynomials over the rationals.

``UnivariatePoly`` wraps a ``sympy.Poly`` in one generator over ``QQ``. Ring
arithmetic, division, gcd, square-free parts, Taylor shifts, Sturm sequences and
resultants all come from ``sympy.polys``. The coefficients are also kept as a tuple of
``fractions.Fraction`` indexed by degree, so ``UnivariatePoly([-2, 0, 1])`` is x^2 - 2;
exact evaluation and interval enclosures run on that tuple because root isolation calls
them at every bisection step.

The zero polynomial has an empty coefficient tuple and degree -1.
"""

from fractions import Fraction
from typing import Any, Iterable, List, Sequence, Tuple, Union

from sympy import Poly, Symbol
from sympy.polys.domains import QQ

from app.core.errors import RootEndpointError

Scalar = Union[int, Fraction]
Enclosure = Tuple[Fraction, Fraction]

GEN = Symbol("x")
PARAM = Symbol("y")


def to_qq(c: Scalar) -> Any:
    c = Fraction(c)
    return QQ(c.numerator, c.denominator)


def from_qq(c: Any) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


class UnivariatePoly:
    """Immutable polynomial with rational coefficients, lowest degree first."""

    __slots__ = ("rep", "coeffs")

    def __init__(self, coeffs: Iterable[Scalar] = ()) -> None:
        dense = [to_qq(c) for c in coeffs]
        dense.reverse()
        self._set(Poly.from_list(dense or [QQ.zero], GEN, domain=QQ))

    def _set(self, rep: Poly) -> None:
        object.__setattr__(self, "rep", rep)
        cs = [from_qq(c) for c in rep.rep.to_list()]
        cs.reverse()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def wrap(cls, rep: Poly) -> "UnivariatePoly":
        """Adopt a sympy polynomial in GEN over QQ."""
        out = cls.__new__(cls)
        out._set(rep.set_domain(QQ))
        return out

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("UnivariatePoly is immutable")

    def __reduce__(self) -> Tuple[object, ...]:
        return (UnivariatePoly, (self.coeffs,))

    # ====================
    # CONSTRUCTORS
    # ====================

    @classmethod
    def constant(cls, c: Scalar) -> "UnivariatePoly":
        return cls([c])

    @classmethod
    def linear_root(cls, r: Scalar) -> "UnivariatePoly":
        """x - r"""
        return cls([-Fraction(r), 1])

    # ====================
    # QUERIES
    # ====================

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def coeff(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, UnivariatePoly):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"UnivariatePoly({[str(c) for c in self.coeffs]})"

    def __str__(self) -> str:
        return self.to_str("x")

    def to_str(self, var: str) -> str:
        if self.is_zero():
            return "0"
        parts: List[str] = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if i == 0:
                body = str(mag)
            else:
                power = var if i == 1 else f"{var}^{i}"
                body = power if mag == 1 else f"{mag}*{power}"
            parts.append(f"{sign} {body}")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]

    # ====================
    # ARITHMETIC
    # ====================

    def _lift(self, other: Union["UnivariatePoly", Scalar]) -> Poly:
        if isinstance(other, UnivariatePoly):
            return other.rep
        return UnivariatePoly.constant(other).rep

    def __add__(self, other: Union["UnivariatePoly", Scalar]) -> "UnivariatePoly":
        return UnivariatePoly.wrap(self.rep + self._lift(other))

    __radd__ = __add__

    def __neg__(self) -> "UnivariatePoly":
        return UnivariatePoly.wrap(-self.rep)

    def __sub__(self, other: Union["UnivariatePoly", Scalar]) -> "UnivariatePoly":
        return UnivariatePoly.wrap(self.rep - self._lift(other))

    def __rsub__(self, other: Scalar) -> "UnivariatePoly":
        return UnivariatePoly.wrap(self._lift(other) - self.rep)

    def __mul__(self, other: Union["UnivariatePoly", Scalar]) -> "UnivariatePoly":
        if isinstance(other, UnivariatePoly):
            return UnivariatePoly.wrap(self.rep * other.rep)
        return UnivariatePoly.wrap(self.rep.mul_ground(to_qq(other)))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "UnivariatePoly":
        return UnivariatePoly.wrap(self.rep**n)

    def __divmod__(
        self, other: "UnivariatePoly"
    ) -> Tuple["UnivariatePoly", "UnivariatePoly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        q, r = self.rep.div(other.rep)
        return UnivariatePoly.wrap(q), UnivariatePoly.wrap(r)

    def __mod__(self, other: "UnivariatePoly") -> "UnivariatePoly":
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        return UnivariatePoly.wrap(self.rep.rem(other.rep))

    def __floordiv__(self, other: "UnivariatePoly") -> "UnivariatePoly":
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        return UnivariatePoly.wrap(self.rep.quo(other.rep))

    # ====================
    # TRANSFORMS
    # ====================

    def derivative(self) -> "UnivariatePoly":
        return UnivariatePoly.wrap(self.rep.diff(GEN))

    def monic(self) -> "UnivariatePoly":
        if self.is_zero():
            return self
        return UnivariatePoly.wrap(self.rep.monic())

    def primitive(self) -> "UnivariatePoly":
        """Integer coefficients with content 1 and positive leading coefficient."""
        if self.is_zero():
            return self
        _, integral = self.rep.clear_denoms(convert=True)
        _, prim = integral.primitive()
        if prim.LC() < 0:
            prim = -prim
        return UnivariatePoly.wrap(prim)

    def square_free(self) -> "UnivariatePoly":
        """Product of the distinct irreducible factors, in primitive form."""
        if self.degree <= 0:
            return self.primitive()
        return UnivariatePoly.wrap(self.rep.sqf_part()).primitive()

    def shift(self, c: Scalar) -> "UnivariatePoly":
        """p(x + c)"""
        return UnivariatePoly.wrap(self.rep.shift(to_qq(c)))

    def reflect(self) -> "UnivariatePoly":
        """p(-x)"""
        return UnivariatePoly([c if i % 2 == 0 else -c for i, c in enumerate(self.coeffs)])

    def reverse(self) -> "UnivariatePoly":
        """x^n p(1/x); roots become their reciprocals."""
        return UnivariatePoly(reversed(self.coeffs))

    # ====================
    # EVALUATION
    # ====================

    def __call__(self, x: Scalar) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def sign_at(self, x: Scalar) -> int:
        v = self(x)
        return (v > 0) - (v < 0)

    def interval_eval(self, lo: Fraction, hi: Fraction) -> Enclosure:
        """Enclosure of p over [lo, hi] by interval Horner evaluation."""
        if self.is_zero():
            return Fraction(0), Fraction(0)
        acc_lo = acc_hi = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc_lo, acc_hi = interval_mul((acc_lo, acc_hi), (lo, hi))
            acc_lo += c
            acc_hi += c
        return acc_lo, acc_hi

    def cauchy_bound(self) -> Fraction:
        """Every real root lies strictly inside (-B, B)."""
        lc = abs(self.lc)
        return 1 + max((abs(c) / lc for c in self.coeffs[:-1]), default=Fraction(0))


def interval_mul(a: Enclosure, b: Enclosure) -> Enclosure:
    products = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return min(products), max(products)


def interval_add(a: Enclosure, b: Enclosure) -> Enclosure:
    return a[0] + b[0], a[1] + b[1]


def gcd(a: UnivariatePoly, b: UnivariatePoly) -> UnivariatePoly:
    """Monic gcd over Q; gcd(0, 0) is 0."""
    return UnivariatePoly.wrap(a.rep.gcd(b.rep))


# ====================
# STURM SEQUENCES
# ====================


def sturm_sequence(p: UnivariatePoly) -> List[UnivariatePoly]:
    """Sturm sequence of the square-free part of p."""
    return [UnivariatePoly.wrap(q) for q in p.rep.sturm()]


def sign_variations(seq: Sequence[UnivariatePoly], x: Fraction) -> int:
    count = 0
    last = 0
    for q in seq:
        s = q.sign_at(x)
        if s == 0:
            continue
        if last and s != last:
            count += 1
        last = s
    return count


def sturm_count(
    p: Union[UnivariatePoly, Sequence[UnivariatePoly]], lo: Fraction, hi: Fraction
) -> int:
    """Number of distinct real roots of p in the open interval (lo, hi).

    Raises:
        RootEndpointError: If lo or hi is a root of p.
    """
    seq = sturm_sequence(p) if isinstance(p, UnivariatePoly) else list(p)
    head = seq[0]
    if head(lo) == 0 or head(hi) == 0:
        raise RootEndpointError(f"endpoint is a root of {head}")
    if lo >= hi:
        return 0
    return sign_variations(seq, lo) - sign_variations(seq, hi)


# ====================
# RESULTANTS
# ====================


def resultant_y(m: UnivariatePoly, rows: Sequence[UnivariatePoly]) -> UnivariatePoly:
    """Res_y(m(y), g(x, y)) as a polynomial in x.

    ``m`` has rational coefficients in y; ``rows[j]`` is the coefficient of y^j in g,
    itself a polynomial in x.
    """
    g = list(rows)
    while g and g[-1].is_zero():
        g.pop()
    if not g:
        return UnivariatePoly()
    if len(g) == 1:
        return g[0] ** m.degree
    m_terms = {(j, 0): to_qq(c) for j, c in enumerate(m.coeffs) if c}
    g_terms = {
        (j, i): to_qq(c) for j, row in enumerate(g) for i, c in enumerate(row.coeffs) if c
    }
    m_rep = Poly.from_dict(m_terms, PARAM, GEN, domain=QQ)
    g_rep = Poly.from_dict(g_terms, PARAM, GEN, domain=QQ)
    res = m_rep.resultant(g_rep)
    if isinstance(res, Poly) and res.gens == (GEN,):
        return UnivariatePoly.wrap(res)
    expr = res.as_expr() if isinstance(res, Poly) else res
    return UnivariatePoly.wrap(Poly(expr, GEN, domain=QQ))


def value_annihilator(
    mx: UnivariatePoly, my: UnivariatePoly, rows: Sequence[UnivariatePoly]
) -> UnivariatePoly:
    """Nonzero polynomial in z vanishing at g(rho, alpha) for all roots rho of mx, alpha of my.

    ``rows[i]`` is the coefficient of x^i in g, a polynomial in y. The result is
    Res_y(my(y), Res_x(mx(x), z - g(x, y))).
    """
    z = Symbol("z")
    g_terms = {(0, 0, 1): QQ.one}
    for i, row in enumerate(rows):
        for j, c in enumerate(row.coeffs):
            if c:
                key = (i, j, 0)
                g_terms[key] = g_terms.get(key, QQ.zero) - to_qq(c)
    g_rep = Poly.from_dict(g_terms, GEN, PARAM, z, domain=QQ)
    mx_terms = {(i, 0, 0): to_qq(c) for i, c in enumerate(mx.coeffs) if c}
    mx_rep = Poly.from_dict(mx_terms, GEN, PARAM, z, domain=QQ)
    inner = Poly(mx_rep.resultant(g_rep).as_expr(), PARAM, z, domain=QQ)
    my_rep = Poly.from_dict(
        {(j, 0): to_qq(c) for j, c in enumerate(my.coeffs) if c}, PARAM, z, domain=QQ
    )
    res = Poly(my_rep.resultant(inner).as_expr(), z, domain=QQ)
    cs = [from_qq(c) for c in res.rep.to_list()]
    cs.reverse()
    return UnivariatePoly(cs)


__all__ = [
    "UnivariatePoly",
    "from_qq",
    "gcd",
    "interval_add",
    "interval_mul",
    "resultant_y",
    "sign_variations",
    "sturm_count",
    "sturm_sequence",
    "to_qq",
    "value_annihilator",
]
