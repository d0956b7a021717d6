"""
Sparse multivariate polynomials over the rationals.

Terms map a monomial, a sorted tuple of ``(var_id, exponent)`` pairs with positive
exponents, to a nonzero ``Fraction`` coefficient; the empty monomial is the constant
term. Variables are the dense integer ids handed out by the parser.
"""

from collections import defaultdict
from fractions import Fraction
from typing import (
    Callable,
    Dict,
    FrozenSet,
    Iterable,
    List,
    Mapping,
    Optional,
    Tuple,
    Union,
)

from app.core.errors import MoveUnavailable, UnassignedVariableError
from app.models.extension import ExtensionPoly, alg_sign, alg_value
from app.models.numeric import AlgebraicNumber, Value, cmp_value
from app.models.upoly import UnivariatePoly

Monomial = Tuple[Tuple[int, int], ...]
Substituted = Union[UnivariatePoly, ExtensionPoly]
Scalar = Union[int, Fraction]

ONE: Monomial = ()


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    exps: Dict[int, int] = dict(a)
    for v, e in b:
        exps[v] = exps.get(v, 0) + e
    return tuple(sorted(exps.items()))


class Polynomial:
    """Immutable sparse polynomial; hashable and comparable by its term map."""

    __slots__ = ("terms", "variables", "_hash")

    def __init__(
        self,
        terms: Union[Mapping[Monomial, Scalar], Iterable[Tuple[Monomial, Scalar]]] = (),
    ) -> None:
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: Dict[Monomial, Fraction] = {}
        for mono, c in items:
            c = Fraction(c)
            if c != 0:
                clean[mono] = c
        self.terms: Dict[Monomial, Fraction] = clean
        self.variables: FrozenSet[int] = frozenset(v for mono in clean for v, _ in mono)
        self._hash = hash(frozenset(clean.items()))

    # ====================
    # CONSTRUCTORS
    # ====================

    @classmethod
    def const(cls, c: Scalar) -> "Polynomial":
        return cls({ONE: c})

    @classmethod
    def var(cls, v: int) -> "Polynomial":
        return cls({((v, 1),): 1})

    # ====================
    # QUERIES
    # ====================

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(mono == ONE for mono in self.terms)

    @property
    def constant_term(self) -> Fraction:
        return self.terms.get(ONE, Fraction(0))

    def degree_in(self, x: int) -> int:
        return max((dict(mono).get(x, 0) for mono in self.terms), default=0)

    def is_linear_in(self, x: int) -> bool:
        return self.degree_in(x) <= 1

    @property
    def leading_coefficient(self) -> Fraction:
        """Coefficient of the greatest monomial, by total degree then variable order."""
        if not self.terms:
            return Fraction(0)
        mono = max(self.terms, key=lambda m: (sum(e for _, e in m), m))
        return self.terms[mono]

    @property
    def total_degree(self) -> int:
        return max((sum(e for _, e in mono) for mono in self.terms), default=0)

    def coefficients_in(self, x: int) -> Dict[int, "Polynomial"]:
        """Split p = sum_k P_k x^k with P_k free of x."""
        parts: Dict[int, Dict[Monomial, Fraction]] = defaultdict(dict)
        for mono, c in self.terms.items():
            k = 0
            rest = []
            for v, e in mono:
                if v == x:
                    k = e
                else:
                    rest.append((v, e))
            parts[k][tuple(rest)] = c
        return {k: Polynomial(t) for k, t in parts.items()}

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Polynomial):
            return self.terms == other.terms
        return NotImplemented

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Polynomial({self.to_str()})"

    def to_str(self, names: Optional[Callable[[int], str]] = None) -> str:
        name = names or (lambda v: f"v{v}")
        if not self.terms:
            return "0"
        parts = []
        for mono, c in sorted(self.terms.items()):
            factors = [name(v) if e == 1 else f"{name(v)}^{e}" for v, e in mono]
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(factors))
            else:
                parts.append("*".join([str(c)] + factors))
        return " + ".join(parts)

    # ====================
    # ARITHMETIC
    # ====================

    def __add__(self, other: Union["Polynomial", Scalar]) -> "Polynomial":
        if not isinstance(other, Polynomial):
            other = Polynomial.const(other)
        terms = dict(self.terms)
        for mono, c in other.terms.items():
            terms[mono] = terms.get(mono, Fraction(0)) + c
        return Polynomial(terms)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: Union["Polynomial", Scalar]) -> "Polynomial":
        if not isinstance(other, Polynomial):
            other = Polynomial.const(other)
        return self + (-other)

    def __rsub__(self, other: Scalar) -> "Polynomial":
        return Polynomial.const(other) - self

    def __mul__(self, other: Union["Polynomial", Scalar]) -> "Polynomial":
        if not isinstance(other, Polynomial):
            k = Fraction(other)
            return Polynomial({m: c * k for m, c in self.terms.items()})
        terms: Dict[Monomial, Fraction] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                mono = _mono_mul(ma, mb)
                terms[mono] = terms.get(mono, Fraction(0)) + ca * cb
        return Polynomial(terms)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Polynomial":
        result = Polynomial.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def substitute(self, x: int, q: "Polynomial") -> "Polynomial":
        """p with x replaced by q."""
        if x not in self.variables:
            return self
        result = Polynomial()
        for k, part in self.coefficients_in(x).items():
            result = result + part * q**k
        return result

    # ====================
    # EVALUATION
    # ====================

    def _lookup(
        self, asg: Mapping[int, Value], skip: Optional[int] = None
    ) -> Tuple[Dict[int, Fraction], Optional[AlgebraicNumber], FrozenSet[int]]:
        """Rational values, the single algebraic value, and the vars carrying it."""
        rationals: Dict[int, Fraction] = {}
        alpha: Optional[AlgebraicNumber] = None
        alg_vars = set()
        for v in self.variables:
            if v == skip:
                continue
            try:
                val = asg[v]
            except KeyError:
                raise UnassignedVariableError(v) from None
            if isinstance(val, Fraction):
                rationals[v] = val
                continue
            if alpha is None:
                alpha = val
            elif alpha is not val and cmp_value(alpha, val) != 0:
                raise MoveUnavailable(
                    f"variables {sorted(alg_vars)} and {v} hold distinct algebraic values"
                )
            alg_vars.add(v)
        return rationals, alpha, frozenset(alg_vars)

    def _in_alpha(
        self,
        rationals: Mapping[int, Fraction],
        alg_vars: FrozenSet[int],
        x: Optional[int] = None,
    ) -> Dict[int, UnivariatePoly]:
        """Coefficient polynomials in y (y standing for alpha), keyed by the power of x."""
        buckets: Dict[int, Dict[int, Fraction]] = defaultdict(lambda: defaultdict(Fraction))
        for mono, c in self.terms.items():
            k = 0
            j = 0
            for v, e in mono:
                if v == x:
                    k = e
                elif v in alg_vars:
                    j += e
                else:
                    c = c * rationals[v] ** e
            buckets[k][j] += c
        return {
            k: UnivariatePoly([ys.get(i, Fraction(0)) for i in range(max(ys) + 1)])
            for k, ys in buckets.items()
        }

    def evaluate(self, asg: Mapping[int, Value]) -> Value:
        """Exact value of p under asg.

        Raises:
            UnassignedVariableError: If a variable of p is missing from asg.
            MoveUnavailable: If two distinct algebraic values are involved.
        """
        rationals, alpha, alg_vars = self._lookup(asg)
        if alpha is None:
            total = Fraction(0)
            for mono, c in self.terms.items():
                for v, e in mono:
                    c = c * rationals[v] ** e
                total += c
            return total
        c_y = self._in_alpha(rationals, alg_vars).get(0, UnivariatePoly())
        return alg_value(c_y, alpha)

    def sign_at(self, asg: Mapping[int, Value], offset: Fraction = Fraction(0)) -> int:
        """Sign of p + offset under asg."""
        rationals, alpha, alg_vars = self._lookup(asg)
        if alpha is None:
            total = offset
            for mono, c in self.terms.items():
                for v, e in mono:
                    c = c * rationals[v] ** e
                total += c
            return (total > 0) - (total < 0)
        c_y = self._in_alpha(rationals, alg_vars).get(0, UnivariatePoly()) + offset
        return alg_sign(c_y, alpha)

    def substitute_except(self, asg: Mapping[int, Value], x: int) -> Substituted:
        """The univariate polynomial in x left after fixing every other variable.

        Coefficients stay rational unless exactly one irrational value is involved,
        in which case an ``ExtensionPoly`` over that value is returned.

        Raises:
            UnassignedVariableError: If a variable other than x is missing from asg.
            MoveUnavailable: If two distinct algebraic values are involved.
        """
        rationals, alpha, alg_vars = self._lookup(asg, skip=x)
        if alpha is None:
            coeffs: Dict[int, Fraction] = defaultdict(Fraction)
            for mono, c in self.terms.items():
                k = 0
                for v, e in mono:
                    if v == x:
                        k = e
                    else:
                        c = c * rationals[v] ** e
                coeffs[k] += c
            top = max(coeffs, default=-1)
            return UnivariatePoly([coeffs.get(i, Fraction(0)) for i in range(top + 1)])
        parts = self._in_alpha(rationals, alg_vars, x)
        ordered: List[UnivariatePoly] = [
            parts.get(i, UnivariatePoly()) for i in range(max(parts) + 1)
        ]
        return ExtensionPoly(alpha, ordered).normalized()


__all__ = ["Monomial", "Polynomial", "Substituted"]
