"""SMT-LIB ``(model ...)`` rendering of assignments."""

from fractions import Fraction
from typing import List, Sequence

from app.models.formula import Assignment
from app.models.numeric import AlgebraicNumber, Value, real_roots, to_decimal, value_eq
from app.models.upoly import UnivariatePoly
from app.services.cnf import DEF_PREFIX


def format_rational(q: Fraction) -> str:
    if q.denominator == 1:
        text = f"{abs(q.numerator)}.0"
    else:
        text = f"(/ {abs(q.numerator)} {q.denominator})"
    return f"(- {text})" if q < 0 else text


def _format_poly(p: UnivariatePoly) -> str:
    terms: List[str] = []
    for k in range(p.degree, -1, -1):
        c = p.coeff(k)
        if c == 0:
            continue
        power = "x" if k == 1 else f"(^ x {k})"
        if k == 0:
            terms.append(format_rational(c))
        elif c == 1:
            terms.append(power)
        else:
            terms.append(f"(* {format_rational(c)} {power})")
    return terms[0] if len(terms) == 1 else "(+ " + " ".join(terms) + ")"


def root_index(a: AlgebraicNumber) -> int:
    """1-based position of a among the real roots of its minimal polynomial."""
    for i, r in enumerate(real_roots(a.minpoly), start=1):
        if value_eq(r, a):
            return i
    raise ValueError(f"{a!r} is not a root of its own minimal polynomial")


def format_value(v: Value) -> str:
    if isinstance(v, Fraction):
        return format_rational(v)
    return f"(root-obj {_format_poly(v.minpoly)} {root_index(v)})"


def format_model(asg: Assignment, real_names: Sequence[str], bool_names: Sequence[str]) -> str:
    """SMT-LIB model text; irrational values carry a decimal comment."""
    lines = ["(model"]
    for i, name in enumerate(real_names):
        v = asg.reals.get(i, Fraction(0))
        line = f"  (define-fun {name} () Real {format_value(v)})"
        if isinstance(v, AlgebraicNumber):
            line += f" ; ~ {to_decimal(v)}"
        lines.append(line)
    for i, name in enumerate(bool_names):
        if name.startswith(DEF_PREFIX):
            continue
        value = "true" if asg.bools.get(i, True) else "false"
        lines.append(f"  (define-fun {name} () Bool {value})")
    lines.append(")")
    return "\n".join(lines)


__all__ = ["format_model", "format_rational", "format_value", "root_index"]
