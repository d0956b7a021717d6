"""
Real-root isolation and feasible sets.

A literal over one free variable x is satisfied on a union of intervals cut by the real
roots of its substituted polynomial. ``sign_structure`` gives those roots together with
the sign of the polynomial on every gap between them; feasible sets are then assembled
piece by piece.

Example:
    from app.services.roots import clause_feasible_set
    cands = clause_feasible_set(clause, asg, x, relaxed=(False,), eps_p=Fraction(1, 10**4))
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import structlog

from app.core.errors import MoveUnavailable, ZeroPolynomialError
from app.models.extension import ExtensionPoly, alg_sign
from app.models.formula import (
    Assignment,
    AtomKind,
    Clause,
    CmpAtom,
    Literal,
    relaxed_bands,
    sign_satisfies,
)
from app.models.intervals import IntervalSet
from app.models.numeric import Value, real_roots, simplest_rational_in
from app.models.poly import Substituted
from app.models.upoly import UnivariatePoly, sturm_count

logger = structlog.get_logger(__name__)

@dataclass(frozen=True)
class SignStructure:
    """Distinct real roots and the sign on each of the len(roots) + 1 gaps."""

    roots: Tuple[Value, ...]
    gap_signs: Tuple[int, ...]

    @property
    def is_zero(self) -> bool:
        return not self.roots and self.gap_signs == (0,)


def isolate_roots(q: UnivariatePoly) -> List[Value]:
    """Distinct real roots of q, increasing.

    Raises:
        ZeroPolynomialError: If q is identically zero.
    """
    if q.is_zero():
        raise ZeroPolynomialError("cannot isolate the roots of the zero polynomial")
    return real_roots(q)


def solve_linear(q: UnivariatePoly) -> Fraction:
    if q.degree != 1:
        raise ValueError(f"expected a linear polynomial, got degree {q.degree}")
    return -q.coeffs[0] / q.coeffs[1]


def _gap_samples(points: Sequence[Value]) -> List[Fraction]:
    samples = []
    for i in range(len(points) + 1):
        left = points[i - 1] if i > 0 else None
        right = points[i] if i < len(points) else None
        samples.append(simplest_rational_in(left, right, True, True))
    return samples


def _rational_structure(q: UnivariatePoly) -> SignStructure:
    if q.is_zero():
        return SignStructure((), (0,))
    if q.degree == 0:
        return SignStructure((), (q.sign_at(0),))
    if q.degree == 1:
        s = 1 if q.lc > 0 else -1
        return SignStructure((solve_linear(q),), (-s, s))
    roots = real_roots(q)
    signs = tuple(q.sign_at(x) for x in _gap_samples(roots))
    return SignStructure(tuple(roots), signs)


def _is_extension_root(q: ExtensionPoly, rho: Value, left: int, right: int) -> bool:
    """Whether a root of the norm is a root of q itself."""
    if isinstance(rho, Fraction):
        return alg_sign(q.at_rational(rho), q.alpha) == 0
    if left != right:
        return True
    # no sign change: an even-multiplicity root of q, or a root of a conjugate only
    hit = q.vanishes_at(rho)
    logger.debug("Norm root without sign change", candidate=str(rho), root=hit)
    return hit


def _extension_structure(q: ExtensionPoly) -> SignStructure:
    if q.degree < 0:
        return SignStructure((), (0,))
    if q.degree == 0:
        return SignStructure((), (alg_sign(q.coeffs[0], q.alpha),))
    norm = q.norm()
    if norm.is_zero():
        raise MoveUnavailable("norm vanished identically")
    candidates = real_roots(norm)
    gap_signs = [q.sign_at(x) for x in _gap_samples(candidates)]
    roots: List[Value] = []
    signs = [gap_signs[0]]
    for i, rho in enumerate(candidates):
        if _is_extension_root(q, rho, gap_signs[i], gap_signs[i + 1]):
            roots.append(rho)
            signs.append(gap_signs[i + 1])
    return SignStructure(tuple(roots), tuple(signs))


def sign_structure(q: Substituted) -> SignStructure:
    """Roots of q and its sign between them.

    Raises:
        MoveUnavailable: If the norm over an algebraic parameter vanishes identically.
    """
    if isinstance(q, ExtensionPoly):
        return _extension_structure(q)
    return _rational_structure(q)


def _shifted(q: Substituted, k: Fraction) -> Substituted:
    if isinstance(q, ExtensionPoly):
        return q.add_constant(k).normalized()
    return q + k


def _set_where(st: SignStructure, keep: Callable[[int], bool]) -> IntervalSet:
    return IntervalSet.from_pieces(
        st.roots, [keep(s) for s in st.gap_signs], [keep(0)] * len(st.roots)
    )


def literal_set(
    q: Substituted,
    kind: AtomKind,
    negated: bool,
    relaxed: bool = False,
    eps_p: Fraction = Fraction(0),
) -> IntervalSet:
    """Values of x at which the comparison ``q kind 0`` (or its relaxed form) holds."""
    if relaxed and not negated:
        result = IntervalSet.full()
        for offset, want in relaxed_bands(kind, eps_p):
            st = sign_structure(_shifted(q, offset))
            result = result.intersection(_set_where(st, lambda s, w=want: s == w))
        return result
    st = sign_structure(q)
    return _set_where(st, lambda s: sign_satisfies(kind, s) != negated)


def feasible_set(
    lit: Literal,
    asg: Assignment,
    x: int,
    relaxed: bool = False,
    eps_p: Fraction = Fraction(0),
) -> IntervalSet:
    """Values x can move to so that lit holds, every other variable fixed."""
    atom = lit.atom
    if not isinstance(atom, CmpAtom):
        raise ValueError("feasible sets are defined for arithmetic literals")
    q = atom.poly.substitute_except(asg.reals, x)
    return literal_set(q, atom.kind, lit.negated, relaxed, eps_p)


def clause_feasible_set(
    cls: Clause,
    asg: Assignment,
    x: int,
    relaxed: Optional[Sequence[bool]] = None,
    eps_p: Fraction = Fraction(0),
) -> IntervalSet:
    """Union of the literal feasible sets; the whole line if a literal without x holds."""
    flags = relaxed or [False] * len(cls.literals)
    result = IntervalSet.empty()
    for lit, flag in zip(cls.literals, flags):
        if x in lit.real_vars:
            result = result.union(feasible_set(lit, asg, x, flag, eps_p))
        elif lit.holds(asg, flag, eps_p):
            return IntervalSet.full()
    return result


def unit_infeasible_set(cls: Clause) -> Tuple[int, IntervalSet]:
    """Values of the single variable of cls at which cls is false."""
    if cls.bool_vars or len(cls.real_vars) != 1:
        raise ValueError(f"clause {cls.cid} is not over a single real variable")
    (x,) = cls.real_vars
    return x, clause_feasible_set(cls, Assignment(), x).complement()


__all__ = [
    "SignStructure",
    "clause_feasible_set",
    "feasible_set",
    "isolate_roots",
    "literal_set",
    "sign_structure",
    "solve_linear",
    "sturm_count",
    "unit_infeasible_set",
]
