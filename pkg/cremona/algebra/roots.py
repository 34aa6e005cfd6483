from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import List, Optional, Tuple, Union

from sympy.polys.densetools import dup_eval, dup_sign_variations
from sympy.polys.domains import QQ
from sympy.polys.rootisolation import dup_sturm

from ..errors import UsageError
from .poly import MultiPoly, poly_gcd, to_fraction, to_qq

__all__ = (
    "IsolatingInterval",
    "squarefree_part",
    "sturm_sequence",
    "count_roots_in",
    "cauchy_bound",
    "isolate_real_roots",
    "narrow",
    "refine_root",
)

logger = logging.getLogger(__name__)

Bound = Optional[Union[int, Fraction]]


@dataclass(frozen=True)
class IsolatingInterval:
    """
    A rational interval (lo, hi] holding exactly one real root of a squarefree polynomial.

    Attributes:
        lo (Fraction): The open lower end.
        hi (Fraction): The closed upper end.
        poly (cremona.algebra.MultiPoly): The squarefree polynomial the root belongs to.
        var (str): The variable the polynomial is univariate in.
        squarefree (bool): Whether `poly` was certified squarefree.

    """

    lo: Fraction
    hi: Fraction
    poly: MultiPoly
    var: str
    squarefree: bool = True

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, value: Union[int, Fraction, float]) -> bool:
        return self.lo < value <= self.hi

    def sign_at(self, value: Union[int, Fraction]) -> int:
        return _sign(_evaluate(self.poly.univariate_coeffs(self.var), value))


def _evaluate(dense: List, value: Union[int, Fraction]) -> Fraction:
    return to_fraction(dup_eval(dense, to_qq(value), QQ))


def _sign(value: Fraction) -> int:
    return (value > 0) - (value < 0)


def squarefree_part(p: MultiPoly, var: str) -> MultiPoly:
    """
    Returns p / gcd(p, p'), primitive; the real roots are those of p, all simple.

    Raises:
        [cremona.errors.UsageError][] if p is the zero polynomial.

    """
    if p.is_zero:
        raise UsageError("the zero polynomial has no squarefree part")

    derivative = p.diff(var)
    if derivative.is_zero:
        return p.primitive()

    return p.exquo(poly_gcd(p, derivative)).primitive()


def sturm_sequence(p: MultiPoly, var: str) -> List[List]:
    """
    The Sturm sequence of a univariate polynomial as dense coefficient lists over QQ.
    """
    return dup_sturm(p.univariate_coeffs(var), QQ)


def _variations(sequence: List[List], point: Bound, *, negative: bool = False) -> int:
    if point is None:
        signs = [s[0] * (-1) ** (len(s) - 1) if negative else s[0] for s in sequence]
    else:
        value = to_qq(point)
        signs = [dup_eval(s, value, QQ) for s in sequence]

    return dup_sign_variations(signs, QQ)


def count_roots_in(p: MultiPoly, var: str, lo: Bound = None, hi: Bound = None) -> int:
    """
    Number of distinct real roots of p in (lo, hi]; a missing end is infinite.

    Parameters:
        p (MultiPoly): A nonzero polynomial univariate in `var`.
        var (str): The variable.
        lo (Optional[Fraction]): The open lower end.
        hi (Optional[Fraction]): The closed upper end.

    Raises:
        [cremona.errors.UsageError][] if p is zero or not univariate.

    """
    if p.is_zero:
        raise UsageError("cannot count the roots of the zero polynomial")

    if p.is_constant:
        return 0

    sequence = sturm_sequence(p, var)
    return _variations(sequence, lo, negative=True) - _variations(sequence, hi)


def cauchy_bound(p: MultiPoly, var: str) -> Fraction:
    """
    A bound B with every real root strictly inside (-B, B).
    """
    coeffs = [to_fraction(c) for c in p.univariate_coeffs(var)]
    leading = abs(coeffs[0])
    return 1 + max((abs(c) / leading for c in coeffs[1:]), default=Fraction(0))


def isolate_real_roots(
    p: MultiPoly,
    var: str,
    search_range: Tuple[Bound, Bound] = (None, None),
) -> List[IsolatingInterval]:
    """
    Isolates the real roots of p in a range by Sturm-certified bisection.

    The polynomial is reduced to its squarefree part first. Every returned interval holds
    exactly one root, intervals are disjoint and sorted, and together they hold every
    root in `(lo, hi]`.

    Parameters:
        p (MultiPoly): A nonzero polynomial univariate in `var`.
        var (str): The variable.
        search_range (Tuple[Optional[Fraction], Optional[Fraction]]): The range `(lo, hi]`,
            `None` meaning unbounded.

    Returns:
        The isolating intervals, in increasing order.

    Raises:
        [cremona.errors.UsageError][] if p is zero, not univariate or the range is empty.

    Example:
        ```py
        vt = VarTable(["dt"])
        dt = MultiPoly.variable(vt, "dt")
        isolate_real_roots(dt**3 - dt, "dt", (-2, 2))  # three intervals
        ```

    """
    if not p.is_univariate_in(var):
        raise UsageError(f"{p} is not univariate in {var}")

    lo, hi = search_range
    if lo is not None and hi is not None and Fraction(lo) >= Fraction(hi):
        raise UsageError(f"empty search range ({lo}, {hi}]")

    reduced = squarefree_part(p, var)
    if reduced.is_constant:
        return []

    bound = cauchy_bound(reduced, var)
    lo = -bound if lo is None or Fraction(lo) < -bound else Fraction(lo)
    hi = bound if hi is None or Fraction(hi) > bound else Fraction(hi)

    if lo >= hi:
        return []

    sequence = sturm_sequence(reduced, var)
    intervals: List[IsolatingInterval] = []

    def count(a: Fraction, b: Fraction) -> int:
        return _variations(sequence, a) - _variations(sequence, b)

    stack: List[Tuple[Fraction, Fraction, int]] = [(lo, hi, count(lo, hi))]
    while stack:
        a, b, roots = stack.pop()

        if roots == 0:
            continue

        if roots == 1:
            intervals.append(IsolatingInterval(a, b, reduced, var))
            continue

        middle = (a + b) / 2
        left = count(a, middle)
        stack.append((middle, b, roots - left))
        stack.append((a, middle, left))

    logger.debug(f"ROOTS ISOLATED: {len(intervals)} in ({lo}, {hi}] of degree {reduced.degree(var)}")
    return intervals


def narrow(interval: IsolatingInterval, eps: Union[Fraction, float]) -> IsolatingInterval:
    """
    Bisects an isolating interval until it is narrower than eps.

    Only the sign at the upper end is needed: the root is simple, so p keeps that sign on
    (root, hi] and takes the other one on (lo, root). An exact hit collapses the interval
    onto the root.

    Raises:
        [cremona.errors.UsageError][] if eps is not positive.

    """
    eps = Fraction(eps)
    if eps <= 0:
        raise UsageError("eps must be positive")

    dense = interval.poly.univariate_coeffs(interval.var)
    lo, hi = interval.lo, interval.hi

    def collapse(root: Fraction) -> IsolatingInterval:
        return replace(interval, lo=max(interval.lo, root - eps / 4), hi=root)

    if len(dense) == 2:
        return collapse(-to_fraction(dense[1]) / to_fraction(dense[0]))

    upper = _sign(_evaluate(dense, hi))
    if upper == 0:
        return collapse(hi)

    while hi - lo >= eps:
        middle = (lo + hi) / 2
        sign = _sign(_evaluate(dense, middle))

        if sign == 0:
            return collapse(middle)

        if sign == upper:
            hi = middle
        else:
            lo = middle

    return replace(interval, lo=lo, hi=hi)


def refine_root(interval: IsolatingInterval, eps: Union[Fraction, float]) -> Fraction:
    """
    Approximates the isolated root to within eps.

    Parameters:
        interval (IsolatingInterval): A valid isolating interval.
        eps (Union[Fraction, float]): The target width, positive.

    Returns:
        The midpoint of an isolating interval narrower than eps, or the root itself when it
        is rational and met exactly (always for linear polynomials).

    """
    narrowed = narrow(interval, eps)

    if narrowed.sign_at(narrowed.hi) == 0:
        return narrowed.hi

    return narrowed.midpoint
