from __future__ import annotations

from fractions import Fraction
from typing import Union

import mpmath

from .errors import UsageError

__all__ = ("complete_elliptic_k", "jacobi_period")

PRECISION = 30


def complete_elliptic_k(k: Union[int, Fraction, float]) -> float:
    """
    The complete elliptic integral of the first kind, K(k) = π / (2·AGM(1, √(1 − k²))).

    Parameters:
        k (Union[Rational, float]): The modulus, 0 <= k < 1.

    Raises:
        [cremona.errors.UsageError][] if k is outside [0, 1).

    """
    if not 0 <= k < 1:
        raise UsageError(f"modulus k={k} is outside [0, 1)")

    with mpmath.workdps(PRECISION):
        modulus = mpmath.mpf(k.numerator) / k.denominator if isinstance(k, Fraction) else mpmath.mpf(k)
        value = mpmath.pi / (2 * mpmath.agm(1, mpmath.sqrt(1 - modulus**2)))

    return float(value)


def jacobi_period(k: Union[int, Fraction, float]) -> float:
    """
    The real period 4K(k) of the Jacobi elliptic functions, the limit of the transition table.

    Example:
        ```py
        jacobi_period(Fraction(1, 5))  # 6.34748...
        ```

    """
    return 4 * complete_elliptic_k(k)
