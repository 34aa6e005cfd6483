from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, List, Mapping, Sequence, Tuple, Union

from ..errors import ExceptionalLocusError, UsageError
from .poly import MultiPoly, Scalar, poly_gcd, poly_lcm
from .vartable import VarTable

__all__ = ("RatFunc", "subst", "subst_many")

Value = Union["RatFunc", MultiPoly, Scalar]


class RatFunc:
    """
    A reduced quotient of two polynomials over a shared table.

    The canonical form is unique: numerator and denominator are coprime, their
    coefficients are integers with joint content one, and the leading coefficient of the
    denominator is positive. The zero function is 0/1.

    Attributes:
        numer (cremona.algebra.MultiPoly): The numerator.
        denom (cremona.algebra.MultiPoly): The denominator, never zero.

    """

    __slots__ = ("numer", "denom")

    def __init__(self, numer: MultiPoly, denom: Union[MultiPoly, None] = None, *, reduced: bool = False) -> None:
        """
        Parameters:
            numer (MultiPoly): The numerator.
            denom (Optional[MultiPoly]): The denominator, one if omitted.
            reduced (bool): Skip the gcd when the caller knows the pair is coprime.

        Raises:
            [cremona.errors.ExceptionalLocusError][] if the denominator is identically zero.

        """
        if denom is None:
            denom = MultiPoly.one(numer.vartable)

        if numer.vartable != denom.vartable:
            raise UsageError("numerator and denominator live in different variable tables")

        if denom.is_zero:
            raise ExceptionalLocusError("denominator is identically zero")

        if numer.is_zero:
            self.numer = numer
            self.denom = MultiPoly.one(numer.vartable)
            return

        if not reduced and not denom.is_constant:
            common = poly_gcd(numer, denom)
            if not common.is_constant:
                numer, denom = numer.exquo(common), denom.exquo(common)

        coeffs = [coeff for _, coeff in numer.terms()] + [coeff for _, coeff in denom.terms()]
        denominator = math.lcm(*(coeff.denominator for coeff in coeffs))
        content = math.gcd(*(coeff.numerator * (denominator // coeff.denominator) for coeff in coeffs))
        scale = Fraction(denominator, content)

        if denom.leading_coefficient < 0:
            scale = -scale

        self.numer = numer * scale
        self.denom = denom * scale

    @classmethod
    def constant(cls, vartable: VarTable, value: Scalar) -> RatFunc:
        return cls(MultiPoly.constant(vartable, value))

    @classmethod
    def variable(cls, vartable: VarTable, name: str) -> RatFunc:
        return cls(MultiPoly.variable(vartable, name))

    @property
    def vartable(self) -> VarTable:
        return self.numer.vartable

    def __repr__(self) -> str:
        return f"<RatFunc ({self.numer}) / ({self.denom})>"

    def __str__(self) -> str:
        return self.format()

    def format(self) -> str:
        if self.denom == 1:
            return self.numer.format()

        return f"({self.numer.format()}) / ({self.denom.format()})"

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction, MultiPoly)):
            other = _lift(self.vartable, other)

        if not isinstance(other, RatFunc):
            return NotImplemented

        return self.numer == other.numer and self.denom == other.denom

    def __hash__(self) -> int:
        return hash((self.numer, self.denom))

    @property
    def is_zero(self) -> bool:
        return self.numer.is_zero

    @property
    def is_polynomial(self) -> bool:
        return self.denom.is_constant

    def as_poly(self) -> MultiPoly:
        """
        The function as a polynomial.

        Raises:
            [cremona.errors.UsageError][] if the denominator is not constant.

        """
        if not self.is_polynomial:
            raise UsageError(f"{self} is not a polynomial")

        return self.numer * (1 / self.denom.constant_value)

    def __add__(self, other: Value) -> RatFunc:
        other = _lift(self.vartable, other)

        if self.denom == other.denom:
            return RatFunc(self.numer + other.numer, self.denom)

        return RatFunc(self.numer * other.denom + other.numer * self.denom, self.denom * other.denom)

    __radd__ = __add__

    def __neg__(self) -> RatFunc:
        return RatFunc(-self.numer, self.denom, reduced=True)

    def __sub__(self, other: Value) -> RatFunc:
        return self + (-_lift(self.vartable, other))

    def __rsub__(self, other: Value) -> RatFunc:
        return _lift(self.vartable, other) - self

    def __mul__(self, other: Value) -> RatFunc:
        other = _lift(self.vartable, other)
        return RatFunc(self.numer * other.numer, self.denom * other.denom)

    __rmul__ = __mul__

    def __truediv__(self, other: Value) -> RatFunc:
        other = _lift(self.vartable, other)

        if other.is_zero:
            raise ExceptionalLocusError("division by the zero function")

        return RatFunc(self.numer * other.denom, self.denom * other.numer)

    def __rtruediv__(self, other: Value) -> RatFunc:
        return _lift(self.vartable, other) / self

    def __pow__(self, exponent: int) -> RatFunc:
        if exponent < 0:
            return RatFunc.constant(self.vartable, 1) / self**-exponent

        return RatFunc(self.numer**exponent, self.denom**exponent, reduced=True)

    def evaluate(self, point: Union[Mapping[str, Scalar], Sequence[Scalar]]) -> Fraction:
        """
        Exact value at a point.

        Raises:
            [cremona.errors.ExceptionalLocusError][] if the denominator vanishes there.

        """
        denominator = self.denom.evaluate(point)
        if denominator == 0:
            raise ExceptionalLocusError("denominator vanishes at the given point", _state(point))

        return self.numer.evaluate(point) / denominator

    def evaluate_float(self, point: Union[Mapping[str, float], Sequence[float]]) -> float:
        return self.numer.evaluate_float(point) / self.denom.evaluate_float(point)

    def convert(self, vartable: VarTable) -> RatFunc:
        return RatFunc(self.numer.convert(vartable), self.denom.convert(vartable), reduced=True)


def _state(point: Union[Mapping[str, Scalar], Sequence[Scalar]]) -> Tuple:
    return tuple(point.values()) if isinstance(point, Mapping) else tuple(point)


def _lift(vartable: VarTable, value: Value) -> RatFunc:
    if isinstance(value, RatFunc):
        if value.vartable != vartable:
            raise UsageError(f"mismatched variable tables {vartable!r} and {value.vartable!r}")

        return value

    if isinstance(value, MultiPoly):
        return RatFunc(value)

    if isinstance(value, (int, Fraction)):
        return RatFunc.constant(vartable, value)

    raise UsageError(f"cannot use {type(value).__name__} as a rational function")


class _Homogenizer:
    """
    Evaluates polynomials at rational-function arguments over one common denominator.

    Every substituted variable is written as P_i / Q with a shared Q; a polynomial of degree d
    in the substituted variables becomes N / Q^d, where N is built from cached powers.
    """

    def __init__(self, vartable: VarTable, assignment: Mapping[str, Value]) -> None:
        self.vartable = vartable
        values = {vartable.index(name): _lift(vartable, value) for name, value in assignment.items()}

        common = MultiPoly.one(vartable)
        for value in values.values():
            if not value.denom.is_constant:
                common = poly_lcm(common, value.denom)

        self.indices = tuple(sorted(values))
        self.common = common
        self.numerators = {
            index: value.numer * (common.exquo(value.denom) if not value.denom.is_constant else 1 / value.denom.constant_value)
            for index, value in values.items()
        }
        self._powers: Dict[Tuple[int, int], MultiPoly] = {}
        self._products: Dict[Tuple[int, ...], MultiPoly] = {}

    def power(self, key: int, exponent: int) -> MultiPoly:
        """
        Cached power of a substituted numerator (key >= 0) or of the common denominator (key -1).
        """
        if (key, exponent) not in self._powers:
            base = self.common if key < 0 else self.numerators[key]
            self._powers[(key, exponent)] = base**exponent

        return self._powers[(key, exponent)]

    def product(self, exponents: Tuple[int, ...], degree: int) -> MultiPoly:
        key = exponents + (degree,)
        if key not in self._products:
            result = self.power(-1, degree - sum(exponents))
            for index, exponent in zip(self.indices, exponents):
                if exponent:
                    result = result * self.power(index, exponent)

            self._products[key] = result

        return self._products[key]

    def evaluate(self, poly: MultiPoly) -> Tuple[MultiPoly, int]:
        degree = max(0, poly.degree_in([self.vartable.names[i] for i in self.indices]))
        ring = self.vartable.ring
        total = ring.zero

        for monom, coeff in poly._poly.items():
            exponents = tuple(monom[i] for i in self.indices)
            rest = list(monom)
            for i in self.indices:
                rest[i] = 0

            total += self.product(exponents, degree)._poly.mul_term((tuple(rest), coeff))

        return MultiPoly(self.vartable, total), degree


def subst_many(functions: Sequence[RatFunc], assignment: Mapping[str, Value]) -> List[RatFunc]:
    """
    Substitutes rational functions or rationals for variables in several functions at once,
    sharing the cached powers of the substituted values.

    Parameters:
        functions (Sequence[RatFunc]): Functions over one table.
        assignment (Mapping[str, Union[RatFunc, MultiPoly, Rational]]): The partial substitution.

    Returns:
        The composed functions, in canonical form.

    Raises:
        [cremona.errors.ExceptionalLocusError][] if a denominator becomes identically zero.

    """
    if not functions or not assignment:
        return list(functions)

    vartable = functions[0].vartable
    homogenizer = _Homogenizer(vartable, assignment)
    results: List[RatFunc] = []

    for function in functions:
        numer, numer_degree = homogenizer.evaluate(function.numer)
        denom, denom_degree = homogenizer.evaluate(function.denom)

        if denom.is_zero:
            raise ExceptionalLocusError(f"substitution makes the denominator of {function} vanish identically")

        if denom_degree >= numer_degree:
            numer = numer * homogenizer.power(-1, denom_degree - numer_degree)
        else:
            denom = denom * homogenizer.power(-1, numer_degree - denom_degree)

        results.append(RatFunc(numer, denom))

    return results


def subst(function: RatFunc, assignment: Mapping[str, Value]) -> RatFunc:
    """
    Substitutes rational functions or rationals for variables.

    Example:
        ```py
        vt = VarTable(["x", "dt"])
        x = RatFunc.variable(vt, "x")
        subst(1 / x, {"x": 0})  # raises ExceptionalLocusError
        ```

    """
    return subst_many([function], assignment)[0]
