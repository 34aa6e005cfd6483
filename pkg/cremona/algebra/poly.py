from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, Union

from sympy.polys.domains import QQ, ZZ
from sympy.polys.euclidtools import dmp_rr_prs_gcd
from sympy.polys.polyerrors import ExactQuotientFailed, HeuristicGCDFailed
from sympy.polys.rings import PolyElement

from ..errors import UsageError
from .vartable import VarTable

__all__ = (
    "Rational",
    "Monomial",
    "MultiPoly",
    "poly_arith",
    "poly_gcd",
    "poly_lcm",
    "to_fraction",
    "to_qq",
)

Rational = Fraction
Monomial = Tuple[int, ...]
Scalar = Union[int, Fraction]


def to_qq(value: Scalar):
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


def to_fraction(coeff) -> Fraction:
    return Fraction(int(coeff.numerator), int(coeff.denominator))


class MultiPoly:
    """
    A sparse multivariate polynomial over the rationals.

    Terms are kept in graded-lexicographic order of the owning [cremona.algebra.VarTable][];
    the zero polynomial has no terms. Instances are immutable.

    Attributes:
        vartable (cremona.algebra.VarTable): The table the exponent vectors are aligned with.

    """

    __slots__ = ("vartable", "_poly")

    def __init__(self, vartable: VarTable, poly: PolyElement) -> None:
        self.vartable = vartable
        self._poly = poly

    @classmethod
    def zero(cls, vartable: VarTable) -> MultiPoly:
        return cls(vartable, vartable.ring.zero)

    @classmethod
    def one(cls, vartable: VarTable) -> MultiPoly:
        return cls(vartable, vartable.ring.one)

    @classmethod
    def constant(cls, vartable: VarTable, value: Scalar) -> MultiPoly:
        return cls(vartable, vartable.ring.ground_new(to_qq(value)))

    @classmethod
    def variable(cls, vartable: VarTable, name: str) -> MultiPoly:
        return cls(vartable, vartable.ring.gens[vartable.index(name)])

    @classmethod
    def from_terms(cls, vartable: VarTable, terms: Iterable[Tuple[Sequence[int], Scalar]]) -> MultiPoly:
        """
        Builds a polynomial from (exponent vector, coefficient) pairs.
        Repeated monomials are summed and zero coefficients dropped.
        """
        size = len(vartable)
        collected: Dict[Monomial, Fraction] = {}

        for monom, coeff in terms:
            monom = tuple(monom)
            if len(monom) != size:
                raise UsageError(f"monomial {monom} does not match {vartable!r}")

            collected[monom] = collected.get(monom, Fraction(0)) + Fraction(coeff)

        data = {monom: to_qq(coeff) for monom, coeff in collected.items() if coeff}
        return cls(vartable, vartable.ring.from_dict(data))

    def __repr__(self) -> str:
        return f"<MultiPoly {self.format()!r}>"

    def __str__(self) -> str:
        return self.format()

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            return self == MultiPoly.constant(self.vartable, other)

        if not isinstance(other, MultiPoly):
            return NotImplemented

        return self.vartable == other.vartable and self._poly == other._poly

    def __hash__(self) -> int:
        return hash((self.vartable, tuple(self._poly.terms())))

    def __bool__(self) -> bool:
        return bool(self._poly)

    def _coerce(self, other: Union[MultiPoly, Scalar]) -> PolyElement:
        if isinstance(other, MultiPoly):
            if other.vartable != self.vartable:
                raise UsageError(f"mismatched variable tables {self.vartable!r} and {other.vartable!r}")

            return other._poly

        if isinstance(other, (int, Fraction)):
            return self.vartable.ring.ground_new(to_qq(other))

        raise UsageError(f"cannot combine a polynomial with {type(other).__name__}")

    def __add__(self, other: Union[MultiPoly, Scalar]) -> MultiPoly:
        return MultiPoly(self.vartable, self._poly + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other: Union[MultiPoly, Scalar]) -> MultiPoly:
        return MultiPoly(self.vartable, self._poly - self._coerce(other))

    def __rsub__(self, other: Scalar) -> MultiPoly:
        return MultiPoly(self.vartable, self._coerce(other) - self._poly)

    def __mul__(self, other: Union[MultiPoly, Scalar]) -> MultiPoly:
        return MultiPoly(self.vartable, self._poly * self._coerce(other))

    __rmul__ = __mul__

    def __neg__(self) -> MultiPoly:
        return MultiPoly(self.vartable, -self._poly)

    def __pow__(self, exponent: int) -> MultiPoly:
        if exponent < 0:
            raise UsageError("negative powers of a polynomial are rational functions")

        return MultiPoly(self.vartable, self._poly**exponent)

    @property
    def is_zero(self) -> bool:
        return not self._poly

    @property
    def is_constant(self) -> bool:
        return all(not any(monom) for monom in self._poly.keys())

    @property
    def constant_value(self) -> Fraction:
        """
        The value of a constant polynomial.

        Raises:
            [cremona.errors.UsageError][] if the polynomial is not constant.

        """
        if not self.is_constant:
            raise UsageError(f"{self} is not constant")

        return to_fraction(self._poly.get(self.vartable.ring.zero_monom, QQ.zero))

    def terms(self) -> List[Tuple[Monomial, Fraction]]:
        """
        Returns the terms in graded-lexicographic descending order.
        """
        return [(monom, to_fraction(coeff)) for monom, coeff in self._poly.terms()]

    @property
    def leading_coefficient(self) -> Fraction:
        return to_fraction(self._poly.LC) if self._poly else Fraction(0)

    def __len__(self) -> int:
        return len(self._poly)

    def total_degree(self) -> int:
        """
        The total degree; -1 for the zero polynomial.
        """
        return max((sum(monom) for monom in self._poly.keys()), default=-1)

    def degree(self, name: str) -> int:
        index = self.vartable.index(name)
        return max((monom[index] for monom in self._poly.keys()), default=-1)

    def degree_in(self, names: Iterable[str]) -> int:
        """
        The total degree in a subset of the variables, the others treated as coefficients.
        """
        indices = self.vartable.indices(list(names))
        return max((sum(monom[i] for i in indices) for monom in self._poly.keys()), default=-1)

    def variables(self) -> Tuple[str, ...]:
        used = [any(monom[i] for monom in self._poly.keys()) for i in range(len(self.vartable))]
        return tuple(name for name, flag in zip(self.vartable.names, used) if flag)

    def is_univariate_in(self, name: str) -> bool:
        return set(self.variables()) <= {name}

    def univariate_coeffs(self, name: str) -> List:
        """
        Dense coefficient list (highest degree first) over QQ, for univariate polynomials.

        Raises:
            [cremona.errors.UsageError][] if another variable occurs.

        """
        if not self.is_univariate_in(name):
            raise UsageError(f"{self} is not univariate in {name}")

        index = self.vartable.index(name)
        degree = self.degree(name)
        coeffs = [QQ.zero] * (degree + 1)

        for monom, coeff in self._poly.items():
            coeffs[degree - monom[index]] = coeff

        return coeffs

    def diff(self, name: str) -> MultiPoly:
        return MultiPoly(self.vartable, self._poly.diff(self.vartable.ring.gens[self.vartable.index(name)]))

    def exquo(self, other: MultiPoly) -> MultiPoly:
        """
        Exact division.

        Raises:
            [cremona.errors.UsageError][] if the division leaves a remainder.

        """
        divisor = self._coerce(other)
        if not divisor:
            raise UsageError("division by the zero polynomial")

        try:
            return MultiPoly(self.vartable, self._poly.exquo(divisor))
        except ExactQuotientFailed:
            raise UsageError(f"{other} does not divide {self}") from None

    def divides(self, other: MultiPoly) -> bool:
        if self.is_zero:
            return other.is_zero

        try:
            other.exquo(self)
        except UsageError:
            return False

        return True

    def primitive(self) -> MultiPoly:
        """
        Scales to integer coefficients with content one and a positive leading coefficient.
        """
        if not self._poly:
            return self

        coeffs = [to_fraction(coeff) for coeff in self._poly.values()]
        denominator = math.lcm(*(coeff.denominator for coeff in coeffs))
        content = math.gcd(*(coeff.numerator * (denominator // coeff.denominator) for coeff in coeffs))
        scale = Fraction(denominator, content)

        if self.leading_coefficient < 0:
            scale = -scale

        return self * scale

    def evaluate(self, point: Union[Mapping[str, Scalar], Sequence[Scalar]]) -> Fraction:
        """
        Exact value at a point given for every variable of the table.
        """
        values = self._point(point)
        return to_fraction(self._poly(*[to_qq(value) for value in values])) if self._poly else Fraction(0)

    def evaluate_float(self, point: Union[Mapping[str, float], Sequence[float]]) -> float:
        values = [float(value) for value in self._point(point)]
        total = 0.0

        for monom, coeff in self._poly.items():
            term = float(to_fraction(coeff))
            for value, exponent in zip(values, monom):
                if exponent:
                    term *= value**exponent

            total += term

        return total

    def _point(self, point: Union[Mapping[str, Scalar], Sequence[Scalar]]) -> List:
        if isinstance(point, Mapping):
            missing = [name for name in self.variables() if name not in point]
            if missing:
                raise UsageError(f"no value given for {missing}")

            return [point.get(name, 0) for name in self.vartable.names]

        values = list(point)
        if len(values) != len(self.vartable):
            raise UsageError(f"expected {len(self.vartable)} values, got {len(values)}")

        return values

    def convert(self, vartable: VarTable) -> MultiPoly:
        """
        Moves the polynomial to another table, matching variables by name.

        Raises:
            [cremona.errors.UsageError][] if a variable in use is missing from the target.

        """
        if vartable == self.vartable:
            return self

        used = set(self.variables())
        positions = [(self.vartable.index(name), vartable.index(name)) for name in self.vartable.names if name in used]
        size = len(vartable)
        data = {}

        for monom, coeff in self._poly.items():
            target = [0] * size
            for source_index, target_index in positions:
                target[target_index] = monom[source_index]

            data[tuple(target)] = coeff

        return MultiPoly(vartable, vartable.ring.from_dict(data))

    def to_zz(self) -> PolyElement:
        _, cleared = self._poly.clear_denoms()
        return self.vartable.zz_ring.from_dict({monom: ZZ(int(coeff.numerator)) for monom, coeff in cleared.items()})

    def format(self) -> str:
        """
        Canonical text: graded-lex descending terms, explicit `*` and `^`.
        """
        if not self._poly:
            return "0"

        pieces: List[str] = []
        for index, (monom, coeff) in enumerate(self.terms()):
            factors = [
                name if exponent == 1 else f"{name}^{exponent}"
                for name, exponent in zip(self.vartable.names, monom)
                if exponent
            ]
            magnitude = abs(coeff)

            if not factors:
                body = str(magnitude)
            elif magnitude == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(magnitude)] + factors)

            if index == 0:
                pieces.append(f"-{body}" if coeff < 0 else body)
            else:
                pieces.append(f"{'-' if coeff < 0 else '+'} {body}")

        return " ".join(pieces)


def _check(a: MultiPoly, b: MultiPoly) -> None:
    if a.vartable != b.vartable:
        raise UsageError(f"mismatched variable tables {a.vartable!r} and {b.vartable!r}")


def poly_arith(a: MultiPoly, b: MultiPoly, op: str) -> MultiPoly:
    """
    Exact ring arithmetic.

    Parameters:
        a (MultiPoly): The left operand.
        b (MultiPoly): The right operand, over the same table.
        op (str): One of `add`, `sub` or `mul`.

    Raises:
        [cremona.errors.UsageError][] on mismatched tables or an unknown operation.

    """
    _check(a, b)

    if op == "add":
        return a + b
    elif op == "sub":
        return a - b
    elif op == "mul":
        return a * b

    raise UsageError(f"unknown polynomial operation {op!r}")


def poly_gcd(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    """
    Greatest common divisor, primitive with a positive leading coefficient.

    The heuristic evaluation gcd is tried first; its result is verified by trial division,
    and the subresultant PRS with content recursion takes over when it gives up.
    gcd(p, 0) is the primitive part of p.

    """
    _check(a, b)
    vartable = a.vartable

    if a.is_zero and b.is_zero:
        return a

    f, g = a.to_zz(), b.to_zz()

    try:
        h = f.gcd(g)
    except HeuristicGCDFailed:
        level = len(vartable) - 1
        dense, _, _ = dmp_rr_prs_gcd(f.to_dense(), g.to_dense(), level, ZZ)
        h = vartable.zz_ring.from_list(dense)

    result = MultiPoly(vartable, vartable.ring.from_dict({monom: QQ(int(coeff)) for monom, coeff in h.items()}))
    return result.primitive()


def poly_lcm(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    if a.is_zero or b.is_zero:
        return MultiPoly.zero(a.vartable)

    return (a * b).exquo(poly_gcd(a, b)).primitive()
