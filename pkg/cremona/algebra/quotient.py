from __future__ import annotations

import logging
from fractions import Fraction
from typing import Dict, Mapping, Tuple, Union

import sympy
from sympy.polys.domains import QQ
from sympy.polys.polyerrors import NotInvertible

from ..errors import UsageError, ZeroDivisorFound
from .poly import MultiPoly, Scalar, to_fraction, to_qq
from .ratfunc import RatFunc
from .vartable import VarTable

__all__ = ("QuotientRing",)

logger = logging.getLogger(__name__)

Residue = sympy.Poly


class QuotientRing:
    """
    Arithmetic in ℚ[τ]/(g) for a univariate modulus g.

    Elements are residues of degree below deg g. When g is irreducible every nonzero
    residue is invertible; otherwise an inversion may meet a zero divisor, which exposes a
    nontrivial factor of g (dynamic evaluation) through [cremona.errors.ZeroDivisorFound][].

    Attributes:
        modulus (cremona.algebra.MultiPoly): The modulus g, primitive.
        var (str): The variable of g.

    """

    def __init__(self, modulus: MultiPoly, var: str) -> None:
        """
        Parameters:
            modulus (MultiPoly): A non-constant polynomial univariate in `var`.
            var (str): The variable.

        Raises:
            [cremona.errors.UsageError][] if the modulus is constant or not univariate.

        """
        if modulus.is_constant or not modulus.is_univariate_in(var):
            raise UsageError(f"{modulus} is not a usable modulus in {var}")

        self.modulus = modulus.primitive()
        self.var = var
        self.symbol = sympy.Symbol(var)
        self._modulus = self._from_multipoly(self.modulus)

    def __repr__(self) -> str:
        return f"<QuotientRing modulus={self.modulus.format()!r}>"

    @property
    def degree(self) -> int:
        return self.modulus.degree(self.var)

    def _from_multipoly(self, poly: MultiPoly) -> Residue:
        return sympy.Poly.from_list(poly.univariate_coeffs(self.var), self.symbol, domain=QQ)

    def element(self, value: Union[MultiPoly, Scalar]) -> Residue:
        """
        The residue of a polynomial in `var` or of a rational constant.
        """
        if isinstance(value, MultiPoly):
            return self._from_multipoly(value).rem(self._modulus)

        return sympy.Poly.from_list([to_qq(value)], self.symbol, domain=QQ)

    def to_multipoly(self, residue: Residue, vartable: VarTable) -> MultiPoly:
        coeffs = [Fraction(int(c.p), int(c.q)) for c in residue.all_coeffs()]
        index = vartable.index(self.var)
        degree = len(coeffs) - 1
        terms = []

        for position, coeff in enumerate(coeffs):
            monom = [0] * len(vartable)
            monom[index] = degree - position
            terms.append((monom, coeff))

        return MultiPoly.from_terms(vartable, terms)

    def reduce(self, residue: Residue) -> Residue:
        return residue.rem(self._modulus)

    def mul(self, a: Residue, b: Residue) -> Residue:
        return (a * b).rem(self._modulus)

    def is_zero(self, residue: Residue) -> bool:
        return residue.rem(self._modulus).is_zero

    def inverse(self, residue: Residue) -> Residue:
        """
        The inverse of a residue.

        Raises:
            [cremona.errors.ZeroDivisorFound][] with the common factor of the residue and
                the modulus when the residue is a zero divisor (zero included).

        """
        residue = self.reduce(residue)
        if residue.is_zero:
            raise ZeroDivisorFound(self.modulus)

        try:
            return residue.invert(self._modulus)
        except NotInvertible:
            factor = residue.gcd(self._modulus)
            vartable = self.modulus.vartable
            raise ZeroDivisorFound(self.to_multipoly(factor, vartable).primitive()) from None

    def split(self, factor: MultiPoly) -> Tuple[QuotientRing, QuotientRing]:
        """
        The two rings of a factorization g = factor · (g / factor).
        """
        cofactor = self.modulus.exquo(factor)
        logger.debug(f"MODULUS SPLIT: {factor.format()} | {cofactor.format()}")

        return QuotientRing(factor, self.var), QuotientRing(cofactor, self.var)

    def evaluate_poly(self, poly: MultiPoly, assignment: Mapping[str, Residue]) -> Residue:
        """
        Evaluates a polynomial whose variables are assigned residues; `var` itself maps to
        its own residue unless assigned.
        """
        names = poly.vartable.names
        values = {name: assignment[name] for name in names if name in assignment}
        if self.var in names and self.var not in values:
            values[self.var] = self.reduce(sympy.Poly(self.symbol, self.symbol, domain=QQ))

        powers: Dict[Tuple[str, int], Residue] = {}
        total = self.element(0)

        for monom, coeff in poly.terms():
            term = self.element(coeff)
            for name, exponent in zip(names, monom):
                if not exponent:
                    continue

                if name not in values:
                    raise UsageError(f"no residue given for {name}")

                key = (name, exponent)
                if key not in powers:
                    powers[key] = (values[name] ** exponent).rem(self._modulus) if exponent > 1 else values[name]

                term = self.mul(term, powers[key])

            total = total + term

        return self.reduce(total)

    def evaluate(self, function: RatFunc, assignment: Mapping[str, Residue]) -> Residue:
        """
        Evaluates a rational function at residues.

        Raises:
            [cremona.errors.ZeroDivisorFound][] if the denominator is a zero divisor.

        """
        numer = self.evaluate_poly(function.numer, assignment)
        denom = self.evaluate_poly(function.denom, assignment)
        return self.mul(numer, self.inverse(denom))

    def equals(self, residue: Residue, value: Scalar) -> bool:
        return self.is_zero(residue - self.element(value))

    def constant_value(self, residue: Residue) -> Fraction:
        """
        The value of a residue of degree zero.

        Raises:
            [cremona.errors.UsageError][] if the residue is not constant.

        """
        residue = self.reduce(residue)
        if residue.degree() > 0:
            raise UsageError("residue is not constant")

        coeffs = residue.all_coeffs()
        return to_fraction(QQ.from_sympy(coeffs[0])) if coeffs else Fraction(0)
