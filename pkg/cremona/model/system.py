from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from ..algebra import MultiPoly, VarTable
from ..errors import DegreeError, NotAnInvariantError, UsageError

__all__ = (
    "QuadSystem",
    "Invariant",
    "rhs_eval",
    "lie_derivative",
)

logger = logging.getLogger(__name__)

Number = Union[int, Fraction, float]
Row = Tuple[Fraction, ...]


@dataclass(frozen=True)
class QuadSystem:
    """
    A quadratic dynamical system x' = f(x), f_i(x) = xᵀQ_i x + B_i·x + c_i.

    Parameters are exact rationals, already substituted into the coefficients;
    they are kept for printing.

    Attributes:
        state (Tuple[str, ...]): The state variable names.
        params (Tuple[Tuple[str, Fraction], ...]): The parameter bindings in declaration order.
        constant (Tuple[Fraction, ...]): The constants c_i.
        linear (Tuple[Tuple[Fraction, ...], ...]): The rows B_i.
        quadratic (Tuple[Tuple[Tuple[Fraction, ...], ...], ...]): The symmetric matrices Q_i.
        name (str): A label, ignored by equality.

    """

    state: Tuple[str, ...]
    params: Tuple[Tuple[str, Fraction], ...]
    constant: Tuple[Fraction, ...]
    linear: Tuple[Row, ...]
    quadratic: Tuple[Tuple[Row, ...], ...]
    name: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        size = len(self.state)
        if size < 1:
            raise UsageError("a system needs at least one state variable")

        if len(self.constant) != size or len(self.linear) != size or len(self.quadratic) != size:
            raise UsageError(f"a system of dimension {size} needs {size} components")

        for i, matrix in enumerate(self.quadratic):
            if len(self.linear[i]) != size or len(matrix) != size or any(len(row) != size for row in matrix):
                raise UsageError(f"component {i} has the wrong shape")

            if any(matrix[j][k] != matrix[k][j] for j in range(size) for k in range(j)):
                raise UsageError(f"quadratic form of component {i} is not symmetric")

    def __repr__(self) -> str:
        return f"<QuadSystem name={self.name!r} state={self.state}>"

    @property
    def dimension(self) -> int:
        return len(self.state)

    @property
    def vartable(self) -> VarTable:
        return VarTable(self.state)

    @property
    def param_dict(self) -> Dict[str, Fraction]:
        return dict(self.params)

    @property
    def has_cross_terms(self) -> bool:
        size = self.dimension
        return any(matrix[j][k] for matrix in self.quadratic for j in range(size) for k in range(size) if j != k)

    @classmethod
    def from_polys(
        cls,
        state: Sequence[str],
        polys: Sequence[MultiPoly],
        *,
        params: Optional[Mapping[str, Fraction]] = None,
        name: str = "",
    ) -> QuadSystem:
        """
        Builds a system from right-hand side polynomials over the table of `state`.

        Raises:
            [cremona.errors.DegreeError][] if a right-hand side has total degree above two.

        """
        state = tuple(state)
        size = len(state)
        constant: List[Fraction] = []
        linear: List[Row] = []
        quadratic: List[Tuple[Row, ...]] = []

        for i, poly in enumerate(polys):
            poly = poly.convert(VarTable(state))
            degree = poly.total_degree()
            if degree > 2:
                raise DegreeError(f"right-hand side of {state[i]}' has degree {degree}", degree)

            c = Fraction(0)
            b = [Fraction(0)] * size
            q = [[Fraction(0)] * size for _ in range(size)]

            for monom, coeff in poly.terms():
                support = [j for j, exponent in enumerate(monom) if exponent]
                if not support:
                    c = coeff
                elif sum(monom) == 1:
                    b[support[0]] = coeff
                elif len(support) == 1:
                    q[support[0]][support[0]] = coeff
                else:
                    j, k = support
                    q[j][k] = q[k][j] = coeff / 2

            constant.append(c)
            linear.append(tuple(b))
            quadratic.append(tuple(tuple(row) for row in q))

        return cls(
            state,
            tuple((key, Fraction(value)) for key, value in (params or {}).items()),
            tuple(constant),
            tuple(linear),
            tuple(quadratic),
            name,
        )

    def rhs_polys(self, vartable: Optional[VarTable] = None) -> List[MultiPoly]:
        """
        The right-hand sides as polynomials over `vartable` (the state table by default).
        """
        vartable = vartable or self.vartable
        size = self.dimension
        indices = vartable.indices(self.state)
        polys = []

        for i in range(size):
            terms = [([0] * len(vartable), self.constant[i])]

            for j in range(size):
                monom = [0] * len(vartable)
                monom[indices[j]] = 1
                terms.append((monom, self.linear[i][j]))

                for k in range(size):
                    monom = [0] * len(vartable)
                    monom[indices[j]] += 1
                    monom[indices[k]] += 1
                    terms.append((monom, self.quadratic[i][j][k]))

            polys.append(MultiPoly.from_terms(vartable, terms))

        return polys


def rhs_eval(system: QuadSystem, x: Sequence[Number]) -> List[Number]:
    """
    Evaluates f(x), exactly for rational input and in floating point if any entry is a float.

    Raises:
        [cremona.errors.UsageError][] if x has the wrong length.

    """
    if len(x) != system.dimension:
        raise UsageError(f"expected {system.dimension} values, got {len(x)}")

    exact = not any(isinstance(value, float) for value in x)
    convert = Fraction if exact else float
    values = [convert(value) for value in x]
    result: List[Number] = []

    for i in range(system.dimension):
        total = convert(system.constant[i])
        for j, xj in enumerate(values):
            total += convert(system.linear[i][j]) * xj
            for k, xk in enumerate(values):
                if system.quadratic[i][j][k]:
                    total += convert(system.quadratic[i][j][k]) * xj * xk

        result.append(total)

    return result


def lie_derivative(system: QuadSystem, poly: MultiPoly) -> MultiPoly:
    """
    The derivative of `poly` along the flow, Σ ∂poly/∂x_i · f_i.
    """
    vartable = poly.vartable
    total = MultiPoly.zero(vartable)

    for name, rhs in zip(system.state, system.rhs_polys(vartable)):
        total = total + poly.diff(name) * rhs

    return total


@dataclass(frozen=True)
class Invariant:
    """
    A first integral of a system, checked on construction.

    Attributes:
        name (str): The label, e.g. `energy`.
        poly (cremona.algebra.MultiPoly): The integral over the state table.
        system (QuadSystem): The system it is conserved by.

    Raises:
        [cremona.errors.NotAnInvariantError][] if the Lie derivative is not identically zero.

    """

    name: str
    poly: MultiPoly
    system: QuadSystem = field(repr=False)

    def __post_init__(self) -> None:
        residual = lie_derivative(self.system, self.poly)
        if not residual.is_zero:
            raise NotAnInvariantError(self.name, residual)

        logger.debug(f"INVARIANT CHECKED: {self.name} = {self.poly}")

    def evaluate(self, x: Sequence[Number]) -> Number:
        """
        The value at a state, exact for rationals and float otherwise.
        """
        point = dict(zip(self.system.state, x))
        if any(isinstance(value, float) for value in x):
            return self.poly.evaluate_float(point)

        return self.poly.evaluate(point)
