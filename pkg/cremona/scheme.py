from __future__ import annotations

import functools
import logging
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Sequence, Tuple, Union

import numpy as np

from .algebra import (
    STEP,
    MultiPoly,
    RatFunc,
    Scanner,
    VarTable,
    bareiss_det,
    bareiss_solve,
    hat_name,
    parse_ratfunc,
    subst_many,
)
from .enums import SchemeVariant
from .errors import (
    ComputationError,
    ExceptionalLocusError,
    NonBirationalWarning,
    ParseError,
    PoleError,
    UsageError,
)
from .model import QuadSystem

__all__ = (
    "PolarizedScheme",
    "CremonaMap",
    "POLE_THRESHOLD",
    "polarize",
    "defining_equations",
    "build_map",
    "invert_map",
    "compose",
    "mobius_matrix",
    "eval_map_float",
    "eval_map_exact",
    "format_map",
    "parse_map",
)

logger = logging.getLogger(__name__)

POLE_THRESHOLD = 1e-14

Scalar = Union[int, Fraction]


@dataclass(frozen=True)
class PolarizedScheme:
    """
    The implicit one-step scheme x̂ − x = τ·F(x, x̂) of a quadratic system.

    In the polarized variant F_i(x, x̂) = xᵀQ_i x̂ + B_i·(x + x̂)/2 + c_i, so squares become
    x_j·x̂_j and cross terms (x_j·x̂_k + x̂_j·x_k)/2; the equations are jointly linear in x̂.
    The literal variant maps cross terms to (x_j + x̂_j)(x_k + x̂_k)/4 instead.

    Attributes:
        system (cremona.model.QuadSystem): The discretized system.
        variant (cremona.enums.SchemeVariant): The polarization rule.

    """

    system: QuadSystem
    variant: SchemeVariant = SchemeVariant.polarized

    @property
    def quadratic(self) -> Tuple[Tuple[Tuple[Fraction, ...], ...], ...]:
        return self.system.quadratic

    @property
    def linear(self) -> Tuple[Tuple[Fraction, ...], ...]:
        return self.system.linear

    @property
    def constant(self) -> Tuple[Fraction, ...]:
        return self.system.constant

    @property
    def birational(self) -> bool:
        """
        Whether the scheme defines a Cremona map, i.e. is jointly linear in x̂.
        """
        return self.variant is SchemeVariant.polarized or not self.system.has_cross_terms

    @functools.cached_property
    def arrays(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        The coefficients (Q, B, c) as float arrays of shapes (m, m, m), (m, m) and (m,).
        """
        quadratic = np.array([[[float(v) for v in row] for row in matrix] for matrix in self.quadratic])
        linear = np.array([[float(v) for v in row] for row in self.linear])
        constant = np.array([float(v) for v in self.constant])

        return quadratic, linear, constant


def polarize(system: QuadSystem, variant: SchemeVariant = SchemeVariant.polarized) -> PolarizedScheme:
    """
    Builds the scheme of a system.

    Parameters:
        system (QuadSystem): The system.
        variant (SchemeVariant): `polarized` (default) or `literal`.

    Warns:
        [cremona.errors.NonBirationalWarning][] for the literal variant of a system with
            cross terms; such a scheme is usable numerically only.

    """
    scheme = PolarizedScheme(system, SchemeVariant(variant))

    if not scheme.birational:
        warnings.warn(
            f"literal product rule on {system.name or 'system'} with cross terms is not birational; "
            "only numeric evaluation is available",
            NonBirationalWarning,
            stacklevel=2,
        )

    return scheme


def defining_equations(scheme: PolarizedScheme) -> List[MultiPoly]:
    """
    The polynomials g_i = x̂_i − x_i − τ·F_i(x, x̂) over the table (x, x̂, dt).
    """
    system = scheme.system
    vartable = VarTable.for_state(system.state, hats=True)
    size = system.dimension

    x = [MultiPoly.variable(vartable, name) for name in system.state]
    xhat = [MultiPoly.variable(vartable, hat_name(name)) for name in system.state]
    dt = MultiPoly.variable(vartable, STEP)
    half, quarter = Fraction(1, 2), Fraction(1, 4)

    equations = []
    for i in range(size):
        rhs = MultiPoly.constant(vartable, scheme.constant[i])

        for j in range(size):
            rhs = rhs + (x[j] + xhat[j]) * (scheme.linear[i][j] * half)

            for k in range(size):
                coeff = scheme.quadratic[i][j][k]
                if not coeff:
                    continue

                if j == k or scheme.variant is SchemeVariant.polarized:
                    rhs = rhs + x[j] * xhat[k] * coeff
                else:
                    rhs = rhs + (x[j] + xhat[j]) * (x[k] + xhat[k]) * (coeff * quarter)

        equations.append(xhat[i] - x[i] - dt * rhs)

    return equations


def _linear_system(system: QuadSystem, vartable: VarTable) -> Tuple[List[List[MultiPoly]], List[MultiPoly]]:
    size = system.dimension
    x = [MultiPoly.variable(vartable, name) for name in system.state]
    dt = MultiPoly.variable(vartable, STEP)
    half = Fraction(1, 2)

    matrix = []
    rhs = []
    for i in range(size):
        row = []
        for j in range(size):
            entry = MultiPoly.constant(vartable, system.linear[i][j] * half)
            for k in range(size):
                entry = entry + x[k] * system.quadratic[i][k][j]

            identity = 1 if i == j else 0
            row.append(identity - dt * entry)

        matrix.append(row)

        forcing = MultiPoly.constant(vartable, system.constant[i])
        for j in range(size):
            forcing = forcing + x[j] * (system.linear[i][j] * half)

        rhs.append(x[i] + dt * forcing)

    return matrix, rhs


@dataclass(frozen=True)
class CremonaMap:
    """
    The birational step map x̂ = C(τ)x of a polarized scheme.

    Attributes:
        system (cremona.model.QuadSystem): The discretized system.
        components (Tuple[cremona.algebra.RatFunc, ...]): One reduced rational function in
            (x, dt) per state variable.
        denominator (cremona.algebra.MultiPoly): The shared denominator D = det(I − τ(L(x) + B/2));
            the map is undefined where it vanishes.

    """

    system: QuadSystem
    components: Tuple[RatFunc, ...]
    denominator: MultiPoly
    scheme: PolarizedScheme = field(compare=False, repr=False)

    def __repr__(self) -> str:
        return f"<CremonaMap system={self.system.name!r} dimension={len(self.components)}>"

    @property
    def vartable(self) -> VarTable:
        return self.denominator.vartable

    @property
    def state(self) -> Tuple[str, ...]:
        return self.system.state

    def format(self) -> str:
        return format_map(self)


def build_map(scheme: PolarizedScheme) -> CremonaMap:
    """
    Solves the scheme for x̂ by fraction-free elimination.

    The defining equations are rewritten as (I − τ(L(x) + B/2))·x̂ = x + τ(B·x/2 + c), where
    row i of L(x) is xᵀQ_i.

    Raises:
        [cremona.errors.UsageError][] if the scheme is not birational.
        [cremona.errors.SingularError][] if the system matrix is identically singular.

    Example:
        ```py
        cremona_map = build_map(polarize(builtin_system("riccati")))
        print(cremona_map.format())  # ... xhat = (-x) / (x*dt - 1)
        ```

    """
    if not scheme.birational:
        raise UsageError("the literal product rule with cross terms has no rational step map")

    system = scheme.system
    vartable = VarTable.for_state(system.state)
    matrix, rhs = _linear_system(system, vartable)

    components = tuple(bareiss_solve(matrix, rhs))
    denominator = bareiss_det(matrix)

    logger.info(f"MAP BUILT: {system.name or 'system'} denominator degree {denominator.total_degree()}")
    return CremonaMap(system, components, denominator, scheme)


def _negate_step(poly: MultiPoly) -> MultiPoly:
    index = poly.vartable.index(STEP)
    return MultiPoly.from_terms(
        poly.vartable,
        [(monom, -coeff if monom[index] % 2 else coeff) for monom, coeff in poly.terms()],
    )


def invert_map(cremona_map: CremonaMap) -> CremonaMap:
    """
    The inverse map, C(τ)⁻¹ = C(−τ).
    """
    components = tuple(
        RatFunc(_negate_step(component.numer), _negate_step(component.denom), reduced=True)
        for component in cremona_map.components
    )

    return CremonaMap(cremona_map.system, components, _negate_step(cremona_map.denominator), cremona_map.scheme)


def compose(outer: CremonaMap, inner: Union[CremonaMap, Sequence[RatFunc]]) -> List[RatFunc]:
    """
    The components of outer ∘ inner, i.e. x ↦ outer(inner(x)).

    Raises:
        [cremona.errors.ExceptionalLocusError][] if inner lies inside the exceptional locus of outer.

    """
    functions = inner.components if isinstance(inner, CremonaMap) else tuple(inner)
    return subst_many(list(outer.components), dict(zip(outer.state, functions)))


def _coefficient(poly: MultiPoly, name: str, exponent: int) -> MultiPoly:
    index = poly.vartable.index(name)
    terms = []

    for monom, coeff in poly.terms():
        if monom[index] == exponent:
            stripped = list(monom)
            stripped[index] = 0
            terms.append((stripped, coeff))

    return MultiPoly.from_terms(poly.vartable, terms)


def mobius_matrix(cremona_map: CremonaMap) -> Tuple[Tuple[MultiPoly, MultiPoly], Tuple[MultiPoly, MultiPoly]]:
    """
    For a one-dimensional map x̂ = (αx + β)/(γx + δ), the matrix ((α, β), (γ, δ)) with entries
    polynomial in τ.

    Raises:
        [cremona.errors.UsageError][] if the map is not one-dimensional.

    """
    if len(cremona_map.components) != 1:
        raise UsageError("only one-dimensional maps are Möbius transformations")

    (name,) = cremona_map.state
    component = cremona_map.components[0]

    if component.numer.degree(name) > 1 or component.denom.degree(name) > 1:
        raise ComputationError(f"{component} is not a Möbius transformation")

    return (
        (_coefficient(component.numer, name, 1), _coefficient(component.numer, name, 0)),
        (_coefficient(component.denom, name, 1), _coefficient(component.denom, name, 0)),
    )


def _pole_check(matrix: np.ndarray, state: Sequence[float], dt: float) -> None:
    determinant = float(np.linalg.det(matrix))
    scale = float(np.prod(np.linalg.norm(matrix, axis=1)))

    if not np.isfinite(determinant) or abs(determinant) <= POLE_THRESHOLD * scale:
        raise PoleError(state, dt, determinant)


def _step_polarized(scheme: PolarizedScheme, x: np.ndarray, dt: float) -> np.ndarray:
    quadratic, linear, constant = scheme.arrays
    size = len(x)

    # row i of L(x) is xᵀQ_i
    matrix = np.eye(size) - dt * (np.einsum("k,ikj->ij", x, quadratic) + linear / 2)
    rhs = x + dt * (linear @ x / 2 + constant)

    _pole_check(matrix, x, dt)
    return np.linalg.solve(matrix, rhs)


def _step_literal(scheme: PolarizedScheme, x: np.ndarray, dt: float, *, max_iterations: int = 50) -> np.ndarray:
    quadratic, linear, constant = scheme.arrays
    size = len(x)
    diagonal = np.einsum("ijj->ij", quadratic)
    off = quadratic.copy()
    for j in range(size):
        off[:, j, j] = 0.0

    xhat = _step_polarized(scheme, x, dt)
    for _ in range(max_iterations):
        s = x + xhat
        residual = (
            xhat
            - x
            - dt * (diagonal @ (x * xhat) + np.einsum("ijk,j,k->i", off, s, s) / 4 + linear @ s / 2 + constant)
        )
        jacobian = np.eye(size) - dt * (diagonal * x + np.einsum("ilk,k->il", off, s) / 2 + linear / 2)

        _pole_check(jacobian, x, dt)
        delta = np.linalg.solve(jacobian, residual)
        xhat = xhat - delta

        if np.max(np.abs(delta)) <= 1e-15 * max(1.0, float(np.max(np.abs(xhat)))):
            return xhat

    raise ComputationError(f"Newton iteration of the literal scheme did not converge at {tuple(x)}")


def eval_map_float(scheme: PolarizedScheme, x: Sequence[float], dt: float) -> np.ndarray:
    """
    One float step: assembles the linear system and solves it with partial pivoting.

    Parameters:
        scheme (PolarizedScheme): The scheme; the literal variant runs Newton's method
            seeded with the polarized step.
        x (Sequence[float]): The state.
        dt (float): The step.

    Returns:
        The next state.

    Raises:
        [cremona.errors.PoleError][] if |det| < 1e-14 · Π‖row‖, i.e. the state is numerically
            on the exceptional locus.

    """
    state = np.asarray(x, dtype=float)
    if len(state) != scheme.system.dimension:
        raise UsageError(f"expected {scheme.system.dimension} values, got {len(state)}")

    if dt == 0:
        return state.copy()

    if scheme.variant is SchemeVariant.literal and scheme.system.has_cross_terms:
        return _step_literal(scheme, state, float(dt))

    return _step_polarized(scheme, state, float(dt))


def eval_map_exact(cremona_map: CremonaMap, x: Sequence[Scalar], dt: Scalar) -> List[Fraction]:
    """
    One exact step.

    Raises:
        [cremona.errors.ExceptionalLocusError][] if D(x, dt) = 0.

    """
    if len(x) != len(cremona_map.state):
        raise UsageError(f"expected {len(cremona_map.state)} values, got {len(x)}")

    point = [Fraction(value) for value in x] + [Fraction(dt)]
    if cremona_map.denominator.evaluate(point) == 0:
        raise ExceptionalLocusError(f"state {tuple(point[:-1])} is on the exceptional locus at dt={dt}", tuple(x))

    return [component.evaluate(point) for component in cremona_map.components]


def format_map(cremona_map: CremonaMap) -> str:
    """
    One `xhat = (numer) / (denom)` line per component, preceded by the shared denominator
    as a comment.
    """
    lines = [f"# denominator: {cremona_map.denominator.format()}"]
    for name, component in zip(cremona_map.state, cremona_map.components):
        lines.append(f"{hat_name(name)} = ({component.numer.format()}) / ({component.denom.format()})")

    return "\n".join(lines) + "\n"


def parse_map(text: str, system: QuadSystem, variant: SchemeVariant = SchemeVariant.polarized) -> CremonaMap:
    """
    Reads a map printed by [cremona.scheme.format_map][] for a system.

    Raises:
        [cremona.errors.ParseError][] on malformed lines or a component out of order.

    """
    vartable = VarTable.for_state(system.state)
    scheme = PolarizedScheme(system, SchemeVariant(variant))
    components: List[RatFunc] = []
    rows = [(number, line) for number, line in enumerate(text.split("\n"), 1) if Scanner(line).tokens]

    for (number, line), name in zip(rows, system.state):
        target, separator, expression = line.partition("=")
        if not separator or target.strip() != hat_name(name):
            raise ParseError(f"expected '{hat_name(name)} = ...'", number, 1, line)

        try:
            components.append(parse_ratfunc(expression, vartable))
        except ParseError as error:
            raise type(error)(error.reason, number, error.column + len(target) + 1, line) from None

    if len(rows) != system.dimension:
        raise ParseError(f"expected {system.dimension} components, found {len(rows)}", len(text.split("\n")), 1)

    matrix, _ = _linear_system(system, vartable)
    return CremonaMap(system, tuple(components), bareiss_det(matrix), scheme)