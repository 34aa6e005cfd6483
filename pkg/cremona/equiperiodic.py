from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import IO, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as npoly
from sympy import divisors

from .algebra import STEP, MultiPoly, RatFunc, VarTable, poly_gcd, subst_many
from .cache import Cache
from .enums import SchemeVariant
from .errors import EmptyCurve, PoleError, ResourceError, UsageError
from .model import QuadSystem
from .scheme import CremonaMap, build_map, eval_map_float, polarize

__all__ = (
    "EquiperiodicSet",
    "CurveSample",
    "iterate_fully_symbolic",
    "equiperiodic_polynomial",
    "degree_table",
    "sample_curve",
)

logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]

# (map, fixed step) -> [(components of Cᵏ, numerator of D∘C^(k-1) or None for k = 0), ...]
_stages: Cache[List[Tuple[Tuple[RatFunc, ...], Optional[MultiPoly]]]] = Cache(maxlen=16)


def _size(components: Sequence[RatFunc]) -> int:
    return sum(len(component.numer) + len(component.denom) for component in components)


def _base(cremona_map: CremonaMap, fix_dt: Optional[Fraction]) -> Tuple[List[RatFunc], RatFunc]:
    functions = [*cremona_map.components, RatFunc(cremona_map.denominator)]
    if fix_dt is not None:
        functions = subst_many(functions, {STEP: fix_dt})

    return functions[:-1], functions[-1]


def _compose_stages(cremona_map: CremonaMap, n: int, fix_dt: Optional[Fraction], budget: int):
    key = (cremona_map, fix_dt)
    stages = list(_stages.get(key) or ())
    components, denominator = _base(cremona_map, fix_dt)

    if not stages:
        vartable = cremona_map.vartable
        stages.append((tuple(RatFunc.variable(vartable, name) for name in cremona_map.state), None))

    while len(stages) <= n:
        current, _ = stages[-1]
        assignment = dict(zip(cremona_map.state, current))

        *composed, crossed = subst_many([*components, denominator], assignment)
        size = _size(composed)

        if size > budget:
            partial = [stage for stage, _ in stages]
            raise ResourceError(
                f"stage {len(stages)} of the symbolic iteration has {size} terms (budget {budget})",
                stage=len(stages),
                diagnostics={"terms": size, "budget": budget, "degree": max(c.denom.total_degree() for c in composed)},
                partial=partial,
            )

        stages.append((tuple(composed), crossed.numer))
        logger.debug(f"STAGE COMPOSED: n={len(stages) - 1} terms={size}")

    if len(stages) > len(_stages.get(key) or ()):
        _stages[key] = stages

    return stages[: n + 1]


def iterate_fully_symbolic(
    cremona_map: CremonaMap,
    n: int,
    *,
    fix_dt: Optional[Rational] = None,
    budget: int = 2_000_000,
) -> List[RatFunc]:
    """
    The n-fold composition Cⁿ with both the state and the step symbolic.

    Parameters:
        cremona_map (CremonaMap): The step map.
        n (int): The number of compositions, at least one.
        fix_dt (Optional[Rational]): Substitute this step before composing.
        budget (int): The largest number of terms a stage may have.

    Returns:
        One rational function in (x, dt) per state variable.

    Raises:
        [cremona.errors.ResourceError][] if a stage outgrows the budget; `partial` holds
            the stages composed so far.

    """
    if n < 1:
        raise UsageError("n must be at least one")

    step = None if fix_dt is None else Fraction(fix_dt)
    return list(_compose_stages(cremona_map, n, step, budget)[n][0])


def _strip_step_factor(poly: MultiPoly) -> MultiPoly:
    index = poly.vartable.index(STEP)
    power = min(monom[index] for monom, _ in poly.terms())
    if not power:
        return poly

    return poly.exquo(MultiPoly.variable(poly.vartable, STEP) ** power)


@dataclass(frozen=True)
class EquiperiodicSet:
    """
    The states whose orbit has period n, as the zero set of F_n(x, τ).

    Attributes:
        system (cremona.model.QuadSystem): The system.
        n (int): The order.
        polynomial (cremona.algebra.MultiPoly): F_n over (state, dt), primitive; the constant
            one when the set is empty.
        reduced (Optional[cremona.algebra.MultiPoly]): F_n with the factors it shares with
            F_d, d a proper divisor of n, divided out.
        contains (Tuple[Tuple[int, bool], ...]): For each proper divisor d, whether F_d
            divides F_n.
        fix_dt (Optional[Fraction]): The step substituted before composing, if any.

    """

    system: QuadSystem
    n: int
    polynomial: MultiPoly
    reduced: Optional[MultiPoly] = None
    contains: Tuple[Tuple[int, bool], ...] = ()
    fix_dt: Optional[Fraction] = None

    def __repr__(self) -> str:
        return f"<EquiperiodicSet n={self.n} degree={self.state_degree} step_degree={self.step_degree}>"

    @property
    def is_empty(self) -> bool:
        return self.polynomial.is_constant

    @property
    def state_degree(self) -> int:
        """
        The total degree in the state variables, the step treated as a coefficient.
        """
        return max(0, self.polynomial.degree_in(self.system.state))

    @property
    def step_degree(self) -> int:
        return max(0, self.polynomial.degree(STEP))

    @property
    def reduced_degree(self) -> Optional[int]:
        if self.reduced is None:
            return None

        return max(0, self.reduced.degree_in(self.system.state))


def _fixed_locus(cremona_map: CremonaMap, n: int, fix_dt: Optional[Fraction], budget: int) -> MultiPoly:
    stages = _compose_stages(cremona_map, n, fix_dt, budget)
    vartable = cremona_map.vartable

    gcd = MultiPoly.zero(vartable)
    for name, component in zip(cremona_map.state, stages[n][0]):
        gcd = poly_gcd(gcd, (component - RatFunc.variable(vartable, name)).numer)

    if gcd.is_zero:
        raise UsageError(f"C^{n} is the identity; every state is periodic")

    if fix_dt is None:
        gcd = _strip_step_factor(gcd)

    for _, crossed in stages[1:]:
        common = poly_gcd(gcd, crossed)
        while not common.is_constant:
            gcd = gcd.exquo(common)
            common = poly_gcd(gcd, crossed)

    return MultiPoly.one(vartable) if gcd.is_constant else gcd.primitive()


def equiperiodic_polynomial(
    system: QuadSystem,
    n: int,
    *,
    reduced: bool = True,
    fix_dt: Optional[Rational] = None,
    budget: int = 2_000_000,
    variant: SchemeVariant = SchemeVariant.polarized,
    cremona_map: Optional[CremonaMap] = None,
) -> EquiperiodicSet:
    """
    The equiperiodic set of order n.

    F_n is the gcd of the numerators of Cⁿ(x) − x, with the trivial factor τᵏ and every
    factor shared with an intermediate denominator divided out. Divisor periods stay in
    F_n; the `reduced` variant removes them.

    Parameters:
        system (QuadSystem): The system.
        n (int): The order, at least one.
        reduced (bool): Whether to compute the divisor-reduced variant and the divisor relations.
        fix_dt (Optional[Rational]): Work at a fixed step instead of a symbolic one.
        budget (int): The term budget of the symbolic iteration.
        variant (SchemeVariant): The polarization rule.
        cremona_map (Optional[CremonaMap]): A prebuilt map.

    Returns:
        The set.

    Raises:
        [cremona.errors.ResourceError][] if the iteration outgrows the budget.

    Example:
        ```py
        wp = builtin_system("wp", a=Fraction(1, 2))
        equiperiodic_polynomial(wp, 4).polynomial.format()  # 3*dt^4 - 4
        ```

    """
    cremona_map = cremona_map or build_map(polarize(system, variant))
    step = None if fix_dt is None else Fraction(fix_dt)

    polynomial = _fixed_locus(cremona_map, n, step, budget)
    reduced_poly = None
    relations: List[Tuple[int, bool]] = []

    if reduced:
        reduced_poly = polynomial
        for d in divisors(n)[:-1]:
            divisor_poly = _fixed_locus(cremona_map, d, step, budget)
            relations.append((d, divisor_poly.divides(polynomial)))

            common = poly_gcd(reduced_poly, divisor_poly)
            if not common.is_constant:
                reduced_poly = reduced_poly.exquo(common).primitive()

    result = EquiperiodicSet(system, n, polynomial, reduced_poly, tuple(relations), step)
    logger.info(f"EQUIPERIODIC SET: n={n} degree={result.state_degree} step_degree={result.step_degree}")
    return result


def degree_table(system: QuadSystem, ns: Sequence[int], **kwargs) -> List[Tuple[int, int]]:
    """
    (n, degree of F_n in the state variables) for each n. Keyword arguments go to
    [cremona.equiperiodic.equiperiodic_polynomial][].
    """
    variant = kwargs.pop("variant", SchemeVariant.polarized)
    cremona_map = kwargs.pop("cremona_map", None) or build_map(polarize(system, variant))
    kwargs.setdefault("reduced", False)

    return [(n, equiperiodic_polynomial(system, n, cremona_map=cremona_map, **kwargs).state_degree) for n in ns]


@dataclass(frozen=True)
class CurveSample:
    """
    Points on a plane slice of an equiperiodic set.

    Attributes:
        names (Tuple[str, str]): The two free state variables, in column order.
        points (numpy.ndarray): An (N, 2) array of points.
        fixed (Dict[str, Fraction]): The values of the other state variables.

    """

    names: Tuple[str, str]
    points: np.ndarray
    fixed: Dict[str, Fraction]

    def __len__(self) -> int:
        return len(self.points)

    def states(self, state: Sequence[str]) -> List[Tuple[float, ...]]:
        """
        The sampled points as full states in the order of `state`.
        """
        values = []
        for x, y in self.points:
            point = {self.names[0]: float(x), self.names[1]: float(y)}
            point.update((name, float(value)) for name, value in self.fixed.items())
            values.append(tuple(point[name] for name in state))

        return values

    def to_csv(self, stream: IO[str]) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(self.names)
        writer.writerows([f"{x:.17g}", f"{y:.17g}"] for x, y in self.points)


def _coefficient_grid(poly: MultiPoly, names: Tuple[str, str]) -> np.ndarray:
    first, second = poly.vartable.indices(names)
    grid = np.zeros((poly.degree(names[0]) + 1, poly.degree(names[1]) + 1))

    for monom, coeff in poly.terms():
        grid[monom[first], monom[second]] += float(coeff)

    return grid


def _bisect(coeffs: np.ndarray, a: np.ndarray, b: np.ndarray, tol: float, *, max_iterations: int = 200) -> np.ndarray:
    fa = npoly.polyval2d(a[:, 0], a[:, 1], coeffs)

    for _ in range(max_iterations):
        middle = (a + b) / 2
        # an interval is done once it is narrow enough or its midpoint rounds onto an end
        active = (
            (np.linalg.norm(b - a, axis=1) > tol)
            & np.any(middle != a, axis=1)
            & np.any(middle != b, axis=1)
        )
        if not np.any(active):
            break

        fm = npoly.polyval2d(middle[:, 0], middle[:, 1], coeffs)
        same = active & (np.sign(fm) == np.sign(fa))
        other = active & ~same
        root = active & (fm == 0)

        a = np.where((same | root)[:, None], middle, a)
        fa = np.where(same, fm, fa)
        b = np.where(other[:, None], middle, b)

    return (a + b) / 2


def _orbit_defined(found: EquiperiodicSet, states: Sequence[Tuple[float, ...]], tau0: float) -> np.ndarray:
    scheme = polarize(found.system)
    keep = np.ones(len(states), dtype=bool)

    for index, state in enumerate(states):
        current = np.asarray(state)
        try:
            for _ in range(found.n):
                current = eval_map_float(scheme, current, tau0)
        except PoleError:
            keep[index] = False
            continue

        keep[index] = bool(np.all(np.isfinite(current)))

    return keep


def sample_curve(
    polynomial: Union[MultiPoly, EquiperiodicSet],
    tau0: Rational,
    box: Tuple[float, float, float, float],
    grid: int = 400,
    fixed: Optional[Mapping[str, Rational]] = None,
    *,
    tol: float = 1e-13,
) -> CurveSample:
    """
    Samples the curve F(·, ·, τ₀) = 0 on a rectangle.

    F is evaluated on a grid × grid lattice; every lattice edge whose ends have opposite
    signs is bisected to `tol`, and lattice nodes where F vanishes are kept as they are.
    When an [cremona.equiperiodic.EquiperiodicSet][] is given, samples whose float orbit
    meets the exceptional locus within n steps are dropped.

    Parameters:
        polynomial (Union[MultiPoly, EquiperiodicSet]): F over (state, dt).
        tau0 (Rational): The step.
        box (Tuple[float, float, float, float]): `(xmin, xmax, ymin, ymax)` for the two free
            variables.
        grid (int): The number of lattice nodes per side, at least two.
        fixed (Optional[Mapping[str, Rational]]): Values for the state variables beyond two.
        tol (float): The bisection tolerance; bisection also stops once an interval no longer
            shrinks in floating point.

    Returns:
        The sample, in lattice order.

    Raises:
        [cremona.errors.EmptyCurve][] if F does not involve the state variables.
        [cremona.errors.UsageError][] if F vanishes identically at τ₀, or the free variables
            are not exactly two.

    """
    found = polynomial if isinstance(polynomial, EquiperiodicSet) else None
    if found is not None:
        polynomial = found.polynomial

    if grid < 2:
        raise UsageError("the grid needs at least two nodes per side")

    xmin, xmax, ymin, ymax = map(float, box)
    if xmin >= xmax or ymin >= ymax:
        raise UsageError(f"empty box {box}")

    vartable = polynomial.vartable
    state = tuple(name for name in vartable.names if name != STEP)
    fixed = {name: Fraction(value) for name, value in (fixed or {}).items()}

    unknown = set(fixed) - set(state)
    if unknown:
        raise UsageError(f"cannot fix {', '.join(sorted(unknown))}: not a state variable")

    if polynomial.degree_in(state) <= 0:
        raise EmptyCurve(f"{polynomial.format()} does not involve the state; the set is all or nothing at dt={tau0}")

    names = tuple(name for name in state if name not in fixed)
    if len(names) != 2:
        raise UsageError(f"fix all but two state variables (free: {', '.join(names) or 'none'})")

    assignment: Dict[str, Fraction] = {**fixed}
    if STEP in vartable:
        assignment[STEP] = Fraction(tau0)

    plane = RatFunc(polynomial) if not assignment else subst_many([RatFunc(polynomial)], assignment)[0]
    plane_poly = plane.as_poly()

    if plane_poly.is_zero:
        raise UsageError(f"F vanishes identically at dt={tau0}")

    if plane_poly.degree_in(names) <= 0:
        raise EmptyCurve(f"F restricted to dt={tau0} does not involve {', '.join(names)}")

    coeffs = _coefficient_grid(plane_poly, names)
    xs = np.linspace(xmin, xmax, grid)
    ys = np.linspace(ymin, ymax, grid)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    values = npoly.polyval2d(X, Y, coeffs)
    signs = np.sign(values)
    nodes = np.stack([X, Y], axis=-1)

    horizontal = signs[:-1, :] * signs[1:, :] < 0
    vertical = signs[:, :-1] * signs[:, 1:] < 0

    starts = np.concatenate([nodes[:-1, :][horizontal], nodes[:, :-1][vertical]])
    ends = np.concatenate([nodes[1:, :][horizontal], nodes[:, 1:][vertical]])

    points = _bisect(coeffs, starts, ends, tol)
    exact = nodes[signs == 0]
    if len(exact):
        points = np.concatenate([points, exact])

    sample = CurveSample((names[0], names[1]), points.reshape(-1, 2), fixed)

    if found is not None and len(sample):
        keep = _orbit_defined(found, sample.states(found.system.state), float(tau0))
        if not np.all(keep):
            logger.info(f"CURVE SAMPLES DROPPED: {int(np.sum(~keep))} orbits meet the exceptional locus")
            sample = CurveSample(sample.names, sample.points[keep], fixed)

    logger.info(f"CURVE SAMPLED: {len(sample)} points at dt={tau0} on a {grid}x{grid} grid")
    return sample
