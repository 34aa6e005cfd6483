from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import divisors

from .algebra import (
    STEP,
    IsolatingInterval,
    MultiPoly,
    QuotientRing,
    RatFunc,
    VarTable,
    count_roots_in,
    isolate_real_roots,
    narrow,
    poly_gcd,
    refine_root,
    squarefree_part,
    subst_many,
)
from .cache import Cache
from .enums import SchemeVariant
from .errors import PoleError, UsageError, ZeroDivisorFound
from .model import QuadSystem
from .scheme import CremonaMap, build_map, eval_map_float, polarize
from .utils import update_payload

__all__ = (
    "SymbolicOrbit",
    "PeriodRoot",
    "PeriodFinding",
    "VerificationReport",
    "TransitionRow",
    "iterate_symbolic",
    "period_polynomial",
    "find_period_steps",
    "verify_period",
    "period_transition_table",
    "findings_table",
    "transition_rows",
)

logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]

STEP_TABLE = VarTable([STEP])

# (map, x0) -> [(components of x_k, numerator of D(x_{k-1}, dt) or None for k = 0), ...]
_stages: Cache[List[Tuple[Tuple[RatFunc, ...], Optional[MultiPoly]]]] = Cache(maxlen=32)


@dataclass(frozen=True)
class SymbolicOrbit:
    """
    The n-th iterate C(τ)ⁿx₀ with τ symbolic and x₀ rational.

    Attributes:
        system (cremona.model.QuadSystem): The system.
        x0 (Tuple[Fraction, ...]): The initial state.
        n (int): The number of steps.
        components (Tuple[cremona.algebra.RatFunc, ...]): One univariate function of `dt` per
            state variable.
        denominators (Tuple[cremona.algebra.MultiPoly, ...]): For each step k < n, the numerator
            of D(x_k(τ), τ); the orbit meets the exceptional locus where one vanishes.

    """

    system: QuadSystem
    x0: Tuple[Fraction, ...]
    n: int
    components: Tuple[RatFunc, ...]
    denominators: Tuple[MultiPoly, ...]

    def __repr__(self) -> str:
        degree = max(component.denom.total_degree() for component in self.components)
        return f"<SymbolicOrbit n={self.n} x0={tuple(map(str, self.x0))} degree={degree}>"


def _compose_stages(cremona_map: CremonaMap, x0: Tuple[Fraction, ...], n: int):
    key = (cremona_map, x0)
    stages = list(_stages.get(key) or ())

    if not stages:
        vartable = cremona_map.vartable
        stages.append((tuple(RatFunc.constant(vartable, value) for value in x0), None))

    denominator = RatFunc(cremona_map.denominator)
    while len(stages) <= n:
        current, _ = stages[-1]
        assignment = dict(zip(cremona_map.state, current))

        *components, crossed = subst_many([*cremona_map.components, denominator], assignment)
        stages.append((tuple(components), crossed.numer))

        degree = max(component.denom.total_degree() for component in components)
        logger.debug(f"STAGE COMPOSED: n={len(stages) - 1} degree={degree}")

    if len(stages) > len(_stages.get(key) or ()):
        _stages[key] = stages

    return stages[: n + 1]


def iterate_symbolic(cremona_map: CremonaMap, x0: Sequence[Rational], n: int) -> SymbolicOrbit:
    """
    Composes the map n times starting from rational initial values, keeping the step
    symbolic.

    The state variables are replaced by x₀ before the first composition, so every stage is
    a univariate rational function of `dt`. Stages are cached per (map, x₀) and shared by
    later calls with other n.

    Parameters:
        cremona_map (CremonaMap): The step map.
        x0 (Sequence[Rational]): The initial state.
        n (int): The number of steps, at least one.

    Returns:
        The symbolic orbit.

    Raises:
        [cremona.errors.UsageError][] if n < 1 or x0 has the wrong length.
        [cremona.errors.ExceptionalLocusError][] if a denominator vanishes for every step.

    Example:
        ```py
        wp = builtin_system("wp")
        orbit = iterate_symbolic(build_map(polarize(wp)), [1, 2], 1)
        print(orbit.components[0])  # (dt^2 - 8*dt - 4) / (12*dt^2 - 4)
        ```

    """
    if n < 1:
        raise UsageError("n must be at least one")

    if len(x0) != cremona_map.system.dimension:
        raise UsageError(f"x0 has {len(x0)} entries, the system has dimension {cremona_map.system.dimension}")

    x0 = tuple(Fraction(value) for value in x0)
    stages = _compose_stages(cremona_map, x0, n)

    components = tuple(component.convert(STEP_TABLE) for component in stages[n][0])
    denominators = tuple(crossed.convert(STEP_TABLE) for _, crossed in stages[1:])

    return SymbolicOrbit(cremona_map.system, x0, n, components, denominators)


def _strip_step_factor(poly: MultiPoly) -> MultiPoly:
    step = MultiPoly.variable(poly.vartable, STEP)
    power = min(monom[poly.vartable.index(STEP)] for monom, _ in poly.terms())
    return poly.exquo(step**power) if power else poly


def _remove_common(poly: MultiPoly, other: MultiPoly) -> MultiPoly:
    common = poly_gcd(poly, other)
    while not common.is_constant:
        poly = poly.exquo(common)
        common = poly_gcd(poly, other)

    return poly


def period_polynomial(orbit: SymbolicOrbit, *, reduce: bool = True) -> MultiPoly:
    """
    The period polynomial G(τ) of a symbolic orbit.

    G is the gcd of the numerators of C(τ)ⁿx₀ − x₀ with the trivial factor τᵏ divided out.
    When `reduce` is set, factors shared with an intermediate denominator are removed and the
    squarefree part is taken, so the real roots of G are exactly the candidate periodic steps.

    Parameters:
        orbit (SymbolicOrbit): The orbit.
        reduce (bool): Whether to remove spurious factors and repeated roots.

    Returns:
        G, primitive; the constant one when there is no periodic step.

    Raises:
        [cremona.errors.UsageError][] if x₀ is a fixed point for every step.

    """
    gcd = MultiPoly.zero(STEP_TABLE)
    for component, value in zip(orbit.components, orbit.x0):
        gcd = poly_gcd(gcd, (component - value).numer)

    if gcd.is_zero:
        raise UsageError(f"x0={tuple(map(str, orbit.x0))} is a fixed point for every step")

    gcd = _strip_step_factor(gcd)

    if reduce:
        for crossed in orbit.denominators:
            if gcd.is_constant:
                break

            gcd = _remove_common(gcd, crossed)

        if not gcd.is_constant:
            gcd = squarefree_part(gcd, STEP)

    if gcd.is_constant:
        return MultiPoly.one(STEP_TABLE)

    logger.debug(f"PERIOD POLYNOMIAL: n={orbit.n} degree={gcd.degree(STEP)}")
    return gcd.primitive()


@dataclass(frozen=True)
class VerificationReport:
    """
    The outcome of checking that a step closes an orbit.

    Attributes:
        value (float): The step used by the float check.
        residual (float): max |C(τ)ⁿx₀ − x₀| in floating point; infinite after a pole.
        float_ok (bool): Whether the residual is within tolerance.
        exact_ok (Optional[bool]): The quotient-ring identity, `None` if not checked.
        factor (Optional[cremona.algebra.MultiPoly]): The factor of G the exact check
            worked modulo.

    """

    value: float
    residual: float
    float_ok: bool
    exact_ok: Optional[bool] = None
    factor: Optional[MultiPoly] = None

    @property
    def verified(self) -> bool:
        return self.float_ok and self.exact_ok is not False


@dataclass(frozen=True)
class PeriodRoot:
    """
    A certified periodic step.

    Attributes:
        interval (cremona.algebra.IsolatingInterval): The narrowed isolating interval.
        value (Fraction): The refined approximation.
        minimal_period (int): The smallest d dividing n whose orbit already closes.
        verification (Optional[VerificationReport]): The check the root passed or failed.

    """

    interval: IsolatingInterval
    value: Fraction
    minimal_period: int
    verification: Optional[VerificationReport] = None

    @property
    def verified(self) -> bool:
        return self.verification is None or self.verification.verified

    def to_dict(self) -> Dict[str, Any]:
        payload = {
            "lo": str(self.interval.lo),
            "hi": str(self.interval.hi),
            "value": float(self.value),
            "minimal_period": self.minimal_period,
            "verified": self.verified,
        }

        if self.verification is not None:
            update_payload(payload, residual=self.verification.residual, exact=self.verification.exact_ok)

        return payload


@dataclass(frozen=True)
class PeriodFinding:
    """
    The periodic steps of one (x₀, n).

    Attributes:
        system (cremona.model.QuadSystem): The system.
        x0 (Tuple[Fraction, ...]): The initial state.
        n (int): The period searched for.
        polynomial (cremona.algebra.MultiPoly): The reduced period polynomial G.
        roots (Tuple[PeriodRoot, ...]): The verified roots in increasing order.
        rejected (Tuple[PeriodRoot, ...]): Roots of G that failed verification.
        search_range (Tuple[Fraction, Fraction]): The range (lo, hi] searched.
        eps (Fraction): The refinement width.

    """

    system: QuadSystem
    x0: Tuple[Fraction, ...]
    n: int
    polynomial: MultiPoly
    roots: Tuple[PeriodRoot, ...]
    rejected: Tuple[PeriodRoot, ...]
    search_range: Tuple[Fraction, Fraction]
    eps: Fraction

    @property
    def values(self) -> List[float]:
        return [float(root.value) for root in self.roots]

    def to_dict(self) -> Dict[str, Any]:
        """
        The JSON object of a run.
        """
        payload = {
            "system": self.system.name or "model",
            "x0": [str(value) for value in self.x0],
            "n": self.n,
            "G": self.polynomial.format(),
            "roots": [root.to_dict() for root in self.roots],
            "range": [str(self.search_range[0]), str(self.search_range[1])],
            "eps": str(self.eps),
        }

        return update_payload(payload, rejected=[root.to_dict() for root in self.rejected] or None)


def _minimal_period(
    cremona_map: CremonaMap,
    x0: Tuple[Fraction, ...],
    n: int,
    polynomial: MultiPoly,
    interval: IsolatingInterval,
) -> int:
    for d in divisors(n)[:-1]:
        reduced = period_polynomial(iterate_symbolic(cremona_map, x0, d))
        if reduced.is_constant:
            continue

        common = poly_gcd(polynomial, reduced)
        if not common.is_constant and count_roots_in(common, STEP, interval.lo, interval.hi):
            return d

    return n


def _float_residual(cremona_map: CremonaMap, x0: Sequence[Fraction], n: int, value: float) -> float:
    start = np.asarray([float(v) for v in x0])
    state = start

    try:
        for _ in range(n):
            state = eval_map_float(cremona_map.scheme, state, value)
    except PoleError:
        return float("inf")

    if not np.all(np.isfinite(state)):
        return float("inf")

    return float(np.max(np.abs(state - start)))


def _exact_check(
    cremona_map: CremonaMap, x0: Sequence[Fraction], n: int, interval: IsolatingInterval
) -> Tuple[bool, MultiPoly]:
    ring = QuotientRing(interval.poly, STEP)

    while True:
        try:
            state = {name: ring.element(value) for name, value in zip(cremona_map.state, x0)}
            for _ in range(n):
                state = {
                    name: ring.evaluate(component, state)
                    for name, component in zip(cremona_map.state, cremona_map.components)
                }

            closed = all(ring.equals(state[name], value) for name, value in zip(cremona_map.state, x0))
            return closed, ring.modulus
        except ZeroDivisorFound as found:
            if count_roots_in(found.factor, STEP, interval.lo, interval.hi):
                logger.info(f"EXACT CHECK FAILED: denominator vanishes on {found.factor.format()}")
                return False, found.factor

            _, ring = ring.split(found.factor)


def verify_period(
    system: QuadSystem,
    x0: Sequence[Rational],
    root: Union[PeriodRoot, IsolatingInterval, Fraction, float],
    n: int,
    *,
    tol: float = 1e-6,
    exact: bool = False,
    variant: SchemeVariant = SchemeVariant.polarized,
    cremona_map: Optional[CremonaMap] = None,
) -> VerificationReport:
    """
    Checks that a step closes the orbit of x₀ after n steps.

    The float check iterates the map at the root refined to 10⁻¹⁵. The exact check iterates
    C(τ) in ℚ[τ]/(g), where g starts as the polynomial of the isolating interval and is
    split whenever a denominator turns out to be a zero divisor, keeping the factor that
    holds the root.

    Parameters:
        system (QuadSystem): The system.
        x0 (Sequence[Rational]): The initial state.
        root (Union[PeriodRoot, IsolatingInterval, Rational, float]): The step; a bare number
            only allows the float check.
        n (int): The period.
        tol (float): The float residual tolerance, relative to max(1, |x₀|).
        exact (bool): Whether to run the quotient-ring check as well.
        variant (SchemeVariant): The polarization rule.
        cremona_map (Optional[CremonaMap]): A prebuilt map.

    Returns:
        The report; `verified` is false if either check fails.

    """
    cremona_map = cremona_map or build_map(polarize(system, variant))
    x0 = tuple(Fraction(value) for value in x0)

    interval = root.interval if isinstance(root, PeriodRoot) else root
    if isinstance(interval, IsolatingInterval):
        value = float(refine_root(interval, Fraction(1, 10**15)))
    else:
        value = float(interval)
        interval = None

    scale = max(1.0, max(abs(float(v)) for v in x0))
    residual = _float_residual(cremona_map, x0, n, value)
    report = VerificationReport(value, residual, residual <= tol * scale)

    if exact and interval is not None:
        closed, factor = _exact_check(cremona_map, x0, n, interval)
        report = VerificationReport(value, residual, report.float_ok, closed, factor)

    logger.debug(f"PERIOD VERIFIED: n={n} dt={value:.6f} residual={residual:.3e} ok={report.verified}")
    return report


def find_period_steps(
    system: QuadSystem,
    x0: Sequence[Rational],
    n: int,
    *,
    search_range: Tuple[Rational, Rational] = (0, 20),
    eps: Rational = Fraction(1, 10_000),
    tol: float = 1e-6,
    verify: bool = True,
    exact_check: bool = False,
    variant: SchemeVariant = SchemeVariant.polarized,
    cremona_map: Optional[CremonaMap] = None,
) -> PeriodFinding:
    """
    Finds the steps τ in a range for which the orbit of x₀ has period n.

    Divisor periods are reported too; each root carries its minimal period.

    Parameters:
        system (QuadSystem): The system.
        x0 (Sequence[Rational]): The initial state.
        n (int): The period, at least one.
        search_range (Tuple[Rational, Rational]): The range (lo, hi]; lo must be non-negative.
        eps (Rational): The width the isolating intervals are narrowed to.
        tol (float): The float verification tolerance.
        verify (bool): Whether to verify every root numerically.
        exact_check (bool): Whether to add the quotient-ring check.
        variant (SchemeVariant): The polarization rule.
        cremona_map (Optional[CremonaMap]): A prebuilt map.

    Returns:
        The finding; an empty `roots` tuple is a valid result.

    Raises:
        [cremona.errors.UsageError][] on an invalid range or eps.

    Example:
        ```py
        wp = builtin_system("wp", a=Fraction(1, 2))
        finding = find_period_steps(wp, [1, 2], 5)
        finding.values  # [6.908...]
        ```

    """
    lo, hi = Fraction(search_range[0]), Fraction(search_range[1])
    eps = Fraction(eps)

    if lo < 0 or hi <= lo:
        raise UsageError(f"invalid search range ({lo}, {hi}]; steps must be positive")

    if eps <= 0:
        raise UsageError("eps must be positive")

    cremona_map = cremona_map or build_map(polarize(system, variant))
    x0 = tuple(Fraction(value) for value in x0)

    polynomial = period_polynomial(iterate_symbolic(cremona_map, x0, n))
    intervals = [] if polynomial.is_constant else isolate_real_roots(polynomial, STEP, (lo, hi))

    roots: List[PeriodRoot] = []
    rejected: List[PeriodRoot] = []

    for interval in intervals:
        period = _minimal_period(cremona_map, x0, n, polynomial, interval)
        narrowed = narrow(interval, eps)
        report = None

        if verify:
            report = verify_period(system, x0, interval, n, tol=tol, exact=exact_check, cremona_map=cremona_map)

        root = PeriodRoot(narrowed, refine_root(narrowed, eps), period, report)
        (roots if root.verified else rejected).append(root)

    logger.info(f"PERIOD STEPS FOUND: n={n} roots={[round(float(r.value), 3) for r in roots]}")
    return PeriodFinding(system, x0, n, polynomial, tuple(roots), tuple(rejected), (lo, hi), eps)


@dataclass(frozen=True)
class TransitionRow:
    """
    One row of the transition table.

    Attributes:
        n (int): The period.
        step (Fraction): The smallest periodic step Δt_min.
        product (float): n·Δt_min, the approximate period of the solution.

    """

    n: int
    step: Fraction
    product: float


def period_transition_table(
    system: QuadSystem,
    x0: Sequence[Rational],
    ns: Sequence[int],
    **kwargs: Any,
) -> List[TransitionRow]:
    """
    n·Δt_min for each n; rows with no periodic step are left out. Keyword arguments go to
    [cremona.periodicity.find_period_steps][].
    """
    variant = kwargs.pop("variant", SchemeVariant.polarized)
    cremona_map = kwargs.pop("cremona_map", None) or build_map(polarize(system, variant))
    rows = []

    for n in ns:
        finding = find_period_steps(system, x0, n, cremona_map=cremona_map, **kwargs)
        if finding.roots:
            step = finding.roots[0].value
            rows.append(TransitionRow(n, step, n * float(step)))

    return rows


def findings_table(findings: Sequence[PeriodFinding]) -> List[List[str]]:
    """
    CSV rows `n,steps` with the steps of each finding to 3 decimals, separated by `;`.
    """
    rows = [["n", "steps"]]
    for finding in findings:
        rows.append([str(finding.n), ";".join(f"{value:.3f}" for value in finding.values)])

    return rows


def transition_rows(rows: Sequence[TransitionRow], limit: Optional[float] = None) -> List[List[str]]:
    """
    CSV rows `n,n*dt_min` to 3 decimals, with an `inf` row for the limit when given.
    """
    table = [["n", "n*dt_min"]]
    table.extend([str(row.n), f"{row.product:.3f}"] for row in rows)

    if limit is not None:
        table.append(["inf", f"{limit:.3f}"])

    return table
