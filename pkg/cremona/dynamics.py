from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import IO, Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .enums import EventKind, OrbitMode, SchemeVariant
from .errors import ExceptionalLocusError, PoleError, ResourceError, UsageError
from .model import Invariant, QuadSystem, known_invariants
from .scheme import CremonaMap, build_map, eval_map_exact, eval_map_float, polarize

__all__ = (
    "OrbitEvent",
    "Orbit",
    "DriftReport",
    "ConvergenceReport",
    "integrate",
    "monitor_invariants",
    "convergence_order",
    "format_value",
)

logger = logging.getLogger(__name__)

Number = Union[Fraction, float]
State = Tuple[Number, ...]


def format_value(value: Any) -> str:
    """
    Floats with 17 significant digits, rationals as `p/q`.
    """
    if isinstance(value, float):
        return f"{value:.17g}"

    return str(value)


@dataclass(frozen=True)
class OrbitEvent:
    """
    Something that happened at a step of an orbit.

    Attributes:
        step (int): The index of the state the failing step started from.
        kind (cremona.enums.EventKind): What happened.
        message (str): A readable description.

    """

    step: int
    kind: EventKind
    message: str


@dataclass(frozen=True)
class Orbit:
    """
    A computed orbit x_{k+1} = C(dt) x_k.

    Attributes:
        system (cremona.model.QuadSystem): The system.
        mode (cremona.enums.OrbitMode): Float or exact arithmetic.
        dt (Union[Fraction, float]): The step.
        t0 (Union[Fraction, float]): The initial time.
        states (Tuple[Tuple[Union[Fraction, float], ...], ...]): The states, x_0 first.
        events (Tuple[OrbitEvent, ...]): Pole passages and truncations.
        traces (Tuple[Tuple[str, Tuple[Union[Fraction, float], ...]], ...]): Invariant
            values along the orbit, by invariant name.
        requested (int): The number of steps asked for.

    """

    system: QuadSystem
    mode: OrbitMode
    dt: Number
    t0: Number
    states: Tuple[State, ...]
    events: Tuple[OrbitEvent, ...] = ()
    traces: Tuple[Tuple[str, Tuple[Number, ...]], ...] = field(default=(), repr=False)
    requested: int = 0

    def __len__(self) -> int:
        return len(self.states)

    @property
    def times(self) -> List[Number]:
        return [self.t0 + k * self.dt for k in range(len(self.states))]

    @property
    def completed(self) -> bool:
        return len(self.states) == self.requested + 1

    @property
    def final(self) -> State:
        return self.states[-1]

    def trace(self, name: str) -> Tuple[Number, ...]:
        for key, values in self.traces:
            if key == name:
                return values

        raise UsageError(f"no invariant {name!r} was traced")

    def rows(self) -> List[List[str]]:
        header = ["step", "t", *self.system.state, *(name for name, _ in self.traces)]
        rows = [header]

        for k, (t, state) in enumerate(zip(self.times, self.states)):
            values = [values[k] for _, values in self.traces]
            rows.append([str(k), format_value(t), *map(format_value, state), *map(format_value, values)])

        return rows

    def to_csv(self, stream: IO[str]) -> None:
        """
        Writes `step,t,<state names>,<invariant names>` and one row per state.
        """
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerows(self.rows())


def _bits(value: Fraction) -> int:
    return value.numerator.bit_length() + value.denominator.bit_length()


def _traces(invariants: Sequence[Invariant], states: Sequence[State]) -> Tuple[Tuple[str, Tuple[Number, ...]], ...]:
    return tuple((invariant.name, tuple(invariant.evaluate(state) for state in states)) for invariant in invariants)


def integrate(
    system: QuadSystem,
    x0: Sequence[Union[int, Fraction, float]],
    dt: Union[int, Fraction, float],
    steps: int,
    mode: OrbitMode = OrbitMode.float,
    *,
    variant: SchemeVariant = SchemeVariant.polarized,
    skip_on_pole: bool = False,
    bit_budget: int = 10**6,
    invariants: Optional[Sequence[Invariant]] = None,
    t0: Union[int, Fraction, float] = 0,
    cremona_map: Optional[CremonaMap] = None,
) -> Orbit:
    """
    Iterates the step map.

    In float mode a [cremona.errors.PoleError][] is logged as an event; with `skip_on_pole`
    the iteration goes on from the solver's result when that is finite, otherwise it halts.
    In exact mode an exact hit of the exceptional locus truncates the orbit with an event.

    Parameters:
        system (QuadSystem): The system.
        x0 (Sequence[Rational]): The initial state.
        dt (Rational): The step; exact mode needs a rational.
        steps (int): The number of steps, non-negative.
        mode (OrbitMode): Float or exact arithmetic.
        variant (SchemeVariant): The polarization rule.
        skip_on_pole (bool): Whether to continue past numerically singular steps.
        bit_budget (int): The largest size in bits a coordinate may reach in exact mode.
        invariants (Optional[Sequence[Invariant]]): Integrals to trace; the known ones by default.
        t0 (Rational): The initial time.
        cremona_map (Optional[CremonaMap]): A prebuilt map for exact mode.

    Returns:
        The orbit, holding `steps + 1` states unless it was truncated.

    Raises:
        [cremona.errors.UsageError][] on bad input.
        [cremona.errors.ResourceError][] if an exact coordinate outgrows `bit_budget`;
            `partial` holds the orbit so far.

    """
    mode = OrbitMode(mode)
    if steps < 0:
        raise UsageError("steps must be non-negative")

    if len(x0) != system.dimension:
        raise UsageError(f"x0 has {len(x0)} entries, the system has dimension {system.dimension}")

    if invariants is None:
        invariants = known_invariants(system)

    events: List[OrbitEvent] = []

    if mode is OrbitMode.exact:
        if isinstance(dt, float) or any(isinstance(value, float) for value in x0):
            raise UsageError("exact mode needs rational x0 and dt (write 1/100, not 0.01)")

        step = Fraction(dt)
        start: Number = Fraction(t0)
        cremona_map = cremona_map or build_map(polarize(system, variant))
        states: List[State] = [tuple(Fraction(value) for value in x0)]

        for k in range(steps):
            try:
                nxt = tuple(eval_map_exact(cremona_map, states[-1], step))
            except ExceptionalLocusError as error:
                logger.info(f"ORBIT TRUNCATED: step {k} {error}")
                events.append(OrbitEvent(k, EventKind.exceptional_locus, str(error)))
                break

            size = max(_bits(value) for value in nxt)
            if size > bit_budget:
                partial = Orbit(system, mode, step, start, tuple(states), tuple(events), _traces(invariants, states), steps)
                raise ResourceError(
                    f"exact orbit coordinate reached {size} bits at step {k + 1} (budget {bit_budget})",
                    stage=k + 1,
                    diagnostics={"bits": size, "budget": bit_budget},
                    partial=partial,
                )

            states.append(nxt)
    else:
        step = float(dt)
        start = float(t0)
        scheme = polarize(system, variant)
        current = np.asarray([float(value) for value in x0])
        states = [tuple(float(value) for value in current)]

        for k in range(steps):
            try:
                current = eval_map_float(scheme, current, step)
            except PoleError as error:
                logger.info(f"POLE PASSAGE: step {k} {error}")
                events.append(OrbitEvent(k, EventKind.pole, str(error)))

                if not skip_on_pole:
                    break

                current = _forced_step(scheme, current, step)
                if current is None:
                    break

            if not np.all(np.isfinite(current)):
                events.append(OrbitEvent(k, EventKind.pole, f"non-finite state after step {k}"))
                break

            states.append(tuple(float(value) for value in current))

    orbit = Orbit(system, mode, step, start, tuple(states), tuple(events), _traces(invariants, states), steps)
    logger.debug(f"ORBIT COMPUTED: {len(orbit.states) - 1}/{steps} steps mode={mode.value}")
    return orbit


def _forced_step(scheme, current: np.ndarray, dt: float) -> Optional[np.ndarray]:
    quadratic, linear, constant = scheme.arrays
    matrix = np.eye(len(current)) - dt * (np.einsum("k,ikj->ij", current, quadratic) + linear / 2)
    rhs = current + dt * (linear @ current / 2 + constant)

    try:
        result = np.linalg.solve(matrix, rhs)
    except np.linalg.LinAlgError:
        return None

    return result if np.all(np.isfinite(result)) else None


@dataclass(frozen=True)
class DriftReport:
    """
    Invariant drift I(x_k) − I(x_0) along an orbit.

    Attributes:
        drifts (Dict[str, Tuple[Union[Fraction, float], ...]]): Per-invariant drift sequences.
        max_drift (Dict[str, float]): Per-invariant max |drift|.

    """

    drifts: Dict[str, Tuple[Number, ...]]
    max_drift: Dict[str, float]


def monitor_invariants(orbit: Orbit, invariants: Optional[Sequence[Invariant]] = None) -> DriftReport:
    """
    Measures how far each invariant moves along an orbit.

    Raises:
        [cremona.errors.UsageError][] if an invariant belongs to another system.

    """
    if invariants is None:
        invariants = known_invariants(orbit.system)

    drifts: Dict[str, Tuple[Number, ...]] = {}
    max_drift: Dict[str, float] = {}

    for invariant in invariants:
        if invariant.system != orbit.system:
            raise UsageError(f"invariant {invariant.name!r} belongs to another system")

        values = [invariant.evaluate(state) for state in orbit.states]
        drift = tuple(value - values[0] for value in values)
        drifts[invariant.name] = drift
        max_drift[invariant.name] = float(max(abs(value) for value in drift))

    return DriftReport(drifts, max_drift)


@dataclass(frozen=True)
class ConvergenceReport:
    """
    Observed order of accuracy.

    Attributes:
        slope (float): The least-squares slope of log error against log dt; NaN if exact.
        dts (Tuple[float, ...]): The steps.
        errors (Tuple[float, ...]): The max-norm errors at time T.
        exact (bool): Whether every error is at rounding level, so the scheme is the exact flow.

    """

    slope: float
    dts: Tuple[float, ...]
    errors: Tuple[float, ...]
    exact: bool


def _endpoint(scheme, x0: Sequence[float], dt: float, steps: int) -> Optional[np.ndarray]:
    current = np.asarray([float(value) for value in x0])

    for _ in range(steps):
        try:
            current = eval_map_float(scheme, current, dt)
        except PoleError:
            return None

    return current if np.all(np.isfinite(current)) else None


def _steps_for(T: float, dt: float) -> int:
    steps = T / dt
    if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
        raise UsageError(f"T={T} is not a whole number of steps of {dt}")

    return int(round(steps))


def convergence_order(
    system: QuadSystem,
    x0: Sequence[Union[int, Fraction, float]],
    T: Union[int, Fraction, float],
    dts: Sequence[Union[int, Fraction, float]],
    *,
    reference_factor: int = 64,
    variant: SchemeVariant = SchemeVariant.polarized,
) -> ConvergenceReport:
    """
    Self-convergence study against a reference run with step min(dts) / `reference_factor`.

    Raises:
        [cremona.errors.UsageError][] if the reference meets a pole or T is not a whole
            number of steps.

    """
    if len(dts) < 2:
        raise UsageError("a slope needs at least two steps")

    scheme = polarize(system, variant)
    T = float(T)
    steps = [float(dt) for dt in dts]

    reference_dt = min(steps) / reference_factor
    reference = _endpoint(scheme, x0, reference_dt, _steps_for(T, reference_dt))
    if reference is None:
        raise UsageError(f"the reference solution meets a pole before T={T}; choose another T")

    errors = []
    for dt in steps:
        endpoint = _endpoint(scheme, x0, dt, _steps_for(T, dt))
        if endpoint is None:
            raise UsageError(f"the run with dt={dt} meets a pole before T={T}; choose another T")

        errors.append(float(np.max(np.abs(endpoint - reference))))

    scale = max(1.0, float(np.max(np.abs(reference))))
    if all(error <= 1e-11 * scale for error in errors):
        return ConvergenceReport(math.nan, tuple(steps), tuple(errors), True)

    slope = float(np.polyfit(np.log(steps), np.log(np.maximum(errors, 1e-300)), 1)[0])
    logger.info(f"CONVERGENCE ORDER: {slope:.3f}")

    return ConvergenceReport(slope, tuple(steps), tuple(errors), False)
