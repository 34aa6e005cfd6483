import io
import math
from fractions import Fraction

import numpy as np
import pytest

import cremona
from cremona.dynamics import convergence_order, integrate, monitor_invariants
from cremona.enums import EventKind, OrbitMode
from cremona.model import builtin_system, known_invariants
from cremona.periodicity import find_period_steps


def test_zero_steps():
    orbit = integrate(builtin_system("wp"), [1, 2], 0.1, 0)

    assert len(orbit) == 1
    assert orbit.completed
    assert orbit.final == (1.0, 2.0)


def test_exact_orbit_truncates_on_exceptional_locus():
    orbit = integrate(builtin_system("riccati"), [1], Fraction(1, 2), 2, OrbitMode.exact)

    assert orbit.states == ((Fraction(1),), (Fraction(2),))
    assert not orbit.completed
    assert orbit.events[0].kind is EventKind.exceptional_locus
    assert orbit.events[0].step == 1


def test_float_orbit_halts_at_pole():
    orbit = integrate(builtin_system("riccati"), [1], 0.5, 2)

    assert len(orbit) == 2
    assert orbit.events[0].kind is EventKind.pole


def test_float_orbit_skip_on_pole_without_solution():
    orbit = integrate(builtin_system("riccati"), [1], 0.5, 3, skip_on_pole=True)

    assert not orbit.completed
    assert len(orbit) == 2


def test_exact_mode_refuses_floats():
    with pytest.raises(cremona.UsageError):
        integrate(builtin_system("wp"), [1, 2], 0.01, 3, OrbitMode.exact)


def test_bad_input():
    with pytest.raises(cremona.UsageError):
        integrate(builtin_system("wp"), [1], 0.1, 3)

    with pytest.raises(cremona.UsageError):
        integrate(builtin_system("wp"), [1, 2], 0.1, -1)


def test_wp_long_orbit_stays_finite():
    orbit = integrate(builtin_system("wp"), [1, 2], 0.01, 1200)

    assert orbit.completed
    assert np.all(np.isfinite(np.array(orbit.states)))


def test_float_reversibility():
    wp = builtin_system("wp")
    forward = integrate(wp, [1, 2], 0.01, 50)
    backward = integrate(wp, forward.final, -0.01, 50)

    assert list(backward.final) == pytest.approx([1.0, 2.0], abs=1e-9)


def test_exact_reversibility():
    wp = builtin_system("wp")
    forward = integrate(wp, [1, 2], Fraction(1, 10), 4, OrbitMode.exact)
    backward = integrate(wp, forward.final, Fraction(-1, 10), 4, OrbitMode.exact)

    assert backward.final == (Fraction(1), Fraction(2))


def test_bit_budget():
    with pytest.raises(cremona.ResourceError) as info:
        integrate(builtin_system("wp"), [1, 2], Fraction(1, 10), 10, OrbitMode.exact, bit_budget=64)

    partial = info.value.partial
    assert partial is not None
    assert 1 <= len(partial) <= 10
    assert not partial.completed


def test_linear_energy_is_conserved_exactly():
    linear = builtin_system("linear")
    orbit = integrate(linear, [1, 0], Fraction(1, 10), 20, OrbitMode.exact)

    assert len(orbit.trace("energy")) == 21
    assert monitor_invariants(orbit).max_drift == {"energy": 0.0}


def test_monitor_foreign_invariant():
    orbit = integrate(builtin_system("wp"), [1, 2], 0.1, 3)
    foreign = known_invariants(builtin_system("linear"))

    with pytest.raises(cremona.UsageError):
        monitor_invariants(orbit, foreign)


def test_csv():
    orbit = integrate(builtin_system("wp"), [1, 2], Fraction(1, 10), 1, OrbitMode.exact)
    stream = io.StringIO()
    orbit.to_csv(stream)
    lines = stream.getvalue().splitlines()

    assert lines[0] == "step,t,x,y,energy"
    assert lines[1] == "0,0,1,2,1/2"
    assert lines[2].startswith("1,1/10,")
    assert len(lines) == 3


def test_float_csv_values():
    orbit = integrate(builtin_system("wp"), [1, 2], 0.5, 0)
    stream = io.StringIO()
    orbit.to_csv(stream)

    assert stream.getvalue() == "step,t,x,y,energy\n0,0,1,2,0.5\n"


def test_convergence_order_is_two():
    report = convergence_order(builtin_system("linear"), [1, 0], 1, [0.1, 0.05, 0.025])

    assert not report.exact
    assert report.slope == pytest.approx(2.0, abs=0.1)


def test_pure_riccati_is_exact():
    report = convergence_order(builtin_system("riccati"), [0.5], 1, [0.1, 0.05])

    assert report.exact
    assert math.isnan(report.slope)


def test_convergence_needs_whole_steps():
    with pytest.raises(cremona.UsageError):
        convergence_order(builtin_system("linear"), [1, 0], 1, [0.3, 0.1])


def test_wp_convergence_order():
    report = convergence_order(builtin_system("wp"), [1, 2], 0.4, [0.05, 0.025, 0.0125])

    assert not report.exact
    assert 1.8 <= report.slope <= 2.2


def test_jacobi_convergence_order():
    report = convergence_order(builtin_system("jacobi"), [0, 1, 1], 1, [0.1, 0.05, 0.025])

    assert not report.exact
    assert 1.8 <= report.slope <= 2.2


def test_pole_crossing_matches_fine_reference():
    wp = builtin_system("wp")
    coarse = integrate(wp, [1, 2], 0.01, 1200)
    fine = integrate(wp, [1, 2], 0.01 / 64, 1200 * 64)

    assert coarse.completed
    assert fine.completed

    reference = np.array(fine.states)
    y = reference[:, 1]
    crossings = np.nonzero((y[:-1] > 100) & (y[1:] < -100))[0]
    poles = (crossings + 0.5) * (0.01 / 64)
    assert len(poles) >= 2

    errors = []
    for k, state in enumerate(coarse.states):
        if np.any(np.abs(poles - k * 0.01) <= 0.1):
            continue

        expected = reference[64 * k]
        errors.append(np.max(np.abs(np.array(state) - expected) / np.maximum(1.0, np.abs(expected))))

    assert max(errors) < 1e-2


def test_wp_energy_drift_is_second_order():
    wp = builtin_system("wp")
    coarse = monitor_invariants(integrate(wp, [1, 2], 0.02, 20)).max_drift["energy"]
    fine = monitor_invariants(integrate(wp, [1, 2], 0.01, 40)).max_drift["energy"]

    assert coarse > 0
    assert 3.2 < coarse / fine < 4.8


@pytest.mark.slow
def test_jacobi_drift_vanishes_after_a_period():
    jacobi = builtin_system("jacobi")
    finding = find_period_steps(jacobi, [0, 1, 1], 3, eps=Fraction(1, 10**12), verify=False)
    (root,) = finding.roots

    report = monitor_invariants(integrate(jacobi, [0, 1, 1], float(root.value), 3))

    for name in ("pq", "pr"):
        assert report.max_drift[name] > 1e-6
        assert report.drifts[name][-1] == pytest.approx(0.0, abs=1e-8)
