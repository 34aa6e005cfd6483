import io
from fractions import Fraction

import numpy as np
import pytest

import cremona
from cremona.algebra import MultiPoly, RatFunc, VarTable, parse_poly, subst
from cremona.equiperiodic import (
    EquiperiodicSet,
    degree_table,
    equiperiodic_polynomial,
    iterate_fully_symbolic,
    sample_curve,
)
from cremona.model import builtin_system
from cremona.scheme import build_map, eval_map_float, polarize

F5_TEXT = (
    "27*dt^10*x - 432*dt^8*x*y^2 + 432*dt^8*x^2 + 1728*dt^6*x^3 + 27*dt^8"
    " - 432*dt^6*y^2 - 936*dt^6*x + 168*dt^4 + 240*dt^2*x - 80"
)

PLANE = VarTable(["x", "y", "dt"])
x, y, dt = (MultiPoly.variable(PLANE, name) for name in PLANE)


@pytest.fixture(scope="module")
def wp_map():
    return build_map(polarize(builtin_system("wp")))


def test_first_iterate_is_the_map(wp_map):
    assert iterate_fully_symbolic(wp_map, 1) == list(wp_map.components)


def test_iterate_budget(wp_map):
    with pytest.raises(cremona.ResourceError) as info:
        iterate_fully_symbolic(wp_map, 3, fix_dt=Fraction(1, 3), budget=10)

    assert info.value.stage >= 1
    assert info.value.diagnostics["budget"] == 10
    assert len(info.value.partial) == info.value.stage


def test_iterate_needs_positive_n(wp_map):
    with pytest.raises(cremona.UsageError):
        iterate_fully_symbolic(wp_map, 0)


def test_no_fixed_points(wp_map):
    found = equiperiodic_polynomial(builtin_system("wp"), 1, cremona_map=wp_map)

    assert found.is_empty
    assert found.contains == ()


def test_order_two_is_empty(wp_map):
    found = equiperiodic_polynomial(builtin_system("wp"), 2, cremona_map=wp_map)

    assert found.is_empty
    assert found.state_degree == 0
    assert found.contains == ((1, True),)


@pytest.mark.slow
def test_order_four_is_step_only(wp_map):
    found = equiperiodic_polynomial(builtin_system("wp"), 4, reduced=False, cremona_map=wp_map)

    assert found.polynomial == dt**4 * 3 - 4
    assert found.state_degree == 0
    assert found.step_degree == 4


@pytest.mark.slow
def test_order_five(wp_map):
    found = equiperiodic_polynomial(builtin_system("wp"), 5, cremona_map=wp_map)

    assert found.polynomial == parse_poly(F5_TEXT, PLANE).primitive()
    assert found.state_degree == 3
    assert found.contains == ((1, True),)


@pytest.mark.slow
def test_order_five_at_fixed_step(wp_map):
    found = equiperiodic_polynomial(builtin_system("wp"), 5, fix_dt=1, reduced=False, cremona_map=wp_map)
    expected = subst(RatFunc(parse_poly(F5_TEXT, PLANE)), {"dt": 1}).numer.primitive()

    assert found.polynomial == expected
    assert found.state_degree == 3
    assert found.fix_dt == 1


@pytest.mark.slow
def test_degree_table(wp_map):
    assert degree_table(builtin_system("wp"), range(4, 7), cremona_map=wp_map) == [(4, 0), (5, 3), (6, 3)]


def test_sample_circle():
    circle = x**2 + y**2 - dt**2
    sample = sample_curve(circle, 1, (-2, 2, -2, 2), grid=41)

    assert sample.names == ("x", "y")
    assert len(sample) > 0

    radii = np.hypot(sample.points[:, 0], sample.points[:, 1])
    assert np.all(np.abs(radii - 1) < 1e-12)

    mirrored = sample.points * np.array([1.0, -1.0])
    distances = np.linalg.norm(mirrored[:, None, :] - sample.points[None, :, :], axis=-1)
    assert np.all(distances.min(axis=1) < 1e-5)


def test_sample_csv():
    sample = sample_curve(x - dt, Fraction(1, 2), (0, 1, 0, 1), grid=3)
    stream = io.StringIO()
    sample.to_csv(stream)
    lines = stream.getvalue().splitlines()

    assert lines[0] == "x,y"
    assert all(float(line.split(",")[0]) == 0.5 for line in lines[1:])
    assert len(lines) == 4


def test_sample_empty_curve():
    found = EquiperiodicSet(builtin_system("wp"), 4, dt**4 * 3 - 4)

    with pytest.raises(cremona.EmptyCurve):
        sample_curve(found, 1, (-1, 1, -1, 1))


def test_sample_vanishing_at_step():
    with pytest.raises(cremona.UsageError):
        sample_curve((dt - 1) * x, 1, (-1, 1, -1, 1))


def test_sample_three_dimensions():
    table = VarTable(["p", "q", "r", "dt"])
    p, q, r = (MultiPoly.variable(table, name) for name in ("p", "q", "r"))
    sphere = p**2 + q**2 + r**2 - 2

    with pytest.raises(cremona.UsageError):
        sample_curve(sphere, 1, (-2, 2, -2, 2))

    sample = sample_curve(sphere, 1, (-2, 2, -2, 2), grid=21, fixed={"r": 1})
    assert sample.names == ("p", "q")
    assert all(state[2] == 1.0 for state in sample.states(["p", "q", "r"]))


def test_sampled_orbits_stay_on_the_curve():
    wp = builtin_system("wp")
    f5 = parse_poly(F5_TEXT, PLANE)
    sample = sample_curve(EquiperiodicSet(wp, 5, f5), 1, (-3, 3, -3, 3), grid=100)
    scheme = polarize(wp)

    assert len(sample) > 100

    for state in sample.states(wp.state):
        current = np.array(state)
        for _ in range(5):
            current = eval_map_float(scheme, current, 1.0)
            assert abs(f5.evaluate_float([current[0], current[1], 1.0])) < 1e-6

        assert list(current) == pytest.approx(list(state), abs=1e-6)


@pytest.mark.slow
def test_degree_table_high_orders(wp_map):
    table = degree_table(builtin_system("wp"), range(7, 11), fix_dt=Fraction(3, 7), cremona_map=wp_map)
    assert table == [(7, 6), (8, 6), (9, 9), (10, 12)]
