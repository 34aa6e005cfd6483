import math
from fractions import Fraction

import pytest

import cremona
from cremona.algebra import MultiPoly
from cremona.dynamics import integrate
from cremona.model import builtin_system
from cremona.periodicity import (
    STEP_TABLE,
    TransitionRow,
    find_period_steps,
    findings_table,
    iterate_symbolic,
    period_polynomial,
    period_transition_table,
    transition_rows,
    verify_period,
)
from cremona.scheme import build_map, polarize

dt = MultiPoly.variable(STEP_TABLE, "dt")
QUARTIC_ROOT = (4 / 3) ** 0.25


@pytest.fixture(scope="module")
def wp_map():
    return build_map(polarize(builtin_system("wp")))


def test_iterate_one_step(wp_map):
    orbit = iterate_symbolic(wp_map, [1, 2], 1)

    assert orbit.components[0].format() == "(dt^2 - 8*dt - 4) / (12*dt^2 - 4)"
    assert len(orbit.denominators) == 1


def test_iterate_rejects_bad_input(wp_map):
    with pytest.raises(cremona.UsageError):
        iterate_symbolic(wp_map, [1, 2], 0)

    with pytest.raises(cremona.UsageError):
        iterate_symbolic(wp_map, [1], 2)


def test_degrees_grow(wp_map):
    degrees = [iterate_symbolic(wp_map, [1, 2], n).components[0].denom.total_degree() for n in range(1, 5)]
    assert degrees == sorted(degrees)


def test_no_period_one(wp_map):
    assert period_polynomial(iterate_symbolic(wp_map, [1, 2], 1)) == 1


def test_period_four_is_universal(wp_map):
    polynomial = period_polynomial(iterate_symbolic(wp_map, [1, 2], 4))
    assert (dt**4 * 3 - 4).divides(polynomial)


def test_fixed_point_for_every_step():
    riccati = build_map(polarize(builtin_system("riccati")))

    with pytest.raises(cremona.UsageError):
        period_polynomial(iterate_symbolic(riccati, [0], 2))


def test_riccati_has_no_periodic_steps():
    finding = find_period_steps(builtin_system("riccati"), [1], 3)

    assert finding.polynomial == 1
    assert finding.roots == ()


def test_period_two_is_empty(wp_map):
    finding = find_period_steps(builtin_system("wp"), [1, 2], 2, verify=False, cremona_map=wp_map)
    assert finding.roots == ()


def test_period_four(wp_map):
    finding = find_period_steps(builtin_system("wp"), [1, 2], 4, exact_check=True, cremona_map=wp_map)
    (root,) = [root for root in finding.roots if abs(float(root.value) - QUARTIC_ROOT) < 1e-3]

    assert root.minimal_period == 4
    assert root.verification.exact_ok
    assert root.interval.width < Fraction(1, 10_000)
    assert abs(float(root.value) - QUARTIC_ROOT) < 1e-4


def test_period_five(wp_map):
    finding = find_period_steps(builtin_system("wp"), [1, 2], 5, verify=False, cremona_map=wp_map)
    assert finding.values == [pytest.approx(6.908, abs=1.5e-3)]


def test_search_range(wp_map):
    finding = find_period_steps(builtin_system("wp"), [1, 2], 5, search_range=(0, 5), verify=False, cremona_map=wp_map)
    assert finding.roots == ()

    with pytest.raises(cremona.UsageError):
        find_period_steps(builtin_system("wp"), [1, 2], 5, search_range=(-1, 5))

    with pytest.raises(cremona.UsageError):
        find_period_steps(builtin_system("wp"), [1, 2], 5, eps=0)


def test_verify_period(wp_map):
    wp = builtin_system("wp")

    assert verify_period(wp, [1, 2], QUARTIC_ROOT, 4, cremona_map=wp_map).verified

    report = verify_period(wp, [1, 2], 1.0, 4, cremona_map=wp_map)
    assert not report.float_ok
    assert not report.verified
    assert report.exact_ok is None


def test_to_dict(wp_map):
    finding = find_period_steps(builtin_system("wp"), [1, 2], 4, cremona_map=wp_map)
    payload = finding.to_dict()

    assert payload["system"] == "wp"
    assert payload["x0"] == ["1", "2"]
    assert payload["n"] == 4
    assert payload["eps"] == "1/10000"
    assert payload["range"] == ["0", "20"]
    assert {"lo", "hi", "value", "minimal_period", "verified", "residual"} <= set(payload["roots"][0])


def test_findings_table(wp_map):
    finding = find_period_steps(builtin_system("wp"), [1, 2], 5, verify=False, cremona_map=wp_map)
    header, (n, steps) = findings_table([finding])

    assert header == ["n", "steps"]
    assert n == "5"
    assert len(steps.split(".")[1]) == 3
    assert float(steps) == pytest.approx(6.908, abs=1.5e-3)


@pytest.mark.parametrize("n", [4, 5, 6])
def test_linear_oscillator_steps(n):
    finding = find_period_steps(builtin_system("linear"), [1, 0], n)
    expected = [(2 * math.tan(math.pi * k / n), n // math.gcd(n, k)) for k in range(1, (n + 1) // 2)]

    assert finding.values == [pytest.approx(value, abs=1e-3) for value, _ in expected]
    assert [root.minimal_period for root in finding.roots] == [period for _, period in expected]


def test_transition_rows():
    rows = [TransitionRow(3, Fraction(3609, 1000), 10.827), TransitionRow(4, Fraction(2041, 1000), 8.164)]

    assert transition_rows(rows, 6.34748) == [
        ["n", "n*dt_min"],
        ["3", "10.827"],
        ["4", "8.164"],
        ["inf", "6.347"],
    ]
    assert transition_rows(rows)[-1] == ["4", "8.164"]


@pytest.mark.slow
@pytest.mark.parametrize(
    "n, expected",
    [(7, [0.556, 5.870, 7.759]), (8, [0.535, 1.074, 6.843])],
)
def test_wp_table(wp_map, n, expected):
    finding = find_period_steps(builtin_system("wp"), [1, 2], n, verify=False, cremona_map=wp_map)
    assert finding.values == [pytest.approx(value, abs=1.5e-3) for value in expected]


@pytest.mark.slow
def test_wp_divisor_period_is_labeled(wp_map):
    finding = find_period_steps(builtin_system("wp"), [1, 2], 8, verify=False, cremona_map=wp_map)
    periods = {round(float(root.value), 2): root.minimal_period for root in finding.roots}

    assert periods[1.07] == 4


@pytest.mark.slow
def test_jacobi_period_three():
    finding = find_period_steps(builtin_system("jacobi"), [0, 1, 1], 3, verify=False)
    assert finding.values == [pytest.approx(3.609, abs=1.5e-3)]


@pytest.mark.slow
def test_jacobi_transitions_decrease():
    rows = period_transition_table(builtin_system("jacobi"), [0, 1, 1], range(3, 10), verify=False)
    expected = [10.827, 8.164, 7.379, 7.022, 6.827, 6.706, 6.627]

    assert [row.n for row in rows] == list(range(3, 10))
    assert [row.product for row in rows] == [pytest.approx(value, abs=1e-2) for value in expected]
    assert all(a.product > b.product for a, b in zip(rows, rows[1:]))


@pytest.mark.parametrize(
    "n, expected, periods",
    [
        (9, [0.504, 9.187], [9, 9]),
        (10, [0.471, 0.559, 6.777, 6.908], [10, 10, 10, 5]),
    ],
)
def test_wp_high_orders(wp_map, n, expected, periods):
    finding = find_period_steps(builtin_system("wp"), [1, 2], n, search_range=(0, 10), cremona_map=wp_map)

    assert finding.values == [pytest.approx(value, abs=2e-3) for value in expected]
    assert [root.minimal_period for root in finding.roots] == periods


@pytest.mark.slow
@pytest.mark.parametrize(
    "n, expected",
    [
        (4, [2.041]),
        (5, [1.47, 6.86]),
        (6, [1.17, 3.60]),
        (7, [0.97, 2.57, 10.85]),
        (8, [0.83, 2.04, 5.18]),
        (9, [0.73, 1.70, 3.60, 16.23]),
    ],
)
def test_jacobi_table(n, expected):
    finding = find_period_steps(builtin_system("jacobi"), [0, 1, 1], n, verify=False)
    assert finding.values == [pytest.approx(value, abs=2e-2) for value in expected]


@pytest.mark.slow
@pytest.mark.parametrize("n", [5, 6, 7])
def test_jacobi_periodic_orbits_close(n):
    jacobi = builtin_system("jacobi")
    finding = find_period_steps(jacobi, [0, 1, 1], n, eps=Fraction(1, 10**12))

    assert finding.roots
    for root in finding.roots:
        orbit = integrate(jacobi, [0, 1, 1], float(root.value), n)

        assert orbit.completed
        assert list(orbit.final) == pytest.approx([0.0, 1.0, 1.0], abs=1e-6)
