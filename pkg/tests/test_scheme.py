import functools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

import cremona
from cremona.algebra import RatFunc
from cremona.enums import SchemeVariant
from cremona.model import builtin_system
from cremona.scheme import (
    build_map,
    compose,
    defining_equations,
    eval_map_exact,
    eval_map_float,
    format_map,
    invert_map,
    mobius_matrix,
    parse_map,
    polarize,
)


def identity(cremona_map):
    return [RatFunc.variable(cremona_map.vartable, name) for name in cremona_map.state]


def test_riccati_map_text():
    cremona_map = build_map(polarize(builtin_system("riccati")))
    assert format_map(cremona_map) == "# denominator: -x*dt + 1\nxhat = (-x) / (x*dt - 1)\n"


@pytest.mark.parametrize("name", ["riccati", "wp", "linear"])
def test_inverse_undoes_step(name):
    cremona_map = build_map(polarize(builtin_system(name)))

    assert compose(invert_map(cremona_map), cremona_map) == identity(cremona_map)
    assert compose(cremona_map, invert_map(cremona_map)) == identity(cremona_map)


@pytest.mark.slow
def test_inverse_undoes_step_jacobi():
    cremona_map = build_map(polarize(builtin_system("jacobi")))
    assert compose(invert_map(cremona_map), cremona_map) == identity(cremona_map)


def test_step_solves_defining_equations():
    wp = builtin_system("wp")
    scheme = polarize(wp)
    x0, dt = [Fraction(1), Fraction(2)], Fraction(1, 10)
    xhat = eval_map_exact(build_map(scheme), x0, dt)

    point = {"x": x0[0], "y": x0[1], "xhat": xhat[0], "yhat": xhat[1], "dt": dt}
    assert all(g.evaluate(point) == 0 for g in defining_equations(scheme))


def test_float_matches_exact():
    jacobi = builtin_system("jacobi")
    scheme = polarize(jacobi)
    x0, dt = [Fraction(0), Fraction(1), Fraction(1)], Fraction(1, 7)

    exact = eval_map_exact(build_map(scheme), x0, dt)
    approx = eval_map_float(scheme, [float(v) for v in x0], float(dt))

    assert list(approx) == pytest.approx([float(v) for v in exact], rel=1e-12)


def test_exact_step_on_exceptional_locus():
    cremona_map = build_map(polarize(builtin_system("riccati")))

    with pytest.raises(cremona.ExceptionalLocusError):
        eval_map_exact(cremona_map, [1], 1)


def test_float_step_at_pole():
    with pytest.raises(cremona.PoleError):
        eval_map_float(polarize(builtin_system("riccati")), [1.0], 1.0)


def test_zero_step_is_identity():
    scheme = polarize(builtin_system("wp"))
    assert np.array_equal(eval_map_float(scheme, [1.0, 2.0], 0.0), np.array([1.0, 2.0]))


def test_mobius_composition():
    system = builtin_system("riccati", a=1, b=-1, c=2)
    cremona_map = build_map(polarize(system))
    tau, x0 = Fraction(1, 10), Fraction(1, 3)

    ((a, b), (c, d)) = mobius_matrix(cremona_map)
    point = {"dt": tau}
    matrix = np.array([[a.evaluate(point), b.evaluate(point)], [c.evaluate(point), d.evaluate(point)]], dtype=object)
    product = matrix.dot(matrix)

    (once,) = eval_map_exact(cremona_map, [x0], tau)
    (twice,) = eval_map_exact(cremona_map, [once], tau)

    assert (product[0][0] * x0 + product[0][1]) / (product[1][0] * x0 + product[1][1]) == twice


def test_mobius_needs_one_dimension():
    with pytest.raises(cremona.UsageError):
        mobius_matrix(build_map(polarize(builtin_system("wp"))))


def test_literal_variant():
    jacobi = builtin_system("jacobi")

    with pytest.warns(cremona.NonBirationalWarning):
        scheme = polarize(jacobi, SchemeVariant.literal)

    with pytest.raises(cremona.UsageError):
        build_map(scheme)

    step = eval_map_float(scheme, [0.0, 1.0, 1.0], 0.1)
    assert np.all(np.isfinite(step))


def test_literal_without_cross_terms_is_polarized():
    wp = builtin_system("wp")
    literal = eval_map_float(polarize(wp, SchemeVariant.literal), [1.0, 2.0], 0.05)
    polarized = eval_map_float(polarize(wp), [1.0, 2.0], 0.05)

    assert list(literal) == pytest.approx(list(polarized))


def test_parse_map():
    wp = builtin_system("wp")
    cremona_map = build_map(polarize(wp))

    assert parse_map(format_map(cremona_map), wp) == cremona_map


def test_parse_map_wrong_target():
    wp = builtin_system("wp")

    with pytest.raises(cremona.ParseError):
        parse_map("yhat = x\nxhat = y\n", wp)


@functools.lru_cache(maxsize=None)
def step_maps(name):
    cremona_map = build_map(polarize(builtin_system(name)))
    return cremona_map, invert_map(cremona_map)


@pytest.mark.parametrize("name", ["riccati", "wp", "jacobi", "linear"])
@given(data=st.data())
@settings(max_examples=100, deadline=None)
def test_exact_step_is_reversible(name, data):
    forward, backward = step_maps(name)
    size = len(forward.state)

    x = data.draw(st.lists(st.fractions(-3, 3, max_denominator=50), min_size=size, max_size=size))
    dt = data.draw(st.fractions(-1, 1, max_denominator=20))

    try:
        stepped = eval_map_exact(forward, x, dt)
        returned = eval_map_exact(backward, stepped, dt)
    except cremona.ExceptionalLocusError:
        assume(False)

    assert returned == x
