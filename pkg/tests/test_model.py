from fractions import Fraction

import pytest

import cremona
from cremona.model import (
    Invariant,
    builtin_source,
    builtin_system,
    format_system,
    known_invariants,
    lie_derivative,
    parse_expression,
    parse_system,
    rhs_eval,
)

WP_SOURCE = """
# Weierstrass elliptic function
var x, y
param a = 1/2
x' = y
y' = 6*x^2 - a
"""


def test_parse_system():
    system = parse_system(WP_SOURCE, name="wp")

    assert system.state == ("x", "y")
    assert system.param_dict == {"a": Fraction(1, 2)}
    assert system.quadratic[1][0][0] == 6
    assert system.constant[1] == Fraction(-1, 2)
    assert system == builtin_system("wp")


def test_cross_terms_are_split():
    system = builtin_system("jacobi")

    assert system.quadratic[0][1][2] == system.quadratic[0][2][1] == Fraction(1, 2)
    assert system.has_cross_terms
    assert not builtin_system("wp").has_cross_terms


def test_format_system_parses_back():
    for name in ("riccati", "wp", "jacobi", "linear"):
        system = builtin_system(name)
        assert parse_system(format_system(system)) == system


def test_degree_error():
    with pytest.raises(cremona.DegreeError) as info:
        parse_system("var x\nx' = x^3")

    assert info.value.degree == 3


def test_unknown_name():
    with pytest.raises(cremona.UnknownNameError) as info:
        parse_system("var x, y\nx' = y\ny' = z")

    assert info.value.line == 3


def test_missing_equation():
    with pytest.raises(cremona.ParseError):
        parse_system("var x, y\nx' = y")


def test_reserved_names():
    with pytest.raises(cremona.ParseError):
        parse_system("var dt\ndt' = 1")

    with pytest.raises(cremona.ParseError):
        parse_system("var x, xhat\nx' = 1\nxhat' = 1")


def test_rational_rhs_refused():
    with pytest.raises(cremona.ParseError):
        parse_system("var x\nx' = 1/x")


def test_builtins():
    assert builtin_system("riccati").state == ("x",)
    assert builtin_system("jacobi", k=Fraction(1, 2)).param_dict == {"k": Fraction(1, 2)}
    assert "param w = 3" in builtin_source("linear", {"w": 3})

    with pytest.raises(cremona.UsageError):
        builtin_system("lorenz")

    with pytest.raises(cremona.UsageError):
        builtin_system("wp", b=1)


def test_rhs_eval():
    wp = builtin_system("wp")

    assert rhs_eval(wp, [1, 2]) == [2, Fraction(11, 2)]
    assert rhs_eval(wp, [1.0, 2.0]) == pytest.approx([2.0, 5.5])


def test_known_invariants():
    assert [invariant.name for invariant in known_invariants(builtin_system("wp"))] == ["energy"]
    assert len(known_invariants(builtin_system("jacobi", k=Fraction(1, 3)))) == 2
    assert known_invariants(builtin_system("riccati")) == []
    assert known_invariants(parse_system(WP_SOURCE)) == []


def test_invariants_are_conserved():
    for name in ("wp", "jacobi", "linear"):
        system = builtin_system(name)
        for invariant in known_invariants(system):
            assert lie_derivative(system, invariant.poly).is_zero


def test_not_an_invariant():
    wp = builtin_system("wp")

    with pytest.raises(cremona.NotAnInvariantError):
        Invariant("bad", parse_expression(wp, "y^2/2 - 4*x^3"), wp)


def test_invariant_evaluate():
    wp = builtin_system("wp")
    (energy,) = known_invariants(wp)

    assert energy.evaluate([1, 2]) == Fraction(2) - 2 + Fraction(1, 2)
    assert isinstance(energy.evaluate([1.0, 2.0]), float)


def test_parse_expression_unknown():
    with pytest.raises(cremona.UnknownNameError):
        parse_expression(builtin_system("wp"), "x + dt")
