from fractions import Fraction

import pytest

import cremona
from cremona.algebra import MultiPoly, RatFunc, VarTable, parse_poly, parse_ratfunc, parse_rational

VT = VarTable(["x", "dt"])
x = MultiPoly.variable(VT, "x")
dt = MultiPoly.variable(VT, "dt")


def test_parse_precedence():
    assert parse_poly("1 + 2*x^2", VT) == x**2 * 2 + 1
    assert parse_poly("-x^2", VT) == -(x**2)
    assert parse_poly("(x + 1)^2 - 2*x", VT) == x**2 + 1
    assert parse_poly("1/2*x", VT) == x * Fraction(1, 2)


def test_parse_ratfunc():
    assert parse_ratfunc("(-x) / (x*dt - 1)", VT) == RatFunc(-x, x * dt - 1)


def test_parse_poly_refuses_division_by_variables():
    with pytest.raises(cremona.ParseError):
        parse_poly("1/x", VT)


def test_parse_errors():
    with pytest.raises(cremona.ParseError) as info:
        parse_poly("x +", VT)

    assert info.value.line == 1

    with pytest.raises(cremona.ParseError):
        parse_poly("x ** 2", VT)

    with pytest.raises(cremona.ParseError):
        parse_poly("x / (dt - dt)", VT)


def test_unknown_name():
    with pytest.raises(cremona.UnknownNameError) as info:
        parse_poly("x + z", VT)

    assert info.value.column == 5
    assert isinstance(info.value, NameError)


def test_parse_rational():
    assert parse_rational("1/2") == Fraction(1, 2)
    assert parse_rational("-3") == -3
    assert parse_rational(" 7 / 14 ") == Fraction(1, 2)

    for text in ("0.5", "1/0", "x", ""):
        with pytest.raises(cremona.UsageError):
            parse_rational(text)
