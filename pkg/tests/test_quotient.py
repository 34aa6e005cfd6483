from fractions import Fraction

import pytest

import cremona
from cremona.algebra import MultiPoly, QuotientRing, RatFunc, VarTable

VT = VarTable(["dt"])
dt = MultiPoly.variable(VT, "dt")


def test_square_root_of_two():
    ring = QuotientRing(dt**2 - 2, "dt")
    root = ring.element(dt)

    assert ring.equals(ring.mul(root, root), 2)
    assert ring.equals(ring.mul(ring.inverse(root), root), 1)


def test_zero_divisor_exposes_factor():
    ring = QuotientRing(dt**2 - 1, "dt")

    with pytest.raises(cremona.ZeroDivisorFound) as info:
        ring.inverse(ring.element(dt - 1))

    assert info.value.factor == dt - 1

    left, right = ring.split(info.value.factor)
    assert left.modulus == dt - 1
    assert right.modulus == dt + 1


def test_evaluate_rational_function():
    table = VarTable(["x", "dt"])
    x = MultiPoly.variable(table, "x")
    step = MultiPoly.variable(table, "dt")
    ring = QuotientRing(dt**2 - 2, "dt")

    # x / (1 - x*dt) at x = dt is dt / (1 - 2) = -dt
    function = RatFunc(x, 1 - x * step)
    value = ring.evaluate(function, {"x": ring.element(dt)})

    assert ring.is_zero(value + ring.element(dt))


def test_constant_value():
    ring = QuotientRing(dt**3 - dt - 1, "dt")
    assert ring.constant_value(ring.element(Fraction(2, 3))) == Fraction(2, 3)

    with pytest.raises(cremona.UsageError):
        ring.constant_value(ring.element(dt))


def test_bad_modulus():
    with pytest.raises(cremona.UsageError):
        QuotientRing(MultiPoly.constant(VT, 3), "dt")
