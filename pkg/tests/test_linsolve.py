from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from sympy import Matrix, Rational

import cremona
from cremona.algebra import MultiPoly, RatFunc, VarTable, bareiss_det, bareiss_solve

VT = VarTable(["a", "b", "c", "d"])
a, b, c, d = (MultiPoly.variable(VT, name) for name in VT)


def const(value):
    return MultiPoly.constant(VT, value)


def test_det_symbolic():
    assert bareiss_det([[a, b], [c, d]]) == a * d - b * c


def test_det_needs_pivoting():
    matrix = [[const(0), const(1), const(2)], [const(1), const(0), const(3)], [const(4), const(-3), const(8)]]
    assert bareiss_det(matrix) == -2


def test_solve_numeric():
    solution = bareiss_solve([[const(2), const(1)], [const(1), const(3)]], [const(1), const(2)])
    assert solution == [RatFunc.constant(VT, Fraction(1, 5)), RatFunc.constant(VT, Fraction(3, 5))]


def test_solve_symbolic():
    matrix = [[a, b], [c, d]]
    solution = bareiss_solve(matrix, [const(1), const(0)])

    for i in range(2):
        row = sum((RatFunc(matrix[i][j]) * solution[j] for j in range(2)), RatFunc.constant(VT, 0))
        assert row == (1 if i == 0 else 0)


def test_singular():
    with pytest.raises(cremona.SingularError):
        bareiss_solve([[a, b], [a * 2, b * 2]], [const(1), const(1)])


def test_not_square():
    with pytest.raises(cremona.UsageError):
        bareiss_det([[a, b]])


def residual(matrix, solution, i):
    return sum((RatFunc(matrix[i][j]) * solution[j] for j in range(len(matrix))), RatFunc.constant(VT, 0))


@st.composite
def rational_systems(draw):
    size = draw(st.integers(1, 4))
    entries = st.fractions(-5, 5, max_denominator=7)
    matrix = draw(st.lists(st.lists(entries, min_size=size, max_size=size), min_size=size, max_size=size))
    rhs = draw(st.lists(entries, min_size=size, max_size=size))
    return matrix, rhs


@st.composite
def symbolic_systems(draw):
    size = draw(st.integers(1, 3))
    entries = st.tuples(st.integers(-3, 3), st.integers(-3, 3)).map(lambda pair: a * pair[0] + pair[1])
    matrix = draw(st.lists(st.lists(entries, min_size=size, max_size=size), min_size=size, max_size=size))
    rhs = draw(st.lists(entries, min_size=size, max_size=size))
    return matrix, rhs


@given(rational_systems())
@settings(max_examples=100, deadline=None)
def test_solve_rational_residual(system):
    values, rhs = system
    matrix = [[const(value) for value in row] for row in values]
    determinant = bareiss_det(matrix)

    expected = Matrix([[Rational(v.numerator, v.denominator) for v in row] for row in values]).det()
    assert determinant == Fraction(str(expected))

    assume(not determinant.is_zero)
    solution = bareiss_solve(matrix, [const(value) for value in rhs])

    for i, value in enumerate(rhs):
        assert residual(matrix, solution, i) == value


@given(symbolic_systems())
@settings(max_examples=50, deadline=None)
def test_solve_symbolic_residual(system):
    matrix, rhs = system
    assume(not bareiss_det(matrix).is_zero)
    solution = bareiss_solve(matrix, rhs)

    for i, value in enumerate(rhs):
        assert residual(matrix, solution, i) == RatFunc(value)
