from __future__ import annotations

from typing import List, Sequence

from ..errors import SingularError, UsageError
from .poly import MultiPoly
from .ratfunc import RatFunc

__all__ = ("bareiss_det", "bareiss_solve")

Matrix = Sequence[Sequence[MultiPoly]]


def _check_square(matrix: Matrix) -> int:
    size = len(matrix)
    if size == 0 or any(len(row) != size for row in matrix):
        raise UsageError("expected a non-empty square matrix")

    vartable = matrix[0][0].vartable
    if any(entry.vartable != vartable for row in matrix for entry in row):
        raise UsageError("matrix entries live in different variable tables")

    return size


def bareiss_det(matrix: Matrix) -> MultiPoly:
    """
    Determinant by fraction-free (Bareiss) elimination; every division is exact.
    """
    size = _check_square(matrix)
    rows: List[List[MultiPoly]] = [list(row) for row in matrix]
    vartable = rows[0][0].vartable
    previous = MultiPoly.one(vartable)
    sign = 1

    for k in range(size - 1):
        pivot_row = next((row for row in range(k, size) if not rows[row][k].is_zero), None)
        if pivot_row is None:
            return MultiPoly.zero(vartable)

        if pivot_row != k:
            rows[pivot_row], rows[k] = rows[k], rows[pivot_row]
            sign = -sign

        pivot = rows[k][k]
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                rows[i][j] = (pivot * rows[i][j] - rows[i][k] * rows[k][j]).exquo(previous)

            rows[i][k] = MultiPoly.zero(vartable)

        previous = pivot

    return rows[size - 1][size - 1] * sign


def bareiss_solve(matrix: Matrix, rhs: Sequence[MultiPoly]) -> List[RatFunc]:
    """
    Solves A·x = b exactly over the rational functions.

    Each component is det(A_i) / det(A), A_i being A with column i replaced by b, both
    determinants computed fraction-free; every denominator therefore divides det(A).

    Parameters:
        matrix (Sequence[Sequence[MultiPoly]]): The square matrix A.
        rhs (Sequence[MultiPoly]): The right-hand side b.

    Returns:
        The solution vector in canonical form.

    Raises:
        [cremona.errors.SingularError][] if det(A) is the zero polynomial.

    """
    size = _check_square(matrix)
    if len(rhs) != size:
        raise UsageError(f"right-hand side has {len(rhs)} entries, expected {size}")

    determinant = bareiss_det(matrix)
    if determinant.is_zero:
        raise SingularError("matrix is singular for every value of its variables")

    solution: List[RatFunc] = []
    for column in range(size):
        replaced = [[rhs[i] if j == column else matrix[i][j] for j in range(size)] for i in range(size)]
        solution.append(RatFunc(bareiss_det(replaced), determinant))

    return solution
