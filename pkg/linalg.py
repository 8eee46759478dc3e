"""
Linear algebra over any field type

Matrices are lists of rows. Everything works with Fraction entries (exact),
floats and complex numbers (pivoting on the largest entry, negligible
entries treated as zero) and, for det only, with polynomial entries.
"""

from fractions import Fraction
from numbers import Rational
from typing import List, Optional, Sequence, Tuple

from errors import DegenerateSeed
from scalars import float_tol, primal_of

Matrix = List[List]
Vector = List


def identity(size: int, one=1, zero=0) -> Matrix:
    return [[one if r == c else zero for c in range(size)] for r in range(size)]


def transpose(m: Sequence[Sequence]) -> Matrix:
    return [list(col) for col in zip(*m)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    bt = transpose(b)
    return [[_dot(row, col) for col in bt] for row in a]


def matvec(a: Sequence[Sequence], v: Sequence) -> Vector:
    return [_dot(row, v) for row in a]


def scale_vector(t, v: Sequence) -> Vector:
    return [t * x for x in v]


def from_columns(columns: Sequence[Sequence]) -> Matrix:
    return transpose(columns)


def _dot(a: Sequence, b: Sequence):
    total = None
    for x, y in zip(a, b):
        term = x * y
        total = term if total is None else total + term
    return total


def _exact(m: Sequence[Sequence]) -> bool:
    return all(isinstance(primal_of(v), Rational) for row in m for v in row)


def _scale(m: Sequence[Sequence]) -> float:
    return max([abs(primal_of(v)) for row in m for v in row] + [1.0])


def row_echelon(rows: Sequence[Sequence], tol: Optional[float] = None) -> Tuple[Matrix, List[int], List[int]]:
    """Reduced row echelon form

    Returns (reduced rows, pivot columns, free columns).
    """
    m = [list(r) for r in rows]
    if not m:
        return m, [], []
    n_rows, n_cols = len(m), len(m[0])
    exact = _exact(m)
    if exact:
        m = [[Fraction(v) if isinstance(v, int) else v for v in row] for row in m]
    threshold = 0.0 if exact else (float_tol() if tol is None else tol) * _scale(m)

    def negligible(value) -> bool:
        value = primal_of(value)
        return value == 0 if exact else abs(value) <= threshold

    pivots, free = [], []
    piv_r = 0
    for piv_c in range(n_cols):
        if piv_r == n_rows:
            free.append(piv_c)
            continue
        candidates = [r for r in range(piv_r, n_rows) if not negligible(m[r][piv_c])]
        if not candidates:
            free.append(piv_c)
            continue
        best = candidates[0] if exact else max(candidates, key=lambda r: abs(primal_of(m[r][piv_c])))
        if best != piv_r:
            m[piv_r], m[best] = m[best], m[piv_r]
        fp = m[piv_r][piv_c]
        m[piv_r] = [v / fp for v in m[piv_r]]
        for r in range(n_rows):
            if r == piv_r:
                continue
            fr = m[r][piv_c]
            if negligible(fr):
                m[r][piv_c] = fr * 0
                continue
            m[r] = [a - fr * b for a, b in zip(m[r], m[piv_r])]
            m[r][piv_c] = fr * 0
        pivots.append(piv_c)
        piv_r += 1
    return m, pivots, free


def rank(rows: Sequence[Sequence], tol: Optional[float] = None) -> int:
    return len(row_echelon(rows, tol)[1])


def nullspace(rows: Sequence[Sequence], tol: Optional[float] = None) -> List[Vector]:
    """Basis of the right kernel {v : rows . v = 0}"""
    reduced, pivots, free = row_echelon(rows, tol)
    n_cols = len(rows[0])
    one = _one_like(rows)
    basis = []
    for f in free:
        v = [one * 0] * n_cols
        v[f] = one
        for r, p in enumerate(pivots):
            v[p] = -reduced[r][f]
        basis.append(v)
    return basis


def solve(a: Sequence[Sequence], b: Sequence, tol: Optional[float] = None) -> Vector:
    """Unique solution of a square system; DegenerateSeed when singular"""
    size = len(a)
    augmented = [list(row) + [rhs] for row, rhs in zip(a, b)]
    reduced, pivots, _ = row_echelon(augmented, tol)
    if pivots != list(range(size)):
        raise DegenerateSeed("linear system is singular")
    return [reduced[r][size] for r in range(size)]


def solve_consistent(columns: Sequence[Sequence], target: Sequence,
                     tol: Optional[float] = None) -> Optional[Vector]:
    """Coefficients c with sum c_j columns[j] = target, None if no unique solution"""
    a = from_columns(columns)
    augmented = [list(row) + [t] for row, t in zip(a, target)]
    reduced, pivots, _ = row_echelon(augmented, tol)
    width = len(columns)
    if pivots != list(range(width)):
        return None
    return [reduced[r][width] for r in range(width)]


def inverse(a: Sequence[Sequence], tol: Optional[float] = None) -> Matrix:
    size = len(a)
    one = _one_like(a)
    augmented = [list(row) + [one if r == c else one * 0 for c in range(size)]
                 for r, row in enumerate(a)]
    reduced, pivots, _ = row_echelon(augmented, tol)
    if pivots[:size] != list(range(size)):
        raise DegenerateSeed("matrix is singular")
    return [row[size:] for row in reduced]


def det(matrix: Sequence[Sequence]):
    """Determinant by cofactor expansion along rows, memoised on column subsets

    Uses only +, - and *, so it also works for polynomial entries.
    """
    size = len(matrix)
    zero = matrix[0][0] - matrix[0][0]
    memo = {}

    def expand(row: int, cols: Tuple[int, ...]):
        if cols in memo:
            return memo[cols]
        if len(cols) == 1:
            entry = matrix[row][cols[0]]
            result = None if entry == 0 else entry
            memo[cols] = result
            return result
        total = None
        for pos, c in enumerate(cols):
            entry = matrix[row][c]
            if entry == 0:
                continue
            rest = expand(row + 1, cols[:pos] + cols[pos + 1:])
            if rest is None:
                continue
            term = entry * rest
            if pos % 2:
                term = -term
            total = term if total is None else total + term
        memo[cols] = total
        return total

    result = expand(0, tuple(range(size)))
    return zero if result is None else result


def generalized_cross(vectors: Sequence[Sequence]) -> Vector:
    """Covector w -> det(v_1, ..., v_{k-1}, w) as a k-vector"""
    k = len(vectors[0])
    if len(vectors) != k - 1:
        raise ValueError("generalized cross product needs k-1 vectors in k-space")
    result = []
    for c in range(k):
        minor = [[v[j] for j in range(k) if j != c] for v in vectors]
        value = det(minor) if minor and minor[0] else 1
        if (k - 1 + c) % 2:
            value = -value
        result.append(value)
    return result


def cross3(a: Sequence, b: Sequence) -> Vector:
    return [a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0]]


def _one_like(m: Sequence[Sequence]):
    for row in m:
        for v in row:
            return v ** 0 if not hasattr(v, "primal") else 1
    return 1
