"""Exact integer and rational linear algebra."""

import math
from fractions import Fraction
from typing import List, Sequence, Tuple

from sympy import QQ, ZZ, Matrix

try:
    from sympy.core.intfunc import igcdex
except ImportError:  # sympy < 1.13
    from sympy.core.numbers import igcdex
from sympy.matrices.normalforms import hermite_normal_form, smith_normal_form
from sympy.polys.matrices import DomainMatrix

from kummerlag.core.errors import LatticeError

IntMatrix = List[List[int]]


def _qq(value) -> "QQ":
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


def rational_rank(rows: Sequence[Sequence], ncols: int) -> int:
    """Rank over Q of a matrix given by integer or rational rows."""
    if not rows:
        return 0
    data = [[_qq(a) for a in row] for row in rows]
    return DomainMatrix(data, (len(data), ncols), QQ).rank()


def in_rational_span(vector: Sequence, rows: Sequence[Sequence]) -> bool:
    """Whether ``vector`` lies in the Q-span of ``rows``."""
    ncols = len(vector)
    if not any(vector):
        return True
    return rational_rank(list(rows) + [vector], ncols) == rational_rank(rows, ncols)


def dot(u: Sequence[int], v: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(u, v))


def integer_kernel(rows: Sequence[Sequence[int]], ncols: int) -> IntMatrix:
    """
    Return a Z-basis of ``{y in Z^n : row . y = 0 for every row}``.

    The basis comes out of unimodular column operations on the identity, so it
    spans a saturated sublattice. Each basis vector is normalized to have a
    positive first nonzero coordinate.
    """
    basis = [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    free = list(range(ncols))
    for row in rows:
        values = {c: dot(row, basis[c]) for c in free}
        pivot = None
        for c in free:
            if values[c] == 0:
                continue
            if pivot is None:
                pivot = c
                continue
            p, q = values[pivot], values[c]
            s, t, g = igcdex(p, q)
            bp, bq = basis[pivot], basis[c]
            basis[pivot] = [s * a + t * b for a, b in zip(bp, bq)]
            basis[c] = [(p // g) * b - (q // g) * a for a, b in zip(bp, bq)]
            values[pivot], values[c] = g, 0
        if pivot is not None:
            free.remove(pivot)
    kernel = []
    for c in free:
        vector = basis[c]
        lead = next(a for a in vector if a != 0)
        kernel.append(vector if lead > 0 else [-a for a in vector])
    return kernel


def column_basis(generators: Sequence[Sequence[int]], ncols: int) -> IntMatrix:
    """
    Z-basis, in Hermite normal form, of the lattice spanned by ``generators``.

    The generators must span a full rank sublattice of ``Z^ncols``. The basis
    vectors are returned as rows.
    """
    if rational_rank(generators, ncols) < ncols:
        raise LatticeError(
            f"Generators span a sublattice of rank below {ncols}",
        )
    hnf = hermite_normal_form(Matrix(generators).T)
    return [[int(a) for a in hnf.col(j)] for j in range(hnf.cols)]


def invariant_factors(rows: Sequence[Sequence[int]]) -> Tuple[int, ...]:
    """
    Nontrivial invariant factors of an integer matrix of full row rank.

    The factors are returned in increasing divisibility order with the unit
    factors dropped.
    """
    m = Matrix(rows)
    if m.rows > m.cols or rational_rank(rows, m.cols) < m.rows:
        raise LatticeError(
            f"Expected a {m.rows}x{m.cols} matrix of full row rank",
        )
    square = hermite_normal_form(m)
    snf = smith_normal_form(square, domain=ZZ)
    diagonal = [abs(int(snf[i, i])) for i in range(square.rows)]
    return tuple(d for d in diagonal if d != 1)


def leading_minors(gram: Sequence[Sequence[int]]) -> List[int]:
    """Leading principal minors of ``gram`` computed with Bareiss elimination."""
    m = Matrix(gram)
    return [int(m[:k, :k].det(method="bareiss")) for k in range(1, m.rows + 1)]


def is_positive_definite(gram: Sequence[Sequence[int]]) -> bool:
    return all(minor > 0 for minor in leading_minors(gram))


def determinant(gram: Sequence[Sequence[int]]) -> int:
    return int(Matrix(gram).det(method="bareiss"))


def inverse(gram: Sequence[Sequence[int]]) -> List[List[Fraction]]:
    """Exact inverse as Fractions."""
    inv = Matrix(gram).inv()
    return [
        [Fraction(int(a.p), int(a.q)) for a in inv.row(i)] for i in range(inv.rows)
    ]


def lll_reduce(
    gram: Sequence[Sequence[int]],
    delta: Fraction = Fraction(3, 4),
) -> Tuple[IntMatrix, IntMatrix]:
    """
    LLL-reduce a positive definite integral Gram matrix exactly.

    Works on the Gram matrix alone, so no embedding into R^n is needed.

    Returns:
        (transform, reduced): ``transform`` rows are the reduced basis in the
        input coordinates and ``reduced = transform . gram . transform^T``.
    """
    n = len(gram)
    g = [[int(a) for a in row] for row in gram]
    h = [[int(i == j) for j in range(n)] for i in range(n)]
    if n < 2:
        return h, g

    mu = [[Fraction(0)] * n for _ in range(n)]
    b = [Fraction(0)] * n
    b[0] = Fraction(g[0][0])

    def reduce(k: int, j: int) -> None:
        if abs(mu[k][j]) <= Fraction(1, 2):
            return
        q = math.floor(mu[k][j] + Fraction(1, 2))
        h[k] = [a - q * c for a, c in zip(h[k], h[j])]
        for i in range(n):
            g[k][i] -= q * g[j][i]
        for i in range(n):
            g[i][k] -= q * g[i][j]
        mu[k][j] -= q
        for i in range(j):
            mu[k][i] -= q * mu[j][i]

    def swap(k: int, kmax: int) -> None:
        h[k], h[k - 1] = h[k - 1], h[k]
        g[k], g[k - 1] = g[k - 1], g[k]
        for row in g:
            row[k], row[k - 1] = row[k - 1], row[k]
        for j in range(k - 1):
            mu[k][j], mu[k - 1][j] = mu[k - 1][j], mu[k][j]
        m = mu[k][k - 1]
        bb = b[k] + m * m * b[k - 1]
        mu[k][k - 1] = m * b[k - 1] / bb
        b[k] = b[k - 1] * b[k] / bb
        b[k - 1] = bb
        for i in range(k + 1, kmax + 1):
            t = mu[i][k]
            mu[i][k] = mu[i][k - 1] - m * t
            mu[i][k - 1] = t + mu[k][k - 1] * mu[i][k]

    k, kmax = 1, 0
    while k < n:
        if k > kmax:
            kmax = k
            for j in range(k):
                mu[k][j] = (
                    g[k][j] - sum(mu[j][i] * mu[k][i] * b[i] for i in range(j))
                ) / b[j]
            b[k] = g[k][k] - sum(mu[k][j] ** 2 * b[j] for j in range(k))
            if b[k] <= 0:
                raise LatticeError("Gram matrix is not positive definite")
        reduce(k, k - 1)
        if b[k] < (delta - mu[k][k - 1] ** 2) * b[k - 1]:
            swap(k, kmax)
            k = max(1, k - 1)
        else:
            for j in range(k - 2, -1, -1):
                reduce(k, j)
            k += 1
    return h, g
