"""Exact enumeration of lattice vectors of a fixed norm."""

import itertools
import logging
import math
from fractions import Fraction
from typing import List, Sequence, Tuple

from kummerlag.core.errors import LatticeError
from kummerlag.core.lattice import Lattice, LatticeVector, inner_product
from kummerlag.core.linalg import inverse, lll_reduce
from kummerlag.core.workers import parallel_map

logger = logging.getLogger(__name__)


def _check_enumerable(lattice: Lattice, t: int) -> None:
    if t >= 0:
        raise LatticeError(f"Norm must be negative, got {t}")
    if lattice.degenerate:
        raise LatticeError(
            f"{lattice.name or 'Lattice'} is degenerate, split off its radical first",
        )
    if not lattice.is_negative_definite:
        raise LatticeError(
            f"{lattice.name or 'Lattice'} is not negative definite, enumeration would not terminate",
        )


def _quadratic_decomposition(form: Sequence[Sequence[int]]) -> List[List[Fraction]]:
    """
    Rational LDL^T of a positive definite form.

    On return ``q[i][i]`` holds the pivots and ``q[i][j]`` (j > i) the
    multipliers, so that ``Q(x) = sum_i q[i][i] (x_i + sum_{j>i} q[i][j] x_j)^2``.
    """
    n = len(form)
    q = [[Fraction(a) for a in row] for row in form]
    for i in range(n):
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for j in range(k, n):
                q[k][j] -= q[k][i] * q[i][j]
    return q


def _window(center: Fraction, radius_sq: Fraction) -> List[int]:
    """Integers z with ``(z - center)^2 <= radius_sq``."""
    if radius_sq < 0:
        return []
    s = math.isqrt(math.floor(radius_sq)) + 1
    lo, hi = math.floor(center) - s, math.ceil(center) + s
    return [z for z in range(lo, hi + 1) if (z - center) ** 2 <= radius_sq]


def _descend(q, i: int, x: List[int], remaining: Fraction, found: List) -> None:
    n = len(q)
    center = -sum(q[i][j] * x[j] for j in range(i + 1, n))
    for xi in _window(center, remaining / q[i][i]):
        d = xi - center
        rest = remaining - q[i][i] * d * d
        x[i] = xi
        if i == 0:
            if rest == 0:
                found.append(tuple(x))
        else:
            _descend(q, i - 1, x, rest, found)
    x[i] = 0


def _enumerate_slice(q, target: int, top_values: Sequence[int]) -> List[Tuple[int, ...]]:
    """All solutions of ``Q(y) = target`` whose last coordinate is in ``top_values``."""
    n = len(q)
    found: List[Tuple[int, ...]] = []
    top = n - 1
    for value in top_values:
        x = [0] * n
        x[top] = value
        rest = Fraction(target) - q[top][top] * value * value
        if rest < 0:
            continue
        if top == 0:
            if rest == 0:
                found.append(tuple(x))
        else:
            _descend(q, top - 1, x, rest, found)
    return found


def _chunks(values: List[int], parts: int) -> List[List[int]]:
    size = max(1, math.ceil(len(values) / parts))
    return [values[i : i + size] for i in range(0, len(values), size)]


def enumerate_norm_vectors(
    lattice: Lattice,
    t: int = -2,
    threads: int = 1,
) -> List[LatticeVector]:
    """
    Return every vector ``v`` with ``(v, v) = t`` in a negative definite lattice.

    The form ``-gram`` is LLL-reduced first and the Fincke-Pohst tree is
    explored with exact rational bounds. With ``threads > 1`` the values of the
    top coordinate are split across workers. The result is sorted
    lexicographically, so it does not depend on the worker count.
    """
    _check_enumerable(lattice, t)
    if t % 2:
        logger.debug("Odd norm %d on an even lattice, nothing to enumerate", t)
        return []
    form = [[-a for a in row] for row in lattice.gram]
    transform, reduced = lll_reduce(form)
    q = _quadratic_decomposition(reduced)
    target = -t
    top = len(q) - 1
    top_values = _window(Fraction(0), Fraction(target) / q[top][top])
    tasks = [(q, target, chunk) for chunk in _chunks(top_values, threads)]
    logger.debug(
        "Enumerating norm %d on %s: %d top values in %d tasks",
        t,
        lattice.name or f"rank {lattice.rank} lattice",
        len(top_values),
        len(tasks),
    )
    solutions = itertools.chain.from_iterable(
        parallel_map(_enumerate_slice, tasks, threads=threads),
    )
    n = lattice.rank
    vectors = set()
    for y in solutions:
        vectors.add(
            tuple(sum(y[i] * transform[i][j] for i in range(n)) for j in range(n)),
        )
    return [lattice.vector(v) for v in sorted(vectors)]


def brute_force_norm_vectors(lattice: Lattice, t: int = -2) -> List[LatticeVector]:
    """
    Coordinate-box oracle for :func:`enumerate_norm_vectors`.

    Every solution satisfies ``x_i^2 <= -t * (Q^-1)_ii`` with ``Q = -gram``, which
    bounds the box. Only practical for small ranks.
    """
    _check_enumerable(lattice, t)
    q_inv = inverse([[-a for a in row] for row in lattice.gram])
    bounds = [math.isqrt(math.floor(-t * q_inv[i][i])) for i in range(lattice.rank)]
    found = []
    for coords in itertools.product(*(range(-b, b + 1) for b in bounds)):
        v = lattice.vector(coords)
        if any(coords) and inner_product(v, v) == t:
            found.append(v)
    return sorted(found, key=lambda v: v.coords)
