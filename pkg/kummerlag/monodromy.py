"""Orbits of affine monodromy actions on (Z/m)^2."""

import logging
from collections import deque
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import pandas as pd
from sympy import isprime

from kummerlag.core.errors import ActionError
from kummerlag.core.workers import parallel_map

logger = logging.getLogger(__name__)

Matrix2 = Tuple[Tuple[int, int], Tuple[int, int]]
Point = Tuple[int, int]

# Standard generators of SL(2, Z).
T = ((1, 1), (0, 1))
U = ((1, 0), (1, 1))


def _reduce_matrix(a: Sequence[Sequence[int]], m: int) -> Matrix2:
    if len(a) != 2 or any(len(row) != 2 for row in a):
        raise ActionError(f"Expected a 2x2 matrix, got {a}")
    return ((a[0][0] % m, a[0][1] % m), (a[1][0] % m, a[1][1] % m))


def _det(a: Matrix2, m: int) -> int:
    return (a[0][0] * a[1][1] - a[0][1] * a[1][0]) % m


def _check_prime(p: int) -> None:
    if not isprime(p):
        raise ActionError(f"Modulus must be prime, got {p}")


@dataclass(frozen=True)
class AffineMap:
    """``v -> A v + t`` on ``(Z/m)^2``."""

    A: Matrix2
    t: Point = (0, 0)

    def __call__(self, v: Point, m: int) -> Point:
        (a, b), (c, d) = self.A
        return ((a * v[0] + b * v[1] + self.t[0]) % m, (c * v[0] + d * v[1] + self.t[1]) % m)

    def inverse(self, m: int) -> "AffineMap":
        (a, b), (c, d) = self.A
        inv = ((d % m, -b % m), (-c % m, a % m))
        u, v = self.t
        t = ((-(d * u - b * v)) % m, (-(-c * u + a * v)) % m)
        return AffineMap(inv, t)

    @property
    def is_linear(self) -> bool:
        return not any(self.t)


@dataclass(frozen=True)
class AffineAction:
    """Generators ``(A, t)`` with ``det A = 1`` acting on ``(Z/m)^2``."""

    modulus: int
    generators: Tuple[AffineMap, ...]

    def __post_init__(self):
        """Reduce the generators mod m and check their determinants."""
        m = self.modulus
        if m < 2:
            raise ActionError(f"Modulus must be at least 2, got {m}")
        generators = []
        for g in self.generators:
            a = _reduce_matrix(g.A, m)
            if _det(a, m) != 1 % m:
                raise ActionError(f"Generator {a} has determinant {_det(a, m)} mod {m}, expected 1")
            generators.append(AffineMap(a, (g.t[0] % m, g.t[1] % m)))
        object.__setattr__(self, "generators", tuple(generators))

    @classmethod
    def from_matrices(
        cls,
        m: int,
        matrices: Iterable[Sequence[Sequence[int]]],
        translations: Optional[Iterable[Point]] = None,
    ) -> "AffineAction":
        matrices = list(matrices)
        translations = list(translations) if translations is not None else [(0, 0)] * len(matrices)
        if len(translations) != len(matrices):
            raise ActionError("Each generator needs exactly one translation")
        return cls(
            m,
            tuple(AffineMap(_reduce_matrix(a, m), tuple(t)) for a, t in zip(matrices, translations)),
        )

    @classmethod
    def from_json(cls, payload: Dict) -> "AffineAction":
        """Read ``{"m": p, "gens": [{"A": [[a, b], [c, d]], "t": [u, v]}]}``."""
        try:
            m = int(payload["m"])
            gens = list(payload["gens"])
            matrices = [[[int(a) for a in row] for row in g["A"]] for g in gens]
            translations = [tuple(int(a) for a in g.get("t", (0, 0))) for g in gens]
        except (KeyError, TypeError, ValueError, AttributeError) as err:
            raise ActionError(f"Malformed action JSON: {err!r}") from err
        for i, t in enumerate(translations):
            if len(t) != 2:
                raise ActionError(f"Malformed action JSON: translation {i} has {len(t)} entries, expected 2")
        return cls.from_matrices(m, matrices, translations)

    def to_json(self) -> Dict:
        return {
            "m": self.modulus,
            "gens": [{"A": [list(row) for row in g.A], "t": list(g.t)} for g in self.generators],
        }

    @property
    def is_linear(self) -> bool:
        return all(g.is_linear for g in self.generators)


@dataclass(frozen=True)
class OrbitPartition:
    """Disjoint orbits covering ``(Z/m)^2``, each sorted, ordered by their least point."""

    modulus: int
    blocks: Tuple[Tuple[Point, ...], ...]

    @property
    def sizes(self) -> List[int]:
        return [len(block) for block in self.blocks]

    def block_of(self, v: Point) -> int:
        for i, block in enumerate(self.blocks):
            if v in block:
                return i
        raise KeyError(v)

    def to_json(self) -> Dict:
        return {
            "m": self.modulus,
            "count": len(self.blocks),
            "sizes": self.sizes,
            "blocks": [[list(v) for v in block] for block in self.blocks],
        }


def orbits(action: AffineAction) -> OrbitPartition:
    """Orbits of the group generated by the maps and their inverses, by breadth-first search."""
    m = action.modulus
    moves = list(action.generators) + [g.inverse(m) for g in action.generators]
    seen = set()
    blocks = []
    for start in ((i, j) for i in range(m) for j in range(m)):
        if start in seen:
            continue
        seen.add(start)
        block = [start]
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for g in moves:
                w = g(v, m)
                if w not in seen:
                    seen.add(w)
                    block.append(w)
                    queue.append(w)
        blocks.append(tuple(sorted(block)))
    return OrbitPartition(m, tuple(sorted(blocks)))


def is_preimage_irreducible(action: AffineAction, p: int) -> bool:
    """Whether the action mod a prime ``p`` is transitive on ``(Z/p)^2``."""
    _check_prime(p)
    if action.modulus != p:
        raise ActionError(f"Action is defined mod {action.modulus}, not mod {p}")
    partition = orbits(action)
    return partition.sizes == [p * p]


def sl2_order(p: int) -> int:
    """``|SL(2, Z/p)| = p (p^2 - 1)``."""
    _check_prime(p)
    return p * (p * p - 1)


def _multiply(x: Tuple[int, ...], y: Tuple[int, ...], p: int) -> Tuple[int, ...]:
    a, b, c, d = x
    e, f, g, h = y
    return ((a * e + b * g) % p, (a * f + b * h) % p, (c * e + d * g) % p, (c * f + d * h) % p)


def subgroup_order(matrices: Iterable[Sequence[Sequence[int]]], p: int) -> int:
    """Order of the subgroup of ``SL(2, Z/p)`` generated by ``matrices``, by closure."""
    _check_prime(p)
    generators = []
    for a in matrices:
        a = _reduce_matrix(a, p)
        if _det(a, p) != 1:
            raise ActionError(f"Matrix {a} has determinant {_det(a, p)} mod {p}, expected 1")
        generators.append((a[0][0], a[0][1], a[1][0], a[1][1]))
    identity = (1, 0, 0, 1)
    group = {identity}
    queue = deque([identity])
    while queue:
        x = queue.popleft()
        for g in generators:
            y = _multiply(x, g, p)
            if y not in group:
                group.add(y)
                queue.append(y)
    return len(group)


def monodromy_surjective_mod_p(matrices: Iterable[Sequence[Sequence[int]]], p: int) -> bool:
    order = subgroup_order(matrices, p)
    logger.debug("Subgroup order mod %d is %d of %d", p, order, sl2_order(p))
    return order == sl2_order(p)


def phi_degree(m: int, r: Optional[int] = None) -> int:
    """
    Degree ``m^2`` of multiplication by ``m`` on an elliptic curve.

    With ``r`` given, also check ``m = 1 mod r``, the condition under which the
    multiplication map preserves the level ``r`` structure.
    """
    if m < 1:
        raise ActionError(f"m must be positive, got {m}")
    if r is not None and m % r != 1 % r:
        raise ActionError(f"m = {m} is not 1 mod {r}")
    return m * m


def _order_row(p: int, matrices: Tuple) -> Dict:
    order = subgroup_order(matrices, p)
    return {"p": p, "order": order, "sl2_order": sl2_order(p), "surjective": order == sl2_order(p)}


def sl2_order_table(
    primes: Iterable[int],
    matrices: Optional[Sequence[Sequence[Sequence[int]]]] = None,
    threads: int = 1,
) -> pd.DataFrame:
    """
    Subgroup orders for several primes as a table.

    Defaults to the standard generators ``T`` and ``U``; closures for distinct
    primes run concurrently when ``threads > 1``.
    """
    matrices = tuple(matrices) if matrices is not None else (T, U)
    rows = parallel_map(_order_row, [(p, matrices) for p in primes], threads=threads)
    return pd.DataFrame(rows, columns=["p", "order", "sl2_order", "surjective"])
