"""
Even integral lattices.

A :class:`Lattice` is a Gram matrix with respect to a fixed Z-basis, vectors are
integer coordinate tuples in that basis. All arithmetic is exact.
"""

import functools
import logging
import math
import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from kummerlag.core.errors import LatticeError
from kummerlag.core.linalg import (
    determinant,
    integer_kernel,
    invariant_factors,
    is_positive_definite,
    rational_rank,
)

logger = logging.getLogger(__name__)

Gram = Tuple[Tuple[int, ...], ...]

STANDARD_NAMES = ("H", "E8neg", "MinusTwoId(k)", "KummerPi", "K3", "A2neg")

# Dynkin edges of E8 on the nodes 1..8.
E8_EDGES = ((1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 4))


def _as_gram(rows: Iterable[Iterable[int]]) -> Gram:
    return tuple(tuple(int(a) for a in row) for row in rows)


@dataclass(frozen=True)
class Lattice:
    """An even integral lattice given by its Gram matrix.

    Args:
        gram: symmetric integer matrix with even diagonal.
        labels: basis names, documentation only.
        name: a short name used in reports.
        degenerate: allow a singular Gram matrix.

    """

    gram: Gram
    labels: Tuple[str, ...] = ()
    name: str = ""
    degenerate: bool = False

    def __post_init__(self):
        """Normalize the Gram matrix and check the lattice invariants."""
        gram = _as_gram(self.gram)
        object.__setattr__(self, "gram", gram)
        n = len(gram)
        if n == 0:
            raise LatticeError("A lattice must have positive rank")
        if any(len(row) != n for row in gram):
            raise LatticeError(f"Gram matrix must be square, got {n} rows")
        for i in range(n):
            if gram[i][i] % 2:
                raise LatticeError(
                    f"Lattice is not even, diagonal entry {i} is {gram[i][i]}",
                )
            for j in range(i):
                if gram[i][j] != gram[j][i]:
                    raise LatticeError(f"Gram matrix is not symmetric at ({i}, {j})")
        labels = tuple(self.labels) or tuple(f"b{i + 1}" for i in range(n))
        if len(labels) != n:
            raise LatticeError(f"Expected {n} basis labels, got {len(labels)}")
        object.__setattr__(self, "labels", labels)
        if not self.degenerate and self.determinant == 0:
            raise LatticeError(
                f"Gram matrix of {self.name or 'lattice'} is singular; "
                "flag it as degenerate to keep it",
            )

    @property
    def rank(self) -> int:
        return len(self.gram)

    @functools.cached_property
    def determinant(self) -> int:
        return determinant(self.gram)

    @functools.cached_property
    def is_negative_definite(self) -> bool:
        return is_positive_definite([[-a for a in row] for row in self.gram])

    def vector(self, coords: Sequence[int]) -> "LatticeVector":
        return LatticeVector(tuple(coords), self)

    def basis_vector(self, i: int) -> "LatticeVector":
        return self.vector([int(i == j) for j in range(self.rank)])

    def zero(self) -> "LatticeVector":
        return self.vector([0] * self.rank)

    def to_json(self) -> Dict:
        payload = {
            "rank": self.rank,
            "gram": [list(row) for row in self.gram],
            "labels": list(self.labels),
        }
        if self.name:
            payload["name"] = self.name
        return payload

    @classmethod
    def from_json(cls, payload: Dict) -> "Lattice":
        """Build a lattice from ``{"rank": n, "gram": [[...]], "labels": [...]}``."""
        if not isinstance(payload, dict) or "gram" not in payload:
            raise LatticeError("Lattice JSON must be an object with a 'gram' entry")
        gram = payload["gram"]
        if not isinstance(gram, list) or not all(
            isinstance(row, list)
            and all(isinstance(a, int) and not isinstance(a, bool) for a in row)
            for row in gram
        ):
            raise LatticeError(f"Gram matrix must be a list of integer rows, got {gram!r}")
        rank = payload.get("rank", len(gram))
        if rank != len(gram):
            raise LatticeError(f"Declared rank {rank} but the Gram has {len(gram)} rows")
        labels = payload.get("labels") or []
        if not isinstance(labels, list) or not all(isinstance(s, str) for s in labels):
            raise LatticeError(f"Basis labels must be a list of strings, got {labels!r}")
        return cls(
            gram=gram,
            labels=tuple(labels),
            name=payload.get("name", ""),
            degenerate=payload.get("degenerate", False),
        )


@dataclass(frozen=True)
class LatticeVector:
    """Integer coordinates relative to the basis of ``lattice``."""

    coords: Tuple[int, ...]
    lattice: Lattice = field(repr=False)

    def __post_init__(self):
        """Check the coordinate count against the lattice rank."""
        coords = tuple(int(a) for a in self.coords)
        object.__setattr__(self, "coords", coords)
        if len(coords) != self.lattice.rank:
            raise LatticeError(
                f"Vector has {len(coords)} coordinates, lattice rank is {self.lattice.rank}",
            )

    def _check(self, other: "LatticeVector") -> None:
        if other.lattice is not self.lattice and other.lattice != self.lattice:
            raise LatticeError("Vectors belong to different lattices")

    def __add__(self, other: "LatticeVector") -> "LatticeVector":
        self._check(other)
        return LatticeVector(tuple(a + b for a, b in zip(self.coords, other.coords)), self.lattice)

    def __sub__(self, other: "LatticeVector") -> "LatticeVector":
        self._check(other)
        return LatticeVector(tuple(a - b for a, b in zip(self.coords, other.coords)), self.lattice)

    def __neg__(self) -> "LatticeVector":
        return LatticeVector(tuple(-a for a in self.coords), self.lattice)

    def __rmul__(self, scalar: int) -> "LatticeVector":
        return LatticeVector(tuple(scalar * a for a in self.coords), self.lattice)

    def __bool__(self) -> bool:
        return any(self.coords)

    @property
    def norm(self) -> int:
        return inner_product(self, self)

    def to_json(self) -> List[int]:
        return list(self.coords)


@dataclass(frozen=True)
class Sublattice:
    """The sublattice spanned by ``generators`` inside ``ambient``."""

    generators: Tuple[LatticeVector, ...]
    ambient: Lattice = field(repr=False)

    def __post_init__(self):
        """All generators must live in the ambient lattice."""
        generators = tuple(self.generators)
        object.__setattr__(self, "generators", generators)
        for v in generators:
            if v.lattice is not self.ambient and v.lattice != self.ambient:
                raise LatticeError("Sublattice generators must share the ambient lattice")

    @property
    def rank(self) -> int:
        return rational_rank([v.coords for v in self.generators], self.ambient.rank)

    def gram(self) -> Gram:
        """The ambient form restricted to the generators."""
        return tuple(
            tuple(inner_product(u, v) for v in self.generators) for u in self.generators
        )

    def as_lattice(self, name: str = "") -> Lattice:
        """The generators as a basis of a lattice of their own."""
        if self.rank != len(self.generators):
            raise LatticeError("Generators are not linearly independent")
        gram = self.gram()
        return Lattice(gram=gram, name=name, degenerate=determinant(gram) == 0)

    def saturation_factors(self) -> Tuple[int, ...]:
        """
        Invariant factors of the saturation of this sublattice over it.

        Empty exactly when the generators span a primitive sublattice.
        """
        return invariant_factors([v.coords for v in self.generators])

    @property
    def is_saturated(self) -> bool:
        return not self.saturation_factors()


def inner_product(v: LatticeVector, w: LatticeVector) -> int:
    """Evaluate ``v^T . gram . w``."""
    v._check(w)
    gram = v.lattice.gram
    return sum(
        a * sum(g * b for g, b in zip(row, w.coords))
        for a, row in zip(v.coords, gram)
        if a
    )


def reflect(v: LatticeVector, root: LatticeVector) -> LatticeVector:
    """Reflection ``v + (v, root) root`` in a root of norm -2."""
    if root.norm != -2:
        raise LatticeError(f"Can only reflect in a root of norm -2, got norm {root.norm}")
    return v + inner_product(v, root) * root


def is_primitive(v: LatticeVector) -> bool:
    """Whether the gcd of the coordinates of a nonzero vector is 1."""
    if not v:
        raise LatticeError("The zero vector has no primitivity")
    return math.gcd(*v.coords) == 1


def orthogonal_complement(lattice: Lattice, v: LatticeVector) -> Sublattice:
    """Saturated Z-basis of ``{n : (n, v) = 0}``."""
    if not v:
        raise LatticeError("Orthogonal complement of the zero vector is requested")
    row = [sum(a * g for a, g in zip(v.coords, col)) for col in zip(*lattice.gram)]
    kernel = integer_kernel([row], lattice.rank)
    return Sublattice(tuple(lattice.vector(k) for k in kernel), lattice)


def smith_quotient(sub: Sublattice, lattice: Lattice) -> Tuple[int, ...]:
    """Invariant factors of ``lattice / sub``, unit factors dropped."""
    if sub.ambient != lattice:
        raise LatticeError("Sublattice does not live in the given lattice")
    columns = [list(col) for col in zip(*(v.coords for v in sub.generators))]
    if len(sub.generators) < lattice.rank or sub.rank < lattice.rank:
        raise LatticeError(
            f"Sublattice of rank {sub.rank} has infinite index in a rank {lattice.rank} lattice",
        )
    return invariant_factors(columns)


def direct_sum(*lattices: Lattice, name: str = "") -> Lattice:
    """Orthogonal direct sum, block diagonal in the concatenated bases."""
    n = sum(lattice.rank for lattice in lattices)
    gram = [[0] * n for _ in range(n)]
    labels: List[str] = []
    offset = 0
    for lattice in lattices:
        for i, row in enumerate(lattice.gram):
            gram[offset + i][offset : offset + lattice.rank] = row
        labels.extend(lattice.labels)
        offset += lattice.rank
    return Lattice(
        gram=gram,
        labels=tuple(labels),
        name=name,
        degenerate=any(lattice.degenerate for lattice in lattices),
    )


def hyperbolic_plane() -> Lattice:
    return Lattice(gram=((0, 1), (1, 0)), labels=("u", "w"), name="H")


def e8_negative() -> Lattice:
    """The E8 root lattice with its form negated, in the simple root basis."""
    gram = [[-2 if i == j else 0 for j in range(8)] for i in range(8)]
    for a, b in E8_EDGES:
        gram[a - 1][b - 1] = gram[b - 1][a - 1] = 1
    return Lattice(gram=gram, labels=tuple(f"a{i}" for i in range(1, 9)), name="E8neg")


def minus_two_identity(k: int) -> Lattice:
    if k < 1:
        raise LatticeError(f"MinusTwoId needs k >= 1, got {k}")
    gram = [[-2 if i == j else 0 for j in range(k)] for i in range(k)]
    return Lattice(
        gram=gram,
        labels=tuple(f"e{i}" for i in range(1, k + 1)),
        name=f"MinusTwoId({k})",
    )


def a2_negative() -> Lattice:
    """The A2 root lattice with its form negated; basis ``e1, s``."""
    return Lattice(gram=((-2, -1), (-1, -2)), labels=("e1", "s"), name="A2neg")


def k3_lattice() -> Lattice:
    h, e8 = hyperbolic_plane(), e8_negative()
    return direct_sum(h, h, h, e8, e8, name="K3")


@functools.lru_cache(maxsize=None)
def make_standard(name: str, k: Optional[int] = None) -> Lattice:
    """
    Return one of the named standard lattices.

    Names are ``H``, ``E8neg``, ``MinusTwoId(k)`` (or ``MinusTwoId`` with ``k``),
    ``KummerPi``, ``K3`` and the toy lattice ``A2neg``.
    """
    match = re.fullmatch(r"MinusTwoId\((-?\d+)\)", name)
    if match:
        name, k = "MinusTwoId", int(match.group(1))
    if name == "MinusTwoId":
        if k is None:
            raise LatticeError("MinusTwoId needs a rank k")
        return minus_two_identity(k)
    if name == "H":
        return hyperbolic_plane()
    if name == "E8neg":
        return e8_negative()
    if name == "K3":
        return k3_lattice()
    if name == "A2neg":
        return a2_negative()
    if name == "KummerPi":
        from kummerlag.core.kummer import kummer_model

        return kummer_model().lattice
    raise LatticeError(
        f"Unknown lattice {name!r}, expected one of {', '.join(STANDARD_NAMES)}",
    )
