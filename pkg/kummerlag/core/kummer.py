"""
The Kummer lattice.

The sixteen exceptional classes ``e_p`` of a Kummer surface are indexed by the
points ``p`` of ``F_2^4`` (encoded as the integers 0..15). The Kummer lattice is
generated by them together with the half-sums ``(1/2) sum_{p in P} e_p`` over
affine subspaces ``P``. Vectors are first written in half coordinates
``v = sum_p y_p e_p / 2``, an integral basis is extracted in Hermite normal
form, and from then on everything is stored in integer coordinates of that
basis.
"""

import functools
import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Tuple

from sympy import GF
from sympy.polys.matrices import DomainMatrix

from kummerlag.core.errors import LatticeError
from kummerlag.core.lattice import (
    Lattice,
    LatticeVector,
    Sublattice,
    direct_sum,
    smith_quotient,
)
from kummerlag.core.linalg import column_basis, dot, inverse

logger = logging.getLogger(__name__)

POINTS = 16
EXTERIOR_SQUARE_RANK = 6

Word = Tuple[int, ...]


def affine_subspaces(dim: int) -> List[FrozenSet[int]]:
    """All affine subspaces of ``F_2^4`` of the given dimension, sorted."""
    if not 0 <= dim <= 4:
        raise LatticeError(f"Affine subspaces of F_2^4 have dimension 0..4, got {dim}")
    linear = set()
    for spanning in itertools.combinations(range(1, POINTS), dim):
        span = {0}
        for v in spanning:
            span |= {p ^ v for p in span}
        if len(span) == 2**dim:
            linear.add(frozenset(span))
    cosets = {frozenset(p ^ c for p in subspace) for subspace in linear for c in range(POINTS)}
    return sorted(cosets, key=lambda s: sorted(s))


def _gf2_row_reduce(words: List[Word]) -> Tuple[Tuple[Word, ...], Tuple[int, ...]]:
    """Reduced row echelon basis over GF(2) of the span of ``words``."""
    field_ = GF(2)
    rows = [[field_(a % 2) for a in word] for word in words if any(a % 2 for a in word)]
    if not rows:
        return (), ()
    rref, pivots = DomainMatrix(rows, (len(rows), POINTS), field_).rref()
    matrix = rref.to_Matrix()
    basis = tuple(
        tuple(int(a) % 2 for a in matrix.row(i)) for i in range(len(pivots))
    )
    return basis, tuple(pivots)


@dataclass(frozen=True)
class KummerModel:
    """The Kummer lattice together with its exceptional classes and binary code.

    Attributes:
        lattice: the Kummer lattice in its integral basis.
        basis: the basis vectors in half coordinates.
        exceptional: the classes ``e_p`` in lattice coordinates.
        code: GF(2) generator matrix, in reduced echelon form, of the quotient
            by the exceptional classes.
        pivots: pivot columns of ``code``; they give the code coordinates.
        plane_dim: dimension of the affine subspaces whose half-sums were added.

    """

    lattice: Lattice
    basis: Tuple[Word, ...] = field(repr=False)
    exceptional: Tuple[LatticeVector, ...] = field(repr=False)
    code: Tuple[Word, ...] = field(repr=False)
    pivots: Tuple[int, ...]
    plane_dim: int = 3

    @property
    def code_dimension(self) -> int:
        return len(self.pivots)

    def half_coordinates(self, v: LatticeVector) -> Word:
        """Coordinates ``y`` of ``v = sum_p y_p e_p / 2``; Picard model vectors are accepted."""
        coords = self._kummer_coords(v)
        return tuple(
            sum(c * b[p] for c, b in zip(coords, self.basis)) for p in range(POINTS)
        )

    def code_data(self) -> Dict[str, List[List[int]]]:
        """The basis in half coordinates and the code matrix as plain lists."""
        return {
            "basis": [list(b) for b in self.basis],
            "code": [list(w) for w in self.code],
        }

    def exceptional_sublattice(self) -> Sublattice:
        return Sublattice(self.exceptional, self.lattice)

    def exceptional_quotient(self) -> Tuple[int, ...]:
        """Invariant factors of the Kummer lattice over the exceptional classes."""
        factors = smith_quotient(self.exceptional_sublattice(), self.lattice)
        logger.info(
            "Quotient by the exceptional classes is %s (rank %d); "
            "the exterior square of (Z/2)^4 has rank %d",
            factors,
            len(factors),
            EXTERIOR_SQUARE_RANK,
        )
        return factors

    def picard_lattice(self, hS_square: int) -> Lattice:
        return picard_lattice(self.lattice, hS_square)

    def embed(self, v: LatticeVector, picard: Lattice) -> LatticeVector:
        """Image of a Kummer lattice vector in a Picard model."""
        return picard.vector((0,) + v.coords)

    def _kummer_coords(self, v: LatticeVector) -> Tuple[int, ...]:
        if v.lattice == self.lattice:
            return v.coords
        n = self.lattice.rank
        gram = v.lattice.gram
        if v.lattice.rank == n + 1 and all(
            gram[i + 1][1:] == self.lattice.gram[i] for i in range(n)
        ):
            return v.coords[1:]
        raise LatticeError("Vector lives neither in the Kummer lattice nor in a Picard model")

    def code_projection(self, v: LatticeVector) -> Word:
        """Image of ``v`` in the elementary 2-group of the quotient, ``h_S`` maps to 0."""
        y = self.half_coordinates(v)
        word = [a % 2 for a in y]
        coords = tuple(word[p] for p in self.pivots)
        recombined = [
            sum(a * row[p] for a, row in zip(coords, self.code)) % 2 for p in range(POINTS)
        ]
        if recombined != word:
            raise LatticeError(f"Half coordinates {y} do not reduce to a codeword")
        return coords


@functools.lru_cache(maxsize=None)
def picard_lattice(lattice: Lattice, hS_square: int) -> Lattice:
    """
    The Picard model ``Z h_S + lattice`` with ``(h_S, h_S) = hS_square``.

    ``h_S`` is coordinate 0 and is orthogonal to ``lattice``.
    """
    if hS_square <= 0 or hS_square % 2:
        raise LatticeError(f"h_S^2 must be a positive even integer, got {hS_square}")
    polarization = Lattice(gram=((hS_square,),), labels=("hS",), name="hS")
    return direct_sum(
        polarization,
        lattice,
        name=f"Pic({lattice.name or 'lattice'}), hS^2={hS_square}",
    )


@functools.lru_cache(maxsize=None)
def kummer_model(plane_dim: int = 3) -> KummerModel:
    """
    Build the Kummer lattice from the sixteen exceptional classes and half-sums.

    Half-sums are taken over the affine subspaces of ``F_2^4`` of dimension
    ``plane_dim``. Hyperplanes (``plane_dim=3``) give the Kummer lattice; other
    choices may not be integral, which raises :class:`LatticeError`.
    """
    subspaces = affine_subspaces(plane_dim)
    doubles = [tuple(2 * int(p == q) for q in range(POINTS)) for p in range(POINTS)]
    halves = [tuple(int(q in s) for q in range(POINTS)) for s in subspaces]
    basis = [tuple(row) for row in column_basis(doubles + halves, POINTS)]

    products = [[dot(u, v) for v in basis] for u in basis]
    if any(p % 2 for row in products for p in row):
        raise LatticeError(
            f"Half-sums over {plane_dim}-dimensional affine subspaces pair to non-integers",
        )
    gram = [[-(p // 2) for p in row] for row in products]
    lattice = Lattice(
        gram=gram,
        labels=tuple(f"v{i}" for i in range(1, POINTS + 1)),
        name="KummerPi" if plane_dim == 3 else f"Kummer({plane_dim}-subspaces)",
    )

    inv = inverse([[b[p] for b in basis] for p in range(POINTS)])
    exceptional = []
    for p in range(POINTS):
        coords = [2 * inv[i][p] for i in range(POINTS)]
        if any(c.denominator != 1 for c in coords):
            raise LatticeError(f"Exceptional class {p} is not in the lattice basis span")
        exceptional.append(lattice.vector([int(c) for c in coords]))

    code, pivots = _gf2_row_reduce(list(halves))
    model = KummerModel(
        lattice=lattice,
        basis=tuple(basis),
        exceptional=tuple(exceptional),
        code=code,
        pivots=pivots,
        plane_dim=plane_dim,
    )
    logger.debug(
        "Built %s: rank %d, determinant %d, code dimension %d",
        lattice.name,
        lattice.rank,
        lattice.determinant,
        model.code_dimension,
    )
    return model


def code_projection(v: LatticeVector, model: Optional[KummerModel] = None) -> Word:
    """Project a Kummer or Picard model vector to the binary code of the quotient."""
    return (model or kummer_model()).code_projection(v)
