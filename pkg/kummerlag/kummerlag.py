"""Pythonic way to search Jacobian fibrations on Kummer lattices."""

import functools
from typing import List, Optional, Sequence, Tuple, Union

import pandas as pd

from kummerlag.core.enumeration import enumerate_norm_vectors
from kummerlag.core.errors import LatticeError
from kummerlag.core.kummer import kummer_model
from kummerlag.core.lattice import Lattice, LatticeVector, Sublattice, make_standard, smith_quotient
from kummerlag.core.workers import resolve_threads
from kummerlag.fibration import DEFAULT_BOUND, FibrationCertificate, run_search
from kummerlag.torsion_graph import (
    FibrationPicardModel,
    TorsionGraph,
    kummer_torsion_model,
    torsion_graph,
)

__all__ = [
    "Kummer",
]

LatticeLike = Union[str, Lattice]


class Kummer:
    """Creates a fibration search for a negative definite lattice.

    Args:
        lattice: a :class:`Lattice` or the name of a standard one.
        bound: coefficient bound of the root avoiding search.
        threads: number of workers, ``KLL_THREADS`` overrides it.

    Attributes:
        lattice: the resolved lattice.
        bound: coefficient bound.
        threads: resolved number of workers.

    Examples:
        The Kummer lattice has 32 roots

        >>> k = Kummer()
        >>> len(k.get_roots())
        32

        any standard lattice name works

        >>> Kummer("E8neg").get_roots()[0].norm
        -2

    """

    def __init__(
        self,
        lattice: LatticeLike = "KummerPi",
        bound: int = DEFAULT_BOUND,
        threads: Optional[int] = None,
    ):
        """
        Instantiate main class attributes.

        Attributes:
          lattice: lattice or standard lattice name.
          bound: coefficient bound of the search.
          threads: number of workers.
        """
        self.lattice = make_standard(lattice) if isinstance(lattice, str) else lattice
        self.bound = bound
        self.threads = resolve_threads(threads)

    def __repr__(self):
        return f"Kummer(lattice={self.lattice.name or 'lattice'!r}, bound={self.bound})"

    @property
    def is_kummer(self) -> bool:
        return self.lattice == kummer_model().lattice

    @functools.lru_cache(maxsize=None)
    def get_roots(self) -> List[LatticeVector]:
        """All roots of the lattice, sorted."""
        return enumerate_norm_vectors(self.lattice, -2, threads=self.threads)

    def get_quotient(self, generators: Optional[Sequence[Sequence[int]]] = None) -> Tuple[int, ...]:
        """
        Invariant factors of the lattice over the sublattice spanned by ``generators``.

        On the Kummer lattice the generators default to the exceptional classes.
        """
        if generators is None:
            if not self.is_kummer:
                raise LatticeError("Sublattice generators are required outside the Kummer lattice")
            sub = kummer_model().exceptional_sublattice()
        else:
            sub = Sublattice(tuple(self.lattice.vector(g) for g in generators), self.lattice)
        return smith_quotient(sub, self.lattice)

    @functools.lru_cache(maxsize=None)
    def get_certificate(self) -> FibrationCertificate:
        """Search, build and verify a fibration certificate."""
        return run_search(self.bound, lattice=self.lattice, threads=self.threads)

    def get_torsion_model(self) -> FibrationPicardModel:
        """The exceptional classes as multisections of the certified fibration."""
        if not self.is_kummer:
            raise LatticeError("Torsion models are built on the Kummer lattice only")
        return kummer_torsion_model(self.get_certificate())

    def get_torsion_graph(self) -> TorsionGraph:
        return torsion_graph(self.get_torsion_model(), threads=self.threads)

    def to_pandas(self, **kw) -> pd.DataFrame:
        """Roots as a table, one column per basis label.

        Keyword arguments are passed to :class:`pandas.DataFrame`.
        """
        rows = [r.coords for r in self.get_roots()]
        return pd.DataFrame(rows, columns=list(self.lattice.labels), **kw)
