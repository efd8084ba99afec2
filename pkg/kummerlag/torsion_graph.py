"""
Torsion graphs of multisection families.

A Jacobian elliptic fibration is described by its Picard lattice, the fiber
class ``f``, classes ``M_i`` of multisections and the classes of the singular
fiber components, which generate the kernel of the restriction to the generic
fiber. The difference of two multisections, normalized to degree zero, can
only be torsion on the generic fiber when it lies in the rational span of
that kernel.
"""

import itertools
import logging
from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from kummerlag.core.errors import ModelError
from kummerlag.core.kummer import KummerModel, kummer_model
from kummerlag.core.lattice import Lattice, LatticeVector, inner_product
from kummerlag.core.linalg import in_rational_span, rational_rank
from kummerlag.core.workers import parallel_map
from kummerlag.fibration import FibrationCertificate, nef_translate

logger = logging.getLogger(__name__)

CONNECTED = "connected"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class FibrationPicardModel:
    """Picard data of a Jacobian elliptic fibration.

    Attributes:
        ambient: the Picard lattice.
        multisections: classes ``M_i`` of positive fiber degree.
        fiber: the fiber class ``f``.
        kernel: classes of singular fiber components, ``f`` included.

    """

    ambient: Lattice
    multisections: Tuple[LatticeVector, ...]
    fiber: LatticeVector
    kernel: Tuple[LatticeVector, ...] = ()

    def __post_init__(self):
        """Check the shared ambient lattice, positive degrees and independence."""
        object.__setattr__(self, "multisections", tuple(self.multisections))
        object.__setattr__(self, "kernel", tuple(self.kernel))
        for v in self.multisections + self.kernel + (self.fiber,):
            if v.lattice != self.ambient:
                raise ModelError("Model classes must live in the ambient lattice")
        for i, d in enumerate(self.degrees):
            if d < 1:
                raise ModelError(f"Multisection {i} has fiber degree {d}, expected at least 1")
        rows = [m.coords for m in self.multisections]
        if rational_rank(rows, self.ambient.rank) != len(rows):
            raise ModelError("Multisection classes are linearly dependent over Q")

    @property
    def degrees(self) -> List[int]:
        return [inner_product(m, self.fiber) for m in self.multisections]

    @classmethod
    def from_json(cls, payload: Dict) -> "FibrationPicardModel":
        """Read ``{"ambient": lattice, "multisections": [...], "fiber": [...], "kernel": [...]}``."""
        try:
            ambient = Lattice.from_json(payload["ambient"])
            return cls(
                ambient=ambient,
                multisections=tuple(ambient.vector(v) for v in payload["multisections"]),
                fiber=ambient.vector(payload["fiber"]),
                kernel=tuple(ambient.vector(v) for v in payload.get("kernel", [])),
            )
        except KeyError as err:
            raise ModelError(f"Model JSON misses the {err} entry") from err

    def to_json(self) -> Dict:
        return {
            "ambient": self.ambient.to_json(),
            "multisections": [m.to_json() for m in self.multisections],
            "fiber": self.fiber.to_json(),
            "kernel": [k.to_json() for k in self.kernel],
        }


@dataclass(frozen=True)
class TorsionGraph:
    """Simple graph on multisection indices."""

    vertices: Tuple[int, ...]
    edges: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        """Store each edge once as a sorted pair and reject loops."""
        vertices = tuple(sorted(set(self.vertices)))
        edges = set()
        for i, j in self.edges:
            if i == j:
                raise ModelError(f"Loop at vertex {i}")
            if i not in vertices or j not in vertices:
                raise ModelError(f"Edge ({i}, {j}) leaves the vertex set")
            edges.add((min(i, j), max(i, j)))
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", tuple(sorted(edges)))

    def neighbours(self) -> Dict[int, List[int]]:
        adjacency: Dict[int, List[int]] = {v: [] for v in self.vertices}
        for i, j in self.edges:
            adjacency[i].append(j)
            adjacency[j].append(i)
        return adjacency

    def degrees(self) -> Dict[int, int]:
        return {v: len(n) for v, n in self.neighbours().items()}

    @property
    def min_degree(self) -> int:
        return min(self.degrees().values()) if self.vertices else 0

    def to_json(self) -> Dict:
        return {"vertices": list(self.vertices), "edges": [list(e) for e in self.edges]}


class DisjointSet:
    """Union-find with path halving and union by size."""

    def __init__(self, items: Sequence[int]):
        self.parent = {v: v for v in items}
        self.size = {v: 1 for v in items}

    def find(self, v: int) -> int:
        while self.parent[v] != v:
            self.parent[v] = self.parent[self.parent[v]]
            v = self.parent[v]
        return v

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True

    def count(self) -> int:
        return len({self.find(v) for v in self.parent})


def eta_kernel_rank(model: FibrationPicardModel) -> int:
    """Rank over Q of the span of the singular fiber components."""
    return rational_rank([k.coords for k in model.kernel], model.ambient.rank)


def torsion_possible(model: FibrationPicardModel, i: int, j: int) -> bool:
    """
    Whether the degree zero combination ``d_j M_i - d_i M_j`` can be torsion.

    That is the case exactly when the combination lies in the Q-span of the
    kernel classes.
    """
    n = len(model.multisections)
    for index in (i, j):
        if not 0 <= index < n:
            raise ModelError(f"Multisection index {index} out of range 0..{n - 1}")
    if i == j:
        raise ModelError(f"Torsion test needs two distinct multisections, got {i} twice")
    d = model.degrees
    mi, mj = model.multisections[i], model.multisections[j]
    combination = [d[j] * a - d[i] * b for a, b in zip(mi.coords, mj.coords)]
    return in_rational_span(combination, [k.coords for k in model.kernel])


def _edges_from(model: FibrationPicardModel, i: int) -> List[Tuple[int, int]]:
    n = len(model.multisections)
    return [(i, j) for j in range(i + 1, n) if not torsion_possible(model, i, j)]


def torsion_graph(model: FibrationPicardModel, threads: int = 1) -> TorsionGraph:
    """Join ``i`` and ``j`` unless their difference can be torsion."""
    n = len(model.multisections)
    rows = parallel_map(_edges_from, [(model, i) for i in range(n)], threads=threads)
    graph = TorsionGraph(tuple(range(n)), tuple(itertools.chain.from_iterable(rows)))
    logger.debug("Torsion graph on %d vertices with %d edges", n, len(graph.edges))
    return graph


def _check_nonempty(g: TorsionGraph) -> None:
    if not g.vertices:
        raise ModelError("The graph has no vertices")


def is_connected(g: TorsionGraph) -> bool:
    _check_nonempty(g)
    components = DisjointSet(g.vertices)
    for i, j in g.edges:
        components.union(i, j)
    return components.count() == 1


def _eccentricity(adjacency: Dict[int, List[int]], start: int) -> Tuple[int, int]:
    distance = {start: 0}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for w in adjacency[v]:
            if w not in distance:
                distance[w] = distance[v] + 1
                queue.append(w)
    return max(distance.values()), len(distance)


def diameter(g: TorsionGraph) -> Optional[int]:
    """Exact diameter by breadth-first search, ``None`` for a disconnected graph."""
    _check_nonempty(g)
    adjacency = g.neighbours()
    longest = 0
    for v in g.vertices:
        eccentricity, reached = _eccentricity(adjacency, v)
        if reached != len(g.vertices):
            return None
        longest = max(longest, eccentricity)
    return longest


def diameter_at_most(g: TorsionGraph, k: int) -> bool:
    value = diameter(g)
    return value is not None and value <= k


def preimage_graph_verdict(
    torsion_connected: bool,
    components_irreducible: bool,
    threshold_assumed: bool,
) -> str:
    """
    Connectivity of the intersection graph of the preimage components.

    It follows only when the torsion graph is connected, every preimage is
    irreducible and the threshold beyond which preimages of distinct
    multisections meet is granted; otherwise nothing can be said.
    """
    if torsion_connected and components_irreducible and threshold_assumed:
        return CONNECTED
    return UNKNOWN


def kummer_torsion_model(
    cert: FibrationCertificate,
    model: Optional[KummerModel] = None,
) -> FibrationPicardModel:
    """
    The sixteen exceptional classes as multisections of a Kummer fibration.

    The fiber class is the translate of ``e`` by reflections in the exceptional
    classes that makes every fiber degree positive, and it spans the kernel.
    """
    model = model or kummer_model()
    picard = cert.picard
    exceptional = tuple(model.embed(v, picard) for v in model.exceptional)
    fiber = nef_translate(cert.e, exceptional)
    return FibrationPicardModel(
        ambient=picard,
        multisections=exceptional,
        fiber=fiber,
        kernel=(fiber,),
    )
