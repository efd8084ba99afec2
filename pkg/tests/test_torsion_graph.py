"""Test torsion graphs of multisection families."""

import random

import pytest

from kummerlag.core.errors import ModelError
from kummerlag.core.lattice import direct_sum, make_standard
from kummerlag.core.linalg import rational_rank
from kummerlag.fibration import run_search
from kummerlag.torsion_graph import (
    DisjointSet,
    FibrationPicardModel,
    TorsionGraph,
    diameter,
    diameter_at_most,
    eta_kernel_rank,
    is_connected,
    kummer_torsion_model,
    preimage_graph_verdict,
    torsion_graph,
    torsion_possible,
)


@pytest.fixture
def ambient():
    """H + MinusTwoId(2) with basis u, w, e1, e2; the fiber is u."""
    yield direct_sum(make_standard("H"), make_standard("MinusTwoId(2)"), name="H+A1^2")


@pytest.fixture
def path_model(ambient):
    """Three sections: w, w + e1 and w + u."""
    yield FibrationPicardModel(
        ambient=ambient,
        multisections=(
            ambient.vector((0, 1, 0, 0)),
            ambient.vector((0, 1, 1, 0)),
            ambient.vector((1, 1, 0, 0)),
        ),
        fiber=ambient.vector((1, 0, 0, 0)),
        kernel=(ambient.vector((1, 0, 0, 0)),),
    )


def test_degrees(path_model):
    """Fiber degrees pair each multisection with f."""
    assert path_model.degrees == [1, 1, 1]
    assert eta_kernel_rank(path_model) == 1


def test_torsion_possible(path_model):
    """Differences in the kernel span can be torsion, others cannot."""
    assert torsion_possible(path_model, 0, 2)
    assert not torsion_possible(path_model, 0, 1)
    assert not torsion_possible(path_model, 1, 2)
    assert torsion_possible(path_model, 2, 0) == torsion_possible(path_model, 0, 2)


@pytest.mark.parametrize("i, j", [(0, 0), (0, 3), (-1, 1)])
def test_torsion_possible_indices(path_model, i, j):
    """Indices must be distinct and in range."""
    with pytest.raises(ModelError):
        torsion_possible(path_model, i, j)


def test_path_graph(path_model):
    """The model gives the path 0 - 1 - 2."""
    graph = torsion_graph(path_model)
    assert graph.edges == ((0, 1), (1, 2))
    assert is_connected(graph)
    assert diameter(graph) == 2
    assert diameter_at_most(graph, 2)
    assert not diameter_at_most(graph, 1)
    assert graph.min_degree == 1


def test_model_validation(ambient):
    """Degree zero, dependent classes and foreign lattices are rejected."""
    f = ambient.vector((1, 0, 0, 0))
    with pytest.raises(ModelError, match="fiber degree"):
        FibrationPicardModel(ambient, (ambient.vector((0, 0, 1, 0)),), f)
    with pytest.raises(ModelError, match="dependent"):
        FibrationPicardModel(
            ambient,
            (ambient.vector((0, 1, 1, 0)), ambient.vector((0, 2, 2, 0))),
            f,
        )
    other = make_standard("MinusTwoId(4)")
    with pytest.raises(ModelError, match="ambient"):
        FibrationPicardModel(ambient, (other.vector((1, 0, 0, 0)),), f)


def test_model_json(path_model):
    """Models read their JSON form back."""
    assert FibrationPicardModel.from_json(path_model.to_json()) == path_model
    with pytest.raises(ModelError, match="misses"):
        FibrationPicardModel.from_json({"multisections": []})


def test_graph_helpers():
    """Loops are rejected, edges are normalized, disconnected graphs have no diameter."""
    with pytest.raises(ModelError, match="Loop"):
        TorsionGraph((0, 1), ((1, 1),))
    with pytest.raises(ModelError, match="vertex set"):
        TorsionGraph((0, 1), ((0, 2),))
    graph = TorsionGraph((0, 1, 2, 3), ((1, 0), (0, 1), (2, 3)))
    assert graph.edges == ((0, 1), (2, 3))
    assert not is_connected(graph)
    assert diameter(graph) is None
    assert not diameter_at_most(graph, 10)
    with pytest.raises(ModelError):
        is_connected(TorsionGraph((), ()))


def test_single_vertex():
    """One vertex is connected with diameter 0."""
    graph = TorsionGraph((0,), ())
    assert is_connected(graph)
    assert diameter(graph) == 0
    assert graph.min_degree == 0


def test_disjoint_set():
    """Union-find counts components."""
    components = DisjointSet(range(5))
    assert components.union(0, 1)
    assert components.union(3, 4)
    assert not components.union(1, 0)
    assert components.count() == 3
    assert components.find(0) == components.find(1)


def test_preimage_graph_verdict():
    """Connectivity follows only when all three hypotheses hold."""
    assert preimage_graph_verdict(True, True, True) == "connected"
    assert preimage_graph_verdict(True, True, False) == "unknown"
    assert preimage_graph_verdict(False, True, True) == "unknown"
    assert preimage_graph_verdict(True, False, True) == "unknown"


def _random_model(rng, ambient):
    """Multisections of H + MinusTwoId(4) with f = u and kernel spanned by u and e1."""
    while True:
        count = rng.randint(2, 5)
        rows = [
            (rng.randint(-2, 2), rng.randint(1, 3)) + tuple(rng.randint(-1, 1) for _ in range(4))
            for _ in range(count)
        ]
        if rational_rank(rows, 6) == count:
            break
    u, e1 = ambient.basis_vector(0), ambient.basis_vector(2)
    return FibrationPicardModel(
        ambient=ambient,
        multisections=tuple(ambient.vector(r) for r in rows),
        fiber=u,
        kernel=(u, e1),
    )


def test_random_models_match_the_span_test():
    """An edge is absent exactly when the normalized difference lives on u and e1."""
    rng = random.Random(1729)
    ambient = direct_sum(make_standard("H"), make_standard("MinusTwoId(4)"))
    for _ in range(100):
        model = _random_model(rng, ambient)
        d = model.degrees
        graph = torsion_graph(model)
        n = len(model.multisections)
        expected = set()
        for i in range(n):
            for j in range(i + 1, n):
                mi, mj = model.multisections[i].coords, model.multisections[j].coords
                diff = [d[j] * a - d[i] * b for a, b in zip(mi, mj)]
                assert diff[1] == 0
                if any(diff[3:]):
                    expected.add((i, j))
        assert set(graph.edges) == expected
        assert is_connected(graph) == (diameter(graph) is not None)


@pytest.mark.slow
def test_kummer_torsion_graph_is_complete():
    """The sixteen exceptional classes give the complete graph K16."""
    model = kummer_torsion_model(run_search(2))
    assert all(d >= 1 for d in model.degrees)
    graph = torsion_graph(model)
    assert len(graph.edges) == 120
    assert graph.min_degree == 15
    assert is_connected(graph)
    assert diameter(graph) == 1


def test_kernel_ranks(ambient):
    """Dependent kernel classes count once; no kernel has rank 0."""
    f = ambient.vector((1, 0, 0, 0))
    sections = (ambient.vector((0, 1, 0, 0)),)
    assert eta_kernel_rank(FibrationPicardModel(ambient, sections, f, ())) == 0
    assert eta_kernel_rank(FibrationPicardModel(ambient, sections, f, (f, 2 * f))) == 1


def test_torsion_relation_gives_no_edge(ambient):
    """Two sections differing by the fiber are not joined."""
    f = ambient.vector((1, 0, 0, 0))
    m1 = ambient.vector((0, 1, 1, 0))
    model = FibrationPicardModel(ambient, (m1, m1 + f), f, (f,))
    assert torsion_graph(model).edges == ()


def _three_sections(rng, ambient):
    """Three independent multisections of H + MinusTwoId(4), the second often M1 + k u."""
    u = ambient.basis_vector(0)
    while True:
        rows = [
            (rng.randint(-2, 2), rng.randint(1, 3)) + tuple(rng.randint(-1, 1) for _ in range(4))
            for _ in range(3)
        ]
        sections = [ambient.vector(r) for r in rows]
        if rng.random() < 0.5:
            sections[1] = sections[0] + rng.randint(1, 3) * u
        if rational_rank([s.coords for s in sections], 6) == 3:
            return tuple(sections)


def test_rank_one_kernel_allows_one_torsion_pair():
    """With a rank one kernel at most one of the three pairs can be torsion."""
    rng = random.Random(2024)
    ambient = direct_sum(make_standard("H"), make_standard("MinusTwoId(4)"))
    u = ambient.basis_vector(0)
    seen_torsion = 0
    for _ in range(100):
        model = FibrationPicardModel(
            ambient=ambient,
            multisections=_three_sections(rng, ambient),
            fiber=u,
            kernel=(u,),
        )
        assert eta_kernel_rank(model) == 1
        pairs = [torsion_possible(model, i, j) for i, j in ((0, 1), (0, 2), (1, 2))]
        assert sum(pairs) <= 1
        seen_torsion += sum(pairs)
        graph = torsion_graph(model)
        assert len(graph.edges) >= 2
        assert is_connected(graph)
    assert seen_torsion > 0


def test_torsion_possible_symmetric_and_scale_invariant():
    """Swapping the pair or scaling a multisection keeps the answer."""
    rng = random.Random(99)
    ambient = direct_sum(make_standard("H"), make_standard("MinusTwoId(4)"))
    for _ in range(50):
        model = _random_model(rng, ambient)
        n = len(model.multisections)
        k = rng.randrange(n)
        scaled = FibrationPicardModel(
            ambient=ambient,
            multisections=tuple(
                (2 if i == k else 1) * m for i, m in enumerate(model.multisections)
            ),
            fiber=model.fiber,
            kernel=model.kernel,
        )
        for i in range(n):
            for j in range(i + 1, n):
                answer = torsion_possible(model, i, j)
                assert torsion_possible(model, j, i) == answer
                assert torsion_possible(scaled, i, j) == answer


def _closure(n, edges):
    reach = [[i == j for j in range(n)] for i in range(n)]
    for i, j in edges:
        reach[i][j] = reach[j][i] = True
    for k in range(n):
        for i in range(n):
            if reach[i][k]:
                for j in range(n):
                    reach[i][j] = reach[i][j] or reach[k][j]
    return reach


def test_connectivity_matches_transitive_closure():
    """Union-find agrees with the transitive closure of the edge relation."""
    rng = random.Random(31)
    for _ in range(200):
        n = rng.randint(1, 20)
        p = rng.choice([0.05, 0.1, 0.2, 0.4])
        edges = tuple(
            (i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p
        )
        graph = TorsionGraph(tuple(range(n)), edges)
        reach = _closure(n, edges)
        assert is_connected(graph) == all(reach[0])
        assert (diameter(graph) is not None) == all(reach[0])
