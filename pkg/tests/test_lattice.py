"""Test even lattices, vectors and sublattices."""

import random

import pytest

from kummerlag.core.errors import LatticeError
from kummerlag.core.lattice import (
    Lattice,
    Sublattice,
    direct_sum,
    inner_product,
    is_primitive,
    make_standard,
    orthogonal_complement,
    reflect,
    smith_quotient,
)
from kummerlag.core.linalg import determinant


@pytest.fixture
def e8():
    """Negative E8 in the simple root basis."""
    yield make_standard("E8neg")


@pytest.mark.parametrize(
    "name, rank, det",
    [
        ("H", 2, -1),
        ("E8neg", 8, 1),
        ("A2neg", 2, 3),
        ("MinusTwoId(5)", 5, -32),
        ("K3", 22, -1),
    ],
)
def test_standard_lattices(name, rank, det):
    """Standard lattices must have the expected rank and determinant."""
    lattice = make_standard(name)
    assert lattice.rank == rank
    assert lattice.determinant == det


def test_minus_two_identity_with_k():
    """Both spellings of MinusTwoId give the same lattice."""
    assert make_standard("MinusTwoId", 16) == make_standard("MinusTwoId(16)")
    assert make_standard("MinusTwoId(16)").determinant == 2**16


@pytest.mark.parametrize("name", ["MinusTwoId(0)", "MinusTwoId", "D4", ""])
def test_unknown_or_bad_standard_lattice(name):
    """Bad names and ranks raise LatticeError."""
    with pytest.raises(LatticeError):
        make_standard(name)


def test_lattice_must_be_even():
    """An odd diagonal entry is rejected."""
    with pytest.raises(LatticeError, match="not even"):
        Lattice(gram=((-1, 0), (0, -2)))


def test_lattice_must_be_symmetric():
    """A non symmetric Gram matrix is rejected."""
    with pytest.raises(LatticeError, match="symmetric"):
        Lattice(gram=((-2, 1), (0, -2)))


def test_singular_lattice_needs_flag():
    """Singular Gram matrices are only kept when flagged degenerate."""
    gram = ((-2, 2), (2, -2))
    with pytest.raises(LatticeError, match="singular"):
        Lattice(gram=gram)
    assert Lattice(gram=gram, degenerate=True).determinant == 0


def test_negative_definite(e8):
    """E8neg is negative definite, the hyperbolic plane is not."""
    assert e8.is_negative_definite
    assert not make_standard("H").is_negative_definite


def test_vectors_from_different_lattices(e8):
    """Mixing lattices in arithmetic raises."""
    h = make_standard("H")
    with pytest.raises(LatticeError, match="different lattices"):
        e8.basis_vector(0) + h.basis_vector(0)
    with pytest.raises(LatticeError, match="coordinates"):
        e8.vector((1, 0))


def test_inner_product_is_the_gram(e8):
    """Inner products of basis vectors read the Gram entries."""
    for i in range(8):
        for j in range(8):
            assert inner_product(e8.basis_vector(i), e8.basis_vector(j)) == e8.gram[i][j]


def test_reflection_is_an_involution(e8):
    """Reflecting twice in a root gives the vector back and preserves the norm."""
    root = e8.basis_vector(3)
    v = e8.vector((1, 2, 0, -1, 3, 0, 0, 1))
    w = reflect(v, root)
    assert w.norm == v.norm
    assert reflect(w, root) == v
    assert reflect(root, root) == -root


def test_reflection_is_an_isometry(e8):
    """Reflecting two vectors in the same root keeps their product."""
    rng = random.Random(8)
    roots = [e8.basis_vector(i) for i in range(8)]
    for _ in range(50):
        u = e8.vector([rng.randint(-3, 3) for _ in range(8)])
        v = e8.vector([rng.randint(-3, 3) for _ in range(8)])
        root = rng.choice(roots)
        assert inner_product(reflect(u, root), reflect(v, root)) == inner_product(u, v)


def test_reflect_needs_a_root(e8):
    """Only norm -2 vectors define reflections."""
    with pytest.raises(LatticeError, match="norm -2"):
        reflect(e8.basis_vector(0), 2 * e8.basis_vector(1))


def test_is_primitive():
    """Primitivity is the gcd of the coordinates."""
    lattice = make_standard("MinusTwoId(3)")
    assert is_primitive(lattice.vector((2, 3, 0)))
    assert not is_primitive(lattice.vector((2, 4, 0)))
    with pytest.raises(LatticeError):
        is_primitive(lattice.zero())


def test_orthogonal_complement(e8):
    """The complement has corank one, is orthogonal to v and is saturated."""
    v = e8.vector((1, 1, 0, 0, 0, 0, 0, 0))
    complement = orthogonal_complement(e8, v)
    assert complement.rank == 7
    assert all(inner_product(n, v) == 0 for n in complement.generators)
    assert complement.is_saturated


def test_complement_of_a_skewed_vector():
    """The kernel stays correct when the first pairing vanishes."""
    lattice = make_standard("H")
    v = lattice.vector((1, 0))
    complement = orthogonal_complement(lattice, v)
    assert [n.coords for n in complement.generators] == [(1, 0)]


def test_smith_quotient():
    """Doubling a basis gives a quotient (Z/2)^k; unit factors are dropped."""
    lattice = make_standard("MinusTwoId(3)")
    doubled = Sublattice(tuple(2 * lattice.basis_vector(i) for i in range(3)), lattice)
    assert smith_quotient(doubled, lattice) == (2, 2, 2)
    mixed = Sublattice(
        (lattice.vector((1, 1, 0)), lattice.vector((0, 2, 0)), lattice.vector((0, 0, 3))),
        lattice,
    )
    assert smith_quotient(mixed, lattice) == (6,)


def test_smith_quotient_ignores_generator_choice():
    """Permuting generators or adding multiples of one to another keeps the quotient."""
    rng = random.Random(5)
    lattice = make_standard("MinusTwoId(3)")
    for _ in range(30):
        rows = [[rng.randint(-4, 4) for _ in range(3)] for _ in range(3)]
        if determinant(rows) == 0:
            continue
        generators = [lattice.vector(r) for r in rows]
        expected = smith_quotient(Sublattice(tuple(generators), lattice), lattice)
        shuffled = generators[:]
        rng.shuffle(shuffled)
        assert smith_quotient(Sublattice(tuple(shuffled), lattice), lattice) == expected
        recombined = generators[:]
        recombined[0] = recombined[0] + rng.randint(-3, 3) * recombined[1]
        recombined[2] = recombined[2] - rng.randint(-3, 3) * recombined[0]
        assert smith_quotient(Sublattice(tuple(recombined), lattice), lattice) == expected


def test_smith_quotient_infinite_index():
    """A sublattice of smaller rank has infinite index."""
    lattice = make_standard("MinusTwoId(3)")
    sub = Sublattice((lattice.basis_vector(0),), lattice)
    with pytest.raises(LatticeError, match="infinite index"):
        smith_quotient(sub, lattice)
    assert sub.is_saturated
    assert Sublattice((2 * lattice.basis_vector(0),), lattice).saturation_factors() == (2,)


def test_direct_sum_is_block_diagonal():
    """Direct sums concatenate labels and multiply determinants."""
    lattice = direct_sum(make_standard("H"), make_standard("A2neg"), name="HA2")
    assert lattice.rank == 4
    assert lattice.determinant == -3
    assert lattice.labels == ("u", "w", "e1", "s")
    assert lattice.gram[0][2] == 0


def test_json(e8):
    """Lattices survive their JSON form, rank mismatches are caught."""
    assert Lattice.from_json(e8.to_json()) == e8
    payload = dict(e8.to_json(), rank=7)
    with pytest.raises(LatticeError, match="rank"):
        Lattice.from_json(payload)


@pytest.mark.parametrize(
    "payload",
    [
        {"gram": 5},
        {"gram": [[-2, "1"], [1, -2]]},
        {"gram": [-2, 0]},
        {"gram": [[-2]], "labels": 3},
        [[-2]],
        {"rank": 1},
    ],
)
def test_json_wrong_shape(payload):
    """JSON that parses but is not a Gram matrix is a LatticeError."""
    with pytest.raises(LatticeError):
        Lattice.from_json(payload)


def test_small_examples():
    """Hand checked products, primitivity and complements."""
    h = make_standard("H")
    assert inner_product(h.vector((1, 0)), h.vector((0, 1))) == 1
    assert inner_product(h.zero(), h.vector((3, 5))) == 0
    m2 = make_standard("MinusTwoId(2)")
    assert inner_product(m2.vector((1, 1)), m2.vector((1, -1))) == 0
    assert is_primitive(make_standard("MinusTwoId(3)").vector((6, 10, 15)))
    assert [n.coords for n in orthogonal_complement(m2, m2.vector((1, 0))).generators] == [(0, 1)]
    assert [n.coords for n in orthogonal_complement(m2, m2.vector((1, 1))).generators] == [(1, -1)]


def test_trivial_quotient():
    """A lattice over itself has no invariant factors."""
    lattice = make_standard("A2neg")
    sub = Sublattice((lattice.basis_vector(0), lattice.basis_vector(1)), lattice)
    assert smith_quotient(sub, lattice) == ()
