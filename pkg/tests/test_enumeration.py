"""Test enumeration of vectors of a fixed norm."""

import itertools

import pytest

from kummerlag.core.enumeration import brute_force_norm_vectors, enumerate_norm_vectors
from kummerlag.core.errors import LatticeError
from kummerlag.core.lattice import Lattice, make_standard

# Simple roots of E8 in Euclidean coordinates, doubled to keep them integral.
SIMPLE_ROOTS_DOUBLED = [
    (1, -1, -1, -1, -1, -1, -1, 1),
    (2, 2, 0, 0, 0, 0, 0, 0),
    (-2, 2, 0, 0, 0, 0, 0, 0),
    (0, -2, 2, 0, 0, 0, 0, 0),
    (0, 0, -2, 2, 0, 0, 0, 0),
    (0, 0, 0, -2, 2, 0, 0, 0),
    (0, 0, 0, 0, -2, 2, 0, 0),
    (0, 0, 0, 0, 0, -2, 2, 0),
]


def euclidean_e8_roots():
    """The 240 roots of E8 in doubled coordinates: D8 roots and half-integer vectors."""
    roots = set()
    for i, j in itertools.combinations(range(8), 2):
        for si, sj in itertools.product((2, -2), repeat=2):
            v = [0] * 8
            v[i], v[j] = si, sj
            roots.add(tuple(v))
    for signs in itertools.product((1, -1), repeat=8):
        if signs.count(-1) % 2 == 0:
            roots.add(signs)
    return roots


def test_simple_roots_match_the_gram():
    """The doubled simple roots reproduce the negated Gram matrix up to a factor 4."""
    e8 = make_standard("E8neg")
    for i in range(8):
        for j in range(8):
            product = sum(a * b for a, b in zip(SIMPLE_ROOTS_DOUBLED[i], SIMPLE_ROOTS_DOUBLED[j]))
            assert product == -4 * e8.gram[i][j]


def test_e8_has_240_roots():
    """E8neg roots map bijectively onto the Euclidean root system."""
    roots = enumerate_norm_vectors(make_standard("E8neg"), -2)
    assert len(roots) == 240
    images = {
        tuple(sum(c * alpha[k] for c, alpha in zip(r.coords, SIMPLE_ROOTS_DOUBLED)) for k in range(8))
        for r in roots
    }
    assert images == euclidean_e8_roots()


def test_roots_are_sorted_and_closed_under_negation():
    """Enumeration is sorted and symmetric."""
    roots = enumerate_norm_vectors(make_standard("E8neg"), -2)
    coords = [r.coords for r in roots]
    assert coords == sorted(coords)
    assert {tuple(-a for a in c) for c in coords} == set(coords)


@pytest.mark.parametrize(
    "name, t, count",
    [
        ("A2neg", -2, 6),
        ("MinusTwoId(4)", -2, 8),
        ("MinusTwoId(3)", -4, 12),
        ("A2neg", -6, 6),
    ],
)
def test_enumeration_matches_brute_force(name, t, count):
    """Fincke-Pohst and the coordinate box agree on small lattices."""
    lattice = make_standard(name)
    fast = enumerate_norm_vectors(lattice, t)
    assert fast == brute_force_norm_vectors(lattice, t)
    assert len(fast) == count


def test_odd_norm_is_empty():
    """Even lattices have no vectors of odd norm."""
    assert enumerate_norm_vectors(make_standard("E8neg"), -3) == []


def test_skewed_basis():
    """A badly skewed basis of negative A2 still gives six roots."""
    lattice = Lattice(gram=((-2, -21), (-21, -222)), name="skewed")
    assert len(enumerate_norm_vectors(lattice, -2)) == 6
    assert enumerate_norm_vectors(lattice, -2) == brute_force_norm_vectors(lattice, -2)


@pytest.mark.parametrize("name, t", [("H", -2), ("E8neg", 0), ("E8neg", 2)])
def test_enumeration_refuses(name, t):
    """Indefinite lattices and nonnegative norms are rejected."""
    with pytest.raises(LatticeError):
        enumerate_norm_vectors(make_standard(name), t)


@pytest.mark.serial
def test_threads_do_not_change_the_result():
    """Splitting the top coordinate across workers gives the same sorted list."""
    pytest.importorskip("joblib")
    lattice = make_standard("E8neg")
    assert enumerate_norm_vectors(lattice, -2, threads=3) == enumerate_norm_vectors(lattice, -2)


def test_minus_two_identity_roots():
    """MinusTwoId(16) has exactly the 32 roots plus and minus e_i."""
    lattice = make_standard("MinusTwoId(16)")
    roots = enumerate_norm_vectors(lattice, -2)
    assert len(roots) == 32
    assert all(sum(abs(c) for c in r.coords) == 1 for r in roots)
