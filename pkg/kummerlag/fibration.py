"""
Jacobian elliptic fibrations from root avoiding vectors.

Given a negative definite lattice ``L`` (the Kummer lattice in practice), a
primitive ``x`` in ``L`` defines the Picard model ``Z h_S + L`` with
``h_S^2 = -x^2`` and the isotropic class ``e = h_S - x``. When ``x`` is
orthogonal to no root, the lattice ``N_x`` orthogonal to ``x`` is root free
and the fibration has irreducible singular fibers; a class ``l`` with
``l^2 = -2`` and ``(l, e) = 1`` is a section.
"""

import dataclasses
import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union

try:
    from sympy.core.intfunc import igcdex
except ImportError:  # sympy < 1.13
    from sympy.core.numbers import igcdex

from kummerlag.core.enumeration import enumerate_norm_vectors
from kummerlag.core.errors import CertificateError, LatticeError, SearchExhausted
from kummerlag.core.kummer import KummerModel, kummer_model, picard_lattice
from kummerlag.core.lattice import (
    Lattice,
    LatticeVector,
    inner_product,
    is_primitive,
    make_standard,
    orthogonal_complement,
    reflect,
)
from kummerlag.core.workers import parallel_map

logger = logging.getLogger(__name__)

DEFAULT_BOUND = 2
BLOCK_SIZE = 2048


@dataclass(frozen=True)
class FibrationCertificate:
    """Certificate of a Jacobian elliptic fibration with irreducible singular fibers.

    Attributes:
        x: the root avoiding vector of the lattice.
        hS_square: ``-x^2``, the square of the polarization class.
        e: the isotropic class ``h_S - x`` in the Picard model.
        section_class: ``l`` with ``l^2 = -2`` and ``(l, e) = 1``.
        root_check: whether ``N_x`` was found to be root free.
        code_class: image of ``e`` in the binary code of the Kummer quotient,
            empty when the lattice carries no code.

    """

    x: LatticeVector
    hS_square: int
    e: LatticeVector
    section_class: Optional[LatticeVector] = None
    root_check: Optional[bool] = None
    code_class: Tuple[int, ...] = ()
    lattice: Lattice = field(default=None, repr=False)

    def __post_init__(self):
        """Default the lattice to the one carrying ``x``."""
        if self.lattice is None:
            object.__setattr__(self, "lattice", self.x.lattice)

    @property
    def picard(self) -> Lattice:
        return self.e.lattice

    def to_json(self) -> Dict:
        return {
            "lattice": self.lattice.name,
            "x": self.x.to_json(),
            "hS_square": self.hS_square,
            "e": self.e.to_json(),
            "l": self.section_class.to_json() if self.section_class else None,
            "root_check": self.root_check,
            "code_class": list(self.code_class),
        }


@dataclass(frozen=True)
class _RootAvoidance:
    """Admissibility test of a candidate ``x``, picklable for worker pools."""

    lattice: Lattice
    root_rows: Tuple[Tuple[int, ...], ...]
    accept: Optional[Callable[[LatticeVector], bool]] = None

    def __call__(self, coords: Tuple[int, ...]) -> bool:
        if math.gcd(*coords) != 1:
            return False
        for row in self.root_rows:
            if sum(a * b for a, b in zip(coords, row)) == 0:
                return False
        x = self.lattice.vector(coords)
        if self.accept is not None and not self.accept(x):
            return False
        return _complement_root_free(x)


def _complement_root_free(x: LatticeVector) -> bool:
    if x.lattice.rank == 1:
        return True
    complement = orthogonal_complement(x.lattice, x).as_lattice(name="N_x")
    return not enumerate_norm_vectors(complement, -2)


def _candidates(rank: int, bound: int) -> Iterator[Tuple[int, ...]]:
    """
    Box vectors up to sign, shell by shell.

    Shells of increasing max-norm are visited in turn, each in decreasing
    lexicographic order, and only vectors whose first nonzero coordinate is
    positive are produced. The order inside the box does not depend on the
    bound.
    """
    for k in range(1, bound + 1):
        for coords in itertools.product(range(k, -k - 1, -1), repeat=rank):
            if max(abs(c) for c in coords) != k:
                continue
            if next(c for c in coords if c) < 0:
                continue
            yield coords


def _first_admissible(
    block: Sequence[Tuple[int, ...]],
    checker: _RootAvoidance,
) -> Optional[Tuple[int, ...]]:
    for coords in block:
        if checker(coords):
            return coords
    return None


def find_root_avoiding_vector(
    lattice: Lattice,
    coeff_bound: int = DEFAULT_BOUND,
    roots: Optional[Sequence[LatticeVector]] = None,
    accept: Optional[Callable[[LatticeVector], bool]] = None,
    threads: int = 1,
) -> LatticeVector:
    """
    First primitive ``x`` in the coefficient box pairing nontrivially with every root.

    Candidates are taken up to sign in the order of :func:`_candidates`; the
    orthogonal complement of the hit is checked to be root free by
    enumeration. ``accept`` is an extra predicate on candidates. With several
    threads, consecutive blocks of candidates are checked concurrently and the
    earliest hit wins, so the result does not depend on the thread count.

    Raises:
        SearchExhausted: no admissible vector in the box.

    """
    if coeff_bound < 0:
        raise LatticeError(f"Coefficient bound must be nonnegative, got {coeff_bound}")
    if roots is None:
        roots = enumerate_norm_vectors(lattice, -2, threads=threads)
    gram = lattice.gram
    root_rows = tuple(
        tuple(sum(g * r for g, r in zip(row, root.coords)) for row in gram)
        for root in roots
        if next(c for c in root.coords if c) > 0
    )
    checker = _RootAvoidance(lattice, root_rows, accept)
    stream = _candidates(lattice.rank, coeff_bound)
    examined = 0
    while True:
        wave = [list(itertools.islice(stream, BLOCK_SIZE)) for _ in range(max(threads, 1))]
        wave = [block for block in wave if block]
        if not wave:
            raise SearchExhausted(
                f"No root avoiding vector in {lattice.name or 'the lattice'} "
                f"with coefficients bounded by {coeff_bound}; enlarge the bound",
            )
        hits = parallel_map(
            _first_admissible,
            [(block, checker) for block in wave],
            threads=threads,
        )
        for block, hit in zip(wave, hits):
            if hit is not None:
                examined += block.index(hit) + 1
                logger.info("Found x = %s after %d candidates", list(hit), examined)
                return lattice.vector(hit)
            examined += len(block)


def build_fibration_class(x: LatticeVector) -> FibrationCertificate:
    """Extend ``x`` to the Picard model and form the isotropic class ``e = h_S - x``."""
    if not is_primitive(x):
        raise LatticeError(f"x = {list(x.coords)} is not primitive")
    norm = x.norm
    if norm >= 0:
        raise LatticeError(f"x must have negative norm, got {norm}")
    picard = picard_lattice(x.lattice, -norm)
    e = picard.vector((1,) + tuple(-c for c in x.coords))
    if e.norm != 0 or not is_primitive(e):
        raise LatticeError(f"e = {list(e.coords)} is not primitive isotropic")
    return FibrationCertificate(x=x, hS_square=-norm, e=e)


def verify_orthogonal_root_free(cert: FibrationCertificate) -> bool:
    """
    Whether ``N_x`` carries no vector of norm -2.

    ``e`` is isotropic and orthogonal to ``N_x``, so ``(n + c e)^2 = n^2`` and
    this settles the question for ``N_e`` as well.
    """
    return _complement_root_free(cert.x)


def _bezout(values: Sequence[int]) -> Tuple[int, List[int]]:
    g, coeffs = 0, [0] * len(values)
    for i, value in enumerate(values):
        s, t, g = igcdex(g, value)
        coeffs = [s * c for c in coeffs]
        coeffs[i] += t
    return g, coeffs


def find_section_class(cert: FibrationCertificate) -> LatticeVector:
    """
    A class ``l = z + c e`` with ``l^2 = -2`` and ``(l, e) = 1``.

    ``z`` is a lattice vector with ``(x, z) = -1``, signed basis vectors are
    tried first, then a Bezout combination of the pairings with the basis.
    ``c = -(z^2 + 2) / 2`` is an integer because the lattice is even.

    Raises:
        CertificateError: ``x`` pairs evenly (or in multiples of some g > 1)
            with every vector of the lattice.

    """
    lattice = cert.x.lattice
    pairings = [inner_product(cert.x, lattice.basis_vector(i)) for i in range(lattice.rank)]
    z = None
    for i, value in enumerate(pairings):
        if value in (1, -1):
            z = -value * lattice.basis_vector(i)
            break
    if z is None:
        g, coeffs = _bezout(pairings)
        if g != 1:
            raise CertificateError(
                f"x pairs with the lattice in multiples of {g}, no section class exists",
            )
        z = lattice.vector([-c for c in coeffs])
    c = -(z.norm + 2) // 2
    section = cert.picard.vector((0,) + z.coords) + c * cert.e
    if section.norm != -2 or inner_product(section, cert.e) != 1:
        raise CertificateError(f"Section class {list(section.coords)} failed its checks")
    return section


def nef_translate(e: LatticeVector, roots: Sequence[LatticeVector]) -> LatticeVector:
    """
    Reflect ``e`` in every root it meets negatively.

    For pairwise orthogonal roots, such as the exceptional classes, the result
    pairs positively with each of them.
    """
    f = e
    for root in roots:
        if inner_product(f, root) < 0:
            f = reflect(f, root)
    return f


def _resolve(lattice: Union[str, Lattice, None]) -> Lattice:
    if lattice is None:
        return make_standard("KummerPi")
    if isinstance(lattice, str):
        return make_standard(lattice)
    return lattice


def _kummer_model_for(lattice: Lattice) -> Optional[KummerModel]:
    model = kummer_model()
    return model if lattice == model.lattice else None


@dataclass(frozen=True)
class _SectionAndCode:
    """Accept ``x`` with a section class and, on the Kummer lattice, a nonzero code class."""

    model: Optional[KummerModel] = None

    def __call__(self, x: LatticeVector) -> bool:
        lattice = x.lattice
        pairings = [inner_product(x, lattice.basis_vector(i)) for i in range(lattice.rank)]
        if math.gcd(*pairings) != 1:
            return False
        return self.model is None or any(self.model.code_projection(x))


def run_search(
    coeff_bound: int = DEFAULT_BOUND,
    lattice: Union[str, Lattice, None] = None,
    threads: int = 1,
) -> FibrationCertificate:
    """
    Search, build and certify a Jacobian elliptic fibration.

    Defaults to the Kummer lattice. The emitted certificate is re-checked by
    :func:`verify_certificate`, which only sees raw integer data.
    """
    lattice = _resolve(lattice)
    model = _kummer_model_for(lattice)
    roots = enumerate_norm_vectors(lattice, -2, threads=threads)
    logger.info("%s has %d roots", lattice.name or "Lattice", len(roots))
    x = find_root_avoiding_vector(
        lattice,
        coeff_bound,
        roots=roots,
        accept=_SectionAndCode(model),
        threads=threads,
    )
    cert = build_fibration_class(x)
    cert = dataclasses.replace(
        cert,
        root_check=verify_orthogonal_root_free(cert),
        section_class=find_section_class(cert),
        code_class=model.code_projection(cert.e) if model else (),
    )
    failures = verify_certificate(
        cert.to_json(),
        [list(row) for row in lattice.gram],
        [list(r.coords) for r in roots],
        code=model.code_data() if model else None,
    )
    if failures:
        raise CertificateError(f"Certificate failed the checks: {', '.join(failures)}")
    return cert


def _raw_pairwise_reduce(q: List[List[int]], basis: List[List[int]]) -> bool:
    """
    Greedy pairwise reduction of a positive form, in place.

    Returns False as soon as a nonpositive diagonal entry shows that the form
    is not positive definite.
    """
    n = len(q)
    if any(q[i][i] <= 0 for i in range(n)):
        return False
    changed = True
    while changed:
        changed = False
        for i in range(n):
            for j in range(n):
                if i == j or 2 * abs(q[i][j]) <= q[j][j]:
                    continue
                k = (2 * q[i][j] + q[j][j]) // (2 * q[j][j])
                basis[i] = [a - k * b for a, b in zip(basis[i], basis[j])]
                diagonal = q[i][i] - 2 * k * q[i][j] + k * k * q[j][j]
                for t in range(n):
                    if t != i:
                        q[i][t] -= k * q[j][t]
                        q[t][i] = q[i][t]
                q[i][i] = diagonal
                if diagonal <= 0:
                    return False
                changed = True
    return True


def _raw_short_vectors(gram: List[List[int]], target: int) -> Optional[List[Tuple[int, ...]]]:
    """
    Every ``v`` with ``v^T (-gram) v = target``, from scratch.

    Uses its own pairwise reduction and completion of squares, so it shares
    nothing with :func:`enumerate_norm_vectors`. ``None`` when ``-gram`` is not
    positive definite.
    """
    n = len(gram)
    q = [[-int(a) for a in row] for row in gram]
    basis = [[int(i == j) for j in range(n)] for i in range(n)]
    if not _raw_pairwise_reduce(q, basis):
        return None

    r = [[Fraction(a) for a in row] for row in q]
    mult = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        if r[i][i] <= 0:
            return None
        for j in range(i + 1, n):
            mult[i][j] = r[i][j] / r[i][i]
        for j in range(i + 1, n):
            for k in range(j, n):
                r[j][k] -= mult[i][j] * r[i][k]
    pivots = [r[i][i] for i in range(n)]

    found = []
    y = [0] * n

    def walk(i: int, room: Fraction) -> None:
        if i < 0:
            if room == 0:
                found.append(tuple(sum(y[k] * basis[k][c] for k in range(n)) for c in range(n)))
            return
        center = -sum(mult[i][j] * y[j] for j in range(i + 1, n))
        radius = room / pivots[i]
        s = math.isqrt(math.floor(radius)) + 1
        for z in range(math.floor(center) - s, math.ceil(center) + s + 1):
            d = (z - center) ** 2
            if d <= radius:
                y[i] = z
                walk(i - 1, room - pivots[i] * d)
        y[i] = 0

    walk(n - 1, Fraction(target))
    return sorted(v for v in found if any(v))


def _raw_code_class(e: List[int], code: Dict) -> Optional[List[int]]:
    """Code class of ``e = (h_S, k)`` recomputed from the half-coordinate basis and code matrix."""
    basis = code["basis"]
    rows = [[a % 2 for a in row] for row in code["code"]]
    k = e[1:]
    if len(k) != len(basis):
        return None
    width = len(basis[0])
    word = [sum(c * b[p] for c, b in zip(k, basis)) % 2 for p in range(width)]
    pivots = [row.index(1) for row in rows]
    coords = [word[p] for p in pivots]
    recombined = [sum(a * row[p] for a, row in zip(coords, rows)) % 2 for p in range(width)]
    return coords if recombined == word else None


def verify_certificate(
    payload: Dict,
    gram: List[List[int]],
    roots: Optional[List[List[int]]] = None,
    code: Optional[Dict] = None,
) -> List[str]:
    """
    Recheck a certificate from raw JSON data only.

    The norm -2 vectors are recomputed here with a separate reduction and
    search, and the code class is recomputed from ``code``.

    Args:
        payload: certificate JSON (``x``, ``hS_square``, ``e``, ``l``,
            ``root_check``, ``code_class``).
        gram: Gram matrix of the negative definite lattice carrying ``x``.
        roots: a claimed list of all norm -2 vectors, checked for completeness.
        code: ``{"basis": ..., "code": ...}``, the lattice basis in half
            coordinates and the GF(2) generator matrix of the binary code, as
            given by :meth:`KummerModel.code_data`. When present the code class
            must match its recomputation and be nonzero; when absent it is not
            checked.

    Returns:
        names of the failed checks, empty when the certificate is valid.

    """
    x, e, section = payload["x"], payload["e"], payload.get("l")
    hs = payload["hS_square"]
    n = len(gram)

    def form(u, v):
        return sum(u[i] * gram[i][j] * v[j] for i in range(n) for j in range(n) if u[i])

    def pic(u, v):
        return hs * u[0] * v[0] + form(u[1:], v[1:])

    own_roots = _raw_short_vectors(gram, 2)
    checks = {
        "lattice_definite": own_roots is not None,
        "x_primitive": any(x) and math.gcd(*x) == 1,
        "hS_square": hs > 0 and hs % 2 == 0 and form(x, x) == -hs,
        "e_definition": e == [1] + [-a for a in x],
        "e_isotropic": pic(e, e) == 0,
        "e_primitive": math.gcd(*e) == 1,
        "section_norm": section is not None and pic(section, section) == -2,
        "section_degree": section is not None and pic(section, e) == 1,
        "roots_complete": roots is None
        or (own_roots is not None and sorted(tuple(r) for r in roots) == own_roots),
        "orthogonal_root_free": payload.get("root_check") is True
        and own_roots is not None
        and all(form(x, r) != 0 for r in own_roots),
    }
    if code is not None:
        recomputed = _raw_code_class(e, code)
        checks["code_class"] = (
            recomputed is not None
            and any(recomputed)
            and recomputed == list(payload.get("code_class") or [])
        )
    failures = [name for name, ok in checks.items() if not ok]
    for name in failures:
        logger.warning("Certificate check %s failed", name)
    return failures
