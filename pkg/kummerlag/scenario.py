"""
Rule engine for lagrangian surfaces in products of abelian surfaces.

A construction instance is described by a :class:`ConstructionScenario` of
boolean and integer facts; :func:`classify` turns it into a :class:`Verdict`
with the dimension of the space of lagrangian forms, the fibered verdict, the
Albanese structure and the ranks of the two step nilpotent quotient of the
fundamental group. Every rule that fires is recorded in the verdict.
"""

import logging
import math
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from kummerlag.core.errors import EnvelopeError, InvariantError, ScenarioInconsistency
from kummerlag.core.linalg import rational_rank

logger = logging.getLogger(__name__)

# Dimension of the rational envelope of the (2,0)-form of a generic abelian surface.
GENERIC_SURFACE_ENVELOPE = 5
OBSTRUCTION_THRESHOLD = 3

GENERIC = "generic"
CURVE = "curve"
THREE_SURFACES = "three-surfaces"

YES, NO, UNDECIDED = "yes", "no", "unknown"
NONDEGENERATE, CORANK_ONE, NOT_APPLICABLE = "nondegenerate", "corank-1", "n/a"

ALB_PRODUCT = "A1xA2"
ALB_CURVE = "A1xA2xJac(C)"
ALB_THREE = "A1xA2xA12"

_FLAGS = (
    "g1_is_iso",
    "g2_is_iso",
    "composition_lifts_to_CxC",
    "wedge_nondegenerate",
    "intersection_graph_connected",
)
_COUNTS = ("h0_Y12", "genus_C", "picard_defect")

Rational = Union[int, str, Fraction]


def _fraction(value: Rational) -> Fraction:
    try:
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as err:
        raise EnvelopeError(f"Not a rational number: {value!r}") from err


@dataclass(frozen=True)
class RationalEnvelopeInput:
    """Coordinates of a vector ``w`` over a number field, one row per field basis element.

    Attributes:
        dim_VQ: dimension of the rational vector space ``V_Q``.
        coeff_matrix: row ``r`` holds the coordinates in ``V_Q`` of the
            ``r``-th component of ``w``.

    """

    dim_VQ: int
    coeff_matrix: Tuple[Tuple[Fraction, ...], ...]

    def __post_init__(self):
        """Parse the entries as fractions and check the shape."""
        if self.dim_VQ < 1:
            raise EnvelopeError(f"dim_VQ must be positive, got {self.dim_VQ}")
        rows = tuple(tuple(_fraction(a) for a in row) for row in self.coeff_matrix)
        if not rows:
            raise EnvelopeError("The coefficient matrix is empty")
        for row in rows:
            if len(row) != self.dim_VQ:
                raise EnvelopeError(f"Row of length {len(row)} in a space of dimension {self.dim_VQ}")
        object.__setattr__(self, "coeff_matrix", rows)

    @classmethod
    def from_json(cls, payload: Dict) -> "RationalEnvelopeInput":
        """Read ``{"dim_VQ": n, "coeff_matrix": [["1/2", 0, ...], ...]}``."""
        try:
            return cls(int(payload["dim_VQ"]), tuple(tuple(r) for r in payload["coeff_matrix"]))
        except KeyError as err:
            raise EnvelopeError(f"Envelope JSON misses the {err} entry") from err
        except EnvelopeError:
            raise
        except (TypeError, ValueError) as err:
            raise EnvelopeError(f"Malformed envelope JSON: {err!r}") from err

    def to_json(self) -> Dict:
        return {
            "dim_VQ": self.dim_VQ,
            "coeff_matrix": [[str(a) for a in row] for row in self.coeff_matrix],
        }


def rational_envelope_dim(envelope: RationalEnvelopeInput) -> int:
    """Dimension of the smallest rational subspace whose complexification contains ``w``."""
    return rational_rank(envelope.coeff_matrix, envelope.dim_VQ)


def k_genericity(envelope: RationalEnvelopeInput) -> int:
    return envelope.dim_VQ - rational_envelope_dim(envelope)


def weakly_lagrangian_obstruction(k: int) -> bool:
    """Whether a ``k``-generic form rules out weakly lagrangian surfaces (``k < 3``)."""
    if k < 0:
        raise EnvelopeError(f"k must be nonnegative, got {k}")
    return k < OBSTRUCTION_THRESHOLD


def lagrangian_combination(lambda1: Rational, lambda2: Rational) -> Tuple[Fraction, Fraction]:
    """
    Coefficients of ``lambda2 w1 - lambda1 w2``.

    When the two forms pull back to ``lambda1`` and ``lambda2`` times a common
    form, this combination vanishes on the image.
    """
    l1, l2 = _fraction(lambda1), _fraction(lambda2)
    if l1 == 0 or l2 == 0:
        raise EnvelopeError(f"Multipliers must be nonzero, got ({l1}, {l2})")
    return l2, -l1


def dim_LX_degenerate_case(h0_Y12: int) -> int:
    """``dim Lambda^2 H^0(Y12, Omega^1) + 1``."""
    if h0_Y12 < 0:
        raise InvariantError(f"h0_Y12 must be nonnegative, got {h0_Y12}")
    return math.comb(h0_Y12, 2) + 1


def generic_form_parity(alb_dim: int) -> str:
    """A generic lagrangian form is nondegenerate for even Albanese dimension, corank one otherwise."""
    if alb_dim < 4:
        raise InvariantError(f"Albanese dimension is at least 4, got {alb_dim}")
    return NONDEGENERATE if alb_dim % 2 == 0 else CORANK_ONE


def pi1_extension_ranks(case: str, g: int = 0, i: int = 0) -> Tuple[int, int]:
    """
    Ranks ``(k, b)`` of the central extension ``0 -> Z^k -> G -> Z^b -> 0``.

    ``case`` is ``generic``, ``curve`` (genus ``g`` of the curve) or
    ``three-surfaces``; ``i`` is the Picard defect, between 0 and 3.
    """
    if case == GENERIC:
        return GENERIC_SURFACE_ENVELOPE, 8
    if not 0 <= i <= 3:
        raise InvariantError(f"Picard defect must be in 0..3, got {i}")
    if case == CURVE:
        if g < 1:
            raise InvariantError(f"Genus must be positive in the curve case, got {g}")
        return 1 + i + g * (2 * g - 1), 8 + 2 * g
    if case == THREE_SURFACES:
        return 4 + 2 * i, 12
    raise ValueError(f"Case must be {GENERIC}, {CURVE} or {THREE_SURFACES}, got {case}")


@dataclass(frozen=True)
class ConstructionScenario:
    """Facts about a construction instance."""

    g1_is_iso: bool = False
    g2_is_iso: bool = False
    composition_lifts_to_CxC: bool = False
    h0_Y12: int = 0
    wedge_nondegenerate: bool = False
    intersection_graph_connected: bool = False
    genus_C: Optional[int] = None
    picard_defect: int = 0
    name: str = field(default="", compare=False)

    def __post_init__(self):
        """Check field types and ranges and the trichotomy for ``h0_Y12``."""
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name in _FLAGS and not isinstance(value, bool):
                raise InvariantError(f"{f.name} must be true or false, got {value!r}")
            if f.name in _COUNTS and not (
                (value is None and f.name == "genus_C")
                or (isinstance(value, int) and not isinstance(value, bool))
            ):
                raise InvariantError(f"{f.name} must be an integer, got {value!r}")
        if not 0 <= self.picard_defect <= 3:
            raise InvariantError(f"Picard defect must be in 0..3, got {self.picard_defect}")
        if self.h0_Y12 < 0:
            raise InvariantError(f"h0_Y12 must be nonnegative, got {self.h0_Y12}")
        if self.h0_Y12 == 0 and self.wedge_nondegenerate:
            logger.info("h0_Y12 = 0 carries no wedge, wedge_nondegenerate set to false")
            object.__setattr__(self, "wedge_nondegenerate", False)
        if self.genus_C is not None and self.genus_C < 1:
            raise InvariantError(f"genus_C must be positive, got {self.genus_C}")
        allowed = {0, 2}
        if self.genus_C is not None:
            allowed.add(2 * self.genus_C)
        elif not self.wedge_nondegenerate and self.h0_Y12 % 2 == 0:
            allowed.add(self.h0_Y12)
        if self.h0_Y12 not in allowed:
            raise ScenarioInconsistency(
                f"h0_Y12 = {self.h0_Y12} is none of 0, 2 or twice the genus of C",
            )

    @property
    def genus(self) -> int:
        """Genus of ``C``, read off ``h0_Y12`` when not given."""
        return self.genus_C if self.genus_C is not None else self.h0_Y12 // 2

    @classmethod
    def from_json(cls, payload: Dict) -> "ConstructionScenario":
        if not isinstance(payload, dict):
            raise InvariantError(f"Scenario JSON must be an object, got {type(payload).__name__}")
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(payload) - known
        if unknown:
            raise InvariantError(f"Unknown scenario fields: {', '.join(sorted(unknown))}")
        return cls(**payload)

    def to_json(self) -> Dict:
        payload = asdict(self)
        if not payload["name"]:
            payload.pop("name")
        return payload


@dataclass(frozen=True)
class Verdict:
    """Conclusions of :func:`classify`."""

    dim_LX: Optional[int]
    lagrangian_form_count: int
    fibered: str
    alb_structure: Optional[str]
    pi1_kernel_rank: Optional[int]
    pi1_ab_rank: Optional[int]
    generic_form_rank_parity: str
    h0_Y12: int
    maps_factor_through_C: bool
    rules_fired: Tuple[Dict[str, str], ...]

    def to_json(self) -> Dict:
        payload = asdict(self)
        payload["rules_fired"] = [dict(rule) for rule in self.rules_fired]
        return payload


RULES = {
    "product-of-curves": "X is a finite unramified cover of C x C; two independent lagrangian forms",
    "connected-intersection-graph": "Alb(Y12) = 0, so X is not fibered and its lagrangian form is unique",
    "first-map-isomorphism": "g1 is an isomorphism; X is not fibered and carries one lagrangian form",
    "degenerate-wedge-curve": (
        "X maps onto a curve C and every map to a curve factors through C; "
        "X is fibered exactly when C has genus at least 2"
    ),
    "three-abelian-surfaces": "Alb(Y12) is an abelian surface A12; the intersection graph is totally disconnected",
    "undecided": "no rule decides whether X is fibered",
}


def _fired(rule: str) -> Dict[str, str]:
    logger.debug("Rule %s fired", rule)
    return {"rule": rule, "statement": RULES[rule]}


def _generic_ranks() -> Tuple[int, int]:
    return pi1_extension_ranks(GENERIC)


def classify(s: ConstructionScenario) -> Verdict:
    """
    Apply the classification rules in priority order.

    1. ``g1`` and ``g2`` isomorphisms lifting to ``C x C``: two forms, fibered.
    2. Connected intersection graph: ``h0_Y12`` forced to 0, not fibered.
    3. ``g1`` isomorphism otherwise: not fibered, one form.
    4. ``h0_Y12 > 0`` with a degenerate wedge: the curve case, fibered
       exactly when the genus of ``C`` is at least 2.
    5. ``h0_Y12 = 2`` with a nondegenerate wedge: three abelian surfaces.
    6. Anything else: undecided.

    Raises:
        ScenarioInconsistency: a nondegenerate wedge on ``h0_Y12 = 2`` together
            with a connected intersection graph.

    """
    if s.h0_Y12 == 2 and s.wedge_nondegenerate and s.intersection_graph_connected:
        raise ScenarioInconsistency(
            "A nondegenerate wedge on h0_Y12 = 2 forces a totally disconnected "
            "intersection graph, but the scenario claims it is connected",
        )

    if s.g1_is_iso and s.g2_is_iso and s.composition_lifts_to_CxC:
        return Verdict(
            dim_LX=2,
            lagrangian_form_count=2,
            fibered=YES,
            alb_structure=ALB_PRODUCT,
            pi1_kernel_rank=None,
            pi1_ab_rank=None,
            generic_form_rank_parity=NOT_APPLICABLE,
            h0_Y12=s.h0_Y12,
            maps_factor_through_C=False,
            rules_fired=(_fired("product-of-curves"),),
        )

    if s.intersection_graph_connected:
        kernel, ab = _generic_ranks()
        return Verdict(
            dim_LX=1,
            lagrangian_form_count=1,
            fibered=NO,
            alb_structure=ALB_PRODUCT,
            pi1_kernel_rank=kernel,
            pi1_ab_rank=ab,
            generic_form_rank_parity=NOT_APPLICABLE,
            h0_Y12=0,
            maps_factor_through_C=False,
            rules_fired=(_fired("connected-intersection-graph"),),
        )

    if s.g1_is_iso:
        kernel, ab = _generic_ranks()
        return Verdict(
            dim_LX=1,
            lagrangian_form_count=1,
            fibered=NO,
            alb_structure=ALB_PRODUCT,
            pi1_kernel_rank=kernel,
            pi1_ab_rank=ab,
            generic_form_rank_parity=NOT_APPLICABLE,
            h0_Y12=0,
            maps_factor_through_C=False,
            rules_fired=(_fired("first-map-isomorphism"),),
        )

    if s.h0_Y12 > 0 and not s.wedge_nondegenerate:
        g = s.genus
        kernel, ab = pi1_extension_ranks(CURVE, g=g, i=s.picard_defect)
        return Verdict(
            dim_LX=dim_LX_degenerate_case(s.h0_Y12),
            lagrangian_form_count=1,
            fibered=YES if g >= 2 else NO,
            alb_structure=ALB_CURVE,
            pi1_kernel_rank=kernel,
            pi1_ab_rank=ab,
            generic_form_rank_parity=generic_form_parity(4 + g),
            h0_Y12=s.h0_Y12,
            maps_factor_through_C=True,
            rules_fired=(_fired("degenerate-wedge-curve"),),
        )

    if s.h0_Y12 == 2 and s.wedge_nondegenerate:
        kernel, ab = pi1_extension_ranks(THREE_SURFACES, i=s.picard_defect)
        return Verdict(
            dim_LX=None,
            lagrangian_form_count=1,
            fibered=UNDECIDED,
            alb_structure=ALB_THREE,
            pi1_kernel_rank=kernel,
            pi1_ab_rank=ab,
            generic_form_rank_parity=NOT_APPLICABLE,
            h0_Y12=2,
            maps_factor_through_C=False,
            rules_fired=(_fired("three-abelian-surfaces"),),
        )

    trivial = s.h0_Y12 == 0
    kernel, ab = _generic_ranks() if trivial else (None, None)
    return Verdict(
        dim_LX=dim_LX_degenerate_case(0) if trivial else None,
        lagrangian_form_count=1,
        fibered=UNDECIDED,
        alb_structure=ALB_PRODUCT if trivial else None,
        pi1_kernel_rank=kernel,
        pi1_ab_rank=ab,
        generic_form_rank_parity=NOT_APPLICABLE,
        h0_Y12=s.h0_Y12,
        maps_factor_through_C=False,
        rules_fired=(_fired("undecided"),),
    )


def generic_surface_envelope() -> RationalEnvelopeInput:
    """
    Envelope fixture of the (2,0)-form of a generic abelian surface.

    The form spans a rational hyperplane of ``H^2(A, Q)``, which has dimension 6.
    """
    rows: List[Sequence[int]] = [
        [int(i == j) for j in range(6)] for i in range(GENERIC_SURFACE_ENVELOPE)
    ]
    return RationalEnvelopeInput(6, tuple(tuple(r) for r in rows))
