"""
Cremona transformations of P3 built from double-vertex monoids of P4.

For a monoid ``F = x0 x4 G + x0 G' + x4 G'' + G_d`` (``G, G', G'', G_d`` in
``x1, x2, x3``), projecting ``{F = 0}`` from ``p0`` and from ``p4`` are both
birational onto P3; composing one section with the other projection gives a
Cremona map. The forward map goes from the P3 with coordinates
``x1..x4`` to the P3 with coordinates ``x0..x3``.
"""

import random
from fractions import Fraction
from typing import List, Sequence, Tuple

from retifica.core.forms import MultiPoly
from retifica.core.matrix import ExactMatrix
from retifica.core.rand import derive_seed, random_point
from retifica.errors import NotGenericallyFinite, VerificationError
from retifica.interfaces.models import CremonaMap, Monoid, ParamSurface, RationalMap
from retifica.logger import logger
from retifica.monoids import make_monoid
from retifica.surfaces import is_birational, make_surface
from retifica.util.sym import exact_divide, gcd_forms

__all__ = [
    "MAX_GCD_DEGREE",
    "monoid_section",
    "cremona_from_monoid",
    "linear_cremona",
    "identity_cremona",
    "compose_maps",
    "compose",
    "verify_cremona",
    "projectively_equal",
    "apply_to_surface",
    "reduce_components",
]

MAX_GCD_DEGREE = 8


def projectively_equal(p: Sequence[Fraction], q: Sequence[Fraction]) -> bool:
    """Exact projective equality by cross-multiplication over all coordinate pairs."""
    if len(p) != len(q) or not any(p) or not any(q):
        return False
    n = len(p)
    return all(p[i] * q[j] == p[j] * q[i] for i in range(n) for j in range(i + 1, n))


def reduce_components(components: Sequence[MultiPoly]) -> Tuple[List[MultiPoly], bool]:
    """
    Remove the common factor of the components.

    :return: The reduced components and whether the gcd was skipped because
        the degree exceeds ``MAX_GCD_DEGREE``.
    """
    nonzero = [c for c in components if c]
    degree = nonzero[0].degree
    if degree > MAX_GCD_DEGREE:
        logger.debug(f"Skipping common-factor removal at degree {degree}")
        return [c.primitive() if c else c for c in components], True
    g = gcd_forms(nonzero)
    if g.degree == 0:
        return list(components), False
    logger.debug(f"Removing common factor of degree {g.degree}")
    new_degree = degree - g.degree
    return [exact_divide(c, g) if c else MultiPoly(c.num_vars, {}, new_degree) for c in components], False


def monoid_section(F: Monoid) -> RationalMap:
    """
    Inverse of the projection from ``p0`` restricted to ``{F = 0}``:
    ``[x1:x2:x3:x4] -> [-F_d : x1 F_{d-1} : ... : x4 F_{d-1}]``.

    :raises ValueError: ``F`` has multiplicity ``d`` at ``p0``.
    """
    if F.form.mult_at_coord_point(0) < F.d - 1:
        raise ValueError("Multiplicity at p0 is below d - 1")
    f1 = F.form.piece(0, 1)
    f0 = F.form.piece(0, 0)
    if not f1:
        raise ValueError("F_{d-1} vanishes: the form is a cone with vertex p0")
    components = [-f0] + [MultiPoly.variable(5, i) * f1 for i in range(1, 5)]
    return RationalMap(3, 4, tuple(c.drop_variable(0) for c in components))


def cremona_from_monoid(F: Monoid, trials: int = 100, seed: int = 0) -> CremonaMap:
    """
    The Cremona map ``(projection from p4) o (section at p0)`` and its inverse
    ``(projection from p0) o (section at p4)``.

    :raises ValueError: ``F`` lacks one of the vertexes, or a map collapses.
    :raises VerificationError: The identity test fails after common-factor
        removal (reducible or degenerate monoid).
    """
    if F.vertexes != (0, 4):
        F = make_monoid(F.form, (0, 4))
    g, g1, g2, gd = F.pieces
    x = [MultiPoly.variable(5, i) for i in range(5)]
    den_forward = x[4] * g + g1
    den_inverse = x[0] * g + g2
    if not den_forward or not den_inverse:
        raise ValueError("A vertex denominator vanishes: the monoid is a cone")
    num_forward = x[4] * g2 + gd
    num_inverse = x[0] * g1 + gd
    forward = [-num_forward] + [x[i] * den_forward for i in (1, 2, 3)]
    inverse = [x[i] * den_inverse for i in (1, 2, 3)] + [-num_inverse]
    forward, skipped_f = reduce_components([c.drop_variable(0) for c in forward])
    inverse, skipped_i = reduce_components([c.drop_variable(4) for c in inverse])
    try:
        omega = CremonaMap(
            RationalMap(3, 3, tuple(forward), skipped_f),
            RationalMap(3, 3, tuple(inverse), skipped_i),
            F,
        )
    except ValueError as e:
        raise ValueError(f"Map collapses: {e}")
    if not verify_cremona(omega, trials, seed):
        raise VerificationError("Identity test failed for the monoid Cremona map")
    logger.info(f"Cremona map of degrees {omega.degrees} from a degree {F.d} monoid")
    return omega


def linear_cremona(matrix: ExactMatrix) -> CremonaMap:
    """Projective-linear change of coordinates of P3 with its exact inverse."""
    if matrix.n_rows != 4 or matrix.n_cols != 4:
        raise ValueError("Expected a 4x4 matrix")
    inverse = matrix.inverse()

    def as_map(m: ExactMatrix) -> RationalMap:
        rows = [
            MultiPoly(4, {tuple(1 if k == j else 0 for k in range(4)): c for j, c in enumerate(row)}, 1)
            for row in m.rows
        ]
        return RationalMap(3, 3, tuple(rows))

    return CremonaMap(as_map(matrix), as_map(inverse))


def identity_cremona() -> CremonaMap:
    return linear_cremona(ExactMatrix.identity(4))


def compose_maps(second: RationalMap, first: RationalMap) -> RationalMap:
    """``second o first`` by substitution, with common-factor removal."""
    if second.source_dim != first.target_dim:
        raise ValueError("Maps are not composable")
    components = [c.substitute(first.components) for c in second.components]
    components, skipped = reduce_components(components)
    return RationalMap(first.source_dim, second.target_dim, tuple(components), skipped)


def compose(second: CremonaMap, first: CremonaMap) -> CremonaMap:
    """``second o first``; the inverse is ``first^-1 o second^-1``."""
    return CremonaMap(
        compose_maps(second.forward, first.forward),
        compose_maps(first.inverse, second.inverse),
    )


def verify_cremona(omega: CremonaMap, trials: int = 100, seed: int = 0, height: int = 100) -> bool:
    """
    Check ``inverse(forward(P)) == P`` projectively at ``trials`` random
    points where both maps are defined.

    Indeterminacy hits are skipped and reported; the draw budget is
    ``3 * trials``. The check fails unless at least half of ``trials``
    points were usable.
    """
    rng = random.Random(derive_seed(seed, "verify_cremona"))
    checked = 0
    skipped = 0
    while checked < trials and checked + skipped < 3 * trials:
        p = random_point(rng, omega.forward.source_dim + 1, height)
        q = omega.forward(p)
        if not any(q):
            skipped += 1
            continue
        r = omega.inverse(q)
        if not any(r):
            skipped += 1
            continue
        if not projectively_equal(p, r):
            logger.debug(f"verify_cremona: mismatch at {p}")
            return False
        checked += 1
    if skipped:
        logger.warning(f"verify_cremona: {skipped} indeterminacy hit(s) in {checked + skipped} draws")
    if checked < trials:
        logger.warning(f"verify_cremona: only {checked} of {trials} points were usable")
    return checked >= max(1, (trials + 1) // 2)


def apply_to_surface(omega: CremonaMap, S: ParamSurface, seed: int = 0, height: int = 20) -> ParamSurface:
    """
    Push ``S`` through ``omega.forward``.

    :raises ValueError: ``omega`` contracts ``S``.
    :raises VerificationError: The image parametrization is not birational.
    """
    if len(S.forms) != omega.forward.source_dim + 1:
        raise ValueError("Surface does not live in the source of the map")
    components = [c.substitute(list(S.forms)) for c in omega.forward.components]
    if not any(components):
        raise ValueError("The map contracts the surface: all components vanish on it")
    try:
        image = make_surface(components, seed, height)
    except ValueError as e:
        raise ValueError(f"The map contracts the surface: {e}")
    try:
        birational = is_birational(image, seed, height)
    except NotGenericallyFinite:
        birational = False
    if not birational:
        raise VerificationError("Image parametrization is not birational")
    logger.debug(f"apply_to_surface: bidegree {S.bidegree} -> {image.bidegree}")
    return image
