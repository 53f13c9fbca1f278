"""
Parametrized rationally ruled surfaces P1 x P1 -> P^n.

A surface is given by ``n + 1`` forms of bidegree ``(a, b)``: ``a`` is the
degree in ``(s, t)`` and is the ruling degree (the curves ``{(u:v) = const}``
map to rational curves of degree ``a``), ``b`` is the degree in ``(u, v)``.
"""

import random
from fractions import Fraction
from typing import List, Optional, Sequence

from retifica.core.forms import BiForm
from retifica.core.matrix import ExactMatrix
from retifica.core.rand import derive_seed, random_biform, random_rational, rng_for
from retifica.errors import NotGenericallyFinite, SearchExhausted
from retifica.interfaces.models import LambdaRealization, ParamSurface
from retifica.logger import logger
from retifica.util.sym import (
    count_common_zeros,
    exact_divide,
    gcd_forms,
    intersection_count,
    is_squarefree_binary,
)

__all__ = [
    "make_surface",
    "image_degree",
    "is_birational",
    "point_in_image",
    "contains_point",
    "build_lambda_M",
    "projection_degree",
    "strip_common_factor",
]

_DEFAULT_SEED = 0


def _jacobian_rank(forms: Sequence[BiForm], rng: random.Random, height: int) -> int:
    s, u = random_rational(rng, height), random_rational(rng, height)
    point = (s, 1, u, 1)
    rows = [
        [f.evaluate(point) for f in forms],
        [f.derivative(0).evaluate(point) if f else 0 for f in forms],
        [f.derivative(2).evaluate(point) if f else 0 for f in forms],
    ]
    return ExactMatrix(rows).rank()


def strip_common_factor(forms: Sequence[BiForm]) -> List[BiForm]:
    """Divide out the gcd of the nonzero forms; zero forms keep the new bidegree."""
    g = gcd_forms(forms)
    if g.bidegree == (0, 0):
        return list(forms)
    nonzero = next(f for f in forms if f)
    new_grade = (nonzero.bidegree[0] - g.bidegree[0], nonzero.bidegree[1] - g.bidegree[1])
    logger.debug(f"Removing fixed component of bidegree {g.bidegree}")
    return [exact_divide(f, g) if f else BiForm({}, new_grade) for f in forms]


def make_surface(forms: Sequence[BiForm], seed: int = _DEFAULT_SEED, height: int = 20) -> ParamSurface:
    """
    Build a surface, removing fixed components.

    :param forms: ``n + 1`` forms of a common bidegree.
    :param seed: Seed for the random dimension check.
    :return: The reduced surface.
    :raises ValueError: Mixed bidegrees, a constant map after reduction, or an
        image of dimension below two.
    """
    forms = list(forms)
    if len(forms) < 3:
        raise ValueError("A surface needs at least three forms")
    grades = {f.bidegree for f in forms if f}
    if not grades:
        raise ValueError("All forms vanish")
    if len(grades) > 1:
        raise ValueError(f"Forms must share one bidegree, got {sorted(grades)}")
    zero_grade = grades.pop()
    forms = [f if f else BiForm({}, zero_grade) for f in forms]
    forms = strip_common_factor(forms)
    if forms[0].bidegree == (0, 0) or next(f for f in forms if f).bidegree == (0, 0):
        raise ValueError("Common-factor removal leaves bidegree (0, 0)")
    rng = rng_for(seed, "make_surface")
    rank = max(_jacobian_rank(forms, rng, height) for _ in range(2))
    if rank < 3:
        raise ValueError(f"Forms are proportional or the image is a curve (rank {rank})")
    return ParamSurface(tuple(forms))


def image_degree(S: ParamSurface, seed: int = _DEFAULT_SEED, height: int = 20) -> int:
    """
    Number of parameter solutions of two random hyperplane pullbacks, with
    multiplicity and without the base-point contribution.

    For a birational parametrization this is the degree of the image.

    :raises NotGenericallyFinite: The map is not generically finite.
    """
    rng = rng_for(seed, "image_degree", S.bidegree)
    total, base = intersection_count(S.forms, rng, height)
    degree = total - base
    logger.debug(f"image_degree: {total} solutions, {base} at base points, degree {degree}")
    if degree <= 0:
        raise NotGenericallyFinite("Map is not generically finite")
    return degree


def _fiber_forms(S: ParamSurface, y: Sequence[Fraction]) -> List[BiForm]:
    i0 = next(i for i, c in enumerate(y) if c)
    out = []
    for j, f in enumerate(S.forms):
        if j == i0:
            continue
        e = f.scale(y[i0]) - S.forms[i0].scale(y[j])
        out.append(e)
    return out


def _base_count(S: ParamSurface, rng: random.Random, height: int) -> int:
    return count_common_zeros(S.forms, rng, height)


def point_in_image(
    S: ParamSurface, y: Sequence[Fraction], seed: int = _DEFAULT_SEED, height: int = 20
) -> bool:
    """
    Whether ``y`` is the image of some parameter point (or of a contracted
    curve), by exact solving of the fiber system ``y_i F_j - y_j F_i = 0``.
    """
    y = [Fraction(c) for c in y]
    if len(y) != len(S.forms) or not any(y):
        raise ValueError("Point must be a nonzero vector in the ambient space")
    rng = rng_for(seed, "point_in_image", tuple(y))
    equations = [e for e in _fiber_forms(S, y) if e]
    if not equations:
        return True
    if gcd_forms(equations).bidegree != (0, 0):
        return True
    grade = equations[0].bidegree
    equations = [e if e else BiForm({}, grade) for e in equations]
    fiber = count_common_zeros(equations, rng, height)
    base = _base_count(S, rng, height)
    return fiber > base


def contains_point(S: ParamSurface, i: int, seed: int = _DEFAULT_SEED, height: int = 20) -> bool:
    """Whether the ``i``-th coordinate point lies on the image."""
    y = [Fraction(0)] * len(S.forms)
    y[i] = Fraction(1)
    return point_in_image(S, y, seed, height)


def is_birational(S: ParamSurface, seed: int = _DEFAULT_SEED, height: int = 20) -> bool:
    """True iff a random image point has exactly one parameter preimage."""
    rng = rng_for(seed, "is_birational")
    for _ in range(10):
        s, u = random_rational(rng, height), random_rational(rng, height)
        y = S.point(s, 1, u, 1)
        if any(y):
            break
    else:
        return False
    try:
        fiber = count_common_zeros(_fiber_forms(S, y), rng, height)
        base = _base_count(S, rng, height)
    except NotGenericallyFinite:
        return False
    logger.debug(f"is_birational: {fiber - base} preimage(s)")
    return fiber - base == 1


def projection_degree(S: ParamSurface, i: int, seed: int = _DEFAULT_SEED, height: int = 20) -> int:
    """
    Degree of the projection of ``S`` from the ``i``-th coordinate point.

    :raises ValueError: The projection collapses the surface to a curve.
    """
    if S.ambient_dim < 3:
        raise ValueError("Projection needs a surface in P^3 or higher")
    projected = make_surface(S.drop(i), seed, height)
    return image_degree(projected, seed, height)


def _fiber_points_transverse(gm: BiForm, fibers: Sequence[BiForm], a: int) -> bool:
    for fiber in fibers:
        cu = fiber.coefficient((0, 0, 1, 0))
        cv = fiber.coefficient((0, 0, 0, 1))
        # zero of cu*u + cv*v
        restricted = gm.restrict_fiber(-cv, cu)
        if len(restricted) != a + 1 or not is_squarefree_binary(restricted):
            return False
    return True


def build_lambda_M(
    S: ParamSurface,
    beta: int,
    seed: int = _DEFAULT_SEED,
    gamma: Optional[BiForm] = None,
    height: int = 20,
    retries: int = 10,
    avoid: Sequence[int] = (0, 1, 2, 3),
) -> LambdaRealization:
    """
    Re-embed ``S`` in P4 by ``(L0 P, L1 P, L2 P, L3 P, Gamma M)`` where ``P``
    is a product of ``beta`` general fibers, ``Gamma`` a section of bidegree
    ``(1, 1)`` and ``M`` general of bidegree ``(a - 1, b + beta - 1)``.

    Every genericity requirement is checked: the base locus is ``a * beta``
    transverse points, the coordinate points in ``avoid`` are off the image
    while ``p4`` lies on it, the image has degree ``a (2b + beta)`` and the
    parametrization is birational.

    :param avoid: Coordinate points among ``p0..p3`` that must be off the
        image. Only ``p0`` stays off once ``S`` is itself a projected
        re-embedding, whose fibers ``P = 0`` map to ``p3``.

    :raises ValueError: ``S`` is not in P3, ``a < 2`` or ``beta < 1``.
    :raises SearchExhausted: No draw passed the checks.
    """
    if S.ambient_dim != 3:
        raise ValueError("Lambda construction needs a surface in P3")
    a, b = S.bidegree
    if a < 2:
        raise ValueError(f"Ruling degree {a} < 2: the surface is already a scroll")
    if beta < 1:
        raise ValueError("beta must be at least 1")
    if gamma is not None and gamma.bidegree != (1, 1):
        raise ValueError(f"Gamma must have bidegree (1, 1), got {gamma.bidegree}")
    expected = a * (2 * b + beta)
    if any(i not in range(4) for i in avoid):
        raise ValueError(f"Points to avoid must be among p0..p3, got {list(avoid)}")
    log = []
    for attempt in range(retries):
        attempt_seed = derive_seed(seed, "lambda", beta, attempt)
        rng = random.Random(attempt_seed)
        gam = gamma if gamma is not None else random_biform(rng, 1, 1, height)
        m_form = random_biform(rng, a - 1, b + beta - 1, height)
        fibers = []
        while len(fibers) < beta:
            fiber = random_biform(rng, 0, 1, height)
            if all(gcd_forms([fiber, other]).bidegree == (0, 0) for other in fibers):
                fibers.append(fiber)
        product = fibers[0]
        for fiber in fibers[1:]:
            product = product * fiber
        gm = gam * m_form
        forms = tuple(L * product for L in S.forms) + (gm,)
        try:
            result = ParamSurface(forms)
            if not _fiber_points_transverse(gm, fibers, a):
                log.append(f"attempt {attempt}: base points not transverse")
                continue
            check_rng = random.Random(derive_seed(attempt_seed, "count"))
            found = count_common_zeros(forms, check_rng, height)
            if found != a * beta:
                log.append(f"attempt {attempt}: base locus has {found} points, expected {a * beta}")
                continue
            on_image = [i for i in avoid if contains_point(result, i, attempt_seed, height)]
            if on_image:
                log.append(f"attempt {attempt}: coordinate point(s) p{on_image} on the image")
                continue
            if not contains_point(result, 4, attempt_seed, height):
                log.append(f"attempt {attempt}: p4 is not on the image")
                continue
            degree = image_degree(result, attempt_seed, height)
            if degree != expected:
                log.append(f"attempt {attempt}: image degree {degree}, expected {expected}")
                continue
            if not is_birational(result, attempt_seed, height):
                log.append(f"attempt {attempt}: the re-embedding is not birational")
                continue
        except (NotGenericallyFinite, SearchExhausted) as e:
            log.append(f"attempt {attempt}: {e}")
            continue
        logger.info(f"Lambda_M built: a={a}, b={b}, beta={beta}, degree {degree}")
        return LambdaRealization(S, beta, gam, m_form, tuple(fibers), result, attempt_seed)
    for line in log:
        logger.warning(f"build_lambda_M: {line}")
    raise SearchExhausted(f"Lambda_M construction failed after {retries} attempts", log)
