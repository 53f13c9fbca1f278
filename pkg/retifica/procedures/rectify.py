import random
import time
from typing import List, Optional, Sequence, Tuple

from retifica.core.forms import BiForm
from retifica.core.matrix import ExactMatrix
from retifica.core.rand import derive_seed, random_biform, random_rational, rng_for
from retifica.cremona import (
    apply_to_surface,
    cremona_from_monoid,
    identity_cremona,
    linear_cremona,
    projectively_equal,
)
from retifica.errors import NotGenericallyFinite, SearchExhausted, VerificationError
from retifica.interfaces.models import (
    CremonaMap,
    ParamSurface,
    ProjectionStep,
    RectificationStep,
    RectificationTrace,
    RunConfig,
)
from retifica.logger import logger
from retifica.monoids import find_double_vertex_monoid
from retifica.surfaces import build_lambda_M, contains_point, image_degree, make_surface
from retifica.util.sym import exact_divide

__all__ = ["normalize_position", "rectify_step", "rectify", "check_endpoints"]

ENDPOINT_POINTS = 20


def _random_invertible(rng: random.Random, height: int) -> ExactMatrix:
    while True:
        m = ExactMatrix([[random_rational(rng, height) for _ in range(4)] for _ in range(4)])
        if m.rank() == 4:
            return m


def _coordinate_points_on(S: ParamSurface, seed: int, height: int) -> List[int]:
    return [i for i in range(4) if contains_point(S, i, seed, height)]


def normalize_position(
    S: ParamSurface, seed: int = 0, height: int = 20, retries: int = 10
) -> Tuple[ParamSurface, CremonaMap]:
    """
    Move ``S`` so that no coordinate point of P3 lies on its image.

    The identity is tried first; otherwise seeded random projective-linear
    changes of coordinates are drawn until every coordinate point is off the
    image, checked by exact fiber solving.

    :param S: A surface in P3.
    :param seed: Seed for the coordinate changes.
    :return: The moved surface and the linear map that moved it.
    :raises ValueError: ``S`` is not in P3 or its image has degree below 2.
    :raises SearchExhausted: ``retries`` draws all failed.
    """
    if S.ambient_dim != 3:
        raise ValueError(f"Expected a surface in P3, got P{S.ambient_dim}")
    degree = image_degree(S, seed, height)
    if degree < 2:
        raise ValueError(f"Image degree {degree} < 2: the surface is a plane")
    on_image = _coordinate_points_on(S, seed, height)
    if not on_image:
        logger.debug("normalize_position: already in general position")
        return S, identity_cremona()
    log = [f"identity: p{on_image} on the image"]
    rng = rng_for(seed, "normalize")
    for attempt in range(retries):
        omega = linear_cremona(_random_invertible(rng, height))
        forms = [c.substitute(list(S.forms)) for c in omega.forward.components]
        moved = ParamSurface(tuple(forms))
        on_image = _coordinate_points_on(moved, seed, height)
        if not on_image:
            logger.info(f"normalize_position: moved off the coordinate points after {attempt + 1} draw(s)")
            return moved, omega
        log.append(f"attempt {attempt}: p{on_image} on the image")
        logger.warning(f"normalize_position: {log[-1]}")
    raise SearchExhausted(f"No general position found in {retries} draws", log)


def _divides_all(gamma: BiForm, forms: Sequence[BiForm]) -> bool:
    try:
        for f in forms:
            exact_divide(f, gamma)
    except ValueError:
        return False
    return True


def _project_once(
    current: ParamSurface,
    gamma: BiForm,
    k: int,
    config: RunConfig,
    seed: int,
    log: List[str],
) -> ProjectionStep:
    """
    Search ``beta`` then ``d`` ascending for a double-vertex monoid through
    the re-embedded surface and push ``current`` through the inverse map.
    """
    for beta in range(1, config.beta_max + 1):
        try:
            lam = build_lambda_M(
                current,
                beta,
                derive_seed(seed, "lambda", k),
                gamma,
                config.height,
                config.retries,
                avoid=(0, 1, 2, 3) if k == 0 else (0,),
            )
        except SearchExhausted as e:
            log.extend(e.log)
            log.append(f"k={k} beta={beta}: {e}")
            continue
        for d in range(2, config.d_max + 1):
            started = time.perf_counter()
            candidate_seed = derive_seed(seed, "candidate", k, beta, d)
            monoid = find_double_vertex_monoid(lam.result, d, candidate_seed, config.draws, config.height)
            if monoid is None:
                log.append(f"k={k} beta={beta} d={d}: no double-vertex monoid")
                logger.debug(log[-1])
                continue
            try:
                omega = cremona_from_monoid(monoid, config.trials, candidate_seed)
                surface = apply_to_surface(omega.inverted(), current, candidate_seed, config.height)
            except (ValueError, VerificationError, SearchExhausted) as e:
                log.append(f"k={k} beta={beta} d={d}: {e}")
                logger.warning(log[-1])
                continue
            logger.info(
                f"Projection {k}: beta={beta}, d={d}, map degrees {omega.degrees}, "
                f"bidegree {current.bidegree} -> {surface.bidegree}"
            )
            return ProjectionStep(
                k, beta, d, candidate_seed, lam, monoid, omega, surface, time.perf_counter() - started
            )
    raise SearchExhausted(
        f"No double-vertex monoid with beta <= {config.beta_max} and d <= {config.d_max}", log
    )


def rectify_step(S: ParamSurface, config: RunConfig, seed: Optional[int] = None) -> RectificationStep:
    """
    Lower the ruling degree of ``S`` by one.

    After normalization a section ``Gamma`` of bidegree ``(1, 1)`` is drawn.
    Each projection re-embeds the current surface with ``Gamma`` in the last
    coordinate, finds a double-vertex monoid through it and pushes the
    surface through the inverse Cremona map, which replaces the first
    coordinate by ``Gamma M``. Projections stop once ``Gamma`` is a common
    factor; the surface constructor usually strips it as a fixed component,
    which shows as a drop of the ruling degree. With
    ``config.four_projection`` all four projections must run first.

    :raises ValueError: ``S`` is already a scroll or not in P3.
    :raises SearchExhausted: A projection found no monoid within the bounds.
    :raises VerificationError: ``Gamma`` came off before the fourth
        projection under ``config.four_projection``, or the ruling degree did
        not drop by one.
    """
    seed = config.seed if seed is None else seed
    if S.ambient_dim != 3:
        raise ValueError(f"Expected a surface in P3, got P{S.ambient_dim}")
    a = S.ruling_degree
    if a < 2:
        raise ValueError(f"Ruling degree {a}: the surface is already a scroll")
    start = S
    S, normalization = normalize_position(S, derive_seed(seed, "normalize"), config.height, config.retries)
    gamma = random_biform(rng_for(seed, "gamma"), 1, 1, config.height)
    log: List[str] = []
    projections: List[ProjectionStep] = []
    current = S
    for k in range(4):
        step = _project_once(current, gamma, k, config, seed, log)
        projections.append(step)
        current = step.surface
        if current.ruling_degree < a:
            logger.info(f"Gamma came off as a fixed component after {k + 1} projection(s)")
            break
        if not config.four_projection and _divides_all(gamma, current.forms):
            logger.info(f"Gamma divides every form after {k + 1} projection(s)")
            break
    if config.four_projection and len(projections) < 4:
        raise VerificationError(f"Gamma came off after {len(projections)} of four projections")
    if current.ruling_degree == a and _divides_all(gamma, current.forms):
        current = make_surface([exact_divide(f, gamma) for f in current.forms], seed, config.height)
    if current.ruling_degree != a - 1:
        raise VerificationError(
            f"Ruling degree {current.ruling_degree} after {len(projections)} projection(s), expected {a - 1}"
        )
    logger.info(f"Ruling degree {a} -> {a - 1}, bidegree {current.bidegree}")
    return RectificationStep(start, normalization, gamma, projections, current, seed, log)


def check_endpoints(trace: RectificationTrace, points: int = ENDPOINT_POINTS, height: int = 20) -> int:
    """
    Push random points of the initial surface through every map of the trace
    and compare with the final parametrization at the same parameters.

    :return: The number of points checked.
    :raises VerificationError: A point lands off the final parametrization.
    """
    maps = trace.maps
    if not maps:
        return 0
    rng = rng_for(trace.seed, "endpoints")
    checked = skipped = 0
    while checked < points and checked + skipped < 3 * points:
        s, u = random_rational(rng, height), random_rational(rng, height)
        y = trace.initial.point(s, 1, u, 1)
        for omega in maps:
            if not any(y):
                break
            y = omega.forward(y)
        z = trace.final.point(s, 1, u, 1)
        if not any(y) or not any(z):
            skipped += 1
            continue
        if not projectively_equal(y, z):
            raise VerificationError(f"Endpoint mismatch at parameters s={s}, u={u}")
        checked += 1
    if skipped:
        logger.warning(f"check_endpoints: {skipped} indeterminacy hit(s)")
    if not checked:
        raise VerificationError("No usable point for the endpoint check")
    return checked


def rectify(S: ParamSurface, config: RunConfig) -> RectificationTrace:
    """
    Apply :func:`rectify_step` until the ruling degree is one, then check
    endpoint consistency of the whole chain.

    :raises ValueError: ``S`` is not in P3.
    """
    if S.ambient_dim != 3:
        raise ValueError(f"Expected a surface in P3, got P{S.ambient_dim}")
    steps: List[RectificationStep] = []
    current = S
    while current.ruling_degree > 1:
        logger.info(f"Rectification step {len(steps) + 1}: bidegree {current.bidegree}")
        step = rectify_step(current, config, derive_seed(config.seed, "step", len(steps)))
        steps.append(step)
        current = step.result
        try:
            logger.info(f"Surface degree {image_degree(current, config.seed, config.height)}")
        except (NotGenericallyFinite, SearchExhausted) as e:
            logger.warning(f"Could not compute the surface degree: {e}")
    trace = RectificationTrace(S, current, steps, config.seed)
    check_endpoints(trace, height=config.height)
    return trace
