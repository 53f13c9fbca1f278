from typing import List, Optional, Tuple

from retifica.core.rand import derive_seed, random_rational, rng_for
from retifica.cremona import apply_to_surface, compose, cremona_from_monoid, identity_cremona
from retifica.errors import SearchExhausted, VerificationError
from retifica.interfaces.models import CremonaMap, Monoid, OrbitResult, ParamSurface, RunConfig
from retifica.logger import logger
from retifica.monoids import VERTEXES, make_monoid, monoid_basis
from retifica.procedures.rectify import rectify

__all__ = ["random_monoid_cremona", "demo_orbit"]


def random_monoid_cremona(d: int, config: RunConfig, seed: int) -> Tuple[CremonaMap, Optional[Monoid]]:
    """
    Cremona map of a random double-vertex monoid of degree ``d``; the
    identity for ``d = 1``.

    :raises ValueError: ``d < 1``.
    :raises SearchExhausted: No draw gave a usable monoid.
    """
    if d < 1:
        raise ValueError(f"Map degree must be at least 1, got {d}")
    if d == 1:
        return identity_cremona(), None
    system = monoid_basis(d, VERTEXES)
    rng = rng_for(seed, "orbit-monoid", d)
    log = []
    for draw in range(config.draws):
        coeffs = [random_rational(rng, config.height) for _ in system.basis]
        if not any(coeffs):
            continue
        f = system.element(coeffs).primitive()
        try:
            monoid = make_monoid(f, VERTEXES)
            return cremona_from_monoid(monoid, config.trials, derive_seed(seed, draw)), monoid
        except (ValueError, VerificationError) as e:
            log.append(f"draw {draw}: {e}")
            logger.warning(f"random_monoid_cremona: {log[-1]}")
    raise SearchExhausted(f"No usable degree {d} monoid in {config.draws} draws", log)


def demo_orbit(scroll: ParamSurface, d1: int, d2: Optional[int], config: RunConfig) -> OrbitResult:
    """
    Push a scroll through a random monoid Cremona map (chained with a second
    one when ``d2`` is given) and rectify the result again.

    The rectification is reported as ``"search-bounded"`` when the search
    exhausts its bounds.
    """
    if scroll.ambient_dim != 3:
        raise ValueError(f"Expected a surface in P3, got P{scroll.ambient_dim}")
    omega, first = random_monoid_cremona(d1, config, derive_seed(config.seed, "orbit", 1))
    monoids: List[Monoid] = [first] if first else []
    if d2:
        second, monoid = random_monoid_cremona(d2, config, derive_seed(config.seed, "orbit", 2))
        omega = compose(second, omega)
        if monoid:
            monoids.append(monoid)
    surface = apply_to_surface(omega, scroll, config.seed, config.height)
    logger.info(f"demo_orbit: ruling degree {scroll.ruling_degree} -> {surface.ruling_degree}")
    try:
        trace = rectify(surface, config)
    except SearchExhausted as e:
        logger.warning(f"demo_orbit: rectification is search-bounded: {e}")
        return OrbitResult(scroll, omega, monoids, surface, "search-bounded", None, str(e))
    return OrbitResult(scroll, omega, monoids, surface, "rectified", trace)
