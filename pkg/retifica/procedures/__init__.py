from .orbit import demo_orbit, random_monoid_cremona
from .rectify import check_endpoints, normalize_position, rectify, rectify_step

__all__ = [
    "normalize_position",
    "rectify_step",
    "rectify",
    "check_endpoints",
    "demo_orbit",
    "random_monoid_cremona",
]
