import json

import pytest

from retifica.core.grammar import parse_biform, parse_multipoly
from retifica.interfaces.models import ParamSurface, RunConfig
from retifica.surfaces import make_surface
from retifica.util.descriptors import surface_to_dict

# (sv, su, tv, H, tu) with H = 2sv + 3su - tv
SEGRE_Z = ("s*v", "s*u", "t*v", "2*s*v + 3*s*u - t*v", "t*u")
PLANE_Z = ("0", "0", "s*u", "s*v", "t*u")
QUARTIC = ("s^2*u", "s^2*v", "s*t*u + t^2*v", "t^2*u")
SEGRE_SCROLL = ("s*u", "s*v", "t*u", "t*v")
PLANE_P3 = ("s*u", "s*v", "t*u", "s*u + 2*s*v - 3*t*u")


def surface(forms, bidegree) -> ParamSurface:
    return make_surface([parse_biform(f, bidegree) for f in forms])


@pytest.fixture
def segre_z() -> ParamSurface:
    return surface(SEGRE_Z, (1, 1))


@pytest.fixture
def plane_z() -> ParamSurface:
    return ParamSurface(tuple(parse_biform(f, (1, 1)) for f in PLANE_Z))


@pytest.fixture
def quartic() -> ParamSurface:
    return surface(QUARTIC, (2, 1))


@pytest.fixture
def segre_scroll() -> ParamSurface:
    return surface(SEGRE_SCROLL, (1, 1))


@pytest.fixture
def plane_p3() -> ParamSurface:
    return surface(PLANE_P3, (1, 1))


@pytest.fixture
def quadric_monoid():
    return parse_multipoly("x0*x4 - x1*x2")


@pytest.fixture
def config() -> RunConfig:
    return RunConfig(seed=7, trials=20, beta_max=1, d_max=3)


@pytest.fixture
def write_surface(tmp_path):
    def write(S: ParamSurface, name: str = "surface.json") -> str:
        path = tmp_path / name
        path.write_text(json.dumps(surface_to_dict(S)))
        return str(path)

    return write
