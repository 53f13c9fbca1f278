import pytest

from retifica.core.forms import BiForm
from retifica.core.grammar import parse_biform
from retifica.core.rand import rng_for
from retifica.errors import NotGenericallyFinite, SearchExhausted
from retifica.procedures.rectify import normalize_position
from retifica.surfaces import (
    build_lambda_M,
    contains_point,
    image_degree,
    is_birational,
    make_surface,
    point_in_image,
    projection_degree,
    strip_common_factor,
)
from retifica.util.sym import count_common_zeros, gcd_forms


def forms(*texts, bidegree=None):
    return [parse_biform(t, bidegree) for t in texts]


def test_make_surface_strips_fixed_component():
    S = make_surface(forms("s^2*u", "s^2*v", "s*t*u", "s*t*v"))
    assert S.bidegree == (1, 1)
    assert S.forms[0] == parse_biform("s*u")


def test_strip_common_factor_keeps_zero_forms():
    out = strip_common_factor(forms("s*u", "s*v", "0", bidegree=(1, 1)))
    assert out[2].is_zero()
    assert out[2].bidegree == (0, 1)


@pytest.mark.parametrize(
    "texts",
    [
        ("s*u", "s^2*u", "t*v"),
        ("s*u", "2*s*u", "-s*u"),
        ("s*u", "t*u", "0"),
        ("s*u", "t*v"),
    ],
)
def test_make_surface_rejects(texts):
    with pytest.raises(ValueError):
        make_surface(forms(*texts, bidegree=(1, 1)) if "0" in texts else forms(*texts))


def test_scroll_degree(segre_scroll):
    assert image_degree(segre_scroll) == 2
    assert is_birational(segre_scroll)


def test_plane_degree_discounts_base_point(plane_p3):
    assert image_degree(plane_p3) == 1


def test_quartic_degree(quartic):
    assert quartic.ruling_degree == 2
    assert image_degree(quartic) == 4
    assert is_birational(quartic)


def test_point_membership(segre_scroll):
    assert point_in_image(segre_scroll, [1, 1, 1, 1])
    assert point_in_image(segre_scroll, [1, 0, 0, 0])
    assert not point_in_image(segre_scroll, [1, 0, 0, 1])
    with pytest.raises(ValueError):
        point_in_image(segre_scroll, [0, 0, 0, 0])


def test_quartic_passes_through_every_coordinate_point(quartic):
    assert all(contains_point(quartic, i) for i in range(4))


def test_segre_projection_from_p4(segre_z):
    assert projection_degree(segre_z, 4) == 1
    assert not contains_point(segre_z, 0)
    assert contains_point(segre_z, 4)


def test_common_zeros_of_a_pencil():
    rng = rng_for(0, "test")
    assert count_common_zeros(forms("s*u", "t*v"), rng) == 2
    assert count_common_zeros(forms("s*u", "s*v", "t*u", "t*v"), rng) == 0
    with pytest.raises(NotGenericallyFinite):
        count_common_zeros(forms("s*u", "s*v"), rng)


def test_gcd_forms_is_primitive():
    assert gcd_forms(forms("2*s*u + 2*t*u", "-4*s*v - 4*t*v")) == parse_biform("s + t")


def test_lambda_rejects_bad_input(segre_scroll, quartic):
    with pytest.raises(ValueError):
        build_lambda_M(segre_scroll, 1)
    with pytest.raises(ValueError):
        build_lambda_M(quartic, 0)
    with pytest.raises(ValueError):
        build_lambda_M(quartic, 1, gamma=parse_biform("s"))
    with pytest.raises(ValueError):
        build_lambda_M(quartic, 1, avoid=(4,))


@pytest.mark.slow
@pytest.mark.parametrize("beta", [1, 2])
def test_lambda_degree(quartic, beta):
    moved, _ = normalize_position(quartic, seed=1)
    lam = build_lambda_M(moved, beta, seed=1)
    assert lam.expected_degree == 2 * (2 + beta)
    assert image_degree(lam.result, seed=99) == lam.expected_degree
    assert lam.result.bidegree == (2, 1 + beta)
    assert len(lam.fibers) == beta
    assert all(f.bidegree == (0, 1) for f in lam.fibers)
    assert lam.gamma.bidegree == (1, 1)
    assert lam.m_form.bidegree == (1, beta)
    assert isinstance(lam.fiber_product, BiForm)


def test_four_to_one_map_is_not_birational():
    S = make_surface(forms("s^2*u^2", "s^2*v^2", "t^2*u^2", "t^2*v^2"))
    assert not is_birational(S)


@pytest.mark.slow
def test_lambda_projections(quartic):
    moved, _ = normalize_position(quartic, seed=1)
    lam = build_lambda_M(moved, 1, seed=1)
    assert contains_point(lam.result, 4)
    assert is_birational(lam.result)
    assert projection_degree(lam.result, 0) == 6
    assert projection_degree(lam.result, 4) == 4


@pytest.mark.slow
def test_lambda_rejects_non_birational_draws(quartic, monkeypatch):
    moved, _ = normalize_position(quartic, seed=1)
    monkeypatch.setattr("retifica.surfaces.is_birational", lambda *args, **kwargs: False)
    with pytest.raises(SearchExhausted) as info:
        build_lambda_M(moved, 1, seed=1)
    assert any("not birational" in line for line in info.value.log)
