import importlib

import pytest

from retifica.core.grammar import parse_biform
from retifica.core.rand import random_biform, rng_for
from retifica.core.matrix import ExactMatrix
from retifica.cremona import (
    apply_to_surface,
    cremona_from_monoid,
    identity_cremona,
    linear_cremona,
    verify_cremona,
)
from retifica.errors import SearchExhausted, VerificationError
from retifica.interfaces.models import (
    ParamSurface,
    ProjectionStep,
    RectificationStep,
    RectificationTrace,
    RunConfig,
)
from retifica.monoids import make_monoid
from retifica.procedures import (
    check_endpoints,
    demo_orbit,
    normalize_position,
    random_monoid_cremona,
    rectify,
    rectify_step,
)
from retifica.surfaces import contains_point, image_degree, make_surface


def test_normalize_moves_quartic_off_coordinate_points(quartic):
    moved, omega = normalize_position(quartic, seed=1)
    assert omega.degrees == (1, 1)
    assert moved.bidegree == quartic.bidegree
    assert not any(contains_point(moved, i) for i in range(4))
    assert image_degree(moved) == 4


def test_normalize_is_seeded(quartic):
    first, _ = normalize_position(quartic, seed=4)
    again, _ = normalize_position(quartic, seed=4)
    assert first == again


def test_normalize_rejects_planes_and_wrong_ambient(plane_p3, segre_z):
    with pytest.raises(ValueError):
        normalize_position(plane_p3)
    with pytest.raises(ValueError):
        normalize_position(segre_z)


def test_rectify_step_rejects_scrolls(segre_scroll, segre_z, config):
    with pytest.raises(ValueError):
        rectify_step(segre_scroll, config)
    with pytest.raises(ValueError):
        rectify(segre_z, config)


def test_scroll_is_already_rectified(segre_scroll, config):
    trace = rectify(segre_scroll, config)
    assert trace.steps == []
    assert trace.maps == []
    assert trace.final == segre_scroll
    assert check_endpoints(trace) == 0


def _linear_trace(S, final):
    omega = linear_cremona(ExactMatrix([[1, 1, 0, 0], [0, 1, 2, 0], [0, 0, 1, -1], [3, 0, 0, 1]]))
    step = RectificationStep(S, omega, parse_biform("s*u"), [], final, 0)
    return omega, RectificationTrace(S, final, [step], 0)


def test_endpoint_check_follows_the_maps(segre_scroll):
    omega, _ = _linear_trace(segre_scroll, segre_scroll)
    moved = make_surface([c.substitute(list(segre_scroll.forms)) for c in omega.forward.components])
    _, trace = _linear_trace(segre_scroll, moved)
    assert check_endpoints(trace, points=10) == 10


def test_endpoint_check_reports_mismatch(segre_scroll):
    _, trace = _linear_trace(segre_scroll, segre_scroll)
    with pytest.raises(VerificationError):
        check_endpoints(trace)


def test_random_monoid_cremona(config):
    omega, monoid = random_monoid_cremona(1, config, seed=0)
    assert monoid is None
    assert omega.forward.components == identity_cremona().forward.components
    omega, monoid = random_monoid_cremona(2, config, seed=5)
    assert monoid.vertexes == (0, 4)
    assert monoid.d == 2
    assert verify_cremona(omega, trials=20)
    with pytest.raises(ValueError):
        random_monoid_cremona(0, config, seed=0)


def test_demo_orbit_with_identity(segre_scroll, config):
    result = demo_orbit(segre_scroll, 1, None, config)
    assert result.status == "rectified"
    assert result.monoids == []
    assert result.surface == segre_scroll
    assert result.ruling_degree == 1
    assert result.trace.steps == []


def test_demo_orbit_chains_a_second_map(segre_scroll, config):
    result = demo_orbit(segre_scroll, 1, 1, config)
    assert result.status == "rectified"
    assert result.cremona.forward.components == identity_cremona().forward.components
    assert result.surface == segre_scroll


@pytest.mark.slow
def test_quartic_search_is_bounded(quartic):
    config = RunConfig(seed=7, trials=20, beta_max=1, d_max=3, draws=5, retries=3)
    with pytest.raises(SearchExhausted) as info:
        rectify_step(quartic, config)
    assert info.value.log


@pytest.mark.slow
def test_quartic_rectifies_or_reports_the_bound(quartic):
    config = RunConfig(seed=7, beta_max=2, d_max=6, draws=10, retries=5)
    try:
        trace = rectify(quartic, config)
    except SearchExhausted as e:
        pytest.skip(f"search-bounded: {e}")
    assert trace.final.ruling_degree == 1
    assert len(trace.steps) == 1
    for step in trace.steps:
        for p in step.projections:
            assert verify_cremona(p.cremona, trials=100)
    assert check_endpoints(trace) == 20


def _shift_in(current, gamma, k):
    """Drop the first coordinate, multiply by a fiber and append Gamma M."""
    a, b = current.bidegree
    fiber = parse_biform(f"u + {k + 2}*v")
    m = random_biform(rng_for(k, "m"), a - 1, b)
    return make_surface([f * fiber for f in current.forms[1:]] + [gamma * m])


def _fake_projections(monkeypatch, surface_at):
    calls = []

    def project(current, gamma, k, config, seed, log):
        calls.append(k)
        return ProjectionStep(k, 1, 2, seed, None, None, identity_cremona(), surface_at(current, gamma, k))

    monkeypatch.setattr(importlib.import_module("retifica.procedures.rectify"), "_project_once", project)
    return calls


@pytest.mark.parametrize("four_projection", [False, True])
def test_gamma_comes_off_after_four_projections(quartic, config, monkeypatch, four_projection):
    calls = _fake_projections(monkeypatch, _shift_in)
    config.four_projection = four_projection
    step = rectify_step(quartic, config)
    assert calls == [0, 1, 2, 3]
    assert step.result.ruling_degree == 1
    assert len(step.projections) == 4


def test_early_drop_stops_the_default_schedule(quartic, segre_scroll, config, monkeypatch):
    calls = _fake_projections(monkeypatch, lambda current, gamma, k: segre_scroll if k else current)
    step = rectify_step(quartic, config)
    assert calls == [0, 1]
    assert step.result == segre_scroll


def test_early_drop_breaks_the_four_projection_schedule(quartic, segre_scroll, config, monkeypatch):
    _fake_projections(monkeypatch, lambda current, gamma, k: segre_scroll if k else current)
    config.four_projection = True
    with pytest.raises(VerificationError):
        rectify_step(quartic, config)


def test_common_gamma_is_divided_out(quartic, segre_scroll, config, monkeypatch):
    calls = _fake_projections(
        monkeypatch, lambda current, gamma, k: ParamSurface(tuple(gamma * f for f in segre_scroll.forms))
    )
    step = rectify_step(quartic, config)
    assert calls == [0]
    assert step.result == segre_scroll


def test_ruling_degree_must_drop(quartic, config, monkeypatch):
    _fake_projections(monkeypatch, lambda current, gamma, k: current)
    with pytest.raises(VerificationError):
        rectify_step(quartic, config)


def test_endpoint_check_through_a_quadric_map(plane_p3, quadric_monoid):
    omega = cremona_from_monoid(make_monoid(quadric_monoid, (0, 4)))
    final = apply_to_surface(omega, plane_p3)
    projection = ProjectionStep(0, 1, 2, 0, None, None, omega.inverted(), final)
    step = RectificationStep(plane_p3, identity_cremona(), parse_biform("s*u"), [projection], final, 0)
    trace = RectificationTrace(plane_p3, final, [step], 0)
    assert trace.maps[1].forward is omega.forward
    assert check_endpoints(trace, points=10) == 10
