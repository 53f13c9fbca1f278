from fractions import Fraction

import pytest
from mpmath import mp, mpf

from retifica.interfaces.models import LambdaRealization, LemmaParams
from retifica.lemmas import (
    a_quadratic,
    beta_of,
    check_cubic_remainder,
    check_dimension_inequality,
    check_quadratic_inequality,
    cubic_real_roots,
    cubic_residual,
    default_h0,
    dim_bound_report,
    dim_Md_poly,
    estimate_ell_m,
    ell_m_stability,
    non_equivalence_witness,
    quadratic_roots,
    threshold_h,
    xi_constant,
)
from retifica.monoids import dim_formula_Md, dim_formula_Mdpq


def test_xi_matches_published_digits():
    xi = xi_constant(50)
    assert abs(xi - mpf("2.567468375")) < mpf("1e-9")
    assert mpf("2.5674683") < xi < mpf("2.5674684")


def test_xi_is_a_root():
    with mp.workdps(50):
        assert abs(cubic_residual(xi_constant(50), 50)) < mpf(10) ** -45


def test_cubic_has_one_real_root():
    assert cubic_real_roots() == 1


def test_xi_rejects_low_precision():
    with pytest.raises(ValueError):
        xi_constant(10)


def test_quadratic_roots():
    a1, a2 = quadratic_roots(50)
    assert abs(a2 - mpf("0.8628701083")) < mpf("1e-9")
    assert a1 < 0 < a2 < 1


def test_quadratic_in_a_is_positive_on_integers():
    assert all(a_quadratic(a) > 0 for a in range(1, 1001))


@pytest.mark.parametrize("h, beta, eps", [(1, 3, "0.4325"), (10, 26, "0.3253")])
def test_beta_of(h, beta, eps):
    got_beta, got_eps = beta_of(2 * h, 2)
    assert got_beta == beta
    assert abs(got_eps - mpf(eps)) < mpf("1e-4")
    assert 0 < got_eps < 1


@pytest.mark.parametrize("d, a", [(3, 2), (0, 1)])
def test_beta_of_rejects(d, a):
    with pytest.raises(ValueError):
        beta_of(d, a)


def test_quadratic_inequality_values():
    assert check_quadratic_inequality(1, 1, 257, 100).lhs == Fraction(18949, 2)
    report = check_quadratic_inequality(2, 1, 65, 50)
    assert report.margin == 16000
    assert report.verdict


def test_quadratic_inequality_grid():
    for a in range(1, 7):
        for b in range(1, 7):
            for h in range(1, 101):
                beta, _ = beta_of(a * h, a)
                assert check_quadratic_inequality(a, b, beta, a * h).verdict, (a, b, h)


def test_cubic_remainder_grid():
    for h in range(1, 101):
        for k in range(1, 100):
            assert check_cubic_remainder(h, Fraction(k, 100), 2).verdict, (h, k)


def test_cubic_remainder_boundary_and_range():
    assert check_cubic_remainder(1, 0, 2).margin == 0
    assert not check_cubic_remainder(1, 0, 2).verdict
    assert check_cubic_remainder(1, "0.5", 2).verdict
    with pytest.raises(ValueError):
        check_cubic_remainder(1, 1, 2)
    with pytest.raises(ValueError):
        check_cubic_remainder(0, "0.5", 2)


def test_dim_polynomial_agrees_with_formula():
    for d in range(2, 11):
        assert dim_Md_poly(d) == dim_formula_Md(d)


def test_dimension_inequality_asymptotic():
    d = 2 * 100
    beta, _ = beta_of(d, 2)
    report = check_dimension_inequality(2, 1, beta, d)
    assert report.verdict
    assert report.params["h0_estimated"]


def test_dimension_inequality_small_degree_is_reported():
    report = check_dimension_inequality(2, 1, 3, 4)
    assert report.verdict == (report.margin > 0)


def test_dimension_inequality_with_exact_h0():
    estimate = check_dimension_inequality(2, 1, 1, 10)
    exact = check_dimension_inequality(2, 1, 1, 10, h0=default_h0(2, 1, 1, 10) + 5)
    assert estimate.margin - exact.margin == 5
    assert not exact.params["h0_estimated"]


def test_dimension_inequality_rejects():
    with pytest.raises(ValueError):
        check_dimension_inequality(1, 1, 1, 10)


@pytest.mark.slow
def test_thresholds_are_finite_on_the_grid():
    for a in range(2, 7):
        for b in range(1, 7):
            h = threshold_h(a, b, 200)
            assert h is not None, (a, b)
            beta, _ = beta_of(a * h, a)
            assert check_dimension_inequality(a, b, beta, a * h).verdict


def test_threshold_smallest():
    h = threshold_h(2, 1, 120)
    assert h is not None
    if h > 1:
        beta, _ = beta_of(2 * (h - 1), 2)
        assert not check_dimension_inequality(2, 1, beta, 2 * (h - 1)).verdict


def test_bound_report_printed_form_omits_one():
    report = dim_bound_report(10, 4, 30)
    assert report["printed_minus_valid"] == 1
    assert dim_bound_report(2, 5, 6)["valid"] == dim_Md_poly(2) - 6


@pytest.mark.parametrize("d", [6, 10, 24])
def test_dimension_inequality_uses_the_valid_bound(d):
    h0 = default_h0(2, 1, 1, d)
    report = check_dimension_inequality(2, 1, 1, d)
    bound = dim_bound_report(d, 6, h0)
    assert report.lhs == bound["valid"] + dim_formula_Mdpq(d)
    assert report.lhs == bound["printed"] - 1 + dim_formula_Mdpq(d)


def test_lemma_params():
    p = LemmaParams(a=2, b=1, beta=3, d=4)
    assert p.h == 2
    assert p.delta == 10


def test_non_equivalence_witness_branches():
    w = non_equivalence_witness(2, 4, 7)
    assert w.surface_degree == 16
    assert w.surface_criterion == Fraction(12, 16)
    assert w.scroll_criterion == Fraction(12, 14)
    assert w.branch == "terminal-pairs"
    assert not w.equivalent
    w = non_equivalence_witness(2, 4, 6)
    assert w.scroll_degree == 12
    assert w.branch == "degree-comparison"
    with pytest.raises(ValueError):
        non_equivalence_witness(2, 3, 7)
    with pytest.raises(ValueError):
        non_equivalence_witness(1, 4, 7)


def test_ell_m_segre_fit_is_exact(segre_z):
    fit = estimate_ell_m(segre_z, range(2, 6), a=1, b=1, beta=0)
    assert fit.h0 == [(d + 1) ** 2 for d in range(2, 6)]
    assert fit.ell == 2
    assert fit.m == 1
    assert fit.residual_scale == 0


def test_ell_m_needs_four_degrees(segre_z):
    with pytest.raises(ValueError):
        estimate_ell_m(segre_z, range(2, 5))


@pytest.mark.slow
def test_ell_m_stability_across_beta(quartic):
    from retifica.procedures.rectify import normalize_position
    from retifica.surfaces import build_lambda_M

    moved, _ = normalize_position(quartic, seed=1)
    family = [build_lambda_M(moved, beta, seed=1) for beta in (1, 2)]
    assert all(isinstance(lam, LambdaRealization) for lam in family)
    report = ell_m_stability(family, range(2, 6))
    assert report["betas"] == [1, 2]
    assert len(report["ell"]) == 2
