"""
Exact and high-precision checks of the dimension counts behind the
existence of double-vertex monoids through a re-embedded ruled surface.

Rational quantities are evaluated with :class:`fractions.Fraction`; anything
involving the cubic root ``xi`` is evaluated with :mod:`mpmath` at a
configurable number of digits.
"""

from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import mpmath
from mpmath import mp, mpf

from retifica.interfaces.models import BoundReport, EllMFit, LambdaRealization, ParamSurface, WitnessVerdict
from retifica.logger import logger
from retifica.monoids import dim_formula_Mdpq, monoid_basis, restriction_rank

__all__ = [
    "DEFAULT_PRECISION",
    "xi_constant",
    "cubic_residual",
    "cubic_real_roots",
    "quadratic_roots",
    "a_quadratic",
    "beta_of",
    "check_quadratic_inequality",
    "check_cubic_remainder",
    "dim_Md_poly",
    "default_h0",
    "check_dimension_inequality",
    "threshold_h",
    "dim_bound_report",
    "estimate_ell_m",
    "ell_m_stability",
    "non_equivalence_witness",
]

DEFAULT_PRECISION = 50

Number = Union[int, Fraction, float, str, mpf]


def _mpf(x: Number) -> mpf:
    if isinstance(x, Fraction):
        return mpf(x.numerator) / x.denominator
    return mpf(x)


@lru_cache(maxsize=None)
def xi_constant(precision: int = DEFAULT_PRECISION) -> mpf:
    """
    The real root of ``2x^3 - 6x^2 + 3x - 2``:
    ``1 + ((sqrt 7 + 3)/4)^(1/3) + (2 (sqrt 7 + 3))^(-1/3)``.
    """
    if precision < 30:
        raise ValueError(f"precision must be at least 30 digits, got {precision}")
    with mp.workdps(precision + 10):
        r7 = mpmath.sqrt(7)
        xi = 1 + mpmath.cbrt((r7 + 3) / 4) + 1 / mpmath.cbrt(2 * (r7 + 3))
    with mp.workdps(precision):
        return +xi


def cubic_residual(x: mpf, precision: int = DEFAULT_PRECISION) -> mpf:
    with mp.workdps(precision):
        return 2 * x**3 - 6 * x**2 + 3 * x - 2


def cubic_real_roots(lo: int = -10, hi: int = 10, steps: int = 2000) -> int:
    """Sign changes of ``2x^3 - 6x^2 + 3x - 2`` on a uniform grid of ``[lo, hi]``."""

    def p(x: Fraction) -> Fraction:
        return 2 * x**3 - 6 * x**2 + 3 * x - 2

    changes = 0
    previous = p(Fraction(lo))
    for k in range(1, steps + 1):
        current = p(Fraction(lo) + Fraction(hi - lo, steps) * k)
        if previous * current < 0 or current == 0:
            changes += 1
        previous = current
    return changes


def _a_coefficients(xi: mpf) -> Tuple[mpf, mpf, mpf]:
    A = 1 - 4 * xi + 2 * xi**2
    B = mpf(1) / 2 + mpf(7) / 2 * xi - mpf(3) / 2 * xi**2
    C = -xi
    return A, B, C


def a_quadratic(a: int, precision: int = DEFAULT_PRECISION) -> mpf:
    """``a^2 (1 - 4xi + 2xi^2) + a (1/2 + 7xi/2 - 3xi^2/2) - xi``."""
    xi = xi_constant(precision)
    with mp.workdps(precision):
        A, B, C = _a_coefficients(xi)
        return A * a * a + B * a + C


def quadratic_roots(precision: int = DEFAULT_PRECISION) -> Tuple[mpf, mpf]:
    """Roots ``a1 < 0 < a2`` of the quadratic in ``a``."""
    xi = xi_constant(precision)
    with mp.workdps(precision + 10):
        A, B, C = _a_coefficients(xi)
        disc = mpmath.sqrt(B * B - 4 * A * C)
        a1 = (-B - disc) / (2 * A)
        a2 = (-B + disc) / (2 * A)
    with mp.workdps(precision):
        return +a1, +a2


def beta_of(d: int, a: int, precision: int = DEFAULT_PRECISION) -> Tuple[int, mpf]:
    """
    ``beta = ceil(h xi)`` with ``h = d / a``, and ``eps' = beta - h xi``.

    :raises ValueError: ``a`` does not divide ``d`` or ``h < 1``.
    """
    if a < 1 or d % a:
        raise ValueError(f"a={a} must divide d={d}")
    h = d // a
    if h < 1:
        raise ValueError("h = d / a must be at least 1")
    xi = xi_constant(precision)
    with mp.workdps(precision):
        value = h * xi
        beta = int(mpmath.ceil(value))
        return beta, beta - value


def check_quadratic_inequality(a: int, b: int, beta: int, d: int) -> BoundReport:
    """``(ab + 1/2) d^2 + (-4a^2 b + 7a/2 - 1) beta d + a^2 (2ab - 3/2) beta^2 > 0``."""
    if a < 1 or b < 1:
        raise ValueError("a and b must be at least 1")
    half = Fraction(1, 2)
    value = (
        (a * b + half) * d * d
        + (-4 * a * a * b + Fraction(7, 2) * a - 1) * beta * d
        + a * a * (2 * a * b - Fraction(3, 2)) * beta * beta
    )
    return BoundReport("quadratic", value, Fraction(0), {"a": a, "b": b, "beta": beta, "d": d})


def check_cubic_remainder(h: int, eps: Number, a: int, precision: int = DEFAULT_PRECISION) -> BoundReport:
    """
    ``(a^3 eps / 6) [3h^2 (2xi^2 - 4xi + 1) + 6h eps (xi - 1) + 2 eps^2]``.

    :raises ValueError: ``eps`` outside ``[0, 1)`` or ``h < 1``.
    """
    if h < 1:
        raise ValueError("h must be at least 1")
    xi = xi_constant(precision)
    with mp.workdps(precision):
        e = _mpf(eps)
        if e < 0 or e >= 1:
            raise ValueError(f"eps' must lie in [0, 1), got {eps}")
        bracket = 3 * h * h * (2 * xi**2 - 4 * xi + 1) + 6 * h * e * (xi - 1) + 2 * e * e
        value = mpf(a) ** 3 * e / 6 * bracket
    return BoundReport("cubic_remainder", value, mpf(0), {"h": h, "eps": eps, "a": a})


def dim_Md_poly(k: Union[int, Fraction]) -> Fraction:
    """``k^3/3 + 3k^2/2 + 13k/6`` as a polynomial, defined for every ``k``."""
    k = Fraction(k)
    return k**3 / 3 + Fraction(3, 2) * k**2 + Fraction(13, 6) * k


def default_h0(a: int, b: int, beta: int, d: int, ell: Fraction = Fraction(0), m: Fraction = Fraction(0)) -> Fraction:
    """Estimate ``a(2b + beta)/2 d^2 - (a - 2)/2 beta d + ell d + m`` of the restriction rank."""
    delta = a * (2 * b + beta)
    return Fraction(delta, 2) * d * d - Fraction((a - 2) * beta, 2) * d + Fraction(ell) * d + Fraction(m)


def _printed_bound(d: int, delta: int, h0: Fraction) -> Fraction:
    return (
        delta * d * d
        - (delta * delta - 3 * delta) * d
        - (-Fraction(delta**3, 3) + Fraction(3, 2) * delta * delta - Fraction(13, 6) * delta)
        - h0
    )


def _valid_bound(d: int, delta: int, h0: Fraction) -> Fraction:
    cone_upper = dim_Md_poly(d - delta) if d >= delta else Fraction(-1)
    return dim_Md_poly(d) - h0 - cone_upper - 1


def check_dimension_inequality(
    a: int,
    b: int,
    beta: int,
    d: int,
    h0: Optional[Union[int, Fraction]] = None,
    ell: Fraction = Fraction(0),
    m: Fraction = Fraction(0),
) -> BoundReport:
    """
    ``lower(dim M_d(p0, S_M)^notC) + dim M_d(p0, p4) > dim M_d(p0)``.

    The lower bound is the closed form in ``delta = a(2b + beta)`` minus
    ``h0`` and minus one, which is the ``valid`` entry of
    :func:`dim_bound_report` whenever ``d >= delta``. For ``d < delta`` the
    closed form is evaluated as a polynomial. ``h0`` defaults to the estimate
    with the given ``ell, m``.
    """
    if a < 2 or b < 1 or beta < 1:
        raise ValueError("Need a >= 2, b >= 1, beta >= 1")
    delta = a * (2 * b + beta)
    estimated = h0 is None
    if estimated:
        h0 = default_h0(a, b, beta, d, ell, m)
    lower = _printed_bound(d, delta, Fraction(h0)) - 1
    lhs = lower + dim_formula_Mdpq(d)
    rhs = dim_Md_poly(d)
    return BoundReport(
        "dimension",
        lhs,
        rhs,
        {"a": a, "b": b, "beta": beta, "d": d, "h0": h0, "h0_estimated": estimated},
    )


def threshold_h(a: int, b: int, h_max: int = 200, precision: int = DEFAULT_PRECISION) -> Optional[int]:
    """
    Smallest ``h`` such that the dimension inequality with ``d = a h`` and
    ``beta = beta_of(d, a)`` holds for every ``h'`` in ``[h, h_max]``.
    """
    threshold = None
    for h in range(h_max, 0, -1):
        d = a * h
        beta, _ = beta_of(d, a, precision)
        if check_dimension_inequality(a, b, beta, d).verdict:
            threshold = h
        else:
            break
    logger.debug(f"threshold_h(a={a}, b={b}) = {threshold}")
    return threshold


def dim_bound_report(d: int, delta: int, h0: int, actual: Optional[int] = None) -> Dict[str, object]:
    """
    Lower bounds for the projective dimension of ``M_d(p, Z)^notC``.

    ``valid`` is ``dim M_d(p) - h0 - dim M_d(p, C_p(Z)) - 1`` with the cone
    system bounded by ``dim M_{d - delta}(p)`` (empty when ``d < delta``);
    ``printed`` is the closed form in ``delta`` without the final ``-1``.
    """
    valid = _valid_bound(d, delta, Fraction(h0))
    printed = _printed_bound(d, delta, Fraction(h0))
    report = {
        "d": d,
        "delta": delta,
        "h0": h0,
        "valid": valid,
        "printed": printed,
        "printed_minus_valid": printed - valid,
    }
    if actual is not None:
        report["actual"] = actual
        report["valid_holds"] = valid <= actual
        report["printed_holds"] = printed <= actual
    return report


def _least_squares_line(xs: Sequence[int], ys: Sequence[Fraction]) -> Tuple[Fraction, Fraction]:
    n = len(xs)
    sx = sum(Fraction(x) for x in xs)
    sy = sum(ys, Fraction(0))
    sxx = sum(Fraction(x * x) for x in xs)
    sxy = sum((Fraction(x) * y for x, y in zip(xs, ys)), Fraction(0))
    den = n * sxx - sx * sx
    slope = (n * sxy - sx * sy) / den
    intercept = (sy - slope * sx) / n
    return slope, intercept


def estimate_ell_m(
    Z: Union[ParamSurface, LambdaRealization],
    d_range: Iterable[int],
    a: Optional[int] = None,
    b: Optional[int] = None,
    beta: Optional[int] = None,
    vertex: int = 0,
) -> EllMFit:
    """
    Fit ``h0(d) - [a(2b + beta)/2 d^2 - (a - 2)/2 beta d]`` by ``ell d + m``.

    For a :class:`LambdaRealization` the parameters ``a, b, beta`` are read
    from it; for a bare surface they default to its bidegree and ``beta = 0``.

    :raises ValueError: Fewer than four degrees.
    """
    degrees = sorted(set(d_range))
    if len(degrees) < 4:
        raise ValueError("Need at least four consecutive degrees")
    if degrees != list(range(degrees[0], degrees[0] + len(degrees))):
        raise ValueError("Degrees must be consecutive")
    if isinstance(Z, LambdaRealization):
        a0, b0 = Z.base.bidegree
        a, b, beta = a or a0, b or b0, Z.beta if beta is None else beta
        surface = Z.result
    else:
        a = a or Z.bidegree[0]
        b = b or Z.bidegree[1]
        beta = beta or 0
        surface = Z
    h0s, residuals = [], []
    for d in degrees:
        h0 = restriction_rank(monoid_basis(d, (vertex,)), surface)
        h0s.append(h0)
        residuals.append(h0 - (Fraction(a * (2 * b + beta), 2) * d * d - Fraction((a - 2) * beta, 2) * d))
    ell, m = _least_squares_line(degrees, residuals)
    fit_residuals = [r - (ell * d + m) for d, r in zip(degrees, residuals)]
    logger.info(f"estimate_ell_m: ell={ell}, m={m}, h0={h0s}")
    return EllMFit(ell, m, degrees, h0s, fit_residuals)


def ell_m_stability(realizations: Sequence[LambdaRealization], d_range: Iterable[int]) -> Dict[str, object]:
    """Fit ``(ell, m)`` for each realization and report the spread across ``beta``."""
    d_range = list(d_range)
    fits = [estimate_ell_m(lam, d_range) for lam in realizations]
    ells = [f.ell for f in fits]
    ms = [f.m for f in fits]
    scale = max((f.residual_scale for f in fits), default=Fraction(0))
    return {
        "betas": [lam.beta for lam in realizations],
        "ell": ells,
        "m": ms,
        "ell_spread": max(ells) - min(ells),
        "m_spread": max(ms) - min(ms),
        "residual_scale": scale,
    }


def non_equivalence_witness(a: int, deg_d: int, deg_b: int) -> WitnessVerdict:
    """
    Multiplicity arithmetic separating a general projection of a ruled
    surface of degree ``2 a deg_d`` from a scroll of degree ``2 deg_b``.

    The surface side has multiplicity at most 3, so ``12 / (2 a deg_d) < 1``.
    For ``deg_b >= 7`` the scroll side satisfies the same criterion and the
    pair argument applies; otherwise the scroll has degree at most 12 and
    the degree comparison applies.

    :raises ValueError: ``a < 2`` or ``deg_d < 4``.
    """
    if a < 2:
        raise ValueError(f"Need a >= 2, got {a}")
    if deg_d < 4:
        raise ValueError(f"Need deg D >= 4, got {deg_d}")
    if deg_b < 1:
        raise ValueError(f"Need deg B >= 1, got {deg_b}")
    surface_degree = 2 * a * deg_d
    scroll_degree = 2 * deg_b
    surface_criterion = Fraction(12, surface_degree)
    scroll_criterion = Fraction(12, scroll_degree)
    branch = "terminal-pairs" if deg_b >= 7 else "degree-comparison"
    assert surface_criterion < 1
    return WitnessVerdict(
        a,
        deg_d,
        deg_b,
        surface_degree,
        surface_criterion,
        scroll_degree,
        scroll_criterion,
        branch,
        False,
    )
