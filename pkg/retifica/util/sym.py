"""
Bridge to sympy for the operations the sparse forms do not carry themselves:
multivariate gcd, exact division, resultants and square-free parts.
"""

import random
from fractions import Fraction
from math import comb
from typing import List, Optional, Sequence, Tuple, Union

from sympy import QQ, Poly, Rational, symbols
from sympy.polys.polyerrors import ExactQuotientFailed

from retifica.core.forms import BiForm, MultiPoly
from retifica.core.rand import random_combination, random_rational
from retifica.errors import NotGenericallyFinite, SearchExhausted
from retifica.logger import logger

__all__ = [
    "biform_to_poly",
    "poly_to_biform",
    "multipoly_to_poly",
    "poly_to_multipoly",
    "gcd_forms",
    "exact_divide",
    "is_squarefree_binary",
    "Chart",
    "count_common_zeros",
    "intersection_count",
]

BIFORM_GENS = symbols("s t u v")
CHART_GENS = symbols("s w")
X_GENS = symbols("x0:8")

Form = Union[BiForm, MultiPoly]


def _to_sympy(c: Fraction) -> Rational:
    return Rational(c.numerator, c.denominator)


def _from_sympy(c) -> Fraction:
    return Fraction(int(c.p), int(c.q))


def biform_to_poly(f: BiForm) -> Poly:
    rep = {exp: _to_sympy(c) for exp, c in f.terms.items()}
    return Poly.from_dict(rep or {(0, 0, 0, 0): 0}, *BIFORM_GENS, domain=QQ)


def poly_to_biform(p: Poly, bidegree: Optional[Tuple[int, int]] = None) -> BiForm:
    if p.is_zero:
        return BiForm({}, bidegree)
    return BiForm({m: _from_sympy(c) for m, c in p.terms()}, bidegree)


def multipoly_to_poly(f: MultiPoly) -> Poly:
    gens = X_GENS[: f.num_vars]
    rep = {exp: _to_sympy(c) for exp, c in f.terms.items()}
    return Poly.from_dict(rep or {(0,) * f.num_vars: 0}, *gens, domain=QQ)


def poly_to_multipoly(p: Poly, num_vars: int, degree: Optional[int] = None) -> MultiPoly:
    if p.is_zero:
        return MultiPoly(num_vars, {}, degree)
    return MultiPoly(num_vars, {m: _from_sympy(c) for m, c in p.terms()}, degree)


def _to_poly(f: Form) -> Poly:
    return biform_to_poly(f) if isinstance(f, BiForm) else multipoly_to_poly(f)


def _from_poly(p: Poly, like: Form) -> Form:
    if isinstance(like, BiForm):
        return poly_to_biform(p)
    return poly_to_multipoly(p, like.num_vars)


def gcd_forms(forms: Sequence[Form]) -> Form:
    """
    Greatest common divisor of nonzero forms, primitive with positive
    leading coefficient. Zero forms are ignored.
    """
    nonzero = [f for f in forms if f]
    if not nonzero:
        raise ValueError("gcd of zero forms")
    g = _to_poly(nonzero[0])
    for f in nonzero[1:]:
        if g.is_ground:
            break
        g = g.gcd(_to_poly(f))
    return _from_poly(g, nonzero[0]).primitive()


def exact_divide(f: Form, g: Form) -> Form:
    """``f / g`` as a form; ValueError when ``g`` does not divide ``f``."""
    if not g:
        raise ValueError("Division by the zero form")
    if not f:
        if isinstance(f, BiForm):
            return BiForm({}, (f.bidegree[0] - g.bidegree[0], f.bidegree[1] - g.bidegree[1]))
        return MultiPoly(f.num_vars, {}, f.degree - g.degree)
    try:
        q = _to_poly(f).exquo(_to_poly(g))
    except ExactQuotientFailed:
        raise ValueError(f"{g} does not divide {f}")
    return _from_poly(q, f)


def is_squarefree_binary(coeffs: Sequence[Fraction]) -> bool:
    """
    Square-freeness of the binary form ``sum c_k s^(n-k) t^k`` of degree
    ``n = len(coeffs) - 1``; the zero form is not square-free.
    """
    if not any(coeffs):
        return False
    n = len(coeffs) - 1
    if n >= 2 and coeffs[0] == 0 and coeffs[1] == 0:
        # t^2 divides
        return False
    s = CHART_GENS[0]
    rep = {(n - k,): _to_sympy(Fraction(c)) for k, c in enumerate(coeffs) if c}
    g = Poly.from_dict(rep, s, domain=QQ)
    if g.degree() <= 1:
        return True
    return g.gcd(g.diff(s)).is_ground


class Chart:
    """
    Random affine chart of P1 x P1 adapted to resultant elimination.

    Applies a random linear change on ``(s,t)`` and on ``(u,v)``, sets
    ``t = v = 1`` and shears ``u = w - lam * s``. In the chart a form of
    bidegree ``(A, B)`` becomes a polynomial in ``(s, w)`` whose top
    ``s``-power ``s^(A+B)`` has a constant coefficient; distinct points get
    distinct ``w`` for a generic chart.
    """

    def __init__(self, rng: random.Random, height: int = 20):
        self.st = self._invertible(rng, height)
        self.uv = self._invertible(rng, height)
        self.lam = random_rational(rng, height, nonzero=True)

    @staticmethod
    def _invertible(rng, height):
        while True:
            m = [[random_rational(rng, height) for _ in range(2)] for _ in range(2)]
            if m[0][0] * m[1][1] - m[0][1] * m[1][0] != 0:
                return m

    def poly(self, f: BiForm) -> Poly:
        g = f.reparametrize(self.st, self.uv)
        rep = {}
        neg = -self.lam
        for (es, et, eu, ev), c in g.terms.items():
            for k in range(eu + 1):
                key = (es + k, eu - k)
                rep[key] = rep.get(key, Fraction(0)) + c * comb(eu, k) * neg**k
        rep = {k: _to_sympy(v) for k, v in rep.items() if v}
        return Poly.from_dict(rep or {(0, 0): 0}, *CHART_GENS, domain=QQ)

    def proper(self, f: BiForm, p: Poly) -> bool:
        return not p.is_zero and p.degree(0) == f.total_degree


def _same_bidegree(forms: Sequence[BiForm]) -> Tuple[int, int]:
    grades = {f.bidegree for f in forms if f}
    if len(grades) != 1:
        raise ValueError(f"Forms must share one bidegree, got {sorted(grades)}")
    return grades.pop()


def count_common_zeros(
    forms: Sequence[BiForm], rng: random.Random, height: int = 20, retries: int = 10
) -> int:
    """
    Number of distinct common zeros on P1 x P1 of forms of one bidegree.

    :raises NotGenericallyFinite: The forms share a curve.
    :raises SearchExhausted: No chart with all zeros in its affine part was drawn.
    """
    forms = [f for f in forms if f]
    if not forms:
        raise NotGenericallyFinite("All forms vanish")
    a, b = _same_bidegree(forms)
    expected = 2 * a * b
    for attempt in range(retries):
        chart = Chart(rng, height)
        combos = [random_combination(rng, forms, height) for _ in range(3)]
        polys = [chart.poly(g) for g in combos]
        if not all(chart.proper(g, p) for g, p in zip(combos, polys)):
            logger.debug(f"count_common_zeros: improper chart, attempt {attempt}")
            continue
        r12 = polys[0].resultant(polys[1])
        r13 = polys[0].resultant(polys[2])
        if r12.is_zero or r13.is_zero:
            raise NotGenericallyFinite("Common zero set contains a curve")
        if r12.degree() != expected or r13.degree() != expected:
            logger.debug(f"count_common_zeros: zeros at infinity, attempt {attempt}")
            continue
        g = r12.gcd(r13)
        if g.is_ground:
            return 0
        return g.sqf_part().degree()
    raise SearchExhausted(f"No adapted chart found in {retries} attempts")


def intersection_count(
    forms: Sequence[BiForm], rng: random.Random, height: int = 20, retries: int = 10
) -> Tuple[int, int]:
    """
    Zeros of two random members of the span of ``forms``, with multiplicity.

    :return: ``(total, base)`` where ``total`` counts all common zeros of the
        two members and ``base`` the part supported at common zeros of all
        forms, each with its local intersection multiplicity.
    :raises NotGenericallyFinite: Two general members share a component.
    """
    forms = [f for f in forms if f]
    a, b = _same_bidegree(forms)
    expected = 2 * a * b
    for attempt in range(retries):
        chart = Chart(rng, height)
        combos = [random_combination(rng, forms, height) for _ in range(3)]
        polys = [chart.poly(g) for g in combos]
        if not all(chart.proper(g, p) for g, p in zip(combos, polys)):
            continue
        r = polys[0].resultant(polys[1])
        if r.is_zero:
            raise NotGenericallyFinite("Map is not generically finite")
        r13 = polys[0].resultant(polys[2])
        if r13.is_zero:
            raise NotGenericallyFinite("Map is not generically finite")
        if r.degree() != expected or r13.degree() != expected:
            logger.debug(f"intersection_count: zeros at infinity, attempt {attempt}")
            continue
        base_values = r.gcd(r13)
        base = 0
        if not base_values.is_ground:
            base_values = base_values.sqf_part()
            rest = r
            while True:
                g = rest.gcd(base_values)
                if g.is_ground:
                    break
                base += g.degree()
                rest = rest.exquo(g)
        return expected, base
    raise SearchExhausted(f"No adapted chart found in {retries} attempts")