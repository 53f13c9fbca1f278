from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from retifica.core.forms import BiForm, MultiPoly, monomials
from retifica.core.grammar import format_form, parse_biform, parse_multipoly

coefficients = st.fractions(min_value=-20, max_value=20, max_denominator=9)


def multipolys(num_vars=3, degree=2):
    exps = monomials(num_vars, degree)
    return st.lists(coefficients, min_size=len(exps), max_size=len(exps)).map(
        lambda cs: MultiPoly(num_vars, dict(zip(exps, cs)), degree)
    )


def biforms(a=1, b=2):
    basis = BiForm.basis(a, b)
    return st.lists(coefficients, min_size=len(basis), max_size=len(basis)).map(
        lambda cs: BiForm.combination(basis, cs)
    )


points = st.lists(coefficients, min_size=3, max_size=3)


def test_monomials_count_and_order():
    exps = monomials(5, 3)
    assert len(exps) == 35
    assert exps[0] == (3, 0, 0, 0, 0)
    assert exps[-1] == (0, 0, 0, 0, 3)


def test_zero_form_keeps_its_degree():
    z = MultiPoly(5, {}, 3)
    assert z.is_zero()
    assert z.degree == 3
    assert z == 0
    assert z != MultiPoly(5, {}, 2)


def test_add_rejects_degree_mismatch():
    with pytest.raises(ValueError):
        parse_multipoly("x0^2") + parse_multipoly("x1")


def test_inhomogeneous_terms_rejected():
    with pytest.raises(ValueError):
        MultiPoly(2, {(2, 0): 1, (1, 0): 1})


def test_multiplicity_at_coordinate_points(quadric_monoid):
    assert quadric_monoid.mult_at_coord_point(0) == 1
    assert quadric_monoid.mult_at_coord_point(4) == 1
    assert quadric_monoid.mult_at_coord_point(3) == 2
    with pytest.raises(ValueError):
        MultiPoly(5, {}, 2).mult_at_coord_point(0)


def test_graded_pieces(quadric_monoid):
    pieces = quadric_monoid.graded_pieces(0)
    assert set(pieces) == {0, 1}
    assert pieces[1] == parse_multipoly("x4")
    assert pieces[0] == parse_multipoly("-x1*x2")
    assert quadric_monoid.piece(0, 2) == 0


def test_drop_and_insert_variable():
    f = parse_multipoly("x1*x2 + x3^2")
    g = f.drop_variable(0)
    assert g.num_vars == 4
    assert g.insert_variable(0) == f
    with pytest.raises(ValueError):
        f.drop_variable(1)


def test_primitive_is_integral_with_positive_lead():
    f = parse_multipoly("-1/2*x0^2 + 3/4*x1*x2", 3)
    p = f.primitive()
    assert p == parse_multipoly("2*x0^2 - 3*x1*x2", 3)


def test_biform_bidegree_and_evaluation():
    f = parse_biform("s^2*u + s*t*v")
    assert f.bidegree == (2, 1)
    assert f.at(1, 2, 3, 4) == 3 + 8


def test_restrict_fiber_coefficients():
    f = parse_biform("s^2*u + s*t*v - t^2*u")
    assert f.restrict_fiber(1, 0) == [1, 0, -1]
    assert f.restrict_fiber(0, 1) == [0, 1, 0]


def test_reparametrize_identity():
    f = parse_biform("s^2*u + 3*s*t*v")
    eye = [[1, 0], [0, 1]]
    assert f.reparametrize(eye, eye) == f


def test_format_form_conventions():
    assert format_form(parse_multipoly("x0*x4 - x1*x2")) == "x0*x4 - x1*x2"
    assert format_form(parse_multipoly("2*x0^2", 3)) == "2*x0^2"
    assert format_form(MultiPoly(5, {}, 2)) == "0"
    assert format_form(parse_biform("-1/3*s*u")) == "-1/3*s*u"


@pytest.mark.parametrize("text", ["x0 +", "x5*x0", "2x0", "x0**2", "", "s*u", "1/0*x0", "x1 - 3/0*x2"])
def test_parse_multipoly_rejects(text):
    with pytest.raises(ValueError):
        parse_multipoly(text)


def test_parse_rejects_inhomogeneous():
    with pytest.raises(ValueError):
        parse_multipoly("x0^2 + x1")


@settings(max_examples=50, deadline=None)
@given(multipolys(), multipolys())
def test_format_parse_inverse(f, g):
    h = f * g
    assert parse_multipoly(format_form(h), 3, h.degree) == h


@settings(max_examples=50, deadline=None)
@given(multipolys(), points, coefficients)
def test_homogeneity(f, p, lam):
    scaled = [lam * x for x in p]
    assert f.evaluate(scaled) == lam**2 * f.evaluate(p)


@settings(max_examples=30, deadline=None)
@given(multipolys(degree=2), multipolys(degree=2), st.lists(multipolys(num_vars=2, degree=1), min_size=3, max_size=3))
def test_substitution_is_a_ring_homomorphism(f, g, images):
    assert (f * g).substitute(images) == f.substitute(images) * g.substitute(images)
    assert (f + g).substitute(images) == f.substitute(images) + g.substitute(images)


@settings(max_examples=30, deadline=None)
@given(multipolys(num_vars=3, degree=2), multipolys(num_vars=3, degree=1))
def test_multiplicity_is_additive(f, g):
    if f and g:
        assert (f * g).mult_at_coord_point(0) == f.mult_at_coord_point(0) + g.mult_at_coord_point(0)


@settings(max_examples=30, deadline=None)
@given(biforms(), biforms(2, 1))
def test_bidegree_adds_under_product(f, g):
    if f and g:
        assert (f * g).bidegree == (3, 3)


@settings(max_examples=30, deadline=None)
@given(biforms())
def test_biform_grammar_inverse(f):
    assert parse_biform(format_form(f), f.bidegree) == f


def test_power_matches_repeated_product():
    f = parse_multipoly("x0 + 2*x1", 2)
    assert f**3 == f * f * f
    assert f**0 == MultiPoly(2, {(0, 0): 1})


def test_derivative():
    f = parse_multipoly("x0^2*x1 + 3*x1^3", 2)
    assert f.derivative(1) == parse_multipoly("x0^2 + 9*x1^2", 2)
    assert f.derivative(0).degree == 2


def test_content():
    assert parse_multipoly("4/3*x0 + 2*x1", 2).content() == Fraction(2, 3)


def test_substitute_into_multipolys_keeps_the_target_ring():
    f = parse_multipoly("x0*x1 + x2^2", 3)
    images = [MultiPoly.variable(2, 0), MultiPoly.variable(2, 1), parse_multipoly("x0 + x1", 2)]
    h = f.substitute(images)
    assert isinstance(h, MultiPoly)
    assert h.num_vars == 2
    assert h.degree == 2
    assert h == parse_multipoly("x0^2 + 3*x0*x1 + x1^2", 2)
    assert parse_multipoly("x0*x1", 3).substitute([MultiPoly(2, {}, 1)] * 3) == MultiPoly(2, {}, 2)
