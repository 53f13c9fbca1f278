"""
Monoid linear systems in P4.

``M_d(p)`` is spanned by the degree ``d`` forms with multiplicity at least
``d - 1`` at the coordinate point ``p``; for ``p0`` these are the monomials
with ``x0``-exponent at most one, for ``p4`` those with ``x4``-exponent at
most one. ``M_d(p, Z)`` adds the condition of containing a parametrized
surface ``Z``; the cone ``C_p(Z)`` is the union of the lines joining ``p``
to ``Z``.
"""

import random
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from retifica.core.forms import BiForm, MultiPoly, monomials
from retifica.core.matrix import ExactMatrix
from retifica.core.rand import derive_seed, random_rational
from retifica.interfaces.models import Monoid, MonoidSystem, ParamSurface
from retifica.logger import logger

__all__ = [
    "monoid_basis",
    "dim_formula_Md",
    "dim_formula_Mdpq",
    "restriction_rank",
    "restrict_to_surface",
    "contains_cone",
    "cone_subsystem",
    "not_cone_complement",
    "make_monoid",
    "find_double_vertex_monoid",
]

NUM_VARS = 5
VERTEXES = (0, 4)


def _check_vertexes(vertexes: Iterable[int]) -> Tuple[int, ...]:
    out = tuple(sorted(set(vertexes)))
    for v in out:
        if v not in VERTEXES:
            raise ValueError(f"Vertex must be p0 or p4, got p{v}")
    return out


def monoid_basis(d: int, vertexes: Iterable[int] = (0,)) -> MonoidSystem:
    """
    Monomial basis of ``M_d(p0)``, ``M_d(p4)`` or ``M_d(p0, p4)``.

    An empty vertex set gives all degree ``d`` forms.

    :raises ValueError: ``d < 2`` or a vertex other than ``p0``/``p4``.
    """
    if d < 2:
        raise ValueError(f"Monoid degree must be at least 2, got {d}")
    vertexes = _check_vertexes(vertexes)
    basis = tuple(
        MultiPoly.monomial(exp)
        for exp in monomials(NUM_VARS, d)
        if all(exp[v] <= 1 for v in vertexes)
    )
    return MonoidSystem(d, vertexes, basis)


def dim_formula_Md(d: int) -> int:
    """Projective dimension of ``M_d(p)``: ``d^3/3 + 3d^2/2 + 13d/6``."""
    if d < 2:
        raise ValueError(f"Monoid degree must be at least 2, got {d}")
    value = Fraction(d**3, 3) + Fraction(3 * d**2, 2) + Fraction(13 * d, 6)
    assert value.denominator == 1
    return int(value)


def dim_formula_Mdpq(d: int) -> int:
    """Projective dimension of ``M_d(p, q)``: ``2d^2 + 2d``."""
    if d < 2:
        raise ValueError(f"Monoid degree must be at least 2, got {d}")
    return 2 * d * d + 2 * d


@lru_cache(maxsize=8192)
def _pullback(Z: ParamSurface, exp: Tuple[int, ...]) -> BiForm:
    """``prod Z_i^{e_i}``, built from the memoised monomial one degree lower."""
    i = next((k for k, e in enumerate(exp) if e), None)
    if i is None:
        return BiForm({(0, 0, 0, 0): 1})
    lower = exp[:i] + (exp[i] - 1,) + exp[i + 1 :]
    return _pullback(Z, lower) * Z.forms[i]


def _pulled(f: MultiPoly, Z: ParamSurface) -> BiForm:
    """``f`` composed with the parametrization, a form of bidegree ``deg(f) (a, b)``."""
    a, b = Z.bidegree
    acc: Dict[Tuple[int, ...], Fraction] = {}
    for exp, c in f.terms.items():
        for m, v in _pullback(Z, exp).terms.items():
            acc[m] = acc.get(m, 0) + c * v
    return BiForm(acc, (f.degree * a, f.degree * b))


def _restriction_rows(forms: Sequence[MultiPoly], Z: ParamSurface, degree: int) -> List[List[Fraction]]:
    """Coefficient rows, one per monomial of bidegree ``degree (a, b)``, of the pulled-back ``forms``."""
    a, b = Z.bidegree
    pulled = [_pulled(f, Z) for f in forms]
    exps = [(i, degree * a - i, k, degree * b - k) for i in range(degree * a + 1) for k in range(degree * b + 1)]
    return [[p.coefficient(e) for p in pulled] for e in exps]


def _vanishes_on(f: MultiPoly, Z: ParamSurface) -> bool:
    return not _pulled(f, Z)


def _check_surface(sys: MonoidSystem, Z: ParamSurface):
    if len(Z.forms) != NUM_VARS:
        raise ValueError(f"Surface must live in P4, got P{Z.ambient_dim}")


def restriction_rank(sys: MonoidSystem, Z: ParamSurface) -> int:
    """Rank ``h0`` of the restriction of the span of ``sys.basis`` to ``Z``."""
    _check_surface(sys, Z)
    if not sys.basis:
        return 0
    return ExactMatrix(_restriction_rows(sys.basis, Z, sys.d), len(sys.basis)).rank()


def restrict_to_surface(sys: MonoidSystem, Z: ParamSurface) -> MonoidSystem:
    """
    Members of ``sys`` containing ``Z``.

    ``f`` contains ``Z`` iff ``f`` composed with the parametrization vanishes,
    a form of bidegree ``d (a, b)``; the conditions are its
    ``(d a + 1)(d b + 1)`` coefficients, linear in the coefficients of ``f``.

    :return: The restricted system, with ``h0_restricted`` set to the rank of
        the restriction map.
    :raises ValueError: No member of ``sys`` contains ``Z``.
    """
    _check_surface(sys, Z)
    rows = _restriction_rows(sys.basis, Z, sys.d)
    kernel = ExactMatrix(rows, len(sys.basis)).kernel()
    rank = len(sys.basis) - len(kernel)
    logger.debug(
        f"restrict_to_surface: d={sys.d}, {len(rows)} conditions, "
        f"{len(sys.basis)} unknowns, rank {rank}, kernel {len(kernel)}"
    )
    if not kernel:
        raise ValueError(f"No monoid of degree {sys.d} through the surface")
    basis = tuple(sys.element(v).primitive() for v in kernel)
    return MonoidSystem(sys.d, sys.vertexes, basis, Z, False, rank)


def contains_cone(f: MultiPoly, vertex: int, Z: ParamSurface) -> bool:
    """
    Whether ``{f = 0}`` contains the cone over ``Z`` with the given vertex.

    True iff every piece ``f_{d-k}`` of ``f = sum x_v^k f_{d-k}`` vanishes on
    ``Z``.
    """
    _check_vertexes([vertex])
    return all(_vanishes_on(piece, Z) for piece in f.graded_pieces(vertex).values())


def cone_subsystem(sys: MonoidSystem, vertex: int) -> List[List[Fraction]]:
    """
    Coordinates, in ``sys.basis``, of a basis of ``M_d(p, C_p(Z))``.

    :raises ValueError: ``sys`` carries no surface.
    """
    Z = sys.constraints
    if Z is None:
        raise ValueError("System is not restricted to a surface")
    _check_vertexes([vertex])
    rows: List[List[Fraction]] = []
    for k in range(sys.d + 1):
        pieces = [f.piece(vertex, k) for f in sys.basis]
        if not any(pieces):
            continue
        rows.extend(_restriction_rows(pieces, Z, sys.d - k))
    if not rows:
        return ExactMatrix([], len(sys.basis)).kernel()
    return ExactMatrix(rows, len(sys.basis)).kernel()


def not_cone_complement(sys: MonoidSystem, vertex: int) -> MonoidSystem:
    """
    A complement of ``M_d(p, C_p(Z))`` inside ``sys``.

    The complement is spanned by the basis elements at the non-pivot columns
    of the echelonized cone subspace, so no nonzero member contains the cone.
    Its projective dimension is ``dim M_d(p, Z) - dim M_d(p, C_p(Z)) - 1``.

    :raises ValueError: The complement is empty.
    """
    if not sys.basis:
        raise ValueError("Empty system")
    cone = cone_subsystem(sys, vertex)
    _, pivots = ExactMatrix(cone, len(sys.basis)).rref() if cone else ([], [])
    pivot_set = set(pivots)
    basis = tuple(f for j, f in enumerate(sys.basis) if j not in pivot_set)
    logger.debug(
        f"not_cone_complement: p{vertex}, system {len(sys.basis)}, cone {len(cone)}, "
        f"complement {len(basis)}"
    )
    if not basis:
        raise ValueError(f"Every member of the degree {sys.d} system contains the cone over p{vertex}")
    return MonoidSystem(sys.d, sys.vertexes, basis, sys.constraints, True, sys.h0_restricted)


def make_monoid(form: MultiPoly, vertexes: Iterable[int]) -> Monoid:
    """
    Record ``form`` as a monoid and split it into its graded pieces.

    :raises ValueError: Multiplicity at a vertex is not exactly ``d - 1``.
    """
    vertexes = _check_vertexes(vertexes)
    if not vertexes:
        raise ValueError("A monoid needs at least one vertex")
    if form.num_vars != NUM_VARS:
        raise ValueError("Monoids live in P4")
    d = form.degree
    for v in vertexes:
        mult = form.mult_at_coord_point(v)
        if mult != d - 1:
            raise ValueError(f"Multiplicity {mult} at p{v}, expected {d - 1}")
    if vertexes == (0,):
        pieces = (form.piece(0, 1), form.piece(0, 0))
    elif vertexes == (4,):
        pieces = (form.piece(4, 1), form.piece(4, 0))
    else:
        f1, f0 = form.piece(0, 1), form.piece(0, 0)
        pieces = (f1.piece(4, 1), f1.piece(4, 0), f0.piece(4, 1), f0.piece(4, 0))
    return Monoid(form, vertexes, pieces)


def find_double_vertex_monoid(
    Z: ParamSurface, d: int, seed: int = 0, draws: int = 20, height: int = 20
) -> Optional[Monoid]:
    """
    A member of ``M_d(p0, p4, Z)`` with multiplicity exactly ``d - 1`` at
    both vertexes and containing neither cone, or None.
    """
    try:
        system = restrict_to_surface(monoid_basis(d, VERTEXES), Z)
    except ValueError as e:
        logger.debug(f"find_double_vertex_monoid: d={d}: {e}")
        return None
    logger.info(f"M_{d}(p0,p4,Z) has projective dimension {system.dim}")
    rng = random.Random(derive_seed(seed, "monoid", d))
    for draw in range(draws):
        coeffs = [random_rational(rng, height) for _ in system.basis]
        if not any(coeffs):
            continue
        f = system.element(coeffs).primitive()
        if any(f.mult_at_coord_point(v) != d - 1 for v in VERTEXES):
            logger.debug(f"draw {draw}: wrong vertex multiplicity")
            continue
        if contains_cone(f, 0, Z) or contains_cone(f, 4, Z):
            logger.debug(f"draw {draw}: contains a cone")
            continue
        return make_monoid(f, VERTEXES)
    return None
