"""
Sparse homogeneous forms with exact rational coefficients.

Two gradings are used throughout the package:

* :class:`MultiPoly` -- forms in ``x0..xn`` graded by total degree.
* :class:`BiForm` -- forms in ``s, t, u, v`` graded by the bidegree
  ``(deg in s,t ; deg in u,v)``.

Both are immutable. Terms are stored as a mapping from exponent tuples to
nonzero :class:`fractions.Fraction` coefficients.
"""

from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, Union

__all__ = ["MultiPoly", "BiForm", "monomials", "Scalar"]

Scalar = Union[int, Fraction]
Exponent = Tuple[int, ...]


def monomials(num_vars: int, degree: int) -> List[Exponent]:
    """
    All exponent vectors of the given total degree, graded-lex descending
    (``x0^d`` first).
    """
    if degree < 0:
        return []
    out = []
    for combo in combinations_with_replacement(range(num_vars), degree):
        exp = [0] * num_vars
        for i in combo:
            exp[i] += 1
        out.append(tuple(exp))
    out.sort(reverse=True)
    return out


class _SparseForm:
    __slots__ = ("_terms", "_grade", "_hash")

    num_vars: int = 0

    def __init__(self, terms: Mapping[Exponent, Scalar], grade=None):
        clean: Dict[Exponent, Fraction] = {}
        for exp, c in terms.items():
            if c == 0:
                continue
            exp = tuple(int(e) for e in exp)
            if len(exp) != self.num_vars or min(exp) < 0:
                raise ValueError(f"Bad exponent vector {exp} for {self.num_vars} variables")
            clean[exp] = Fraction(c)
        grades = {self._grade_of(e) for e in clean}
        if len(grades) > 1:
            raise ValueError(f"Inhomogeneous form, grades {sorted(grades)}")
        if grades:
            found = grades.pop()
            if grade is not None and self._normalize_grade(grade) != found:
                raise ValueError(f"Terms have grade {found}, expected {grade}")
            grade = found
        elif grade is None:
            grade = self._zero_grade()
        self._terms = clean
        self._grade = self._normalize_grade(grade)
        self._hash = None

    # grading hooks

    @classmethod
    def _grade_of(cls, exp: Exponent):
        raise NotImplementedError

    @classmethod
    def _zero_grade(cls):
        raise NotImplementedError

    @classmethod
    def _normalize_grade(cls, grade):
        return grade

    @staticmethod
    def _add_grades(g1, g2):
        raise NotImplementedError

    @staticmethod
    def _scale_grade(g, k: int):
        raise NotImplementedError

    def _new(self, terms, grade):
        return type(self)(terms, grade)

    @classmethod
    def _one(cls, like: "_SparseForm"):
        return like._new({(0,) * like.num_vars: 1}, like._scale_grade(like._grade, 0))

    # basic protocol

    @property
    def grade(self):
        return self._grade

    @property
    def terms(self) -> Dict[Exponent, Fraction]:
        return dict(self._terms)

    def items(self) -> List[Tuple[Exponent, Fraction]]:
        """Terms in graded-lex descending order."""
        return sorted(self._terms.items(), reverse=True)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return self.is_zero()
            return self._terms == {(0,) * self.num_vars: Fraction(other)}
        if type(other) is not type(self):
            return NotImplemented
        if not self._terms and not other._terms:
            return self._grade == other._grade
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((type(self).__name__, self._grade, frozenset(self._terms.items())))
        return self._hash

    def coefficient(self, exp: Exponent) -> Fraction:
        return self._terms.get(tuple(exp), Fraction(0))

    # arithmetic

    def _check_compatible(self, other: "_SparseForm"):
        if type(other) is not type(self):
            raise TypeError(f"Cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.num_vars != self.num_vars:
            raise ValueError(f"num_vars mismatch: {self.num_vars} vs {other.num_vars}")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)) and other == 0:
            return self
        self._check_compatible(other)
        if not other._terms:
            return self
        if not self._terms:
            return other
        if other._grade != self._grade:
            raise ValueError(f"Degree mismatch on add: {self._grade} vs {other._grade}")
        acc = dict(self._terms)
        for exp, c in other._terms.items():
            acc[exp] = acc.get(exp, 0) + c
        return self._new(acc, self._grade)

    __radd__ = __add__

    def __neg__(self):
        return self._new({e: -c for e, c in self._terms.items()}, self._grade)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: Scalar):
        c = Fraction(c)
        if c == 0:
            return self._new({}, self._grade)
        return self._new({e: c * v for e, v in self._terms.items()}, self._grade)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check_compatible(other)
        grade = self._add_grades(self._grade, other._grade)
        acc: Dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                acc[e] = acc.get(e, 0) + c1 * c2
        return self._new(acc, grade)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("Negative power")
        result = self._one(self)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def evaluate(self, point: Sequence[Scalar]) -> Fraction:
        if len(point) != self.num_vars:
            raise ValueError(f"Expected {self.num_vars} coordinates, got {len(point)}")
        point = [Fraction(p) for p in point]
        total = Fraction(0)
        for exp, c in self._terms.items():
            term = c
            for x, e in zip(point, exp):
                if e:
                    term *= x**e
            total += term
        return total

    def substitute(self, images: Sequence["_SparseForm"]):
        """
        Compose with a list of forms of a common grade, one per variable.

        The result lives in the ring of ``images`` and has grade
        ``deg(self) * grade(images)``.
        """
        if len(images) != self.num_vars:
            raise ValueError(f"Expected {self.num_vars} images, got {len(images)}")
        first = images[0]
        kind = type(first)
        for im in images:
            if type(im) is not kind or im.num_vars != first.num_vars:
                raise TypeError("Images must be forms of one kind")
        nonzero = [im for im in images if im]
        grade = nonzero[0].grade if nonzero else first.grade
        for im in nonzero:
            if im.grade != grade:
                raise ValueError(f"Bidegree mismatch among components: {im.grade} vs {grade}")
        out_grade = first._scale_grade(grade, self.total_degree)
        powers: Dict[Tuple[int, int], _SparseForm] = {}

        def power(i: int, e: int):
            key = (i, e)
            if key not in powers:
                if e == 1:
                    powers[key] = images[i]
                else:
                    powers[key] = power(i, e - 1) * images[i]
            return powers[key]

        acc: Dict[Exponent, Fraction] = {}
        for exp, c in self._terms.items():
            prod = None
            for i, e in enumerate(exp):
                if not e:
                    continue
                if not images[i]:
                    prod = None
                    break
                p = power(i, e)
                prod = p if prod is None else prod * p
            else:
                if prod is None:
                    prod = kind._one(first)
                for m, v in prod._terms.items():
                    acc[m] = acc.get(m, 0) + c * v
        return first._new(acc, out_grade)

    @property
    def total_degree(self) -> int:
        raise NotImplementedError

    def _lower_grade(self, i: int):
        raise NotImplementedError

    def derivative(self, i: int):
        """Partial derivative with respect to the ``i``-th variable."""
        terms: Dict[Exponent, Fraction] = {}
        for exp, c in self._terms.items():
            if exp[i]:
                lowered = exp[:i] + (exp[i] - 1,) + exp[i + 1 :]
                terms[lowered] = c * exp[i]
        return self._new(terms, self._lower_grade(i))

    def content(self) -> Fraction:
        """Positive rational ``q`` such that ``self / q`` has coprime integer coefficients."""
        from math import gcd, lcm

        if not self._terms:
            return Fraction(1)
        den = 1
        num = 0
        for c in self._terms.values():
            den = lcm(den, c.denominator)
            num = gcd(num, c.numerator)
        return Fraction(num, den)

    def primitive(self):
        """Integer coefficients, coprime, leading (graded-lex) coefficient positive."""
        if not self._terms:
            return self
        q = self.content()
        if self.items()[0][1] < 0:
            q = -q
        return self.scale(1 / q)

    def __str__(self):
        from retifica.core.grammar import format_form

        return format_form(self)

    def __repr__(self):
        return f"{type(self).__name__}({str(self)!r}, grade={self._grade})"


class MultiPoly(_SparseForm):
    """
    Homogeneous polynomial in ``x0..x{n}``.

    :param num_vars: Number of variables.
    :param terms: Mapping exponent vector -> coefficient.
    :param degree: Required for the zero polynomial, checked otherwise.
    """

    __slots__ = ("num_vars",)

    def __init__(self, num_vars: int, terms: Mapping[Exponent, Scalar] = None, degree: int = None):
        self.num_vars = num_vars
        super().__init__(terms or {}, degree)

    def _new(self, terms, grade):
        return MultiPoly(self.num_vars, terms, grade)

    @classmethod
    def _grade_of(cls, exp):
        return sum(exp)

    @classmethod
    def _zero_grade(cls):
        return 0

    @staticmethod
    def _add_grades(g1, g2):
        return g1 + g2

    @staticmethod
    def _scale_grade(g, k):
        return g * k

    @classmethod
    def variable(cls, num_vars: int, i: int) -> "MultiPoly":
        exp = [0] * num_vars
        exp[i] = 1
        return cls(num_vars, {tuple(exp): 1})

    @classmethod
    def monomial(cls, exp: Exponent, coeff: Scalar = 1) -> "MultiPoly":
        return cls(len(exp), {tuple(exp): coeff})

    @classmethod
    def from_coefficients(cls, basis: Sequence["MultiPoly"], coeffs: Sequence[Scalar]) -> "MultiPoly":
        if not basis:
            raise ValueError("Empty basis")
        acc = MultiPoly(basis[0].num_vars, {}, basis[0].degree)
        for f, c in zip(basis, coeffs):
            if c:
                acc = acc + f.scale(c)
        return acc

    @property
    def degree(self) -> int:
        return self._grade

    @property
    def total_degree(self) -> int:
        return self._grade

    def _lower_grade(self, i):
        return self._grade - 1

    def involves(self, i: int) -> bool:
        return any(exp[i] for exp in self._terms)

    def graded_pieces(self, i: int) -> Dict[int, "MultiPoly"]:
        """
        Decomposition ``f = sum_k x_i^k f_{d-k}``.

        :param i: Index of the grading variable.
        :return: Mapping ``k -> f_{d-k}`` over the nonzero pieces; each piece
            keeps all ``num_vars`` variables and does not involve ``x_i``.
        """
        buckets: Dict[int, Dict[Exponent, Fraction]] = {}
        for exp, c in self._terms.items():
            k = exp[i]
            rest = exp[:i] + (0,) + exp[i + 1 :]
            buckets.setdefault(k, {})[rest] = c
        return {k: MultiPoly(self.num_vars, t, self.degree - k) for k, t in buckets.items()}

    def piece(self, i: int, k: int) -> "MultiPoly":
        return self.graded_pieces(i).get(k, MultiPoly(self.num_vars, {}, self.degree - k))

    def mult_at_coord_point(self, i: int) -> int:
        """
        Multiplicity of ``{f = 0}`` at the ``i``-th coordinate point.

        :raises ValueError: For the zero polynomial.
        """
        if not self._terms:
            raise ValueError("Multiplicity of the zero polynomial is undefined")
        return self.degree - max(exp[i] for exp in self._terms)

    def drop_variable(self, i: int) -> "MultiPoly":
        """Same form in ``num_vars - 1`` variables; ``x_i`` must not occur."""
        if self.involves(i):
            raise ValueError(f"Form involves x{i}, cannot drop it")
        terms = {exp[:i] + exp[i + 1 :]: c for exp, c in self._terms.items()}
        return MultiPoly(self.num_vars - 1, terms, self.degree)

    def insert_variable(self, i: int) -> "MultiPoly":
        """Inverse of :meth:`drop_variable`."""
        terms = {exp[:i] + (0,) + exp[i:]: c for exp, c in self._terms.items()}
        return MultiPoly(self.num_vars + 1, terms, self.degree)


class BiForm(_SparseForm):
    """
    Bihomogeneous form in ``s, t, u, v``.

    :param terms: Mapping ``(e_s, e_t, e_u, e_v) -> coefficient``.
    :param bidegree: Required for the zero form, checked otherwise.
    """

    __slots__ = ()
    num_vars = 4

    def __init__(self, terms: Mapping[Exponent, Scalar] = None, bidegree: Tuple[int, int] = None):
        super().__init__(terms or {}, bidegree)

    @classmethod
    def _grade_of(cls, exp):
        return (exp[0] + exp[1], exp[2] + exp[3])

    @classmethod
    def _zero_grade(cls):
        return (0, 0)

    @classmethod
    def _normalize_grade(cls, grade):
        return (int(grade[0]), int(grade[1]))

    @staticmethod
    def _add_grades(g1, g2):
        return (g1[0] + g2[0], g1[1] + g2[1])

    @staticmethod
    def _scale_grade(g, k):
        return (g[0] * k, g[1] * k)

    @property
    def bidegree(self) -> Tuple[int, int]:
        return self._grade

    @property
    def total_degree(self) -> int:
        return self._grade[0] + self._grade[1]

    def _lower_grade(self, i):
        a, b = self._grade
        return (a - 1, b) if i < 2 else (a, b - 1)

    @classmethod
    def monomial(cls, exp: Exponent, coeff: Scalar = 1) -> "BiForm":
        return cls({tuple(exp): coeff})

    @classmethod
    def basis(cls, a: int, b: int) -> List["BiForm"]:
        """Monomials of bidegree ``(a, b)``, graded-lex descending."""
        out = []
        for i in range(a, -1, -1):
            for k in range(b, -1, -1):
                out.append(cls({(i, a - i, k, b - k): 1}))
        return out

    @classmethod
    def combination(cls, forms: Sequence["BiForm"], coeffs: Sequence[Scalar]) -> "BiForm":
        acc = BiForm({}, forms[0].bidegree)
        for f, c in zip(forms, coeffs):
            if c:
                acc = acc + f.scale(c)
        return acc

    def reparametrize(self, st: Sequence[Sequence[Scalar]], uv: Sequence[Sequence[Scalar]]) -> "BiForm":
        """
        Pull back along the linear changes ``(s,t) -> st . (s,t)`` and
        ``(u,v) -> uv . (u,v)``.
        """
        images = [
            BiForm({(1, 0, 0, 0): st[0][0], (0, 1, 0, 0): st[0][1]}, (1, 0)),
            BiForm({(1, 0, 0, 0): st[1][0], (0, 1, 0, 0): st[1][1]}, (1, 0)),
            BiForm({(0, 0, 1, 0): uv[0][0], (0, 0, 0, 1): uv[0][1]}, (0, 1)),
            BiForm({(0, 0, 1, 0): uv[1][0], (0, 0, 0, 1): uv[1][1]}, (0, 1)),
        ]
        powers: Dict[Tuple[int, int], BiForm] = {}

        def power(i, e):
            if (i, e) not in powers:
                powers[(i, e)] = images[i] ** e
            return powers[(i, e)]

        acc: Dict[Exponent, Fraction] = {}
        for exp, c in self._terms.items():
            prod = BiForm({(0, 0, 0, 0): c})
            for i, e in enumerate(exp):
                if e:
                    prod = prod * power(i, e)
            for m, v in prod._terms.items():
                acc[m] = acc.get(m, 0) + v
        return BiForm(acc, self.bidegree)

    def restrict_fiber(self, u: Scalar, v: Scalar) -> List[Fraction]:
        """Binary form in ``(s, t)`` obtained at ``(u:v)``, as coefficients of ``s^a, s^{a-1}t, ...``."""
        a = self.bidegree[0]
        coeffs = [Fraction(0)] * (a + 1)
        u, v = Fraction(u), Fraction(v)
        for (es, et, eu, ev), c in self._terms.items():
            coeffs[et] += c * u**eu * v**ev
        return coeffs

    def at(self, s: Scalar, t: Scalar, u: Scalar, v: Scalar) -> Fraction:
        return self.evaluate((s, t, u, v))


def forms_to_matrix(forms: Iterable[_SparseForm], basis: Sequence[Exponent]) -> List[List[Fraction]]:
    """Coefficient rows of ``forms`` against an exponent basis."""
    return [[f.coefficient(e) for e in basis] for f in forms]
