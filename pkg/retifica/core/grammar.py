import re
from fractions import Fraction
from typing import Dict, Optional, Tuple, Union

from retifica.core.forms import BiForm, MultiPoly

__all__ = ["format_form", "parse_multipoly", "parse_biform"]

_BIFORM_VARS = ("s", "t", "u", "v")
_TERM = re.compile(r"([+-]?)([^+-]+)")
_NUMBER = re.compile(r"^\d+(?:/\d+)?$")
_FACTOR = re.compile(r"^(x\d+|[stuv])(?:\^(\d+))?$")


def _format_coeff(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def format_form(f: Union[MultiPoly, BiForm]) -> str:
    """
    Print a form as ``coeff*var^e*...`` terms joined by ``+``/``-``.

    Coefficients equal to one are omitted, exponent one is omitted, the zero
    form prints as ``0``.
    """
    if isinstance(f, BiForm):
        names = _BIFORM_VARS
    else:
        names = tuple(f"x{i}" for i in range(f.num_vars))
    pieces = []
    for exp, c in f.items():
        factors = []
        for name, e in zip(names, exp):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        mag = abs(c)
        if not factors:
            body = _format_coeff(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = "*".join([_format_coeff(mag)] + factors)
        if not pieces:
            pieces.append(("-" if c < 0 else "") + body)
        else:
            pieces.append(("- " if c < 0 else "+ ") + body)
    return " ".join(pieces) if pieces else "0"


def _parse_terms(text: str, index_of) -> Dict[Tuple[int, ...], Fraction]:
    compact = re.sub(r"\s+", "", text)
    if not compact:
        raise ValueError("Empty polynomial string")
    terms: Dict[Tuple[int, ...], Fraction] = {}
    pos = 0
    for match in _TERM.finditer(compact):
        if match.start() != pos:
            raise ValueError(f"Cannot parse polynomial near {compact[pos:]!r}")
        pos = match.end()
        sign, body = match.groups()
        coeff = Fraction(-1 if sign == "-" else 1)
        exp: Dict[int, int] = {}
        for factor in body.split("*"):
            if _NUMBER.match(factor):
                try:
                    coeff *= Fraction(factor)
                except ZeroDivisionError:
                    raise ValueError(f"Zero denominator in {factor!r} in {text!r}")
                continue
            m = _FACTOR.match(factor)
            if not m:
                raise ValueError(f"Bad factor {factor!r} in {text!r}")
            i = index_of(m.group(1))
            exp[i] = exp.get(i, 0) + int(m.group(2) or 1)
        key = index_of(None, exp)
        terms[key] = terms.get(key, Fraction(0)) + coeff
    if pos != len(compact):
        raise ValueError(f"Cannot parse polynomial near {compact[pos:]!r}")
    return terms


def parse_multipoly(text: str, num_vars: int = 5, degree: Optional[int] = None) -> MultiPoly:
    """
    Parse a form in ``x0..x{num_vars-1}``.

    :param text: The polynomial string.
    :param num_vars: Number of variables of the ambient ring.
    :param degree: Nominal degree for the zero form (and checked otherwise).
    :return: The parsed form.
    """

    def index_of(name, exp=None):
        if name is not None:
            if not name.startswith("x"):
                raise ValueError(f"Variable {name!r} not allowed in a P^{num_vars - 1} form")
            i = int(name[1:])
            if i >= num_vars:
                raise ValueError(f"Variable {name} out of range for {num_vars} variables")
            return i
        out = [0] * num_vars
        for i, e in exp.items():
            out[i] = e
        return tuple(out)

    return MultiPoly(num_vars, _parse_terms(text, index_of), degree)


def parse_biform(text: str, bidegree: Optional[Tuple[int, int]] = None) -> BiForm:
    """Parse a form in ``s, t, u, v``."""

    def index_of(name, exp=None):
        if name is not None:
            if name not in _BIFORM_VARS:
                raise ValueError(f"Variable {name!r} not allowed in a BiForm")
            return _BIFORM_VARS.index(name)
        out = [0] * 4
        for i, e in exp.items():
            out[i] = e
        return tuple(out)

    return BiForm(_parse_terms(text, index_of), bidegree)
