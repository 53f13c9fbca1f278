from .forms import BiForm, MultiPoly, monomials
from .grammar import format_form, parse_biform, parse_multipoly
from .matrix import ExactMatrix

__all__ = [
    "BiForm",
    "MultiPoly",
    "monomials",
    "format_form",
    "parse_biform",
    "parse_multipoly",
    "ExactMatrix",
]
