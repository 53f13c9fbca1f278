import os

from .interfaces.interface import LinearAlgebra as LinearAlgebraInterface
from .core import BiForm, ExactMatrix, MultiPoly, parse_biform, parse_multipoly
from .errors import NotGenericallyFinite, SearchExhausted, VerificationError

__all__ = [
    "LinearAlgebra",
    "LinearAlgebraInterface",
    "BiForm",
    "MultiPoly",
    "ExactMatrix",
    "parse_biform",
    "parse_multipoly",
    "SearchExhausted",
    "VerificationError",
    "NotGenericallyFinite",
]


def LinearAlgebra() -> LinearAlgebraInterface:
    from ._impl.bareiss import BareissImpl

    if "RETIFICA_NOGMPY" not in os.environ:
        try:
            import gmpy2

            return BareissImpl(gmpy2.mpz, "gmpy")
        except ImportError:
            pass

    return BareissImpl(int, "python")
