from typing import List, Optional

__all__ = ["SearchExhausted", "VerificationError", "NotGenericallyFinite"]


class SearchExhausted(RuntimeError):
    """
    A bounded seeded search ran out of candidates.

    :param message: Human readable summary.
    :param log: One line per rejected candidate, in search order.
    """

    def __init__(self, message: str, log: Optional[List[str]] = None):
        super().__init__(message)
        self.log = list(log or [])


class VerificationError(RuntimeError):
    """An exact internal check failed (identity test, divisibility, degree drop)."""


class NotGenericallyFinite(ValueError):
    """The zero set of a system of forms contains a curve."""
