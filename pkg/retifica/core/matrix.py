from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from retifica.core.forms import Scalar

__all__ = ["ExactMatrix"]

_backend = None


def _algebra():
    global _backend
    if _backend is None:
        from retifica import LinearAlgebra

        _backend = LinearAlgebra()
    return _backend


class ExactMatrix:
    """
    Dense rational matrix.

    :param rows: Row lists; every row must have ``n_cols`` entries.
    :param n_cols: Column count, required when ``rows`` is empty.
    """

    __slots__ = ("rows", "n_rows", "n_cols")

    def __init__(self, rows: Sequence[Sequence[Scalar]], n_cols: Optional[int] = None):
        self.rows: Tuple[Tuple[Fraction, ...], ...] = tuple(
            tuple(Fraction(x) for x in row) for row in rows
        )
        self.n_rows = len(self.rows)
        if n_cols is None:
            if not self.rows:
                raise ValueError("n_cols is required for an empty matrix")
            n_cols = len(self.rows[0])
        if any(len(row) != n_cols for row in self.rows):
            raise ValueError("Ragged matrix")
        self.n_cols = n_cols

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.n_cols == other.n_cols and self.rows == other.rows

    def __repr__(self):
        return f"ExactMatrix({self.n_rows}x{self.n_cols})"

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix([list(col) for col in zip(*self.rows)], self.n_rows)

    def apply(self, vector: Sequence[Scalar]) -> List[Fraction]:
        if len(vector) != self.n_cols:
            raise ValueError(f"Expected a vector of length {self.n_cols}")
        vector = [Fraction(x) for x in vector]
        return [sum((a * x for a, x in zip(row, vector)), Fraction(0)) for row in self.rows]

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.n_cols != other.n_rows:
            raise ValueError("Shape mismatch")
        cols = list(zip(*other.rows))
        return ExactMatrix(
            [[sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in cols] for row in self.rows],
            other.n_cols,
        )

    def rank(self) -> int:
        if not self.rows:
            return 0
        return _algebra().rank(self.rows)

    def kernel(self) -> List[List[Fraction]]:
        return _algebra().kernel(self.rows, self.n_cols)

    def rref(self) -> Tuple[List[List[Fraction]], List[int]]:
        if not self.rows:
            return [], []
        return _algebra().rref(self.rows)

    def solve(self, rhs: Sequence[Scalar]) -> Optional[List[Fraction]]:
        return _algebra().solve(self.rows, [Fraction(b) for b in rhs])

    def inverse(self) -> "ExactMatrix":
        if self.n_rows != self.n_cols:
            raise ValueError("Only square matrices are invertible")
        n = self.n_cols
        augmented = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(self.rows)]
        reduced, pivots = _algebra().rref(augmented)
        if pivots[:n] != list(range(n)) or len(pivots) < n:
            raise ValueError("Matrix is singular")
        return ExactMatrix([row[n:] for row in reduced[:n]])
