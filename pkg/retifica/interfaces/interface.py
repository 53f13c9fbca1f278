from abc import ABC, abstractmethod
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

__all__ = ["LinearAlgebra", "Rows"]

Rows = Sequence[Sequence[Fraction]]


class LinearAlgebra(ABC):
    @abstractmethod
    def echelon(self, rows: Rows) -> Tuple[List[List[int]], List[int]]:
        """
        Fraction-free row echelon form.

        Each row is first scaled to integers, then eliminated without
        leaving the integers.

        :param rows: A dense matrix of rationals.
        :return: The nonzero echelon rows (integers) and their pivot columns.
        """
        pass

    @abstractmethod
    def rref(self, rows: Rows) -> Tuple[List[List[Fraction]], List[int]]:
        """
        Reduced row echelon form over the rationals.

        :param rows: A dense matrix of rationals.
        :return: The nonzero reduced rows and their pivot columns.
        """
        pass

    @abstractmethod
    def rank(self, rows: Rows) -> int:
        """
        :param rows: A dense matrix of rationals.
        :return: The rank of the matrix.
        """
        pass

    @abstractmethod
    def kernel(self, rows: Rows, n_cols: int) -> List[List[Fraction]]:
        """
        Basis of the right null space.

        One vector per free column, taken in column order, scaled to a
        primitive integer vector.

        :param rows: A dense matrix of rationals (may be empty).
        :param n_cols: Number of columns, needed when ``rows`` is empty.
        :return: A list of linearly independent vectors annihilated by the matrix.
        """
        pass

    @abstractmethod
    def solve(self, rows: Rows, rhs: Sequence[Fraction]) -> Optional[List[Fraction]]:
        """
        Solve ``rows * x = rhs``.

        :param rows: A dense matrix of rationals.
        :param rhs: The right hand side.
        :return: A particular solution with free variables set to zero, or None
            when the system is inconsistent.
        """
        pass
