import math
from fractions import Fraction
from functools import reduce
from typing import Callable, List, Optional, Sequence, Tuple

from retifica.interfaces.interface import LinearAlgebra, Rows
from retifica.logger import logger


def _content(row) -> int:
    return reduce(math.gcd, (int(x) for x in row if x), 0)


class BareissImpl(LinearAlgebra):
    def __init__(self, mpz: Callable = int, name: str = "python"):
        """
        Fraction-free elimination backend.

        :param mpz: Integer constructor used for the working entries
            (``int`` or ``gmpy2.mpz``).
        :param name: Backend label, for logging.
        """
        self.mpz = mpz
        self.name = name

    def _integer_rows(self, rows: Rows) -> List[list]:
        out = []
        for row in rows:
            row = [Fraction(x) for x in row]
            scale = reduce(math.lcm, (x.denominator for x in row), 1)
            ints = [x.numerator * (scale // x.denominator) for x in row]
            g = reduce(math.gcd, ints, 0)
            if g > 1:
                ints = [x // g for x in ints]
            out.append([self.mpz(x) for x in ints])
        return out

    def _forward(self, a: List[list], n_cols: int) -> List[int]:
        n_rows = len(a)
        prev = self.mpz(1)
        r = 0
        pivots = []
        for c in range(n_cols):
            if r == n_rows:
                break
            p = next((i for i in range(r, n_rows) if a[i][c] != 0), None)
            if p is None:
                continue
            if p != r:
                a[r], a[p] = a[p], a[r]
            piv = a[r][c]
            pivot_row = a[r]
            for i in range(r + 1, n_rows):
                row = a[i]
                f = row[c]
                if f == 0:
                    for j in range(c + 1, n_cols):
                        if row[j]:
                            row[j] = (piv * row[j]) // prev
                else:
                    for j in range(c + 1, n_cols):
                        row[j] = (piv * row[j] - f * pivot_row[j]) // prev
                    row[c] = 0
            prev = piv
            pivots.append(c)
            r += 1
        return pivots

    def echelon(self, rows: Rows) -> Tuple[List[List[int]], List[int]]:
        if not rows:
            return [], []
        n_cols = len(rows[0])
        a = self._integer_rows(rows)
        pivots = self._forward(a, n_cols)
        return a[: len(pivots)], pivots

    def rref(self, rows: Rows) -> Tuple[List[List[Fraction]], List[int]]:
        a, pivots = self.echelon(rows)
        # backward pass stays integral, rows are kept primitive
        for k in range(len(pivots) - 1, -1, -1):
            c = pivots[k]
            g = _content(a[k])
            if g > 1:
                a[k] = [x // g for x in a[k]]
            piv = a[k][c]
            for i in range(k):
                f = a[i][c]
                if f == 0:
                    continue
                row = [piv * x - f * y for x, y in zip(a[i], a[k])]
                g = _content(row)
                a[i] = [x // g for x in row] if g > 1 else row
        reduced = []
        for k, c in enumerate(pivots):
            piv = int(a[k][c])
            reduced.append([Fraction(int(x), piv) for x in a[k]])
        return reduced, pivots

    def rank(self, rows: Rows) -> int:
        return len(self.echelon(rows)[1])

    def kernel(self, rows: Rows, n_cols: int) -> List[List[Fraction]]:
        if rows:
            reduced, pivots = self.rref(rows)
        else:
            reduced, pivots = [], []
        pivot_set = set(pivots)
        basis = []
        for free in range(n_cols):
            if free in pivot_set:
                continue
            v = [Fraction(0)] * n_cols
            v[free] = Fraction(1)
            for k, c in enumerate(pivots):
                v[c] = -reduced[k][free]
            scale = reduce(math.lcm, (x.denominator for x in v), 1)
            v = [x * scale for x in v]
            g = reduce(math.gcd, (x.numerator for x in v), 0)
            basis.append([x / g for x in v])
        logger.debug(
            f"kernel[{self.name}]: {len(rows)}x{n_cols}, nullity {len(basis)}"
        )
        return basis

    def solve(self, rows: Rows, rhs: Sequence[Fraction]) -> Optional[List[Fraction]]:
        if len(rows) != len(rhs):
            raise ValueError("Right hand side length does not match the row count")
        n_cols = len(rows[0]) if rows else 0
        augmented = [list(row) + [b] for row, b in zip(rows, rhs)]
        reduced, pivots = self.rref(augmented)
        if pivots and pivots[-1] == n_cols:
            return None
        x = [Fraction(0)] * n_cols
        for k, c in enumerate(pivots):
            x[c] = reduced[k][n_cols]
        return x
