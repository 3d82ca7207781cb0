"""Exact rational linear algebra with fraction-free (Bareiss) elimination.

Scalars are :class:`fractions.Fraction`, which already keeps every value in
lowest terms with a positive denominator.  Rows are cleared of denominators
before elimination so the echelon phase runs on integers only; Bareiss'
update divides every new entry exactly by the previous pivot.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational as _RationalABC

import numpy as np

from .errors import RationalOverflow, SingularMatrix

__all__ = [
    "Rational",
    "RationalMatrix",
    "bareiss_echelon",
    "det_exact",
    "nullspace_exact",
    "parse_rational",
    "rational_str",
    "solve_exact",
    "to_float",
]

Rational = Fraction


def _q(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (_RationalABC, str)):
        return Fraction(x)
    if isinstance(x, float):
        # binary floats are exact dyadic rationals
        return Fraction(x)
    if isinstance(x, np.integer):
        return Fraction(int(x))
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def parse_rational(text: str) -> Fraction:
    """Parse ``'p/q'``, an integer or a terminating decimal exactly."""
    return Fraction(text.strip())


def rational_str(x) -> str:
    """``'num/den'`` form used in JSON reports (integers as ``'n/1'``)."""
    x = _q(x)
    return f"{x.numerator}/{x.denominator}"


def to_float(x) -> float:
    try:
        return float(_q(x))
    except OverflowError as exc:
        raise RationalOverflow(str(exc)) from None


class RationalMatrix:
    """Immutable rectangular matrix of Fractions."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, data):
        data = tuple(tuple(_q(x) for x in row) for row in data)
        cols = len(data[0]) if data else 0
        if any(len(r) != cols for r in data):
            raise ValueError("ragged rows")
        self._data = data
        self.rows = len(data)
        self.cols = cols

    @classmethod
    def identity(cls, n):
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows, cols):
        return cls([[0] * cols for _ in range(rows)])

    def __getitem__(self, ij):
        i, j = ij
        return self._data[i][j]

    def row(self, i) -> tuple:
        return self._data[i]

    def tolist(self) -> list:
        return [list(r) for r in self._data]

    @property
    def T(self) -> "RationalMatrix":
        return RationalMatrix(zip(*self._data)) if self.rows else RationalMatrix([])

    def __matmul__(self, other):
        if isinstance(other, RationalMatrix):
            if self.cols != other.rows:
                raise ValueError("shape mismatch")
            ot = other.T._data
            return RationalMatrix([[sum(a * b for a, b in zip(r, c)) for c in ot] for r in self._data])
        v = tuple(_q(x) for x in other)
        if len(v) != self.cols:
            raise ValueError("shape mismatch")
        return tuple(sum(a * b for a, b in zip(r, v)) for r in self._data)

    def __eq__(self, other):
        return isinstance(other, RationalMatrix) and self._data == other._data

    def __hash__(self):
        return hash(self._data)

    def __repr__(self):
        return f"RationalMatrix({self.rows}x{self.cols})"

    def to_float(self) -> np.ndarray:
        return np.array([[to_float(x) for x in r] for r in self._data], dtype=float).reshape(self.rows, self.cols)


def _integer_rows(rows) -> list[list[int]]:
    out = []
    for r in rows:
        r = [_q(x) for x in r]
        m = math.lcm(*(x.denominator for x in r)) if r else 1
        out.append([int(x * m) for x in r])
    return out


def bareiss_echelon(m: list[list[int]]) -> tuple[list[list[int]], list[int], int]:
    """Fraction-free row echelon form of an integer matrix.

    Returns ``(echelon, pivot_columns, swaps)``; the input is not modified.
    Every entry produced is an integer minor of the input, so each division
    by the previous pivot is exact; this is checked, not assumed.
    """
    a = [list(map(int, r)) for r in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots: list[int] = []
    prev = 1
    r = 0
    swaps = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if p is None:
            continue
        if p != r:
            a[r], a[p] = a[p], a[r]
            swaps += 1
        piv = a[r][c]
        for i in range(r + 1, rows):
            f = a[i][c]
            row_i = a[i]
            row_r = a[r]
            for j in range(c + 1, cols):
                q, rem = divmod(piv * row_i[j] - f * row_r[j], prev)
                if rem:
                    raise ArithmeticError("Bareiss division not exact")
                row_i[j] = q
            row_i[c] = 0
        prev = piv
        pivots.append(c)
        r += 1
    return a, pivots, swaps


def det_exact(a) -> Fraction:
    """Exact determinant of a square rational matrix."""
    a = a.tolist() if isinstance(a, RationalMatrix) else [list(r) for r in a]
    n = len(a)
    if any(len(r) != n for r in a):
        raise ValueError("matrix must be square")
    if n == 0:
        return Fraction(1)
    rows = [[_q(x) for x in r] for r in a]
    scale = Fraction(1)
    for r in rows:
        scale *= math.lcm(*(x.denominator for x in r))
    e, pivots, swaps = bareiss_echelon(_integer_rows(rows))
    if len(pivots) < n:
        return Fraction(0)
    d = Fraction(e[n - 1][n - 1]) / scale
    return -d if swaps % 2 else d


def _primitive(v: list[Fraction]) -> list[Fraction]:
    m = math.lcm(*(x.denominator for x in v))
    ints = [int(x * m) for x in v]
    g = math.gcd(*ints)
    if g == 0:
        return v
    lead = next(x for x in ints if x != 0)
    g = g if lead > 0 else -g
    return [Fraction(x // g) for x in ints]


def nullspace_exact(a) -> list[tuple]:
    """Basis of the exact kernel of ``a``, one primitive integer vector per free column.

    Empty list when the kernel is trivial.
    """
    rows = a.tolist() if isinstance(a, RationalMatrix) else [list(r) for r in a]
    if not rows:
        return []
    cols = len(rows[0])
    e, pivots, _ = bareiss_echelon(_integer_rows(rows))
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = []
    for f in free:
        x = [Fraction(0)] * cols
        x[f] = Fraction(1)
        for r in range(len(pivots) - 1, -1, -1):
            c = pivots[r]
            s = sum((e[r][j] * x[j] for j in range(c + 1, cols) if e[r][j]), Fraction(0))
            x[c] = -s / e[r][c]
        basis.append(tuple(_primitive(x)))
    return basis


def solve_exact(a, b) -> tuple:
    """Exact solution of the square nonsingular system ``a x = b``."""
    rows = a.tolist() if isinstance(a, RationalMatrix) else [list(r) for r in a]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("matrix must be square")
    b = [_q(x) for x in b]
    if len(b) != n:
        raise ValueError("right-hand side has wrong length")
    aug = [[_q(x) for x in r] + [bi] for r, bi in zip(rows, b)]
    e, pivots, _ = bareiss_echelon(_integer_rows(aug))
    if len(pivots) < n or pivots[n - 1] != n - 1:
        raise SingularMatrix("matrix is singular")
    x = [Fraction(0)] * n
    for r in range(n - 1, -1, -1):
        s = sum((e[r][j] * x[j] for j in range(r + 1, n) if e[r][j]), Fraction(0))
        x[r] = (e[r][n] - s) / e[r][r]
    return tuple(x)
