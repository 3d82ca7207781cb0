"""Boundary-coupled tridiagonal Hamiltonians of the discrete PT-symmetric square well.

The lattice has ``n`` sites, a constant diagonal 2 and nearest-neighbour
hopping -1.  The first ``K`` bonds at each end carry a non-Hermitian
perturbation controlled by one parameter per bond:

    H(d, d+1) = -1 - s_d,   H(d+1, d) = -1 + s_d,   s_d = (-1)**(d+1) * p_d

so that ``p = (lam,)`` gives the original one-parameter wells, ``(lam, lam)``
the three-site coupling and ``(lam, mu, nu)`` the three-parameter model.
The lower half of the matrix is fixed by centrosymmetry,
H(i, j) = H(n+1-i, n+1-j).  The alternation of signs beyond the third bond
is an extrapolation; no published model fixes it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

from .errors import DepthTooLarge, NonFinite

__all__ = [
    "CouplingVector",
    "LatticeHamiltonian",
    "ParityMatrix",
    "adjoint",
    "build_hamiltonian",
    "is_pt_symmetric",
    "parity",
]

PARAM_NAMES = ("lambda", "mu", "nu")


def _is_finite(x) -> bool:
    if isinstance(x, Rational):
        return True
    try:
        return math.isfinite(x)
    except TypeError:
        return False


@dataclass(frozen=True)
class CouplingVector:
    """Boundary couplings ``(p_1, ..., p_K)``; ``p_1`` is lambda, ``p_2`` mu, ``p_3`` nu."""

    params: tuple

    def __init__(self, *params):
        if len(params) == 1 and isinstance(params[0], (list, tuple)):
            params = tuple(params[0])
        if not params:
            raise ValueError("at least one coupling is required")
        for p in params:
            if not _is_finite(p):
                raise NonFinite(f"coupling {p!r} is not finite")
        object.__setattr__(self, "params", tuple(params))

    @property
    def depth(self) -> int:
        return len(self.params)

    @property
    def is_exact(self) -> bool:
        return all(isinstance(p, Rational) for p in self.params)

    def signed(self, d: int):
        """Signed coupling s_d of bond ``d`` (1-based)."""
        return self.params[d - 1] if d % 2 == 1 else -self.params[d - 1]

    def named(self) -> dict:
        names = [PARAM_NAMES[i] if i < len(PARAM_NAMES) else f"p{i + 1}" for i in range(self.depth)]
        return dict(zip(names, self.params))

    def __iter__(self):
        return iter(self.params)

    def __len__(self):
        return len(self.params)


@dataclass(frozen=True)
class LatticeHamiltonian:
    """Real tridiagonal matrix stored by its three diagonals.

    ``sup[i]`` is H(i+1, i+2) and ``sub[i]`` is H(i+2, i+1) in 1-based matrix
    notation.  Entries may be floats or exact rationals.
    """

    n: int
    diag: tuple
    sup: tuple
    sub: tuple

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if len(self.diag) != self.n or len(self.sup) != self.n - 1 or len(self.sub) != self.n - 1:
            raise ValueError("diagonal lengths do not match n")
        if any(d != 2 for d in self.diag):
            raise ValueError("diagonal entries must all equal 2")

    @property
    def is_exact(self) -> bool:
        return all(isinstance(x, Rational) for x in self.sup + self.sub)

    def products(self) -> tuple:
        """Off-diagonal products sup[d]*sub[d], the only data the spectrum depends on."""
        return tuple(a * b for a, b in zip(self.sup, self.sub))

    def to_dense(self) -> np.ndarray:
        h = np.diag(np.asarray(self.diag, dtype=float))
        if self.n > 1:
            h += np.diag(np.asarray(self.sup, dtype=float), 1)
            h += np.diag(np.asarray(self.sub, dtype=float), -1)
        return h

    def to_exact(self) -> np.ndarray:
        """Dense object array of Fractions; products stay exact."""
        h = np.full((self.n, self.n), Fraction(0), dtype=object)
        for i in range(self.n):
            h[i, i] = Fraction(self.diag[i])
        for i in range(self.n - 1):
            h[i, i + 1] = Fraction(self.sup[i])
            h[i + 1, i] = Fraction(self.sub[i])
        return h

    def to_text(self) -> str:
        """Row-major, tab-separated dense export."""
        h = self.to_exact() if self.is_exact else self.to_dense()
        return "".join("\t".join(_fmt(x) for x in row) + "\n" for row in h)


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    x = float(x) + 0.0
    return repr(x)


def build_hamiltonian(n: int, c) -> LatticeHamiltonian:
    """Build the ``n``-site Hamiltonian for couplings ``c``.

    ``c`` may be a CouplingVector or a plain sequence of parameters.  The two
    perturbed boundary regions must not touch: ``2*K + 1 <= n``.
    """
    if not isinstance(c, CouplingVector):
        c = CouplingVector(*c) if isinstance(c, (list, tuple)) else CouplingVector(c)
    k = c.depth
    if n < 2 or 2 * k + 1 > n:
        raise DepthTooLarge(k, n)
    one = 1
    sup = [-one] * (n - 1)
    sub = [-one] * (n - 1)
    for d in range(1, k + 1):
        s = c.signed(d)
        sup[d - 1] = -1 - s
        sub[d - 1] = -1 + s
        # mirrored bond n-d: H(n-d, n-d+1) = H(d+1, d)
        sup[n - d - 1] = -1 + s
        sub[n - d - 1] = -1 - s
    return LatticeHamiltonian(n, (2,) * n, tuple(sup), tuple(sub))


def adjoint(h: LatticeHamiltonian) -> LatticeHamiltonian:
    # real entries: the adjoint is the transpose
    return LatticeHamiltonian(h.n, h.diag, h.sub, h.sup)


def is_pt_symmetric(h: LatticeHamiltonian) -> bool:
    """True iff P H P == H exactly, P being the site-reversal permutation."""
    n = h.n
    if any(h.diag[i] != h.diag[n - 1 - i] for i in range(n)):
        return False
    # (P H P)(i, i+1) = H(n+1-i, n-i), i.e. sup[i] must equal sub[n-2-i]
    return all(h.sup[i] == h.sub[n - 2 - i] for i in range(n - 1))


@dataclass(frozen=True)
class ParityMatrix:
    """Site-reversal permutation; an involution and symmetric."""

    n: int

    def to_dense(self) -> np.ndarray:
        return np.eye(self.n)[::-1].copy()

    def __array__(self, dtype=None, copy=None):
        a = self.to_dense()
        return a if dtype is None else a.astype(dtype)

    def apply(self, x):
        """Reverse the leading axis (P @ x) without forming P."""
        return np.asarray(x)[::-1]


def parity(n: int) -> ParityMatrix:
    if n < 1:
        raise ValueError("n must be positive")
    return ParityMatrix(n)
