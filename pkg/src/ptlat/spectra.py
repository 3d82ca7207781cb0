"""Eigenvalues and eigenvectors of real nonsymmetric tridiagonal matrices.

Two routes:

* if every off-diagonal product is positive the matrix is diagonally
  similar to a symmetric tridiagonal one, whose (real) eigenvalues are found
  by Sturm-sequence bisection;
* otherwise the implicit double-shift (Francis) QR iteration is run on the
  tridiagonal matrix, which is already upper Hessenberg.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateEigenvalue,
    NoConvergence,
    NotAnEigenvalue,
    NotSymmetrizable,
)
from .lattice import LatticeHamiltonian, adjoint

__all__ = [
    "EigenPair",
    "Spectrum",
    "SymmetricTridiagonal",
    "charpoly_eval",
    "eigenpair",
    "eigenvalues",
    "hessenberg_qr_eigenvalues",
    "real_count",
    "sturm_count",
    "sturm_eigenvalues",
    "symmetrize",
]

TOL_REAL = 1e-9


def charpoly_eval(h: LatticeHamiltonian, e):
    """det(H - e*I) by the three-term recurrence of leading principal minors.

    Works for float, complex and Fraction arguments alike.
    """
    d_prev, d = 1, h.diag[0] - e
    for k in range(1, h.n):
        d_prev, d = d, (h.diag[k] - e) * d - h.sup[k - 1] * h.sub[k - 1] * d_prev
    return d


@dataclass(frozen=True)
class SymmetricTridiagonal:
    n: int
    diag: np.ndarray
    offdiag: np.ndarray
    # D such that D^-1 H D is the symmetric matrix
    scaling: np.ndarray

    def to_dense(self) -> np.ndarray:
        t = np.diag(self.diag)
        if self.n > 1:
            t += np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)
        return t


def symmetrize(h: LatticeHamiltonian) -> SymmetricTridiagonal:
    """Diagonal similarity taking H to a symmetric tridiagonal matrix.

    Raises NotSymmetrizable(d) for the first bond (1-based) whose product
    sup[d]*sub[d] is not strictly positive.
    """
    prods = h.products()
    for d, p in enumerate(prods, start=1):
        if not p > 0:
            raise NotSymmetrizable(d, p)
    sup = np.asarray(h.sup, dtype=float)
    sub = np.asarray(h.sub, dtype=float)
    off = np.sqrt(sup * sub)
    scale = np.ones(h.n)
    # D^-1 H D symmetric requires D[i+1]/D[i] = off[i]/sup[i]
    for i in range(h.n - 1):
        scale[i + 1] = scale[i] * off[i] / sup[i]
    return SymmetricTridiagonal(h.n, np.asarray(h.diag, dtype=float), off, scale)


def _gershgorin(t: SymmetricTridiagonal) -> tuple[float, float]:
    r = np.zeros(t.n)
    if t.n > 1:
        a = np.abs(t.offdiag)
        r[:-1] += a
        r[1:] += a
    return float(np.min(t.diag - r)), float(np.max(t.diag + r))


def sturm_count(t: SymmetricTridiagonal, x) -> np.ndarray:
    """Number of eigenvalues strictly below each entry of ``x``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    e2 = t.offdiag ** 2
    pivmin = np.finfo(float).tiny * max(1.0, float(e2.max()) if t.n > 1 else 1.0)
    count = np.zeros(x.shape, dtype=int)
    q = t.diag[0] - x
    q = np.where(np.abs(q) < pivmin, -pivmin, q)
    count += q < 0
    for i in range(1, t.n):
        q = t.diag[i] - x - e2[i - 1] / q
        q = np.where(np.abs(q) < pivmin, -pivmin, q)
        count += q < 0
    return count


def sturm_eigenvalues(t: SymmetricTridiagonal, tol: float = 1e-12) -> np.ndarray:
    """All eigenvalues of a symmetric tridiagonal matrix, ascending.

    Each eigenvalue is bisected until its bracket is narrower than ``tol``
    or than a few ulps, whichever is smaller.
    """
    lo_b, hi_b = _gershgorin(t)
    pad = 2 * np.finfo(float).eps * max(abs(lo_b), abs(hi_b), 1.0)
    lo = np.full(t.n, lo_b - pad)
    hi = np.full(t.n, hi_b + pad)
    idx = np.arange(t.n)
    eps = np.finfo(float).eps
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        below = sturm_count(t, mid) > idx
        hi = np.where(below, mid, hi)
        lo = np.where(below, lo, mid)
        width = hi - lo
        floor = 4 * eps * np.maximum(np.abs(lo), np.abs(hi))
        if np.all((width <= min(tol, 1e-13)) | (width <= floor)):
            break
    return 0.5 * (lo + hi)


def hessenberg_qr_eigenvalues(a, max_iterations: int | None = None) -> np.ndarray:
    """Eigenvalues of a real upper Hessenberg matrix by Francis double-shift QR.

    An exceptional shift is applied after every 10 iterations without
    deflation.  Raises NoConvergence after ``max_iterations`` total sweeps
    (default 100*n).
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    if max_iterations is None:
        max_iterations = 100 * n
    wr = np.zeros(n)
    wi = np.zeros(n)
    anorm = float(np.sum(np.abs(np.triu(a, -1))))
    nn = n - 1
    t = 0.0
    total = 0
    while nn >= 0:
        its = 0
        while True:
            # look for a negligible subdiagonal element
            l = 0
            for ll in range(nn, 0, -1):
                s = abs(a[ll - 1, ll - 1]) + abs(a[ll, ll])
                if s == 0.0:
                    s = anorm
                if abs(a[ll, ll - 1]) + s == s:
                    a[ll, ll - 1] = 0.0
                    l = ll
                    break
            x = a[nn, nn]
            if l == nn:
                wr[nn] = x + t
                wi[nn] = 0.0
                nn -= 1
                break
            y = a[nn - 1, nn - 1]
            w = a[nn, nn - 1] * a[nn - 1, nn]
            if l == nn - 1:
                p = 0.5 * (y - x)
                q = p * p + w
                z = math.sqrt(abs(q))
                x += t
                if q >= 0.0:
                    z = p + math.copysign(z, p)
                    wr[nn - 1] = wr[nn] = x + z
                    if z:
                        wr[nn] = x - w / z
                    wi[nn - 1] = wi[nn] = 0.0
                else:
                    wr[nn - 1] = wr[nn] = x + p
                    wi[nn - 1] = -z
                    wi[nn] = z
                nn -= 2
                break
            if total >= max_iterations:
                raise NoConvergence(max_iterations)
            if its > 0 and its % 10 == 0:
                t += x
                for i in range(nn + 1):
                    a[i, i] -= x
                s = abs(a[nn, nn - 1]) + abs(a[nn - 1, nn - 2])
                y = x = 0.75 * s
                w = -0.4375 * s * s
            its += 1
            total += 1
            m = nn - 2
            while m >= l:
                z = a[m, m]
                r = x - z
                s = y - z
                p = (r * s - w) / a[m + 1, m] + a[m, m + 1]
                q = a[m + 1, m + 1] - z - r - s
                r = a[m + 2, m + 1]
                s = abs(p) + abs(q) + abs(r)
                p /= s
                q /= s
                r /= s
                if m == l:
                    break
                u = abs(a[m, m - 1]) * (abs(q) + abs(r))
                v = abs(p) * (abs(a[m - 1, m - 1]) + abs(z) + abs(a[m + 1, m + 1]))
                if u + v == v:
                    break
                m -= 1
            for i in range(m + 2, nn + 1):
                a[i, i - 2] = 0.0
                if i != m + 2:
                    a[i, i - 3] = 0.0
            for k in range(m, nn):
                if k != m:
                    p = a[k, k - 1]
                    q = a[k + 1, k - 1]
                    r = a[k + 2, k - 1] if k != nn - 1 else 0.0
                    x = abs(p) + abs(q) + abs(r)
                    if x != 0.0:
                        p /= x
                        q /= x
                        r /= x
                s = math.copysign(math.sqrt(p * p + q * q + r * r), p)
                if s == 0.0:
                    continue
                if k == m:
                    if l != m:
                        a[k, k - 1] = -a[k, k - 1]
                else:
                    a[k, k - 1] = -s * x
                p += s
                x = p / s
                y = q / s
                z = r / s
                q /= p
                r /= p
                for j in range(k, nn + 1):
                    p = a[k, j] + q * a[k + 1, j]
                    if k != nn - 1:
                        p += r * a[k + 2, j]
                        a[k + 2, j] -= p * z
                    a[k + 1, j] -= p * y
                    a[k, j] -= p * x
                for i in range(l, min(nn, k + 3) + 1):
                    p = x * a[i, k] + y * a[i, k + 1]
                    if k != nn - 1:
                        p += z * a[i, k + 2]
                        a[i, k + 2] -= p * r
                    a[i, k + 1] -= p * q
                    a[i, k] -= p
    return wr + 1j * wi


def _sort_key(z: complex):
    return (z.real, z.imag)


def _pair_conjugates(ev: np.ndarray, tol_real: float) -> np.ndarray:
    ev = ev.astype(complex).copy()
    ev[np.abs(ev.imag) < tol_real] = ev[np.abs(ev.imag) < tol_real].real
    upper = [i for i in range(len(ev)) if ev[i].imag > 0]
    lower = [i for i in range(len(ev)) if ev[i].imag < 0]
    used = set()
    for i in upper:
        j = min((j for j in lower if j not in used), key=lambda j: abs(ev[j] - ev[i].conjugate()), default=None)
        if j is None:
            break
        used.add(j)
        z = 0.5 * (ev[i] + ev[j].conjugate())
        ev[i], ev[j] = z, z.conjugate()
    return ev


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues sorted by real part, then imaginary part."""

    eigenvalues: np.ndarray
    real_flags: np.ndarray
    tol_real: float
    method: str

    @property
    def real_count(self) -> int:
        return int(np.count_nonzero(self.real_flags))

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.real_flags))

    @property
    def real_eigenvalues(self) -> np.ndarray:
        return self.eigenvalues[self.real_flags].real

    def __len__(self):
        return len(self.eigenvalues)

    def min_gap(self) -> float:
        ev = self.eigenvalues
        if len(ev) < 2:
            return math.inf
        d = np.abs(ev[:, None] - ev[None, :])
        d[np.diag_indices_from(d)] = np.inf
        return float(d.min())


def _make_spectrum(ev, tol_real, method) -> Spectrum:
    ev = _pair_conjugates(np.asarray(ev), tol_real)
    ev = np.array(sorted(ev, key=_sort_key), dtype=complex)
    flags = np.abs(ev.imag) < tol_real
    ev.flags.writeable = False
    flags.flags.writeable = False
    return Spectrum(ev, flags, tol_real, method)


def eigenvalues(h: LatticeHamiltonian, tol_real: float = TOL_REAL, method: str = "auto") -> Spectrum:
    """Spectrum of ``h``.

    ``method='auto'`` uses Sturm bisection when the matrix is symmetrizable
    and double-shift QR otherwise; ``'sturm'`` and ``'qr'`` force a route
    (``'sturm'`` raises NotSymmetrizable when it does not apply).
    """
    if method not in ("auto", "sturm", "qr"):
        raise ValueError(f"unknown method {method!r}")
    if method in ("auto", "sturm"):
        try:
            t = symmetrize(h)
        except NotSymmetrizable:
            if method == "sturm":
                raise
        else:
            return _make_spectrum(sturm_eigenvalues(t), tol_real, "sturm")
    return _make_spectrum(hessenberg_qr_eigenvalues(h.to_dense()), tol_real, "qr")


def real_count(h: LatticeHamiltonian, tol_real: float = TOL_REAL) -> int:
    if not tol_real > 0:
        raise ValueError("tol_real must be positive")
    return eigenvalues(h, tol_real).real_count


@dataclass(frozen=True)
class EigenPair:
    """Simple real eigenvalue with its right and left eigenvectors.

    Both vectors are scaled so that their largest-magnitude component is +1.
    """

    eigenvalue: float
    right_vector: np.ndarray
    left_vector: np.ndarray

    def residuals(self, h: LatticeHamiltonian) -> tuple[float, float]:
        a = h.to_dense()
        r = np.max(np.abs(a @ self.right_vector - self.eigenvalue * self.right_vector))
        l = np.max(np.abs(a.T @ self.left_vector - self.eigenvalue * self.left_vector))
        return float(r), float(l)


def _max_normalize(v: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(v)))
    return v / v[i]


def _null_vector(a: np.ndarray, e: float) -> np.ndarray:
    m = a - e * np.eye(a.shape[0])
    _, _, vt = np.linalg.svd(m)
    v = vt[-1]
    # two inverse-iteration steps polish the direction
    shift = m + 1e-14 * max(1.0, abs(e)) * np.eye(a.shape[0])
    for _ in range(2):
        try:
            v = np.linalg.solve(shift, v)
        except np.linalg.LinAlgError:
            break
        v /= np.linalg.norm(v)
    return _max_normalize(v)


def eigenpair(h: LatticeHamiltonian, e: float, tol: float = 1e-8) -> EigenPair:
    """Right and left eigenvectors for the simple real eigenvalue nearest ``e``.

    ``e`` must lie within ``tol`` (relative to max(1, |e|)) of a computed
    eigenvalue, which in turn must be separated from the rest of the
    spectrum.  The left vector is the right eigenvector of the transpose.
    """
    spec = eigenvalues(h)
    ev = spec.eigenvalues
    scale = max(1.0, abs(e))
    dist = np.abs(ev - e)
    near = np.flatnonzero(dist <= tol * scale)
    if near.size == 0:
        raise NotAnEigenvalue(f"{e!r} is not an eigenvalue (nearest at distance {dist.min():.3e})")
    if near.size > 1 or not spec.real_flags[near[0]]:
        raise DegenerateEigenvalue(f"eigenvalue near {e!r} is not simple and real")
    others = np.delete(ev, near[0])
    if others.size and np.min(np.abs(others - ev[near[0]])) <= tol * scale:
        raise DegenerateEigenvalue(f"eigenvalue near {e!r} is not simple")
    a = h.to_dense()
    e0 = float(ev[near[0]].real)
    right = _null_vector(a, e0)
    left = _null_vector(adjoint(h).to_dense(), e0)
    # Rayleigh-type refinement: E = l.H.r / l.r
    denom = left @ right
    if abs(denom) > 1e-300:
        e0 = float(left @ a @ right / denom)
    right = _null_vector(a, e0)
    left = _null_vector(a.T, e0)
    return EigenPair(e0, right, left)
