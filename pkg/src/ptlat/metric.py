"""Metric candidates Theta = sum_k c_k P^(k), Dyson factors and related diagnostics."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dieudonne import PseudometricBasis, residual
from .errors import (
    DimensionMismatch,
    IndefiniteMetricWarning,
    NotPositiveDefinite,
    SingularTheta,
)
from .lattice import LatticeHamiltonian, ParityMatrix

__all__ = [
    "ChargeCandidate",
    "DysonFactorization",
    "MetricCandidate",
    "Positivity",
    "assemble_metric",
    "charge_candidate",
    "dyson_factor",
    "physical_inner_product",
    "positivity_check",
    "quasi_hermiticity_residual",
]

POSITIVITY_TOL = 1e-12


class Positivity(NamedTuple):
    label: str
    min_eigenvalue: float


def positivity_check(theta, tol: float = POSITIVITY_TOL) -> Positivity:
    """Classify a symmetric matrix by its smallest eigenvalue.

    ``positive_definite`` if it exceeds ``tol``, ``indefinite`` if it is
    below ``-tol`` and ``singular`` in between.  A positive verdict is
    confirmed by a Cholesky factorization; if that fails the matrix is
    reported as singular.
    """
    theta = np.asarray(theta, dtype=float)
    lo = float(np.linalg.eigvalsh(0.5 * (theta + theta.T))[0])
    if lo > tol:
        try:
            np.linalg.cholesky(theta)
        except np.linalg.LinAlgError:
            return Positivity("singular", lo)
        return Positivity("positive_definite", lo)
    if lo < -tol:
        return Positivity("indefinite", lo)
    return Positivity("singular", lo)


@dataclass(frozen=True)
class MetricCandidate:
    n: int
    theta: np.ndarray
    coefficients: tuple
    basis_source: str
    positivity: str
    min_eigenvalue: float
    dieudonne_residual: float | None = None

    @property
    def is_positive_definite(self) -> bool:
        return self.positivity == "positive_definite"

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "basis_source": self.basis_source,
            "coefficients": [float(c) for c in self.coefficients],
            "positivity": self.positivity,
            "min_eigenvalue": self.min_eigenvalue,
            "dieudonne_residual": self.dieudonne_residual,
        }


def assemble_metric(basis: PseudometricBasis, coefficients) -> MetricCandidate:
    """Theta = sum_k coefficients[k] * basis.members[k], classified for positivity."""
    coefficients = tuple(float(c) for c in coefficients)
    if len(coefficients) != len(basis.members) or len(coefficients) != basis.n:
        raise DimensionMismatch(f"{len(coefficients)} coefficients for a basis of {len(basis.members)} members")
    theta = np.zeros((basis.n, basis.n))
    for c, p in zip(coefficients, basis.members):
        if c:
            theta += c * p.as_float()
    theta = 0.5 * (theta + theta.T)
    pos = positivity_check(theta)
    res = residual(basis.hamiltonian, theta) if basis.hamiltonian is not None else None
    return MetricCandidate(basis.n, theta, coefficients, basis.source, pos.label, pos.min_eigenvalue, res)


def _theta(metric) -> np.ndarray:
    return metric.theta if isinstance(metric, MetricCandidate) else np.asarray(metric, dtype=float)


def physical_inner_product(theta, phi, psi) -> float:
    """phi^T Theta psi.

    A metric that is not positive definite still yields a value, with an
    IndefiniteMetricWarning.
    """
    if isinstance(theta, MetricCandidate):
        label = theta.positivity
    else:
        label = positivity_check(theta).label
    t = _theta(theta)
    phi = np.asarray(phi, dtype=float)
    psi = np.asarray(psi, dtype=float)
    if phi.shape != (t.shape[0],) or psi.shape != (t.shape[0],):
        raise DimensionMismatch("vector length does not match the metric")
    if label != "positive_definite":
        warnings.warn(f"metric is {label}; the inner product is not physical", IndefiniteMetricWarning, stacklevel=2)
    return float(phi @ t @ psi)


@dataclass(frozen=True)
class DysonFactorization:
    omega: np.ndarray
    h: np.ndarray
    sym_residual: float
    isospectrality_residual: float

    def to_dict(self) -> dict:
        return {"sym_residual": self.sym_residual, "isospectrality_residual": self.isospectrality_residual}


def dyson_factor(metric, hamiltonian: LatticeHamiltonian) -> DysonFactorization:
    """Principal square root Omega of Theta and the hermitized h = Omega H Omega^-1."""
    theta = _theta(metric)
    label = metric.positivity if isinstance(metric, MetricCandidate) else positivity_check(theta).label
    if label != "positive_definite":
        raise NotPositiveDefinite(f"metric is {label}")
    w, v = np.linalg.eigh(0.5 * (theta + theta.T))
    omega = (v * np.sqrt(w)) @ v.T
    omega_inv = (v / np.sqrt(w)) @ v.T
    a = hamiltonian.to_dense()
    h = omega @ a @ omega_inv
    sym = float(np.max(np.abs(h - h.T)))
    eh = np.sort(np.linalg.eigvalsh(0.5 * (h + h.T)))
    ea = np.sort(np.linalg.eigvals(a).real)
    iso = float(np.max(np.abs(eh - ea)))
    return DysonFactorization(omega, h, sym, iso)


def quasi_hermiticity_residual(hamiltonian: LatticeHamiltonian, theta) -> float:
    """max |Theta^-1 H^T Theta - H|."""
    t = _theta(theta)
    s = np.linalg.svd(t, compute_uv=False)
    if s[-1] <= 1e-14 * max(s[0], 1e-300):
        raise SingularTheta(f"metric is numerically singular (smallest singular value {s[-1]:.3e})")
    a = hamiltonian.to_dense()
    return float(np.max(np.abs(np.linalg.solve(t, a.T @ t) - a)))


@dataclass(frozen=True)
class ChargeCandidate:
    c_matrix: np.ndarray
    involution_residual: float

    def to_dict(self) -> dict:
        return {"involution_residual": self.involution_residual}


def charge_candidate(theta, parity: ParityMatrix) -> ChargeCandidate:
    """C = P Theta with ||C^2 - I||_max reported; no claim that it is small."""
    t = _theta(theta)
    if t.shape != (parity.n, parity.n):
        raise DimensionMismatch("parity and metric sizes differ")
    c = parity.apply(t)
    return ChargeCandidate(c, float(np.max(np.abs(c @ c - np.eye(parity.n)))))
