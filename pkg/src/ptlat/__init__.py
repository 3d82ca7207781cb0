"""Discrete PT-symmetric square-well lattices.

Spectra and exceptional points of boundary-coupled tridiagonal
Hamiltonians, solutions of the Dieudonne equation (dense kernel, rank-one
and banded), metric candidates, and an exact rational check of the
closed-form pseudometric elements.
"""
from .dieudonne import (
    FormulaElements,
    Pseudometric,
    PseudometricBasis,
    VerificationReport,
    band_support,
    banded_basis,
    banded_pseudometric,
    element_layout,
    formula_elements,
    rank_one_basis,
    reduction_check,
    residual,
    sylvester_kernel,
    verify_formulas,
)
from .errors import *  # noqa: F401,F403
from .exactlin import Rational, RationalMatrix, det_exact, nullspace_exact, solve_exact, to_float
from .exceptional import EPLocation, ParameterPath, SweepTable, ep_refine, reality_boundary, sweep, symmetrizability_boundary
from .lattice import CouplingVector, LatticeHamiltonian, ParityMatrix, adjoint, build_hamiltonian, is_pt_symmetric, parity
from .metric import (
    ChargeCandidate,
    DysonFactorization,
    MetricCandidate,
    assemble_metric,
    charge_candidate,
    dyson_factor,
    physical_inner_product,
    positivity_check,
    quasi_hermiticity_residual,
)
from .spectra import (
    EigenPair,
    Spectrum,
    SymmetricTridiagonal,
    charpoly_eval,
    eigenpair,
    eigenvalues,
    real_count,
    symmetrize,
)

__version__ = "0.1.0"
