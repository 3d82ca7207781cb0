"""From a Hamiltonian to a metric, a Dyson map and a charge candidate."""
import numpy as np

from ptlat import (
    assemble_metric,
    banded_basis,
    build_hamiltonian,
    charge_candidate,
    dyson_factor,
    parity,
    quasi_hermiticity_residual,
    rank_one_basis,
)

h = build_hamiltonian(7, [0.4])

# rank-one members built from left eigenvectors; positive weights give a positive metric
basis = rank_one_basis(h)
cand = assemble_metric(basis, np.ones(7))
print("positivity:", cand.positivity, " min eigenvalue:", cand.min_eigenvalue)
print("quasi-hermiticity residual:", quasi_hermiticity_residual(h, cand))

fac = dyson_factor(cand, h)
print("hermitian partner symmetric to", fac.sym_residual)
print(np.round(fac.h, 4))

c = charge_candidate(cand, parity(7))
print("C^2 - I residual:", c.involution_residual)

# a single band on its own is indefinite
h11 = build_hamiltonian(11, [0.3, 0.2])
bands = banded_basis(h11)
for k in (1, 3, 6, 11):
    coeffs = np.zeros(11)
    coeffs[k - 1] = 1.0
    print(f"band {k:2d} alone:", assemble_metric(bands, coeffs).positivity)
