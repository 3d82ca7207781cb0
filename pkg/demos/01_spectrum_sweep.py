"""Spectra of the eleven-site lattice along two parameter lines.

Run from the repository root: python3 demos/01_spectrum_sweep.py
"""
import numpy as np

from ptlat import ParameterPath, build_hamiltonian, eigenvalues, sweep

# free chain: the levels are 2 - 2cos(k pi / 12)
h = build_hamiltonian(11, [0.0])
print(eigenvalues(h).eigenvalues.real)
print(2 - 2 * np.cos(np.arange(1, 12) * np.pi / 12))

# couple both boundary layers with the same strength
tied = ParameterPath.tied(2)
table = sweep(11, tied, -1.2, 1.2, 241)
for lo, hi, count in table.count_bands():
    print(f"lambda = mu in [{lo:+.3f}, {hi:+.3f}]  real levels: {count}")

# now mu runs a quarter ahead of lambda
shifted = ParameterPath(((1, 0), (1, 0.25)))
table = sweep(11, shifted, -1.2, 1.2, 481)
for lo, hi, count in table.count_bands():
    print(f"mu = lambda + 1/4, lambda in [{lo:+.4f}, {hi:+.4f}]  real levels: {count}")

# the spectrum is mirror-symmetric about E = 2 at every point
s = eigenvalues(build_hamiltonian(11, [0.9, 1.15])).eigenvalues
print(np.sort_complex(s) + np.sort_complex(4 - s)[::-1])

with open("sweep_shifted.csv", "w") as fh:
    fh.write(table.to_csv())
print("wrote sweep_shifted.csv")
