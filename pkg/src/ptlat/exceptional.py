"""Parameter sweeps, reality-domain boundaries and exceptional points.

A :class:`ParameterPath` ties every coupling to one driver value ``x`` by an
affine map ``p_d = a_d * x + b_d``; e.g. the line ``mu = lambda + 0.25`` is
``ParameterPath(((1, 0), (1, 0.25)))``.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import MultipleTransitions, NoConvergence, NoSignChange
from .lattice import CouplingVector, build_hamiltonian
from .spectra import TOL_REAL, Spectrum, eigenvalues

__all__ = [
    "EPLocation",
    "ParameterPath",
    "SweepTable",
    "ep_refine",
    "reality_boundary",
    "sweep",
    "symmetrizability_boundary",
]


@dataclass(frozen=True)
class ParameterPath:
    """Affine linkage ``p_d = a_d * x + b_d`` for d = 1..K.

    ``driver`` is the 0-based index of the coupling that the driver value
    is reported as (its linkage should normally be ``(1, 0)``).
    """

    linkage: tuple
    driver: int = 0

    def __post_init__(self):
        link = tuple((float(a), float(b)) for a, b in self.linkage)
        if not link:
            raise ValueError("empty linkage")
        if not all(math.isfinite(a) and math.isfinite(b) for a, b in link):
            raise ValueError("linkage coefficients must be finite")
        if not 0 <= self.driver < len(link):
            raise ValueError("driver index outside the coupling depth")
        object.__setattr__(self, "linkage", link)

    @classmethod
    def tied(cls, depth: int) -> "ParameterPath":
        """All couplings equal to the driver."""
        return cls(((1.0, 0.0),) * depth)

    @classmethod
    def single(cls, depth: int = 1, fixed=()) -> "ParameterPath":
        """lambda is the driver; the remaining couplings are held at ``fixed``."""
        fixed = tuple(fixed) + (0.0,) * (depth - 1 - len(fixed))
        return cls(((1.0, 0.0),) + tuple((0.0, f) for f in fixed[: depth - 1]))

    @property
    def depth(self) -> int:
        return len(self.linkage)

    def couplings(self, x: float) -> CouplingVector:
        return CouplingVector(*(a * x + b for a, b in self.linkage))


@dataclass(frozen=True)
class SweepTable:
    n: int
    path: ParameterPath
    grid: np.ndarray
    spectra: tuple

    @property
    def real_counts(self) -> np.ndarray:
        return np.array([s.real_count for s in self.spectra])

    def count_bands(self) -> list[tuple[float, float, int]]:
        """Maximal runs of constant real_count as (first x, last x, count)."""
        bands = []
        counts = self.real_counts
        start = 0
        for i in range(1, len(counts) + 1):
            if i == len(counts) or counts[i] != counts[start]:
                bands.append((float(self.grid[start]), float(self.grid[i - 1]), int(counts[start])))
                start = i
        return bands

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("driver,index,re,im,is_real\n")
        for x, spec in zip(self.grid, self.spectra):
            for i, (e, real) in enumerate(zip(spec.eigenvalues, spec.real_flags)):
                buf.write(f"{_num(x)},{i},{_num(e.real)},{_num(e.imag)},{int(bool(real))}\n")
        return buf.getvalue()


def _num(x) -> str:
    return repr(float(x) + 0.0)


def _spectrum_at(n, path, x, tol_real) -> Spectrum:
    try:
        return eigenvalues(build_hamiltonian(n, path.couplings(x)), tol_real)
    except NoConvergence as exc:
        raise NoConvergence(exc.max_iterations, where=f"driver={x!r}") from exc


def sweep(n: int, path: ParameterPath, lo: float, hi: float, steps: int, tol_real: float = TOL_REAL) -> SweepTable:
    """Spectra at ``steps`` equally spaced driver values from lo to hi inclusive."""
    if not lo < hi:
        raise ValueError("need lo < hi")
    if steps < 2:
        raise ValueError("need at least two grid points")
    grid = np.linspace(lo, hi, steps)
    grid.flags.writeable = False
    spectra = tuple(_spectrum_at(n, path, float(x), tol_real) for x in grid)
    return SweepTable(n, path, grid, spectra)


def _count(n, path, x, tol_real) -> int:
    return _spectrum_at(n, path, x, tol_real).real_count


def reality_boundary(n: int, path: ParameterPath, bracket_lo: float, bracket_hi: float,
                     tol: float = 1e-8, tol_real: float = TOL_REAL) -> float:
    """Edge of the more-real plateau inside a bracket.

    The two ends must have different real counts.  Bisection keeps the
    predicate ``real_count == (larger end count)`` true on one side, so with
    several steps inside the bracket the one bounding the more-real end is
    found.  The result is within ``tol`` of the transition.
    """
    lo, hi = float(bracket_lo), float(bracket_hi)
    c_lo = _count(n, path, lo, tol_real)
    c_hi = _count(n, path, hi, tol_real)
    if c_lo == c_hi:
        raise NoSignChange(lo, hi, c_lo)
    # inside: the end whose plateau is tracked
    inside, outside = (lo, hi) if c_lo > c_hi else (hi, lo)
    c_in = max(c_lo, c_hi)
    while abs(outside - inside) > tol:
        mid = 0.5 * (inside + outside)
        if mid in (inside, outside):
            break
        if _count(n, path, mid, tol_real) == c_in:
            inside = mid
        else:
            outside = mid
    return 0.5 * (inside + outside)


@dataclass(frozen=True)
class EPLocation:
    """Refined transition point.

    ``colliding_pairs`` lists index pairs (into the sorted real-side
    spectrum) of eigenvalues that merge; because the spectrum is symmetric
    about E = 2, an off-centre collision comes with its mirror image.
    ``gap_at_star`` is the largest gap among those pairs at the real-side
    end of the refined bracket.
    """

    driver_value: float
    colliding_pairs: tuple
    gap_at_star: float
    count_real_side: int
    count_complex_side: int
    merge_energies: tuple

    @property
    def colliding_pair(self) -> tuple:
        return self.colliding_pairs[0]

    def to_dict(self) -> dict:
        return {
            "driver_value": self.driver_value,
            "colliding_pairs": [list(p) for p in self.colliding_pairs],
            "merge_energies": list(self.merge_energies),
            "gap_at_star": self.gap_at_star,
            "count_real_side": self.count_real_side,
            "count_complex_side": self.count_complex_side,
        }


def ep_refine(n: int, path: ParameterPath, bracket, tol: float = 1e-8, tol_real: float = TOL_REAL,
              scan: int = 33, strict: bool = True) -> EPLocation:
    """Locate the reality transition inside ``bracket``.

    The bracket is scanned on ``scan`` points first.  NoSignChange is raised
    if the real_count never changes.  With ``strict`` MultipleTransitions is
    raised if it changes more than once; otherwise the transition bounding
    the end with more real levels is refined (the ends must then differ).
    An intermediate count on a single grid point is treated as the EP itself.
    """
    lo, hi = map(float, bracket)
    grid = np.linspace(lo, hi, scan)
    counts = [_count(n, path, float(x), tol_real) for x in grid]
    changes = [i for i in range(1, scan) if counts[i] != counts[i - 1]]
    if not changes:
        raise NoSignChange(lo, hi, counts[0])
    steps = np.diff(counts)
    monotone = np.all(steps >= 0) or np.all(steps <= 0)
    single = monotone and changes[-1] - changes[0] <= 1
    if not single:
        if strict or counts[0] == counts[-1]:
            raise MultipleTransitions([float(grid[i]) for i in changes])
        # one grid cell next to the more-real end
        changes = [changes[0]] if counts[0] > counts[-1] else [changes[-1]]
    a, b = float(grid[changes[0] - 1]), float(grid[changes[-1]])
    star = reality_boundary(n, path, a, b, tol, tol_real)
    # the two bracket ends of the refined interval, real side first
    left, right = star - tol, star + tol
    s_left = _spectrum_at(n, path, left, tol_real)
    s_right = _spectrum_at(n, path, right, tol_real)
    if s_left.real_count >= s_right.real_count:
        real_side, complex_side = s_left, s_right
    else:
        real_side, complex_side = s_right, s_left
    drop = real_side.real_count - complex_side.real_count
    if drop <= 0 or drop % 2:
        raise MultipleTransitions([star])
    ev = real_side.eigenvalues.real
    gaps = sorted((ev[j + 1] - ev[j], j) for j in range(len(ev) - 1))
    chosen = []
    for g, j in gaps:
        if any(abs(j - c) <= 1 for c in chosen):
            continue
        chosen.append(j)
        if len(chosen) == drop // 2:
            break
    chosen.sort()
    pairs = tuple((j, j + 1) for j in chosen)
    gap = float(max(ev[j + 1] - ev[j] for j in chosen))
    energies = tuple(float(0.5 * (ev[j] + ev[j + 1])) for j in chosen)
    return EPLocation(star, pairs, gap, real_side.real_count, complex_side.real_count, energies)


def symmetrizability_boundary(path: ParameterPath) -> list[float]:
    """Driver values at which some product 1 - p_d**2 vanishes along the path."""
    zeros = set()
    for a, b in path.linkage:
        if a == 0:
            continue
        for target in (-1.0, 1.0):
            zeros.add((target - b) / a + 0.0)
    return sorted(zeros)
