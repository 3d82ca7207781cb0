import numpy as np
import pytest

from ptlat import (
    MultipleTransitions,
    NoSignChange,
    ParameterPath,
    ep_refine,
    reality_boundary,
    sweep,
    symmetrizability_boundary,
)
from oracles import mp_real_count

TIED = ParameterPath.tied(2)
SHIFTED = ParameterPath(((1, 0), (1, 0.25)))
ONE = ParameterPath.single(1)

# boundary of the fully real region on the shifted line, from a 60-digit root count
SHIFTED_BOUNDARY = 0.7573276731546775


def test_path_validation():
    with pytest.raises(ValueError):
        ParameterPath(())
    with pytest.raises(ValueError):
        ParameterPath(((1, float("nan")),))
    with pytest.raises(ValueError):
        ParameterPath(((1, 0),), driver=1)
    p = ParameterPath.single(3, fixed=(0.2,))
    assert p.couplings(0.5).params == (0.5, 0.2, 0.0)
    assert SHIFTED.couplings(0.5).params == (0.5, 0.75)


def test_sweep_examples():
    t = sweep(11, TIED, -0.9, 0.9, 19)
    assert np.all(t.real_counts == 11)
    t = sweep(11, SHIFTED, 0.8, 0.95, 16)
    assert np.all(t.real_counts < 11)
    t = sweep(3, ONE, 0.0, 0.5, 11)
    for s in t.spectra:
        assert abs(s.eigenvalues[1] - 2) < 1e-12
    with pytest.raises(ValueError):
        sweep(5, ONE, 1, 0, 5)
    with pytest.raises(ValueError):
        sweep(5, ONE, 0, 1, 1)


def test_sweep_csv_reproducible():
    a = sweep(11, SHIFTED, -1.2, 1.2, 41).to_csv()
    b = sweep(11, SHIFTED, -1.2, 1.2, 41).to_csv()
    assert a == b
    lines = a.splitlines()
    assert lines[0] == "driver,index,re,im,is_real"
    assert len(lines) == 1 + 41 * 11
    assert "-0.0" not in {f for line in lines[1:] for f in line.split(",")}


def test_count_bands_shifted_line():
    bands = sweep(11, SHIFTED, 0.5, 1.0, 201).count_bands()
    assert [c for _, _, c in bands] == [11, 7, 5, 7]
    assert bands[0][1] < SHIFTED_BOUNDARY < bands[1][0]


def test_nine_level_window():
    # the nine-real-level window is narrow: roughly 0.9978 < lambda < 1.0001
    for lam in (0.998, 0.999, 0.9995):
        t = sweep(11, SHIFTED, lam, lam + 1e-9, 2)
        assert t.real_counts[0] == 9 == mp_real_count(11, [lam, lam + 0.25])


def test_shifted_boundary_against_high_precision():
    b = reality_boundary(11, SHIFTED, 0.5, 1.0)
    assert abs(b - SHIFTED_BOUNDARY) < 1e-6
    assert mp_real_count(11, [b - 1e-6, b - 1e-6 + 0.25]) == 11
    assert mp_real_count(11, [b + 1e-6, b + 1e-6 + 0.25]) == 7


def test_reality_boundary_examples():
    assert abs(reality_boundary(11, TIED, 0.9, 1.1) - 1.0) < 1e-6
    assert abs(reality_boundary(11, SHIFTED, -1.2, -0.8) + 1.0) < 1e-6
    assert abs(reality_boundary(11, ONE, 1.1, 0.9) - 1.0) < 1e-6
    with pytest.raises(NoSignChange):
        reality_boundary(11, TIED, 0.0, 0.5)


def test_boundary_tracks_more_real_end():
    # [-1.2, -0.8] holds two steps (7 -> 9 near -1.076, 9 -> 11 at -1)
    t = sweep(11, SHIFTED, -1.2, -0.8, 81)
    assert [c for _, _, c in t.count_bands()] == [7, 9, 11]
    assert abs(reality_boundary(11, SHIFTED, -1.2, -0.8) + 1) < 1e-6


def test_ep_single_coupling():
    loc = ep_refine(11, ONE, (0.95, 1.05))
    assert abs(loc.driver_value - 1.0) < 1e-6
    assert loc.count_real_side - loc.count_complex_side == 2
    i, j = loc.colliding_pair
    assert j == i + 1
    assert loc.gap_at_star < 1e-3


def test_ep_tied_mirror_pairs():
    loc = ep_refine(11, TIED, (0.9, 1.1))
    assert abs(loc.driver_value - 1.0) < 1e-6
    # two mirror-image collisions about E = 2 drop the count by four
    assert (loc.count_real_side, loc.count_complex_side) == (11, 7)
    (e1, e2) = loc.merge_energies
    assert abs(e1 + e2 - 4) < 1e-9
    assert all(j == i + 1 for i, j in loc.colliding_pairs)


def test_ep_shifted_line():
    loc = ep_refine(11, SHIFTED, (0.5, 0.8))
    assert abs(loc.driver_value - SHIFTED_BOUNDARY) < 1e-6
    assert all(j == i + 1 for i, j in loc.colliding_pairs)
    assert loc.count_real_side == 11
    d = loc.to_dict()
    assert d["colliding_pairs"] == [list(p) for p in loc.colliding_pairs]


def test_ep_errors():
    with pytest.raises(NoSignChange):
        ep_refine(11, SHIFTED, (0.0, 0.5))
    with pytest.raises(MultipleTransitions):
        ep_refine(11, SHIFTED, (0.5, 1.0))
    loc = ep_refine(11, SHIFTED, (0.5, 1.0), strict=False)
    assert abs(loc.driver_value - SHIFTED_BOUNDARY) < 1e-6


def test_symmetrizability_boundary():
    assert symmetrizability_boundary(ONE) == [-1.0, 1.0]
    assert symmetrizability_boundary(SHIFTED) == [-1.25, -1.0, 0.75, 1.0]
    assert symmetrizability_boundary(ParameterPath.single(3, fixed=(0.3, 0.0))) == [-1.0, 1.0]


def test_boundary_vs_symmetrizability_zero():
    zeros = symmetrizability_boundary(TIED)
    b = reality_boundary(11, TIED, 0.9, 1.1)
    assert min(abs(b - z) for z in zeros) < 1e-6
    # on the shifted line the spectrum stays real past the zero at 0.75
    zeros = symmetrizability_boundary(SHIFTED)
    b = reality_boundary(11, SHIFTED, 0.5, 1.0)
    assert min(abs(b - z) for z in zeros) > 1e-3
