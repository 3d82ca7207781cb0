"""Locating where real levels collide and leave the real axis."""
from ptlat import ParameterPath, ep_refine, reality_boundary, symmetrizability_boundary

one = ParameterPath.single(1)
loc = ep_refine(11, one, (0.95, 1.05))
print("single coupling:", loc.driver_value, loc.count_real_side, "->", loc.count_complex_side, loc.colliding_pairs)

# tied couplings lose two mirror pairs at once
tied = ParameterPath.tied(2)
loc = ep_refine(11, tied, (0.9, 1.1))
print("tied:", loc.driver_value, loc.colliding_pairs, loc.merge_energies)

shifted = ParameterPath(((1, 0), (1, 0.25)))
print("zeros of the boundary products:", symmetrizability_boundary(shifted))
print("edge of the real region, lambda > 0:", reality_boundary(11, shifted, 0.5, 1.0))
print("edge of the real region, lambda < 0:", reality_boundary(11, shifted, -1.2, -0.8))

# a wide bracket crosses several steps; the non-strict search keeps the one next to the real side
loc = ep_refine(11, shifted, (0.5, 1.0), strict=False)
print("shifted:", loc.driver_value, loc.count_real_side, "->", loc.count_complex_side, loc.gap_at_star)
