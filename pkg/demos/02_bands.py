"""
Bands of periodic approximants
==============================

The level-k spectrum is where |y_k(E)| <= 1.  There are q_k bands, and each
edge is a periodic or antiperiodic eigenvalue of the q_k-site word.
"""

import numpy as np

from sturmspec import ModelParams, bands, parse_cf, spectrum_cover
from sturmspec.spectrum import floquet_band_edges, gaps_from_bands

params = ModelParams(1.0, parse_cf("[0;(1)]"))

bs = bands(params, 10)
print(len(bs), "bands, total length", bs.total_measure)

# compare against a direct eigenvalue computation
ref = floquet_band_edges(params, 10)
print("edge disagreement", np.max(np.abs(bs.lo - ref[:, 0])), np.max(np.abs(bs.hi - ref[:, 1])))

# the measure shrinks as the level grows
for k in range(4, 15, 2):
    print(k, bands(params, k).total_measure)

# the union of two consecutive levels covers everything deeper
cov = spectrum_cover(params, 10)
gaps = sorted(gaps_from_bands(cov), key=lambda g: -g.width)
for g in gaps[:5]:
    print(f"gap [{g.lo:.4f}, {g.hi:.4f}]  width {g.width:.4f}")

# a harder case: silver mean at strong coupling
silver = ModelParams(8.0, parse_cf("[0;(2)]"))
print(len(bands(silver, 6)), "silver bands at lambda = 8")
