"""
Integrated density of states and gap labels
===========================================

Counting negative pivots of the LDL^T factorization gives the number of
eigenvalues below E.  On each spectral gap the density of states sits on
one of the values {m alpha}.
"""

import numpy as np

from sturmspec import ModelParams, parse_cf, spectrum_cover
from sturmspec.ids import count_below_energies, free_ids, gap_labels, ids_curve, match_gaps_to_labels, potential
from sturmspec.spectrum import gaps_from_bands

alpha = parse_cf("[0;(1)]")
L = 10**4

# free case first: N(E) = arccos(-E/2)/pi
E = np.linspace(-2.2, 2.2, 9)
print(ids_curve(ModelParams(0.0, alpha), 0.0, L, E).values)
print(free_ids(E))

# now lambda = 1: evaluate N at the middle of each gap
params = ModelParams(1.0, alpha)
gaps = gaps_from_bands(spectrum_cover(params, 10))
n = count_below_energies(potential(params, 0.0, L), [g.midpoint for g in gaps]) / L
labels = gap_labels(alpha, range(-10, 11))
match = match_gaps_to_labels(gaps, n, labels, 3 / L)

widest = sorted(match.gaps, key=lambda g: -g.width)[:10]
for g in widest:
    print(f"width {g.width:.4f}  N = {g.ids_value:.4f}  label {g.label}")
print(len(match.unmatched_gaps), "gaps without a label |m| <= 10")
