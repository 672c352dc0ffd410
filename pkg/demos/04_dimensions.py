"""
Fractal dimensions
==================

Three estimates at several couplings: thickness bounds on the spectrum, a
box-counting estimate, and the local scaling exponent of the density of
states measure.  All of them drop as lambda grows.
"""

import math

import numpy as np

from sturmspec import ModelParams, parse_cf, spectrum_cover
from sturmspec.ids import dos_local_dimension, ids_curve
from sturmspec.spectrum import BandSet, box_dimension, default_scales, thickness_denseness

alpha = parse_cf("[0;(1)]")

# calibrate the box counter on the middle-thirds set first
iv = [(0.0, 1.0)]
for _ in range(8):
    iv = [x for a, b in iv for x in ((a, a + (b - a) / 3), (b - (b - a) / 3, b))]
print(box_dimension(BandSet.from_intervals(iv), 3.0 ** -np.arange(1, 9)), math.log(2) / math.log(3))

print("lambda  tau     lower   box     upper   dos")
for lam in (0.1, 0.2, 0.5, 0.8):
    params = ModelParams(lam, alpha)
    cov = spectrum_cover(params, 12)
    th = thickness_denseness(cov)
    box = box_dimension(cov, default_scales(cov))
    b = params.energy_bound
    table = ids_curve(params, 0.0, 10**4, np.linspace(-b - 0.05, b + 0.05, 20001))
    d = dos_local_dimension(table, seed=0).d_estimate
    print(f"{lam:<7} {th.tau:<7.2f} {th.dim_lower:.3f}   {box:.3f}   {th.dim_upper:.3f}   {d:.3f}")
