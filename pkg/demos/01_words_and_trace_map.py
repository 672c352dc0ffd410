"""
Sturmian words and the trace map
================================

A walk from a continued fraction to the half-traces of periodic approximants.
"""

import numpy as np

from sturmspec import ModelParams, approximants, parse_cf
from sturmspec.tracemap import fricke_vogt, initial_point, orbit_point, transfer_half_traces
from sturmspec.words import complexity, rotation_sequence, sturmian_word_by_recursion

# the golden mean, 1/(1+1/(1+...)), written with its periodic tail in brackets
alpha = parse_cf("[0;(1)]")
for ap in approximants(alpha, 8):
    print(ap.k, ap.p, ap.q)

# the potential is a rotation sequence; the standard words are its prefixes
w = rotation_sequence(alpha, 0.0, 34)
print(w)
print(sturmian_word_by_recursion(alpha, 8), "(w_8, length 34)")

# a Sturmian word sees exactly n+1 distinct factors of length n
long = rotation_sequence(alpha, 0.0, 10**4)
print([complexity(long, n) for n in range(1, 11)])

# half-traces start on a line inside the invariant surface I = lam^2/4
params = ModelParams(1.0, alpha)
E = np.linspace(-2.5, 2.5, 5)
print(fricke_vogt(initial_point(params, E)))

# and the trace map reproduces what multiplying 2x2 matrices gives;
# off the spectrum both grow fast, so look at the relative error
p = np.array(orbit_point(params, E, 8))
q = np.array(transfer_half_traces(params, 8, E))
print(np.max(np.abs(p - q) / np.maximum(1, np.abs(q))))
