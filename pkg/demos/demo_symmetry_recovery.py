"""
Recovering a symmetry from a black box
======================================

A synthetic oracle applies f -> phase(f) U f with a hashed, deliberately
discontinuous phase.  decompose() only queries it and recovers U up to
one global unit scalar.
"""

import numpy as np

from modwigner.sampling import random_unitary
from modwigner.wigner import check_preservation, decompose, min_phase_distance, random_pairs, synthesize

rng = np.random.default_rng(42)
d, n = 3, 4
U0 = random_unitary(n, rng)
T = synthesize(U0, phase_seed=7, d=d)

# the hypothesis: |[Tf, Tf']| = |[f, f']| on random pairs
rep = check_preservation(T, random_pairs(d, n, 200, rng))
print("max deviation %.2e, passed %s" % (rep.max_deviation, rep.passed))

dec = decompose(T, probes=50)
print("max residual %.2e" % dec.max_residual)
print("distance to U0 up to a phase %.2e" % min_phase_distance(dec.U, U0))
print("gauge:", dec.gauge_note)

###############################################################################
# The phases themselves jump around; only U is rigid

for f, z in list(zip(dec.probes, dec.phase_values))[:5]:
    print("phase %+.3f%+.3fj" % (z.real, z.imag))

# a new element: T f against phase(f) U f
f = rng.standard_normal((d, n)) + 1j * rng.standard_normal((d, n))
print("fresh element residual %.1e" % np.linalg.norm(T(f) - dec.phase(f, T) * (f @ dec.U.matrix)))
