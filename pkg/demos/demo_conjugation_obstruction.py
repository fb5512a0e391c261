"""
Why complex conjugation is excluded once d > 1
==============================================

For scalars (d = 1) conjugation preserves |<f, f'>| and is a legitimate
symmetry.  For d >= 2 the matrix valued absolute value tells |a| and |a*|
apart, and conjugation fails on a two-vector witness.
"""

import numpy as np

from modwigner.algebra import absolute
from modwigner.wigner import check_preservation, conjugation_oracle, obstruction, random_pairs, witness_pair

for d in (1, 2, 3):
    T = conjugation_oracle(d, 1)
    rep = check_preservation(T, [witness_pair(d, 1)])
    print("d=%d witness deviation %.6f passed %s" % (d, rep.max_deviation, rep.passed))

rep = check_preservation(conjugation_oracle(1, 3), random_pairs(1, 3, 100, 0))
print("d=1 random pairs, max deviation %.1e" % rep.max_deviation)

###############################################################################
# The underlying fact: a rank-one a with |a| != |a*|

a, pa, pb, dist = obstruction(2)
print("a =\n", a.real)
print("|a| =\n", pa.real)
print("|a*| =\n", pb.real)
print("distance", dist)

# a rank-one a where they agree, for contrast: a normal (Hermitian) one
h = np.outer([1, 1j], [1, -1j])
print("normal rank-one example distance %.1e" % np.linalg.norm(absolute(h) - absolute(h.conj().T), 2))
