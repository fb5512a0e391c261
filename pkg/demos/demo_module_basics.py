"""
Module elements, inner products and modular bases
=================================================

Elements of the module are d x n complex arrays; the columns are the
slots.  The inner product is matrix valued.
"""

import numpy as np

from modwigner.hmodule import canonical_basis, expand, inner, modular_gram_schmidt, norms, reconstruct, spectral_split
from modwigner.sampling import random_element

rng = np.random.default_rng(0)
d, n = 2, 3

# a random element and its d x d inner product with itself
f = random_element(d, n, rng)
print("[f, f] =\n", np.round(inner(f, f), 4))
print("operator norm %.4f, trace norm %.4f" % norms(f))

# split f into modular unit vectors: f = sum_i lam_i f_i
parts = spectral_split(f)
for lam, _, fi in parts:
    print("lam = %.4f, [f_i, f_i] has trace %.4f" % (lam, np.trace(inner(fi, fi)).real))
print("split reconstructs f:", np.allclose(sum(l * fi for l, _, fi in parts), f))

###############################################################################
# Gram-Schmidt on two generators spans the whole module (rank n = 3)

basis = modular_gram_schmidt([random_element(d, n, rng) for _ in range(2)])
print("basis length", len(basis), "valid:", basis.is_valid())

# every element expands with A-valued coefficients
g = random_element(d, n, rng)
coeffs = expand(g, basis)
print("expansion error %.1e" % np.linalg.norm(reconstruct(coeffs, basis) - g))

# the canonical basis: xi placed in each slot
for k, xi in enumerate(canonical_basis(d, n)):
    print("xi^%d =" % (k + 1), xi.T.real.tolist())
