import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from modwigner.algebra import is_minimal_projection, opnorm
from modwigner.errors import ShapeMismatch
from modwigner.hmodule import (
    ModularBasis,
    canonical_basis,
    expand,
    in_submodule,
    inner,
    modular_gram_schmidt,
    module_action,
    norms,
    reconstruct,
    slot_element,
    spectral_split,
)
from modwigner.sampling import random_algebra, random_element, random_low_rank_element, random_modular_unit

from conftest import TOL, complex_arrays, herm2_eig_oracle

col = lambda *v: np.array(v, dtype=complex)[:, None]


def inner_loop_oracle(f, g):
    out = np.zeros((f.shape[0], f.shape[0]), dtype=complex)
    for k in range(f.shape[1]):
        for i in range(f.shape[0]):
            for j in range(f.shape[0]):
                out[i, j] += f[i, k] * np.conj(g[j, k])
    return out


def test_inner_examples():
    np.testing.assert_array_equal(inner(col(1, 0), col(1, 0)), np.diag([1, 0]))
    np.testing.assert_array_equal(inner(np.eye(2), np.eye(2)), np.eye(2))
    f, g = col(1, 0), col(1, -1j)
    expected = np.array([[1, 1j], [0, 0]])
    np.testing.assert_array_equal(inner_loop_oracle(f, g), expected)
    np.testing.assert_array_equal(inner(f, g), expected)


def test_inner_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        inner(np.zeros((2, 2)), np.zeros((2, 3)))
    with pytest.raises(ShapeMismatch):
        module_action(np.eye(3), np.zeros((2, 2)))


def test_inner_matches_loop(rng):
    for _ in range(20):
        f, g = random_element(3, 4, rng), random_element(3, 4, rng)
        np.testing.assert_allclose(inner(f, g), inner_loop_oracle(f, g), atol=1e-12)


def test_module_action_examples(rng):
    f = random_element(2, 3, rng)
    np.testing.assert_array_equal(module_action(np.eye(2), f), f)
    np.testing.assert_array_equal(module_action(np.zeros((2, 2)), f), 0 * f)
    np.testing.assert_array_equal(module_action(np.diag([1, 0]), col(3, 4)), col(3, 0))


def test_norms_examples():
    assert norms(col(1, 0)) == pytest.approx((1, 1))
    assert norms(np.zeros((2, 1))) == (0.0, 0.0)
    assert norms(np.eye(2)) == pytest.approx((1, np.sqrt(2)))


def test_spectral_split_examples(rng):
    f = random_modular_unit(3, 2, rng)
    (lam, e, f1), = spectral_split(f)
    assert lam == pytest.approx(1.0)
    np.testing.assert_allclose(e, inner(f, f), atol=TOL)
    np.testing.assert_allclose(f1, f, atol=TOL)
    assert spectral_split(np.zeros((2, 2))) == []


def test_spectral_split_derived():
    f = col(3, 4)
    (lam_o, v_o), _ = herm2_eig_oracle(inner(f, f))
    assert lam_o == pytest.approx(25.0)
    (lam, e, f1), = spectral_split(f)
    assert lam == pytest.approx(5.0, abs=TOL)
    np.testing.assert_allclose(e, np.array([[9, 12], [12, 16]]) / 25, atol=TOL)
    np.testing.assert_allclose(e, np.outer(v_o, v_o.conj()), atol=TOL)
    np.testing.assert_allclose(f1, col(0.6, 0.8), atol=TOL)


def test_spectral_split_keeps_small_components():
    # singular values 1 and 1e-6: both lie above tol * lam_max, so both stay
    f = np.zeros((3, 4), dtype=complex)
    f[1, 2], f[2, 3] = 1e-6j, 1j
    parts = spectral_split(f)
    assert [lam for lam, *_ in parts] == pytest.approx([1.0, 1e-6], rel=1e-12)
    rec = sum(lam * fi for lam, _, fi in parts)
    assert np.linalg.norm(rec - f) <= 1e-15


@settings(max_examples=150, deadline=None)
@given(complex_arrays((3, 4)))
def test_spectral_split_properties(f):
    parts = spectral_split(f)
    if not np.any(f):
        assert parts == []
        return
    rec = sum((lam * fi for lam, _, fi in parts), np.zeros_like(f))
    assert np.linalg.norm(rec - f) <= 1e-8 * np.linalg.norm(f)
    assert ModularBasis(tuple(fi for *_, fi in parts), 3, 4).is_valid(TOL)


@settings(max_examples=100, deadline=None)
@given(complex_arrays((2, 3)), complex_arrays((2, 3)), complex_arrays((2, 3)), complex_arrays((2, 2)))
def test_module_axioms(f, g, h, a):
    s = 1 + np.linalg.norm(f) * np.linalg.norm(g) * (1 + np.linalg.norm(a)) + np.linalg.norm(h) ** 2
    assert opnorm(inner(f + g, h) - inner(f, h) - inner(g, h)) <= TOL * s
    assert opnorm(inner(module_action(a, f), g) - a @ inner(f, g)) <= TOL * s
    assert opnorm(inner(g, f) - inner(f, g).conj().T) <= TOL * s
    ff = inner(f, f)
    assert np.linalg.eigvalsh(ff).min() >= -TOL * s
    assert (opnorm(ff) == 0) == (not np.any(f))


def test_gram_schmidt_examples():
    xi1 = slot_element([1, 0], 0, 2)
    b = modular_gram_schmidt([xi1])
    assert len(b) == 1
    np.testing.assert_allclose(b[0], xi1, atol=TOL)

    f = np.array([[1, 2j], [0.5, -1]])
    assert len(modular_gram_schmidt([f, f])) == len(modular_gram_schmidt([f]))

    b = modular_gram_schmidt([col(3, 4)])
    assert len(b) == 1 and b.is_valid(TOL)
    np.testing.assert_allclose(b[0], col(0.6, 0.8), atol=TOL)

    assert len(modular_gram_schmidt([], d=2, n=3)) == 0


@pytest.mark.parametrize("d,n,rank", [(2, 3, 1), (3, 3, 2), (4, 5, 3), (2, 4, 4), (5, 2, 1)])
def test_gram_schmidt_properties(rng, d, n, rank):
    for _ in range(20):
        gens = [random_low_rank_element(d, n, rank, rng) for _ in range(3)]
        b = modular_gram_schmidt(gens)
        assert b.is_valid(TOL)
        assert all(in_submodule(g, b, TOL) for g in gens)
        # modular dimension equals the dimension of the row space of the generators
        assert len(b) == np.linalg.matrix_rank(np.vstack(gens), tol=1e-8)


def test_full_module_basis_length(rng):
    gens = [random_element(2, 3, rng) for _ in range(2)]
    assert len(modular_gram_schmidt(gens)) == 3


def test_expand_examples(rng):
    b = modular_gram_schmidt([random_low_rank_element(3, 4, 2, rng)])
    f1 = b[0]
    c = expand(f1, b)
    np.testing.assert_allclose(c[0], inner(f1, f1), atol=TOL)
    assert all(opnorm(x) <= TOL for x in c[1:])
    assert all(opnorm(x) == 0 for x in expand(np.zeros((3, 4)), b))
    a = random_algebra(3, rng)
    c = expand(module_action(a, f1), b)
    np.testing.assert_allclose(c[0], a @ inner(f1, f1), atol=TOL)
    np.testing.assert_allclose(reconstruct(c, b), module_action(a, f1), atol=TOL * 10)


def test_expand_lemma_identities(rng):
    for _ in range(50):
        gens = [random_low_rank_element(3, 5, 2, rng) for _ in range(2)]
        b = modular_gram_schmidt(gens)
        g = module_action(random_algebra(3, rng), gens[0]) + gens[1]
        h = module_action(random_algebra(3, rng), gens[1])
        s = 1 + np.linalg.norm(g) * np.linalg.norm(h) + np.linalg.norm(g)
        np.testing.assert_allclose(reconstruct(expand(g, b), b), g, atol=TOL * s)
        rhs = sum(inner(g, f) @ inner(f, h) for f in b)
        assert opnorm(inner(g, h) - rhs) <= TOL * s


def test_in_submodule_examples():
    xi = np.array([1, 0])
    b = ModularBasis((slot_element(xi, 0, 2),), 2, 2)
    assert in_submodule(b[0], b)
    assert in_submodule(np.zeros((2, 2)), b)
    assert not in_submodule(slot_element(xi, 1, 2), b)


def test_canonical_basis_is_valid():
    for d, n in [(1, 1), (2, 3), (4, 2)]:
        b = canonical_basis(d, n)
        assert len(b) == n and b.is_valid(0.0)
        assert all(is_minimal_projection(inner(f, f), 0.0) for f in b)


def test_basis_is_immutable():
    b = canonical_basis(2, 2)
    with pytest.raises(ValueError):
        b[0][0, 0] = 5
