"""The algebra B(H) of A-linear operators, represented by n x n matrices.

An A-linear operator S acts on a module element F (a ``(d, n)`` array) by
right multiplication, ``S f = F @ S.matrix``.  The representation reverses
products, so composition goes through :func:`compose` rather than ``@``.
In this picture ``f (.) g`` (the map h -> [h, g] f) has matrix ``G* F``
and the Hilbert-space adjoint is the conjugate transpose.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from numpy.random import default_rng

from .algebra import DEFAULT_TOL, is_minimal_projection, matrix_unit, opnorm
from .errors import HypothesisViolated, NoAnchor, NotJordan, ShapeMismatch, SizeLimit, ZeroVector
from .hmodule import ModularBasis, as_module_element

__all__ = [
    "ModuleOperator",
    "LinearMapOnOperators",
    "JordanClass",
    "identity",
    "zero_operator",
    "compose",
    "apply",
    "op_adjoint",
    "rank_one",
    "projection_from_set",
    "is_projection",
    "is_A_isometry",
    "induced_module_operator",
    "classify_jordan",
    "lemma3_extract_isometry",
    "lemma4_factors",
    "commutant_dimension",
    "center_dimension",
]


@dataclass(frozen=True)
class ModuleOperator:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise ShapeMismatch(f"operator matrix must be square, got shape {m.shape}")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def __call__(self, f):
        return apply(self, f)


def identity(n: int) -> ModuleOperator:
    return ModuleOperator(np.eye(n, dtype=complex))


def zero_operator(n: int) -> ModuleOperator:
    return ModuleOperator(np.zeros((n, n), dtype=complex))


def compose(S: ModuleOperator, T: ModuleOperator) -> ModuleOperator:
    """The operator S T (apply T first)."""
    if S.n != T.n:
        raise ShapeMismatch(f"cannot compose operators of sizes {S.n} and {T.n}")
    return ModuleOperator(T.matrix @ S.matrix)


def apply(S: ModuleOperator, f) -> np.ndarray:
    f = as_module_element(f)
    if f.shape[1] != S.n:
        raise ShapeMismatch(f"operator of size {S.n} cannot act on element of shape {f.shape}")
    return f @ S.matrix


def op_adjoint(S: ModuleOperator) -> ModuleOperator:
    return ModuleOperator(S.matrix.conj().T)


def rank_one(f, g) -> ModuleOperator:
    """f (.) g, the operator h -> [h, g] f."""
    f = as_module_element(f)
    g = as_module_element(g)
    if f.shape != g.shape:
        raise ShapeMismatch(f"shapes differ: {f.shape} vs {g.shape}")
    return ModuleOperator(g.conj().T @ f)


def projection_from_set(basis: ModularBasis) -> ModuleOperator:
    """sum_a f_a (.) f_a: the projection onto the submodule spanned by ``basis``."""
    m = np.zeros((basis.n, basis.n), dtype=complex)
    for f in basis:
        m += f.conj().T @ f
    return ModuleOperator(m)


def is_projection(S: ModuleOperator, tol: float = DEFAULT_TOL) -> bool:
    m = S.matrix
    return opnorm(m - m.conj().T) <= tol and opnorm(m @ m - m) <= tol


def is_A_isometry(S: ModuleOperator, tol: float = DEFAULT_TOL, on: ModuleOperator | None = None) -> bool:
    """True iff S preserves the generalized inner product.

    With ``on`` (a projection P onto a submodule) only the restriction to
    that submodule is tested: ``P M M* P == P``.
    """
    m = S.matrix
    mm = m @ m.conj().T
    if on is None:
        return opnorm(mm - np.eye(S.n)) <= tol
    p = on.matrix
    return opnorm(p @ mm @ p - p) <= tol


def induced_module_operator(W) -> ModuleOperator:
    """Module operator V whose conjugation map is A -> W A W*.

    Since f (.) f maps to (V f) (.) (V f) with matrix ``M_V* (F* F) M_V``,
    the operator is the one with matrix ``W*``.
    """
    W = np.asarray(W, dtype=complex)
    return ModuleOperator(W.conj().T)


@dataclass(frozen=True)
class LinearMapOnOperators:
    """A linear map M_n(C) -> M_n(C) as an (n^2, n^2) matrix acting on
    row-major flattened operators."""

    action: np.ndarray

    def __post_init__(self):
        a = np.array(self.action, dtype=complex)
        k = int(round(np.sqrt(a.shape[0]))) if a.ndim == 2 else 0
        if a.ndim != 2 or a.shape[0] != a.shape[1] or k * k != a.shape[0] or k == 0:
            raise ShapeMismatch(f"action must be (n^2, n^2), got shape {a.shape}")
        a.flags.writeable = False
        object.__setattr__(self, "action", a)

    @property
    def n(self) -> int:
        return int(round(np.sqrt(self.action.shape[0])))

    def __call__(self, A) -> np.ndarray:
        A = np.asarray(getattr(A, "matrix", A), dtype=complex)
        return (self.action @ A.reshape(-1)).reshape(self.n, self.n)

    @classmethod
    def from_function(cls, func, n: int) -> "LinearMapOnOperators":
        cols = []
        for i in range(n):
            for j in range(n):
                cols.append(np.asarray(func(matrix_unit(i, j, n)), dtype=complex).reshape(-1))
        return cls(np.stack(cols, axis=1))

    @classmethod
    def conjugation(cls, W) -> "LinearMapOnOperators":
        """A -> W A W*."""
        W = np.asarray(W, dtype=complex)
        return cls.from_function(lambda A: W @ A @ W.conj().T, W.shape[0])

    @classmethod
    def transposed_conjugation(cls, V) -> "LinearMapOnOperators":
        """A -> V A^T V*."""
        V = np.asarray(V, dtype=complex)
        return cls.from_function(lambda A: V @ A.T @ V.conj().T, V.shape[0])


class JordanClass(str, enum.Enum):
    HOMO = "homo"
    ANTI = "anti"
    JORDAN_ONLY = "jordan-only"
    NONE = "none"

    def __str__(self):
        return self.value


def _random_matrix(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def classify_jordan(phi: LinearMapOnOperators, trials: int = 64, tol: float = DEFAULT_TOL, seed: int = 0) -> JordanClass:
    """Strongest multiplicative class verified on random inputs.

    Star preservation and squares of Hermitian inputs are tested first
    (failure gives ``none``); then phi(AB) is compared with phi(A)phi(B)
    and with phi(B)phi(A).  When both patterns hold (n = 1) the result is
    ``homo``.
    """
    rng = default_rng(seed)
    n = phi.n

    def close(x, y, scale):
        return opnorm(x - y) <= tol * (1.0 + scale)

    for _ in range(trials):
        a = _random_matrix(rng, n)
        h = (a + a.conj().T) / 2
        pa, ph = phi(a), phi(h)
        if not close(phi(a.conj().T), pa.conj().T, opnorm(pa)):
            return JordanClass.NONE
        if not close(phi(h @ h), ph @ ph, opnorm(ph) ** 2):
            return JordanClass.NONE

    homo = anti = True
    for _ in range(trials):
        a, b = _random_matrix(rng, n), _random_matrix(rng, n)
        pa, pb, pab = phi(a), phi(b), phi(a @ b)
        scale = opnorm(pa) * opnorm(pb) + opnorm(pab)
        homo = homo and close(pab, pa @ pb, scale)
        anti = anti and close(pab, pb @ pa, scale)
        if not (homo or anti):
            break
    if homo:
        return JordanClass.HOMO
    if anti:
        return JordanClass.ANTI
    return JordanClass.JORDAN_ONLY


def _gauge(W, tol):
    flat = W.reshape(-1)
    idx = np.flatnonzero(np.abs(flat) > tol)
    if idx.size == 0:
        return W
    w = flat[idx[0]]
    return W * (np.conj(w) / np.abs(w))


def lemma3_extract_isometry(phi: LinearMapOnOperators, tol: float = DEFAULT_TOL, seed: int = 0, n_random: int = 32):
    """Recover W with phi(A) = W A W* (homo) or phi(A) = W A^T W* (anti).

    Anchors y, z with <phi(y y*) z, z> = 1 are searched among the standard
    basis vectors, then ``n_random`` seeded random unit vectors; z is taken
    as the normalized image under phi(y y*) of the candidate it moves least.
    Then W x = phi(x y*) z, or W x = phi(y x^T) z in the anti case.  W is
    normalized so that its first nonzero entry (row-major) is positive real.

    Returns
    -------
    kind : JordanClass
        ``HOMO`` or ``ANTI``.
    W : (n, n) ndarray
    """
    kind = classify_jordan(phi, tol=tol, seed=seed)
    if kind not in (JordanClass.HOMO, JordanClass.ANTI):
        raise NotJordan(f"map classified as {kind.value}")
    n = phi.n
    rng = default_rng(seed)
    cands = [np.eye(n, dtype=complex)[k] for k in range(n)]
    for _ in range(n_random):
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        cands.append(v / np.linalg.norm(v))

    anchor = None
    for y in cands:
        P = phi(np.outer(y, y.conj()))
        if not is_minimal_projection(P, 10 * tol):
            continue
        z0 = max(cands, key=lambda c: np.linalg.norm(P @ c))
        pz = P @ z0
        z = pz / np.linalg.norm(pz)
        if abs(np.vdot(z, P @ z) - 1.0) <= tol:
            anchor = (y, z)
            break
    if anchor is None:
        raise NoAnchor("no anchor pair (y, z) found; map does not preserve rank-one projections")
    y, z = anchor

    W = np.zeros((n, n), dtype=complex)
    for j in range(n):
        e = np.zeros(n, dtype=complex)
        e[j] = 1.0
        if kind is JordanClass.HOMO:
            W[:, j] = phi(np.outer(e, y.conj())) @ z
        else:
            W[:, j] = phi(np.outer(y, e)) @ z
    W = _gauge(W, tol)

    rebuilt = (LinearMapOnOperators.conjugation(W) if kind is JordanClass.HOMO
               else LinearMapOnOperators.transposed_conjugation(W))
    resid = opnorm(rebuilt.action - phi.action)
    if resid > tol * (1.0 + opnorm(phi.action)):
        raise NoAnchor(f"recovered isometry leaves residual {resid:.3e}")
    return kind, W


def lemma4_factors(a_list, b, tol: float = DEFAULT_TOL) -> list[complex]:
    """Scalars lam_k with a_k = lam_k b, given sum_k a_k a_k* == b b*."""
    b = np.asarray(b, dtype=complex).ravel()
    nb2 = float(np.vdot(b, b).real)
    if nb2 == 0.0:
        raise ZeroVector("b must be nonzero")
    vecs = [np.asarray(a, dtype=complex).ravel() for a in a_list]
    s = np.zeros((b.size, b.size), dtype=complex)
    for a in vecs:
        if a.shape != b.shape:
            raise ShapeMismatch(f"vector of length {a.size} does not match b of length {b.size}")
        s += np.outer(a, a.conj())
    dev = opnorm(s - np.outer(b, b.conj()))
    if dev > tol * nb2:
        raise HypothesisViolated(f"sum of a_k a_k* differs from b b* by {dev:.3e}")
    return [complex(np.vdot(b, a) / nb2) for a in vecs]


MAX_DENSE = 32


def _left_actions(d, n):
    # vec is column-major over the (d, n) array, so L_a = I_n (x) a
    return [np.kron(np.eye(n), matrix_unit(i, j, d)) for i in range(d) for j in range(d)]


def _null_space_from_blocks(blocks, size, rtol=1e-10):
    gram = np.zeros((size, size), dtype=complex)
    for k in blocks:
        gram += k.conj().T @ k
    w, v = np.linalg.eigh((gram + gram.conj().T) / 2)
    cutoff = rtol * max(1.0, float(w[-1]))
    return v[:, w <= cutoff]


def _commutant_basis(d, n):
    N = d * n
    if N > MAX_DENSE:
        raise SizeLimit(f"d*n = {N} exceeds the dense limit {MAX_DENSE}")
    eye = np.eye(N)
    # row-major vec: vec(X L) = (I (x) L^T) vec X, vec(L X) = (L (x) I) vec X
    blocks = [np.kron(eye, L.T) - np.kron(L, eye) for L in _left_actions(d, n)]
    null = _null_space_from_blocks(blocks, N * N)
    return [null[:, k].reshape(N, N) for k in range(null.shape[1])]


def commutant_dimension(d: int, n: int) -> int:
    """Dimension of {X on C^(d n) : X L_a = L_a X for all a in M_d}."""
    return len(_commutant_basis(d, n))


def center_dimension(d: int, n: int) -> int:
    """Dimension of the center of the commutant (1 for a factor)."""
    basis = _commutant_basis(d, n)
    m = len(basis)
    blocks = []
    for Y in basis:
        cols = [(X @ Y - Y @ X).reshape(-1) for X in basis]
        blocks.append(np.stack(cols, axis=1))
    return _null_space_from_blocks(blocks, m).shape[1]
