"""The Hilbert A-module H = H_d + ... + H_d (n copies) in concrete form.

An element is a ``(d, n)`` complex array whose k-th column is the vector
in slot k.  The generalized inner product is ``[f, g] = F G*`` (the sum
over slots of the outer products xi_k zeta_k*), and A acts by left
multiplication on every slot.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import DEFAULT_TOL, is_minimal_projection, opnorm
from .errors import ShapeMismatch

__all__ = [
    "ModularBasis",
    "as_module_element",
    "zero",
    "slot_element",
    "canonical_basis",
    "inner",
    "module_action",
    "norms",
    "spectral_split",
    "modular_gram_schmidt",
    "expand",
    "reconstruct",
    "in_submodule",
]


def as_module_element(f, d: int | None = None, n: int | None = None) -> np.ndarray:
    f = np.asarray(f, dtype=complex)
    if f.ndim == 1:
        f = f[:, None]
    if f.ndim != 2 or 0 in f.shape:
        raise ShapeMismatch(f"module element must be a nonempty (d, n) array, got shape {f.shape}")
    if (d is not None and f.shape[0] != d) or (n is not None and f.shape[1] != n):
        raise ShapeMismatch(f"expected shape ({d}, {n}), got {f.shape}")
    return f


def _pair(f, g):
    f = as_module_element(f)
    g = as_module_element(g)
    if f.shape != g.shape:
        raise ShapeMismatch(f"shapes differ: {f.shape} vs {g.shape}")
    return f, g


def zero(d: int, n: int) -> np.ndarray:
    return np.zeros((d, n), dtype=complex)


def slot_element(zeta, k: int, n: int) -> np.ndarray:
    """zeta^k: the vector zeta in slot k (zero-based), zeros elsewhere."""
    zeta = np.asarray(zeta, dtype=complex).ravel()
    f = np.zeros((zeta.size, n), dtype=complex)
    f[:, k] = zeta
    return f


def inner(f, g) -> np.ndarray:
    """Generalized inner product [f, g] = sum_k xi_k zeta_k*, a (d, d) matrix."""
    f, g = _pair(f, g)
    return f @ g.conj().T


def module_action(a, f) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    f = as_module_element(f)
    if a.shape != (f.shape[0], f.shape[0]):
        raise ShapeMismatch(f"cannot act with {a.shape} on element of shape {f.shape}")
    return a @ f


def norms(f) -> tuple[float, float]:
    """(operator norm, trace norm): ``||[f,f]||**0.5`` and ``tr([f,f])**0.5``."""
    ff = inner(f, f)
    return float(np.sqrt(opnorm(ff))), float(np.sqrt(max(np.trace(ff).real, 0.0)))


def _trace_norm(f) -> float:
    return float(np.linalg.norm(f))


def spectral_split(f, tol: float = DEFAULT_TOL):
    """Split f into modular unit vectors along the spectrum of [f, f].

    With ``[f, f] = sum_i lam_i**2 e_i`` (rank-one projections e_i), return
    the triples ``(lam_i, e_i, f_i)`` where ``f_i = e_i f / lam_i``.  The
    f_i are modular orthonormal and ``f = sum_i lam_i f_i``.

    Computed from the SVD f = sum_i s_i u_i v_i*, so lam_i = s_i and
    f_i = u_i v_i*; values lam_i < tol * lam_max are dropped.  Going through
    the eigenvalues of [f, f] would compare lam_i**2 instead and lose every
    component below sqrt(tol) * lam_max.
    """
    f = as_module_element(f)
    if not np.any(f):
        return []
    u, s, vh = np.linalg.svd(f, full_matrices=False)
    out = []
    for k in range(s.size):
        if s[k] < tol * s[0]:
            break
        out.append((float(s[k]), np.outer(u[:, k], u[:, k].conj()), np.outer(u[:, k], vh[k])))
    return out


@dataclass(frozen=True)
class ModularBasis:
    """Ordered modular orthonormal family; its length is the modular dimension
    of the submodule it generates."""

    elements: tuple = field(default_factory=tuple)
    d: int = 1
    n: int = 1

    def __post_init__(self):
        elems = []
        for f in self.elements:
            f = as_module_element(f, self.d, self.n).copy()
            f.flags.writeable = False
            elems.append(f)
        object.__setattr__(self, "elements", tuple(elems))

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    def violations(self, tol: float = DEFAULT_TOL) -> list[str]:
        """Human-readable list of broken basis invariants (empty when valid)."""
        bad = []
        for i, f in enumerate(self.elements):
            if not is_minimal_projection(inner(f, f), tol):
                bad.append(f"element {i} is not a modular unit vector")
            for j in range(i):
                if opnorm(inner(f, self.elements[j])) > tol:
                    bad.append(f"elements {j} and {i} are not modular orthogonal")
        return bad

    def is_valid(self, tol: float = DEFAULT_TOL) -> bool:
        return not self.violations(tol)


def canonical_basis(d: int, n: int) -> ModularBasis:
    """The basis xi^1, ..., xi^n with xi the first standard unit vector of C^d."""
    xi = np.zeros(d, dtype=complex)
    xi[0] = 1.0
    return ModularBasis(tuple(slot_element(xi, k, n) for k in range(n)), d, n)


def modular_gram_schmidt(generators, tol: float = DEFAULT_TOL, d=None, n=None) -> ModularBasis:
    """Modular orthonormal basis of the submodule generated by ``generators``.

    Generators are processed in order.  Each one has its expansion along the
    basis so far subtracted (twice, for numerical stability); a residual
    whose trace norm is below ``tol * (1 + ||g||)`` is dropped, otherwise
    its spectral split is appended.  ``d`` and ``n`` are only needed when
    ``generators`` is empty.
    """
    gens = [as_module_element(g) for g in generators]
    if gens:
        d, n = gens[0].shape
    if d is None or n is None:
        raise ShapeMismatch("module shape is unknown for an empty generator list")
    basis: list[np.ndarray] = []
    for g in gens:
        g = as_module_element(g, d, n)
        r = g
        for _ in range(2):
            for f in basis:
                r = r - inner(r, f) @ f
        if _trace_norm(r) < tol * (1.0 + _trace_norm(g)):
            continue
        basis.extend(fi for _, _, fi in spectral_split(r, tol))
    return ModularBasis(tuple(basis), d, n)


def expand(g, basis: ModularBasis) -> list[np.ndarray]:
    """Coefficients [g, f_a] of g along the basis, so that g = sum_a [g, f_a] f_a."""
    g = as_module_element(g, basis.d, basis.n)
    return [inner(g, f) for f in basis]


def reconstruct(coefficients, basis: ModularBasis) -> np.ndarray:
    out = np.zeros((basis.d, basis.n), dtype=complex)
    for c, f in zip(coefficients, basis):
        out += module_action(c, f)
    return out


def in_submodule(k, basis: ModularBasis, tol: float = DEFAULT_TOL) -> bool:
    """Membership test: [k, k] == sum_a [k, f_a][f_a, k]."""
    k = as_module_element(k, basis.d, basis.n)
    kk = inner(k, k)
    s = np.zeros_like(kk)
    for f in basis:
        c = inner(k, f)
        s += c @ c.conj().T
    return opnorm(kk - s) <= tol * (1.0 + opnorm(kk))
