"""Kernels for the coefficient algebra A = M_d(C).

Elements of A are plain ``(d, d)`` complex numpy arrays.  Every function
here is pure and returns a fresh array.
"""

from __future__ import annotations

import numpy as np

from .errors import NotHermitian, NotPSD, ShapeMismatch

DEFAULT_TOL = 1e-9

__all__ = [
    "DEFAULT_TOL",
    "as_algebra_element",
    "adjoint",
    "absolute",
    "abs",
    "opnorm",
    "spectral_psd",
    "is_minimal_projection",
    "matrix_unit",
]


def as_algebra_element(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ShapeMismatch(f"algebra element must be a nonempty square matrix, got shape {a.shape}")
    return a


def matrix_unit(i: int, j: int, d: int) -> np.ndarray:
    """The matrix unit e_ij (zero-based indices)."""
    e = np.zeros((d, d), dtype=complex)
    e[i, j] = 1.0
    return e


def adjoint(a) -> np.ndarray:
    return as_algebra_element(a).conj().T.copy()


def opnorm(a) -> float:
    """Spectral (operator) norm; the C*-norm of A."""
    a = np.asarray(a, dtype=complex)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def _hermitian_eig(h):
    h = (h + h.conj().T) / 2
    return np.linalg.eigh(h)


def absolute(a) -> np.ndarray:
    """|a|, the positive square root of a* a.

    Computed from the singular value decomposition a = W S V* as V S V*.
    Squaring first would halve the accurate digits whenever a is singular.
    """
    a = as_algebra_element(a)
    m = float(np.max(np.abs(a)))
    if m == 0.0:
        return np.zeros_like(a)
    # rescale so LAPACK never sees subnormal or huge entries
    _, s, vh = np.linalg.svd(a / m)
    r = (vh.conj().T * (m * s)) @ vh
    return (r + r.conj().T) / 2


abs = absolute  # noqa: A001 - mirrors numpy's abs/absolute pairing


def spectral_psd(a, tol: float = DEFAULT_TOL) -> list[tuple[float, np.ndarray]]:
    """Rank-one spectral decomposition of a positive semidefinite matrix.

    Parameters
    ----------
    a : (d, d) array_like
        Hermitian PSD matrix (within ``tol`` relative to ``||a||``).
    tol : float
        Relative tolerance.  Eigenvalues below ``tol * ||a||`` are treated
        as zero and omitted.

    Returns
    -------
    list of (eigenvalue, projection)
        Eigenvalues in decreasing order, each paired with the rank-one
        projection onto its eigenvector.  Repeated eigenvalues yield one
        entry per eigenvector of an arbitrary orthonormal eigenbasis.

    Raises
    ------
    NotHermitian
        If ``||a - a*|| > tol * ||a||``.
    NotPSD
        If some eigenvalue is below ``-tol * ||a||``.
    """
    a = as_algebra_element(a)
    scale = opnorm(a)
    if scale == 0.0:
        return []
    if opnorm(a - a.conj().T) > tol * scale:
        raise NotHermitian("matrix is not Hermitian within tolerance")
    w, v = _hermitian_eig(a)
    if w[0] < -tol * scale:
        raise NotPSD(f"eigenvalue {w[0]:.3e} is negative beyond tolerance")
    out = []
    for k in np.argsort(w)[::-1]:
        if w[k] < tol * scale:
            break
        x = v[:, k]
        out.append((float(w[k]), np.outer(x, x.conj())))
    return out


def is_minimal_projection(a, tol: float = DEFAULT_TOL) -> bool:
    """True iff ``a`` is a Hermitian idempotent of trace one (a rank-one projection)."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    return bool(
        opnorm(a - a.conj().T) <= tol
        and opnorm(a @ a - a) <= tol
        and np.abs(np.trace(a) - 1.0) <= tol
    )
