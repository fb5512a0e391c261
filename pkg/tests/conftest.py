import numpy as np
import pytest
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

TOL = 1e-9


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


finite = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False).map(lambda x: round(x, 6))


def complex_arrays(shape):
    return st.tuples(arrays(np.float64, shape, elements=finite), arrays(np.float64, shape, elements=finite)).map(
        lambda p: p[0] + 1j * p[1]
    )


def herm2_eig_oracle(h):
    """Eigenpairs of a 2x2 Hermitian matrix from the characteristic polynomial.

    Independent of LAPACK: roots of x^2 - tr x + det, null vectors by hand.
    """
    a, b, c = h[0, 0].real, h[0, 1], h[1, 1].real
    tr, det = a + c, a * c - abs(b) ** 2
    if b == 0:
        e0, e1 = np.eye(2, dtype=complex)
        return sorted([(a, e0), (c, e1)], key=lambda p: -p[0])
    disc = np.sqrt(max(tr * tr / 4 - det, 0.0))
    out = []
    for lam in (tr / 2 + disc, tr / 2 - disc):
        # (a - lam) x + b y = 0
        v = np.array([b, lam - a], dtype=complex)
        out.append((lam, v / np.linalg.norm(v)))
    return out


def abs2_oracle(a):
    """|a| for 2x2 a via the characteristic-polynomial eigen-oracle."""
    h = a.conj().T @ a
    r = np.zeros((2, 2), dtype=complex)
    for lam, v in herm2_eig_oracle(h):
        r += np.sqrt(max(lam, 0.0)) * np.outer(v, v.conj())
    return r


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance") or __import__("sys").modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance")
        for line in lines:
            terminalreporter.write_line(line)
