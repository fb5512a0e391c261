"""Recovery of (U, phase) from maps preserving |[f, f']|.

A map T on the module with ``|[Tf, Tf']| = |[f, f']|`` is presented as a
:class:`SymmetryOracle`.  :func:`decompose` recovers an A-isometry U and
phases with ``T f = phase(f) U f`` by probing T on a modular basis and on
pairwise sums.  The projection-measure route (``build_projection_measure``,
``extend_to_linear``) reconstructs the induced linear map on operators so
it can be classified and fed to :func:`lemma3_extract_isometry`.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .algebra import DEFAULT_TOL, absolute, is_minimal_projection, matrix_unit, opnorm
from .errors import DimensionOne, HypothesisFailed, InconsistentMeasure, NotIsometry, OracleMiss, ShapeMismatch
from .hmodule import (
    ModularBasis,
    as_module_element,
    canonical_basis,
    in_submodule,
    inner,
    slot_element,
    spectral_split,
)
from .opalgebra import (
    JordanClass,
    LinearMapOnOperators,
    ModuleOperator,
    apply,
    classify_jordan,
    induced_module_operator,
    is_A_isometry,
    lemma3_extract_isometry,
    projection_from_set,
    rank_one,
)
from .sampling import random_element, rng_from
from .serialization import canonical_array, canonical_key

GAUGE_NOTE = "U f1 := T f1 (phase of the first basis element fixed to 1)"

__all__ = [
    "SymmetryOracle",
    "TableOracle",
    "SyntheticOracle",
    "FunctionOracle",
    "synthesize",
    "conjugation_oracle",
    "PreservationReport",
    "check_preservation",
    "random_pairs",
    "all_pairs",
    "witness_pair",
    "obstruction",
    "WignerDecomposition",
    "decompose",
    "build_projection_measure",
    "measure_well_defined",
    "extend_to_linear",
    "central_identity_deviation",
    "recover_via_measure",
    "min_phase_distance",
]


class SymmetryOracle:
    """A queryable map f -> T f on (d, n) module elements."""

    kind = "abstract"

    def __init__(self, d: int, n: int):
        self.d = int(d)
        self.n = int(n)

    def query(self, f) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, f) -> np.ndarray:
        return self.query(f)

    def _check(self, f):
        return as_module_element(f, self.d, self.n)


class TableOracle(SymmetryOracle):
    """Finite lookup table keyed by the canonical (12-digit) form of f."""

    kind = "table"

    def __init__(self, d, n, pairs):
        super().__init__(d, n)
        self._table = {}
        self._domain = []
        for f, tf in pairs:
            f = as_module_element(f, self.d, self.n)
            tf = as_module_element(tf, self.d, self.n).copy()
            tf.flags.writeable = False
            key = canonical_key(f)
            if key not in self._table:
                self._domain.append(canonical_array(f))
            self._table[key] = tf

    @classmethod
    def from_function(cls, func, domain, d, n):
        return cls(d, n, [(f, func(f)) for f in domain])

    @property
    def domain(self) -> list[np.ndarray]:
        return list(self._domain)

    def __contains__(self, f) -> bool:
        return canonical_key(f) in self._table

    def __len__(self):
        return len(self._table)

    def query(self, f):
        f = self._check(f)
        try:
            return self._table[canonical_key(f)].copy()
        except KeyError:
            raise OracleMiss("element is not in the oracle table") from None


def _hashed_phase(f, seed: int) -> complex:
    h = hashlib.sha256(canonical_key(f) + int(seed).to_bytes(8, "little", signed=True)).digest()
    angle = 2 * np.pi * int.from_bytes(h[:8], "little") / 2.0**64
    return complex(np.exp(1j * angle))


class SyntheticOracle(SymmetryOracle):
    """T f = phase(f) U f with deterministic pseudo-random phases.

    ``phase_seed == 0`` gives phase 1 everywhere; ``constant_phase``
    overrides the seed with a single unit scalar.  The zero element
    always gets phase 1.
    """

    kind = "synthetic"

    def __init__(self, U: ModuleOperator, phase_seed: int, d: int, constant_phase=None):
        super().__init__(d, U.n)
        self.U = U
        self.phase_seed = int(phase_seed)
        self.constant_phase = None if constant_phase is None else complex(constant_phase)

    def phase(self, f) -> complex:
        f = self._check(f)
        if not np.any(canonical_array(f)):
            return 1.0 + 0j
        if self.constant_phase is not None:
            return self.constant_phase
        if self.phase_seed == 0:
            return 1.0 + 0j
        return _hashed_phase(f, self.phase_seed)

    def query(self, f):
        f = self._check(f)
        return self.phase(f) * apply(self.U, f)


class FunctionOracle(SymmetryOracle):
    """Wraps an arbitrary callable (used for counterexamples such as conjugation)."""

    kind = "function"

    def __init__(self, d, n, func, name: str = "function"):
        super().__init__(d, n)
        self.func = func
        self.name = name

    def query(self, f):
        f = self._check(f)
        return as_module_element(self.func(f.copy()), self.d, self.n)


def synthesize(U, phase_seed: int, d: int, constant_phase=None, tol: float = DEFAULT_TOL) -> SyntheticOracle:
    if not isinstance(U, ModuleOperator):
        U = ModuleOperator(U)
    if not is_A_isometry(U, tol):
        raise NotIsometry("U does not preserve the generalized inner product")
    if constant_phase is not None and abs(abs(complex(constant_phase)) - 1.0) > tol:
        raise ValueError("constant phase must have modulus one")
    return SyntheticOracle(U, phase_seed, d, constant_phase)


def conjugation_oracle(d: int, n: int) -> FunctionOracle:
    """Entrywise complex conjugation, the antiunitary candidate."""
    return FunctionOracle(d, n, np.conj, name="conjugation")


@dataclass(frozen=True)
class PreservationReport:
    max_deviation: float
    worst_pair: int | None
    passed: bool
    count: int


def check_preservation(T: SymmetryOracle, samples, tol: float = DEFAULT_TOL) -> PreservationReport:
    """max over pairs of || |[Tf, Tf']| - |[f, f']| || (spectral norm)."""
    worst, worst_idx, count = 0.0, None, 0
    for idx, (f, g) in enumerate(samples):
        f = as_module_element(f, T.d, T.n)
        g = as_module_element(g, T.d, T.n)
        dev = opnorm(absolute(inner(T(f), T(g))) - absolute(inner(f, g)))
        count += 1
        if worst_idx is None or dev > worst:
            worst, worst_idx = dev, idx
    return PreservationReport(float(worst), worst_idx, bool(worst <= tol), count)


def random_pairs(d: int, n: int, count: int, seed=0):
    rng = rng_from(seed)
    return [(random_element(d, n, rng), random_element(d, n, rng)) for _ in range(count)]


def all_pairs(elements):
    """Every (f_i, f_j) with i <= j."""
    elements = list(elements)
    return [(elements[i], elements[j]) for i in range(len(elements)) for j in range(i, len(elements))]


def witness_pair(d: int, n: int = 1):
    """f = e1 and f' = e1 - i e2 in the first slot (f' = e1 when d = 1)."""
    a = np.zeros(d, dtype=complex)
    a[0] = 1.0
    b = a.copy()
    if d > 1:
        b[1] = -1j
    return slot_element(a, 0, n), slot_element(b, 0, n)


def obstruction(d: int):
    """The matrix unit a = e12 with |a|, |a*| and ||(|a| - |a*|)||.

    For a rank-one a these differ whenever d > 1, which rules out maps of
    the form f -> phase(f) V f with V conjugate-linear.
    """
    if d < 2:
        raise DimensionOne("for d = 1 every a is a scalar and |a| = |a*|")
    a = matrix_unit(0, 1, d)
    pa, pb = absolute(a), absolute(a.conj().T)
    return a, pa, pb, opnorm(pa - pb)


@dataclass(frozen=True)
class WignerDecomposition:
    U: ModuleOperator
    phases: dict  # canonical key -> unit complex scalar
    probes: tuple
    phase_values: tuple
    residuals: tuple
    max_residual: float
    basis: ModularBasis
    gauge_note: str = GAUGE_NOTE
    full: bool = True

    def phase(self, f, T: "SymmetryOracle | None" = None) -> complex:
        """phase(f) for a probed f; for any other f, computed by querying ``T``."""
        key = canonical_key(f)
        if key in self.phases or T is None:
            return self.phases[key]
        ff = np.trace(inner(f, f)).real
        if ff == 0.0:
            return 1.0 + 0j
        return complex(np.trace(inner(T(f), apply(self.U, f))) / ff)


def _unit_factor(e):
    # e = u u* rank one; read u off its largest column
    j = int(np.argmax(np.real(np.diag(e))))
    return e[:, j] / np.sqrt(e[j, j].real)


def _table_plan(T: TableOracle, tol):
    """Greedy modular orthonormal family from the table's domain whose
    pairwise sums with the first member are also tabulated."""
    chosen: list[np.ndarray] = []
    for f in T.domain:
        if not is_minimal_projection(inner(f, f), tol):
            continue
        if any(opnorm(inner(f, g)) > tol for g in chosen):
            continue
        if chosen and (chosen[0] + f) not in T:
            continue
        chosen.append(f)
    return ModularBasis(tuple(chosen), T.d, T.n)


def _probe_basis(T: SymmetryOracle, tol):
    canon = canonical_basis(T.d, T.n)
    if not isinstance(T, TableOracle):
        return canon
    needed = list(canon) + [canon[0] + f for f in canon[1:]]
    if all(f in T for f in needed):
        return canon
    return _table_plan(T, tol)


def decompose(T: SymmetryOracle, tol: float = DEFAULT_TOL, probes: int = 100, seed: int = 0,
              extra=(), strict: bool = True) -> WignerDecomposition:
    """Recover U and the phase function with T f = phase(f) U f.

    Parameters
    ----------
    T : SymmetryOracle
        Map to decompose; d must be at least 2.
    tol : float
        Tolerance for every asserted identity.
    probes : int
        Number of seeded random elements on which phases are sampled
        (ignored for table oracles, whose whole domain is probed instead).
    seed : int
        Seed for the random probes.
    extra : iterable of (d, n) arrays
        Additional elements to probe.
    strict : bool
        Raise :class:`HypothesisFailed` when a probe residual exceeds
        ``tol * (1 + ||f||)``; otherwise only record it.

    Notes
    -----
    The basis is f_k = xi^k with xi = e1, unless T is a table lacking
    those probes, in which case a modular orthonormal family is taken
    from its domain and U is only determined on the submodule it spans.
    The gauge fixes U f_1 = T f_1.
    """
    if T.d < 2:
        raise DimensionOne("recovery requires d >= 2; for d = 1 antiunitary solutions exist")
    basis = _probe_basis(T, tol)
    if len(basis) == 0:
        raise OracleMiss("table domain contains no usable modular unit vector")
    fs = list(basis)
    gs = [T(f) for f in fs]

    for k, (f, g) in enumerate(zip(fs, gs)):
        e = inner(f, f)
        dev = opnorm(inner(g, g) - e)
        if dev > tol:
            raise HypothesisFailed(f"[T f_{k}, T f_{k}] differs from [f_{k}, f_{k}]", witness=k, deviation=dev)
        dev = float(np.linalg.norm(e @ g - g))
        if dev > tol:
            raise HypothesisFailed(f"T f_{k} is not fixed by [f_{k}, f_{k}]", witness=k, deviation=dev)
        for j in range(k):
            dev = opnorm(inner(g, gs[j]))
            if dev > tol:
                raise HypothesisFailed(f"T f_{j}, T f_{k} are not modular orthogonal", witness=(j, k), deviation=dev)

    nus = [1.0 + 0j]
    for k in range(1, len(fs)):
        h = T(fs[0] + fs[k])
        phi_k = np.trace(inner(h, gs[0]))
        if abs(abs(phi_k) - 1.0) > tol:
            raise HypothesisFailed(f"sum probe 1+{k}: overlap with T f_1 has modulus {abs(phi_k):.12g}",
                                   witness=(0, k), deviation=abs(abs(phi_k) - 1.0))
        nu_k = np.trace(inner(h, gs[k])) / phi_k
        if abs(abs(nu_k) - 1.0) > tol:
            raise HypothesisFailed(f"sum probe 1+{k}: relative phase has modulus {abs(nu_k):.12g}",
                                   witness=(0, k), deviation=abs(abs(nu_k) - 1.0))
        nus.append(complex(nu_k))

    n = T.n
    M = np.zeros((n, n), dtype=complex)
    P = np.zeros((n, n), dtype=complex)
    for f, g, nu in zip(fs, gs, nus):
        u = _unit_factor(inner(f, f))
        r = u.conj() @ f
        s = u.conj() @ (nu * g)
        M += np.outer(r.conj(), s)
        P += np.outer(r.conj(), r)
    U = ModuleOperator(M)
    full = len(fs) == n
    if not is_A_isometry(U, tol, on=None if full else ModuleOperator(P)):
        raise HypothesisFailed("recovered operator is not an A-isometry", witness="U",
                               deviation=opnorm(P @ M @ M.conj().T @ P - P))

    probe_list = list(fs) + [fs[0] + f for f in fs[1:]]
    probe_list += [as_module_element(f, T.d, n) for f in extra]
    if isinstance(T, TableOracle):
        probe_list += [f for f in T.domain if full or in_submodule(f, basis, tol)]
    else:
        rng = rng_from(seed)
        probe_list += [random_element(T.d, n, rng) for _ in range(probes)]

    phases, values, residuals = {}, [], []
    for idx, f in enumerate(probe_list):
        tf = T(f)
        ff = np.trace(inner(f, f)).real
        if ff == 0.0:
            ph = 1.0 + 0j
            res = float(np.linalg.norm(tf))
        else:
            uf = apply(U, f)
            ph = complex(np.trace(inner(tf, uf)) / ff)
            res = float(np.linalg.norm(tf - ph * uf))
        scale = 1.0 + float(np.sqrt(ff))
        if strict and (res > tol * scale or abs(abs(ph) - 1.0) > tol):
            raise HypothesisFailed(f"probe {idx} is not of the form phase * U f (residual {res:.3e})",
                                   witness=idx, deviation=res)
        phases[canonical_key(f)] = ph
        values.append(ph)
        residuals.append(res)

    return WignerDecomposition(
        U=U,
        phases=phases,
        probes=tuple(probe_list),
        phase_values=tuple(values),
        residuals=tuple(residuals),
        max_residual=max(residuals) if residuals else 0.0,
        basis=basis,
        full=full,
    )


def build_projection_measure(T: SymmetryOracle, basis: ModularBasis, tol: float = DEFAULT_TOL) -> ModuleOperator:
    """mu(sum_a f_a (.) f_a) = sum_a T f_a (.) T f_a."""
    images = ModularBasis(tuple(T(f) for f in basis), basis.d, basis.n)
    bad = images.violations(tol)
    if bad:
        raise HypothesisFailed("images of the basis are not modular orthonormal: " + "; ".join(bad), witness=bad[0])
    return projection_from_set(images)


def measure_well_defined(T: SymmetryOracle, basis_a: ModularBasis, basis_b: ModularBasis,
                         tol: float = DEFAULT_TOL) -> bool:
    pa = build_projection_measure(T, basis_a, tol)
    pb = build_projection_measure(T, basis_b, tol)
    return opnorm(pa.matrix - pb.matrix) <= tol


def _spanning_rank_one_rows(n):
    eye = np.eye(n, dtype=complex)
    rows = [eye[k] for k in range(n)]
    for j in range(n):
        for k in range(j + 1, n):
            rows.append((eye[j] + eye[k]) / np.sqrt(2))
            rows.append((eye[j] + 1j * eye[k]) / np.sqrt(2))
    return rows


def extend_to_linear(T: SymmetryOracle, tol: float = DEFAULT_TOL, extra: int | None = None, seed: int = 0,
                     full_output: bool = False):
    """Linear map phi on M_n(C) extending the projection measure of T.

    The linear system is assembled from
    * projections onto the canonical submodules generated by xi^1..xi^k,
    * rank-one projections of xi (x) v for v running over e_j,
      (e_j + e_k)/sqrt2 and (e_j + i e_k)/sqrt2, which already span M_n,
    * the spectral pieces f_i of ``extra`` seeded random elements (2 n^2
      by default),
    each paired with its measure image.  The least-squares solution must
    reproduce every pair to within ``tol``.

    Returns the map, or ``(map, residual)`` with ``full_output``.
    """
    d, n = T.d, T.n
    if d < 2:
        raise DimensionOne("the measure extension is only set up for d >= 2")
    xi = np.zeros(d, dtype=complex)
    xi[0] = 1.0
    bases = [ModularBasis(tuple(canonical_basis(d, n)[: k + 1]), d, n) for k in range(n)]
    bases += [ModularBasis((np.outer(xi, v),), d, n) for v in _spanning_rank_one_rows(n)]
    rng = rng_from(seed)
    for _ in range(2 * n * n if extra is None else extra):
        for _, _, fi in spectral_split(random_element(d, n, rng), tol):
            bases.append(ModularBasis((fi,), d, n))

    X, Y = [], []
    for b in bases:
        try:
            Q = build_projection_measure(T, b, tol)
        except HypothesisFailed as exc:
            raise InconsistentMeasure(f"measure undefined: {exc}", witness=exc.witness) from exc
        X.append(projection_from_set(b).matrix.reshape(-1))
        Y.append(Q.matrix.reshape(-1))
    X = np.stack(X, axis=1)
    Y = np.stack(Y, axis=1)
    # phi X = Y  <=>  X^T phi^T = Y^T
    sol, *_ = np.linalg.lstsq(X.T, Y.T, rcond=None)
    action = sol.T
    resid = float(np.max(np.linalg.norm(action @ X - Y, axis=0)))
    if resid > tol:
        raise InconsistentMeasure(f"projection data admits no linear extension (residual {resid:.3e})",
                                  deviation=resid)
    phi = LinearMapOnOperators(action)
    return (phi, resid) if full_output else phi


def central_identity_deviation(T: SymmetryOracle, phi: LinearMapOnOperators, probes=100, seed=0) -> float:
    """max over random f of ||phi(f (.) f) - T f (.) T f||, relative to ||f||^2."""
    rng = rng_from(seed)
    worst = 0.0
    for _ in range(probes):
        f = random_element(T.d, T.n, rng)
        tf = T(f)
        lhs = phi(rank_one(f, f).matrix)
        rhs = rank_one(tf, tf).matrix
        worst = max(worst, opnorm(lhs - rhs) / max(1.0, float(np.linalg.norm(f)) ** 2))
    return worst


def recover_via_measure(T: SymmetryOracle, tol: float = DEFAULT_TOL, seed: int = 0):
    """Measure -> linear extension -> classification -> isometry.

    Returns ``(kind, V)`` where V is the module operator whose conjugation
    reproduces the extended map.
    """
    phi = extend_to_linear(T, tol, seed=seed)
    kind = classify_jordan(phi, tol=max(tol, 1e-8), seed=seed)
    if kind is not JordanClass.HOMO:
        raise HypothesisFailed(f"extended map is {kind.value}, expected a *-homomorphism", witness=kind.value)
    _, W = lemma3_extract_isometry(phi, tol=max(tol, 1e-8), seed=seed)
    return kind, induced_module_operator(W)


def min_phase_distance(U, V) -> float:
    """min over |c| = 1 of ||U - c V||_F."""
    U = np.asarray(getattr(U, "matrix", U), dtype=complex)
    V = np.asarray(getattr(V, "matrix", V), dtype=complex)
    if U.shape != V.shape:
        raise ShapeMismatch(f"shapes differ: {U.shape} vs {V.shape}")
    t = np.vdot(V, U)
    c = t / abs(t) if abs(t) > 0 else 1.0
    return float(np.linalg.norm(U - c * V))
