import numpy as np
import pytest

from modwigner.algebra import opnorm
from modwigner.errors import DimensionOne, HypothesisFailed, InconsistentMeasure, NotIsometry, OracleMiss
from modwigner.hmodule import (
    ModularBasis,
    canonical_basis,
    in_submodule,
    inner,
    modular_gram_schmidt,
    module_action,
)
from modwigner.opalgebra import (
    JordanClass,
    LinearMapOnOperators,
    ModuleOperator,
    apply,
    classify_jordan,
    identity,
    is_A_isometry,
    is_projection,
    projection_from_set,
)
from modwigner.sampling import (
    random_algebra,
    random_element,
    random_low_rank_element,
    random_unitary,
)
from modwigner.serialization import canonical_array
from modwigner.wigner import (
    FunctionOracle,
    TableOracle,
    all_pairs,
    build_projection_measure,
    central_identity_deviation,
    check_preservation,
    conjugation_oracle,
    decompose,
    extend_to_linear,
    measure_well_defined,
    min_phase_distance,
    obstruction,
    random_pairs,
    recover_via_measure,
    synthesize,
    witness_pair,
)

from conftest import TOL, abs2_oracle


def test_synthesize_identity_and_constant_phase(rng):
    T = synthesize(np.eye(3), 0, 2)
    T_i = synthesize(np.eye(3), 0, 2, constant_phase=1j)
    for _ in range(10):
        f = random_element(2, 3, rng)
        np.testing.assert_array_equal(T(f), f)
        np.testing.assert_allclose(T_i(f), 1j * f, atol=1e-15)


def test_synthesize_rejects_non_isometry():
    with pytest.raises(NotIsometry):
        synthesize(np.diag([1, 0]), 1, 2)


def test_synthetic_phases(rng):
    T = synthesize(random_unitary(3, rng), 42, 2)
    f = random_element(2, 3, rng)
    assert abs(abs(T.phase(f)) - 1) <= 1e-15
    np.testing.assert_array_equal(T(f), T(f.copy()))
    assert T.phase(np.zeros((2, 3))) == 1
    assert check_preservation(T, random_pairs(2, 3, 200, 1)).max_deviation <= 1e-12


def test_check_preservation_identity(rng):
    T = synthesize(np.eye(2), 0, 3)
    rep = check_preservation(T, random_pairs(3, 2, 20, rng))
    assert rep.max_deviation == 0 and rep.passed and rep.count == 20


@pytest.mark.parametrize("d,n", [(2, 1), (2, 3), (3, 2), (4, 5)])
def test_check_preservation_synthetic(rng, d, n):
    T = synthesize(random_unitary(n, rng), int(rng.integers(1, 1000)), d)
    rep = check_preservation(T, random_pairs(d, n, 200, rng), 1e-10)
    assert rep.passed and rep.max_deviation <= 1e-10


def test_conjugation_witness_deviation():
    f, g = witness_pair(2)
    np.testing.assert_array_equal(inner(f, g), [[1, 1j], [0, 0]])
    # independent computation of the two absolute values
    expected = opnorm(abs2_oracle(np.array([[1, 1j], [0, 0]])) - abs2_oracle(np.array([[1, -1j], [0, 0]])))
    assert expected == pytest.approx(np.sqrt(2), abs=1e-12)
    rep = check_preservation(conjugation_oracle(2, 1), [(f, g)], TOL)
    assert not rep.passed
    assert rep.max_deviation == pytest.approx(np.sqrt(2), abs=1e-9)
    assert rep.worst_pair == 0


@pytest.mark.parametrize("d", [2, 3, 4, 5])
@pytest.mark.parametrize("n", [1, 3])
def test_anti_branch_excluded_for_d_at_least_two(d, n):
    rep = check_preservation(conjugation_oracle(d, n), [witness_pair(d, n)], TOL)
    assert rep.max_deviation >= 1 and not rep.passed


def test_conjugation_is_allowed_when_d_is_one(rng):
    T = conjugation_oracle(1, 1)
    assert check_preservation(T, [witness_pair(1)], 1e-12).passed
    assert check_preservation(T, random_pairs(1, 1, 100, rng), 1e-12).passed


def test_obstruction():
    for d in (2, 3, 6):
        a, pa, pb, dist = obstruction(d)
        assert dist == pytest.approx(1.0, abs=1e-12)
        assert pa[1, 1] == pytest.approx(1) and pb[0, 0] == pytest.approx(1)
    with pytest.raises(DimensionOne):
        obstruction(1)


def test_decompose_identity():
    dec = decompose(synthesize(np.eye(3), 0, 2))
    np.testing.assert_allclose(dec.U.matrix, np.eye(3), atol=1e-15)
    np.testing.assert_allclose(dec.phase_values, 1, atol=1e-15)
    assert dec.max_residual <= 1e-14
    assert dec.full


def test_decompose_constant_phase_absorbed_by_gauge():
    dec = decompose(synthesize(np.eye(2), 0, 3, constant_phase=1j))
    np.testing.assert_allclose(dec.U.matrix, 1j * np.eye(2), atol=1e-15)
    np.testing.assert_allclose(dec.phase_values, 1, atol=1e-14)


def test_decompose_round_trip(rng):
    for _ in range(10):
        U0 = random_unitary(3, rng)
        T = synthesize(U0, int(rng.integers(1, 2**31)), 2)
        dec = decompose(T, probes=100, seed=3)
        assert dec.max_residual <= 1e-8
        assert min_phase_distance(dec.U, U0) <= 1e-8
        assert is_A_isometry(dec.U, TOL)
        assert all(abs(abs(p) - 1) <= TOL for p in dec.phase_values)
        for f, ph in zip(dec.probes, dec.phase_values):
            assert np.linalg.norm(T(f) - ph * apply(dec.U, f)) <= dec.max_residual + 1e-15
            assert dec.phase(f) == ph


def test_decompose_phase_zero_element():
    dec = decompose(synthesize(np.eye(2), 5, 2), extra=[np.zeros((2, 2))], probes=0)
    assert dec.phase(np.zeros((2, 2))) == 1


def test_decompose_phase_off_probe_set(rng):
    T = synthesize(random_unitary(3, rng), 9, 2)
    dec = decompose(T, probes=5)
    f = random_element(2, 3, rng)
    with pytest.raises(KeyError):
        dec.phase(f)
    ph = dec.phase(f, T)
    assert abs(abs(ph) - 1) <= TOL
    assert np.linalg.norm(T(f) - ph * apply(dec.U, f)) <= 1e-12
    assert dec.phase(np.zeros((2, 3)), T) == 1


def test_gauge_coherence(rng):
    U0 = random_unitary(3, rng)
    c = np.exp(0.7j)
    A = synthesize(c * U0, 11, 2)
    base = synthesize(U0, 11, 2)
    B = FunctionOracle(2, 3, lambda f: c * base(f))
    f = random_element(2, 3, rng)
    np.testing.assert_allclose(A(f), B(f), atol=1e-14)
    da, db = decompose(A), decompose(B)
    np.testing.assert_allclose(da.U.matrix, db.U.matrix, atol=1e-14)


def test_decompose_rejects_d_one():
    with pytest.raises(DimensionOne):
        decompose(synthesize(np.eye(2), 1, 1))


@pytest.mark.parametrize("T", [conjugation_oracle(2, 1), conjugation_oracle(3, 2),
                               FunctionOracle(2, 2, lambda f: 2 * f)])
def test_decompose_rejects_hypothesis_violations(T):
    with pytest.raises(HypothesisFailed) as info:
        decompose(T)
    assert info.value.witness is not None


def test_decompose_non_strict_records_residual():
    dec = decompose(conjugation_oracle(2, 1), strict=False, probes=10)
    assert dec.max_residual > 0.1


def test_full_table_oracle(rng):
    U0 = random_unitary(3, rng)
    src = synthesize(U0, 9, 2)
    canon = list(canonical_basis(2, 3))
    dom = canon + [canon[0] + f for f in canon[1:]] + [random_element(2, 3, rng) for _ in range(5)]
    T = TableOracle.from_function(src, dom, 2, 3)
    dec = decompose(T)
    assert dec.full
    assert min_phase_distance(dec.U, U0) <= 1e-8
    assert dec.max_residual <= 1e-9
    assert len(dec.probes) == len(canon) + 2 + len(dom)


def test_table_oracle_miss(rng):
    T = TableOracle(2, 2, [(canonical_basis(2, 2)[0], canonical_basis(2, 2)[0])])
    with pytest.raises(OracleMiss):
        T(random_element(2, 2, rng))


def test_partial_table_recovers_isometry_on_submodule(rng):
    d, n = 2, 4
    U0 = random_unitary(n, rng)
    src = synthesize(U0, 3, d)
    # submodule spanned by two orthonormal rows r1, r2
    q, _ = np.linalg.qr(rng.standard_normal((n, 2)) + 1j * rng.standard_normal((n, 2)))
    r1, r2 = q[:, 0], q[:, 1]
    xi = np.array([1, 0], dtype=complex)
    # table keys are canonical, so the sum probe must be formed from canonical parts
    b1, b2 = canonical_array(np.outer(xi, r1)), canonical_array(np.outer(xi, r2))
    inside = [module_action(random_algebra(d, rng), b1) + module_action(random_algebra(d, rng), b2) for _ in range(4)]
    T = TableOracle.from_function(src, [b1, b2, b1 + b2] + inside, d, n)
    dec = decompose(T)
    assert not dec.full and len(dec.basis) == 2
    P = projection_from_set(dec.basis)
    assert is_A_isometry(dec.U, TOL, on=P)
    assert not is_A_isometry(dec.U, TOL)
    assert dec.max_residual <= 1e-9
    # U agrees with U0 up to one global phase on the submodule
    c = inner(apply(ModuleOperator(U0), b1), apply(dec.U, b1))[0, 0]
    c = c / abs(c)
    for f in inside:
        np.testing.assert_allclose(c * apply(dec.U, f), apply(ModuleOperator(U0), f), atol=1e-9)


def test_build_projection_measure_examples(rng):
    T = synthesize(np.eye(3), 0, 2)
    np.testing.assert_allclose(build_projection_measure(T, canonical_basis(2, 3)).matrix, np.eye(3))
    assert opnorm(build_projection_measure(T, ModularBasis((), 2, 3)).matrix) == 0
    S = synthesize(random_unitary(3, rng), 5, 2)
    b = modular_gram_schmidt([random_low_rank_element(2, 3, 1, rng)])
    assert len(b) == 1
    Q = build_projection_measure(S, b)
    assert is_projection(Q, TOL)
    assert np.trace(Q.matrix).real == pytest.approx(1.0, abs=TOL)


def test_build_projection_measure_rejects_scaling():
    with pytest.raises(HypothesisFailed):
        build_projection_measure(FunctionOracle(2, 2, lambda f: 2 * f), canonical_basis(2, 2))


def test_measure_well_defined(rng):
    T = synthesize(random_unitary(4, rng), 17, 3)
    gens = [random_low_rank_element(3, 4, 2, rng) for _ in range(2)]
    A = modular_gram_schmidt(gens)
    assert measure_well_defined(T, A, A)
    phases = np.exp(1j * rng.uniform(0, 2 * np.pi, len(A)))
    B = ModularBasis(tuple(p * f for p, f in zip(phases, A)), 3, 4)
    assert measure_well_defined(T, A, B)
    mixed = [module_action(random_algebra(3, rng), gens[0]) + module_action(random_algebra(3, rng), gens[1])
             for _ in range(3)]
    C = modular_gram_schmidt(mixed)
    assert all(in_submodule(f, A) for f in C) and all(in_submodule(f, C) for f in A)
    assert measure_well_defined(T, A, C)


def test_extend_identity():
    phi = extend_to_linear(synthesize(np.eye(3), 0, 2))
    np.testing.assert_allclose(phi.action, np.eye(9), atol=1e-12)


@pytest.mark.parametrize("d,n", [(2, 1), (2, 2), (3, 3), (2, 4)])
def test_extend_synthetic_matches_conjugation(rng, d, n):
    U0 = random_unitary(n, rng)
    T = synthesize(U0, 23, d)
    phi, resid = extend_to_linear(T, full_output=True)
    assert resid <= 1e-9
    expected = LinearMapOnOperators.from_function(lambda A: U0.conj().T @ A @ U0, n)
    np.testing.assert_allclose(phi.action, expected.action, atol=1e-9)
    assert classify_jordan(phi) is JordanClass.HOMO
    assert central_identity_deviation(T, phi, 100, seed=1) <= 1e-9


def test_extend_guard_for_scaled_map():
    # f -> 2f breaks modular orthonormality of images; the measure guard fires first
    with pytest.raises(InconsistentMeasure):
        extend_to_linear(FunctionOracle(2, 2, lambda f: 2 * f))
    # the linear map it would induce is not Jordan either
    assert classify_jordan(LinearMapOnOperators.from_function(lambda A: 4 * A, 2)) is JordanClass.NONE


def test_conjugation_reaches_the_anti_branch():
    # on rank-one projections conjugation acts as the transpose, a consistent
    # *-antihomomorphism; only the |a| = |a*| step rules it out
    T = conjugation_oracle(2, 3)
    phi = extend_to_linear(T)
    np.testing.assert_allclose(phi.action, LinearMapOnOperators.from_function(lambda A: A.T, 3).action, atol=1e-12)
    assert classify_jordan(phi) is JordanClass.ANTI
    with pytest.raises(HypothesisFailed):
        recover_via_measure(T)
    assert not check_preservation(T, [witness_pair(2, 3)]).passed


def test_extend_rejects_d_one():
    with pytest.raises(DimensionOne):
        extend_to_linear(synthesize(np.eye(2), 0, 1))


@pytest.mark.parametrize("d,n", [(2, 2), (3, 3), (2, 5)])
def test_pipeline_matches_decompose(rng, d, n):
    T = synthesize(random_unitary(n, rng), 31, d)
    kind, V = recover_via_measure(T)
    assert kind is JordanClass.HOMO
    assert min_phase_distance(V, decompose(T).U) <= 1e-6


def test_all_pairs():
    assert len(all_pairs(range(4))) == 10
