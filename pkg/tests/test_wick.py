import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_complex
from wickfock.errors import ConfigurationError, PreconditionError, TruncationError
from wickfock.fock import FockTruncation, FockVector, compress, number_op
from wickfock.models import (ChainModel, OscillatorModel, TimeGrid, chain_two_point, finite_difference,
                             gaussian_bump, oscillator_two_point)
from wickfock.quasifree import TwoPointMatrix, field_op, one_particle_space, state_two_point
from wickfock.wick import (SmearingSpec, SmearingTerm, compression_T1, kernel_from_matrix, kernel_from_smearing,
                           region_projector, second_quantization, support_invariance_check, wick_square_operator)


@pytest.fixture
def osc():
    g = TimeGrid(6, 0.5)
    _, qm = one_particle_space(oscillator_two_point(OscillatorModel(1.0, g)))
    return g, qm


def random_state(rng, d, rank):
    X = random_complex(rng, d, rank)
    return TwoPointMatrix(0.5 * X @ X.conj().T)


def field_oracle(spec, qm, trunc, top):
    """sum_j sum_x f_j(x) (Phi'(Q_j e_x)^2 - w2(Q_j e_x, Q_j e_x)), compressed."""
    dim = trunc.span_dim(top)
    out = np.zeros((dim, dim), dtype=complex)
    for t in spec.terms:
        for x in np.flatnonzero(t.f):
            h = t.Q[:, x]
            phi = field_op(h, qm, trunc).op
            out += t.f[x] * (compress(phi @ phi, top) - qm.two_point(h, h) * np.eye(dim))
    return out


def test_kernel_examples(osc):
    g, qm = osc
    f = np.zeros(6)
    f[2] = 1.0
    spec = SmearingSpec((SmearingTerm(np.eye(6), f),))
    assert not spec.class_S
    np.testing.assert_allclose(kernel_from_smearing(spec, qm).F_test, np.diag(f))
    D = finite_difference(1, g)
    spec = SmearingSpec((SmearingTerm(D, np.ones(6)),))
    np.testing.assert_allclose(kernel_from_smearing(spec, qm).F_test, D @ D.T)
    b = gaussian_bump(g, 1.0, 0.5)
    term = SmearingTerm.from_squares(np.eye(6), [b])
    assert SmearingSpec((term,)).class_S
    np.testing.assert_allclose(term.f, b ** 2)


def test_term_validation():
    with pytest.raises(ConfigurationError):
        SmearingTerm(np.eye(2) * 1j, np.ones(2))
    with pytest.raises(ConfigurationError):
        SmearingTerm(np.eye(2), np.ones(2) * 1j)
    with pytest.raises(ConfigurationError):
        SmearingTerm(np.eye(2), np.ones(3))
    with pytest.raises(ConfigurationError):
        SmearingTerm(np.eye(2), np.ones(2), (np.ones(2) * 2,))
    with pytest.raises(ConfigurationError):
        SmearingSpec((SmearingTerm(np.eye(2), np.ones(2)), SmearingTerm(np.eye(3), np.ones(3))))
    with pytest.raises(PreconditionError):
        SmearingSpec((SmearingTerm(np.eye(2), np.ones(2)),)).square_terms()


def test_single_mode_hand_assembly():
    _, qm = one_particle_space(TwoPointMatrix(np.array([[0.5]])))
    t = FockTruncation.of(1, 4)
    T = wick_square_operator(kernel_from_matrix(np.array([[1.0]]), qm), t)
    s = math.sqrt(2) / 2
    np.testing.assert_allclose(compress(T.T, 2), [[0, 0, s], [0, 1, 0], [s, 0, 2]], atol=1e-14)
    np.testing.assert_allclose(compression_T1(T), [[1.0]])
    with pytest.raises(TruncationError):
        wick_square_operator(kernel_from_matrix(np.array([[1.0]]), qm), FockTruncation.of(1, 3))


def test_matches_field_oracle(rng):
    tp = random_state(rng, 4, 2)
    _, qm = one_particle_space(tp)
    t = FockTruncation.of(qm.rank, 4)
    Q = rng.standard_normal((4, 4))
    spec = SmearingSpec((SmearingTerm(Q, rng.standard_normal(4)), SmearingTerm(np.eye(4), rng.random(4))))
    T = wick_square_operator(kernel_from_smearing(spec, qm), t)
    np.testing.assert_allclose(T.compressed(2), field_oracle(spec, qm, t, 2), atol=1e-10)


def test_vacuum_expectation_and_hermiticity(osc, rng):
    g, qm = osc
    t = FockTruncation.of(1, 6)
    spec = SmearingSpec((SmearingTerm(finite_difference(1, g), rng.random(6)),))
    T = wick_square_operator(kernel_from_smearing(spec, qm), t)
    M = T.compressed()
    assert abs(M[0, 0]) < 1e-15
    assert np.abs(M - M.conj().T).max() < 1e-12


def test_expectation_identity(rng):
    tp = random_state(rng, 3, 2)
    _, qm = one_particle_space(tp)
    t = FockTruncation.of(qm.rank, 5)
    F = rng.standard_normal((3, 3))
    ker = kernel_from_matrix(F, qm)
    M = wick_square_operator(ker, t).compressed(3)
    for _ in range(20):
        psi = FockVector.random(t, rng, 3)
        W2 = state_two_point(psi, qm, t)
        lhs = np.vdot(psi.data[:len(M)], M @ psi.data[:len(M)])
        assert abs(lhs - np.sum(ker.F_test * (W2 - tp.W))) < 1e-10


def test_t1_and_second_quantization(osc, rng):
    g, qm = osc
    t = FockTruncation.of(1, 5)
    spec = SmearingSpec((SmearingTerm.from_squares(np.eye(6), [gaussian_bump(g, 1.0, 0.6)]),))
    T = wick_square_operator(kernel_from_smearing(spec, qm), t)
    T1 = compression_T1(T)
    assert np.abs(T1 - T1.conj().T).max() <= 1e-12
    assert np.linalg.eigvalsh(T1)[0] >= -1e-12
    dG = second_quantization(T1, t)
    for n in range(6):
        np.testing.assert_allclose(dG.block(n), T.A.block(n), atol=1e-10)


def test_second_quantization_examples():
    t = FockTruncation.of(2, 3)
    np.testing.assert_allclose(compress(second_quantization(np.eye(2), t), 3), compress(number_op(t), 3))
    ev = np.linalg.eigvalsh(second_quantization(np.diag([1.0, 2.0]), t).block(2))
    np.testing.assert_allclose(ev, [2, 3, 4])
    with pytest.raises(ConfigurationError):
        second_quantization(np.array([[0, 1], [0, 0]]), t)


def test_second_quantization_with_rank_two_state(rng):
    tp = random_state(rng, 5, 2)
    _, qm = one_particle_space(tp)
    t = FockTruncation.of(2, 5)
    spec = SmearingSpec((SmearingTerm(rng.standard_normal((5, 5)), rng.standard_normal(5)),))
    T = wick_square_operator(kernel_from_smearing(spec, qm), t)
    # mode coordinates: the compression is the pushed-forward kernel itself
    np.testing.assert_allclose(compression_T1(T), T.kernel.F_mix, atol=1e-12)
    dG = second_quantization(compression_T1(T), t)
    for n in range(6):
        assert np.abs(dG.block(n) - T.A.block(n)).max() < 1e-10


@pytest.fixture
def chain_slice():
    _, qm = one_particle_space(chain_two_point(ChainModel(1.0, 8, TimeGrid(1))))
    return qm, FockTruncation.of(qm.rank, 4)


def test_locality_left_half(chain_slice):
    qm, t = chain_slice
    region = np.arange(8) < 4
    f = np.where(region, 1.0 + np.arange(8), 0.0)
    spec = SmearingSpec((SmearingTerm(np.eye(8), f),))
    rep = support_invariance_check(spec, region, qm, t)
    assert rep.passed and rep.worst_residual <= 1e-9
    # the region space is a proper subspace, so the check is not vacuous
    assert 1 < rep.constants["region_fock_rank"] < t.span_dim(2)


def test_locality_detects_leaking_operator(chain_slice):
    qm, t = chain_slice
    region = np.arange(8) < 4
    P = region_projector(region, qm, t, 2)
    # a smearing reaching outside the region is not invariant; check through the raw pieces
    spec = SmearingSpec((SmearingTerm(np.eye(8), np.where(np.arange(8) == 5, 1.0, 0.0)),))
    M = wick_square_operator(kernel_from_smearing(spec, qm), t).compressed(2)
    assert np.linalg.norm((np.eye(len(P)) - P) @ M @ P, 2) > 1e-3


def test_locality_full_region_and_precondition(chain_slice):
    qm, t = chain_slice
    spec = SmearingSpec((SmearingTerm(np.eye(8), np.ones(8)),))
    assert support_invariance_check(spec, np.ones(8, dtype=bool), qm, t).worst_residual < 1e-9
    C = finite_difference(1, ChainModel(1.0, 8, TimeGrid(1)).space_time, axis=1, kind="centered")
    f = np.where(np.arange(8) < 4, 1.0, 0.0)
    with pytest.raises(PreconditionError):
        support_invariance_check(SmearingSpec((SmearingTerm(C, f),)), np.arange(8) < 4, qm, t)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_wick_square_hermitian_property(d, seed):
    r = np.random.default_rng(seed)
    tp = random_state(r, d + 1, d)
    _, qm = one_particle_space(tp)
    t = FockTruncation.of(qm.rank, 4)
    T = wick_square_operator(kernel_from_matrix(r.standard_normal((d + 1, d + 1)), qm), t)
    M = T.compressed()
    assert np.abs(M - M.conj().T).max() < 1e-10
    assert abs(M[0, 0]) < 1e-12
