import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from wickfock.errors import ConfigurationError, ModelError
from wickfock.models import (ChainModel, OscillatorModel, SpaceTimeGrid, TimeGrid, chain_hamiltonian_correlator,
                             chain_stiffness, chain_two_point, finite_difference, gaussian_bump, oscillator_two_point,
                             product_function, stencil_matrix, sum_of_squares_smearing, triangle_bump)
from wickfock.quasifree import one_particle_space


def test_grid_validation():
    with pytest.raises(ConfigurationError):
        TimeGrid(4, 0.0)
    with pytest.raises(ConfigurationError):
        TimeGrid(0)
    with pytest.raises(ModelError):
        OscillatorModel(0.0, TimeGrid(4))


def test_oscillator_small_example():
    W = oscillator_two_point(OscillatorModel(1.0, TimeGrid(2, 1.0))).W
    np.testing.assert_allclose(np.abs(W), 0.5)
    assert W[0, 1] == pytest.approx(0.5 * np.exp(1j))


def test_oscillator_rank_and_positivity():
    tp = oscillator_two_point(OscillatorModel(1.3, TimeGrid(8, 0.4)))
    ev = tp.check_positive_type()
    assert ev[0] >= -1e-14 * ev[-1]
    assert one_particle_space(tp)[1].rank == 1


def test_oscillator_translation_invariance_exact():
    W = oscillator_two_point(OscillatorModel(0.7, TimeGrid(9, 0.37))).W
    for k in range(-8, 9):
        diag = np.diagonal(W, -k)
        assert np.all(diag == diag[0])


def test_chain_zero_mass():
    with pytest.raises(ModelError, match="zero mode"):
        ChainModel(0.0, 4, TimeGrid(2))


def test_chain_matches_independent_oracle():
    m = ChainModel(1.0, 4, TimeGrid(4, 0.5), spacing=1.0)
    ref = oracles.chain_covariance(1.0, 4, 1.0, m.grid.times) * m.space_time.measure ** 2
    np.testing.assert_allclose(chain_two_point(m).W, ref, atol=1e-10)
    np.testing.assert_allclose(chain_hamiltonian_correlator(m), ref, atol=1e-10)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.2, 3.0), st.integers(1, 6), st.floats(0.3, 2.0), st.floats(0.1, 1.0))
def test_chain_oracle_property(mass, sites, spacing, dt):
    m = ChainModel(mass, sites, TimeGrid(3, dt), spacing)
    ref = oracles.chain_covariance(mass, sites, spacing, m.grid.times) * m.space_time.measure ** 2
    np.testing.assert_allclose(chain_two_point(m).W, ref, atol=1e-10)


def test_chain_equal_time_block():
    m = ChainModel(1.0, 4, TimeGrid(1))
    K = chain_stiffness(m)
    ev, U = np.linalg.eigh(K)
    half_inv_root = 0.5 * (U / np.sqrt(ev)) @ U.T
    np.testing.assert_allclose(chain_two_point(m).W, half_inv_root, atol=1e-12)


def test_chain_single_site_reduces_to_oscillator():
    g = TimeGrid(5, 0.3)
    chain = chain_two_point(ChainModel(1.7, 1, g)).W
    osc = oscillator_two_point(OscillatorModel(1.7, g)).W
    np.testing.assert_allclose(chain, osc, atol=1e-14)


def test_chain_positive_type():
    tp = chain_two_point(ChainModel(1.0, 4, TimeGrid(4, 0.5)))
    ev = np.linalg.eigvalsh(tp.gram)
    assert ev[0] >= -1e-12
    assert one_particle_space(tp)[1].rank == 4


def test_first_difference_examples():
    g = TimeGrid(3, 0.5)
    D = finite_difference(1, g)
    np.testing.assert_allclose(D * 0.5, [[-1, 1, 0], [0, -1, 1], [1, 0, -1]])
    D2 = finite_difference(2, g)
    np.testing.assert_allclose(D2, -D.T @ D)
    with pytest.raises(ConfigurationError):
        finite_difference(1, TimeGrid(1))
    with pytest.raises(ConfigurationError):
        finite_difference(2, TimeGrid(2))
    with pytest.raises(ConfigurationError):
        finite_difference(3, TimeGrid(5))


def test_summation_by_parts(rng):
    g = TimeGrid(7, 0.2)
    for order in (1, 2):
        Q = finite_difference(order, g)
        f, h = rng.standard_normal(7), rng.standard_normal(7)
        assert abs((Q @ f) @ h - f @ (Q.T @ h)) < 1e-12
        # periodic differences annihilate constants
        assert np.abs(Q @ np.ones(7)).max() < 1e-12


def test_open_boundary_rows_are_one_sided():
    D = finite_difference(1, TimeGrid(4, 1.0, periodic=False))
    np.testing.assert_allclose(D[-1], [0, 0, -1, 1])
    np.testing.assert_allclose(D @ np.ones(4), 0, atol=1e-14)
    C = finite_difference(1, TimeGrid(5, 1.0, periodic=False), kind="centered")
    np.testing.assert_allclose(C @ np.arange(5.0), 1.0)


def test_space_time_axes():
    st_grid = SpaceTimeGrid(TimeGrid(3, 0.5), 4, 2.0)
    Dx = finite_difference(1, st_grid, axis=1)
    f = product_function(np.ones(3), np.arange(4.0))
    out = (Dx @ f).reshape(3, 4)
    np.testing.assert_allclose(out[:, :3], 0.5)
    np.testing.assert_allclose(stencil_matrix({0: -1.0, 1: 1.0}, st_grid, axis=1), 2.0 * Dx)
    with pytest.raises(ConfigurationError):
        finite_difference(1, st_grid, axis=2)


def test_sum_of_squares():
    g = TimeGrid(8, 0.5)
    b = gaussian_bump(g, 1.0, 0.5)
    s = sum_of_squares_smearing([b])
    np.testing.assert_allclose(s.f, b ** 2)
    assert np.all(s.f >= 0)
    two = sum_of_squares_smearing([b, triangle_bump(g, 2.0, 1.0)])
    assert two.residual() <= 1e-12
    with pytest.raises(ConfigurationError):
        sum_of_squares_smearing([])


def test_bumps_periodic_distance():
    g = TimeGrid(8, 1.0)
    t = triangle_bump(g, 0.0, 2.0)
    np.testing.assert_allclose(t, [1, 0.5, 0, 0, 0, 0, 0, 0.5])
