import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lmg_gmc.oracle import full_hamiltonian, oracle_ground_state
from lmg_gmc.symmetric import (DickeVector, ModelParams, build_hamiltonian,
                               ground_state)

from conftest import symmetric_basis


def test_two_spin_matrix_elements():
    ham = build_hamiltonian(ModelParams(2, 0.5, 0.0))
    np.testing.assert_allclose(ham.diagonal, [0.0, -0.75, 0.0], atol=1e-15)
    np.testing.assert_allclose(ham.second_offdiagonal, [-0.25], atol=1e-15)


@pytest.mark.parametrize("h", [0.0, 0.3, 1.7])
def test_isotropic_has_no_offdiagonal(h):
    ham = build_hamiltonian(ModelParams(2, 1.0, h))
    assert np.all(ham.second_offdiagonal == 0.0)


@pytest.mark.parametrize("n,gamma,h", [(4, 0.5, 1.0), (5, 0.2, 0.7), (6, 0.0, 1.3)])
def test_matches_projected_pauli_hamiltonian(n, gamma, h):
    params = ModelParams(n, gamma, h)
    basis = symmetric_basis(n)
    projected = basis.T @ full_hamiltonian(params) @ basis
    np.testing.assert_allclose(build_hamiltonian(params).dense(), projected, atol=1e-12)


def test_two_spin_ground_state_is_single_excitation():
    gs = ground_state(ModelParams(2, 0.5, 0.0))
    assert gs.energy == pytest.approx(-0.75, abs=1e-14)
    np.testing.assert_allclose(gs.vector.amplitudes, [0.0, 1.0, 0.0], atol=1e-14)
    assert gs.parity == "odd"


def test_strong_field_polarizes():
    gs = ground_state(ModelParams(2, 0.5, 2.0))
    assert abs(gs.vector.amplitudes[-1]) > 0.99


@pytest.mark.parametrize("n", [10, 40])
def test_zero_field_is_ghz_like(n):
    # the cat lies along x, so in the z Dicke basis it shows up as a maximally
    # mixed single spin: N bits of total correlation, as for GHZ
    from lmg_gmc.measures import total_correlations

    tot_half = total_correlations(ground_state(ModelParams(n, 0.5, 0.0)).vector)
    tot_zero = total_correlations(ground_state(ModelParams(n, 0.0, 0.0)).vector)
    assert tot_half > 0.95 * n
    assert tot_half <= tot_zero + 1e-9
    assert tot_zero == pytest.approx(n, abs=1e-9)


@pytest.mark.parametrize("n", [3, 8, 51])
def test_parity_blocks_decouple(n):
    dense = build_hamiltonian(ModelParams(n, 0.3, 0.8)).dense()
    ne = np.arange(n + 1)
    cross = (ne[:, None] - ne[None, :]) % 2 == 1
    assert np.all(dense[cross] == 0.0)


@given(n=st.integers(2, 60), gamma=st.floats(0, 1), h=st.floats(0, 2))
@settings(max_examples=60, deadline=None)
def test_ground_state_invariants(n, gamma, h):
    params = ModelParams(n, gamma, h)
    gs = ground_state(params)
    ham = build_hamiltonian(params)
    amps = gs.vector.amplitudes
    assert abs(amps @ amps - 1.0) < 1e-12
    assert gs.eigensolve_residual <= 1e-9 * max(ham.max_abs(), 1.0) * (n + 1)
    off = 1 if gs.parity == "even" else 0
    assert np.all(amps[off::2] == 0.0)
    assert amps[np.argmax(np.abs(amps))] > 0
    dense = ham.dense()
    assert np.allclose(dense, dense.T)
    w = np.linalg.eigvalsh(dense)
    assert gs.energy == pytest.approx(w[0], abs=1e-9 * max(1.0, abs(w[0])))


def test_deterministic():
    p = ModelParams(101, 0.5, 0.93)
    a, b = ground_state(p), ground_state(p)
    assert a.energy == b.energy
    assert np.array_equal(a.vector.amplitudes, b.vector.amplitudes)


@pytest.mark.parametrize("n", range(2, 11))
@pytest.mark.parametrize("gamma", [0.0, 0.5, 1.0])
def test_energy_matches_oracle(n, gamma):
    for h in (0.0, 0.7, 1.0, 2.0):
        p = ModelParams(n, gamma, h)
        assert ground_state(p).energy == pytest.approx(oracle_ground_state(p).energy, abs=1e-9)


@pytest.mark.parametrize("bad", [
    dict(n_spins=1), dict(n_spins=4, gamma=-0.1), dict(n_spins=4, gamma=1.5),
    dict(n_spins=4, field=-1.0), dict(n_spins=4, coupling=0.0), dict(n_spins=2.5),
])
def test_params_validation(bad):
    with pytest.raises(ValueError):
        ModelParams(**bad)


def test_dicke_vector_requires_normalization():
    with pytest.raises(ValueError):
        DickeVector(2, np.array([1.0, 1.0, 0.0]))
