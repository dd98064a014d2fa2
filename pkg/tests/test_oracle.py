import math

import numpy as np
import pytest

from lmg_gmc.oracle import (MAX_SPINS, distance_for_partition, embed_dicke,
                            equivalence_suite, full_hamiltonian, oracle_above_k,
                            oracle_gmc, oracle_gmc_vector, oracle_ground_state)
from lmg_gmc.symmetric import DickeVector, ModelParams, ground_state


def test_two_spin_spectrum():
    w = np.linalg.eigvalsh(full_hamiltonian(ModelParams(2, 0.5, 0.0)))
    assert w[0] == pytest.approx(-0.75, abs=1e-14)


@pytest.mark.parametrize("n", [4, 6])
def test_ising_limit_degenerate_pair(n):
    w = np.linalg.eigvalsh(full_hamiltonian(ModelParams(n, 0.0, 0.0)))
    assert w[1] - w[0] < 1e-10
    assert w[2] - w[1] > 1e-3


def test_strong_field_aligns():
    h = 10.0
    gs = oracle_ground_state(ModelParams(2, 0.5, h))
    assert abs(gs.amplitudes[0b11]) > 0.999
    assert gs.energy == pytest.approx(-2 * h, abs=1.0 / h)


def test_hermitian_real():
    ham = full_hamiltonian(ModelParams(5, 0.3, 0.4))
    assert np.array_equal(ham, ham.T)


@pytest.mark.parametrize("n", [4, 6, 7])
def test_ghz_injected(n):
    psi = embed_dicke(DickeVector.ghz(n))
    for k in range(2, n):
        closed = math.ceil(n / (k - 1)) - math.ceil(n / k)
        assert oracle_gmc_vector(psi, n, k) == pytest.approx(closed, abs=1e-10)


def test_product_state():
    psi = embed_dicke(DickeVector.dicke(6, 0))
    for k in range(1, 7):
        assert oracle_gmc_vector(psi, 6, k) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("h", [0.0, 0.6, 1.0, 1.8])
def test_block_choice_irrelevant(h):
    n = 8
    psi = oracle_ground_state(ModelParams(n, 0.5, h)).amplitudes
    rng = np.random.default_rng(7)
    for k in (2, 3, 5):
        ref = oracle_above_k(psi, n, k)
        for _ in range(4):
            perm = rng.permutation(n).tolist()
            blocks = [perm[s:s + k] for s in range(0, n, k)]
            assert distance_for_partition(psi, n, blocks) == pytest.approx(ref, abs=1e-10)


@pytest.mark.parametrize("n", [3, 6, 9])
@pytest.mark.parametrize("gamma", [0.0, 0.5, 1.0])
@pytest.mark.parametrize("h", [0.0, 0.5, 1.0, 2.0])
def test_ground_vector_overlap(n, gamma, h):
    params = ModelParams(n, gamma, h)
    fast = embed_dicke(ground_state(params).vector)
    ref = oracle_ground_state(params).amplitudes
    assert abs(fast @ ref) > 1 - 1e-9


def test_oracle_gmc_matches_pipeline():
    from lmg_gmc.measures import genuine_k

    params = ModelParams(6, 0.5, 0.9)
    state = ground_state(params).vector
    for k in range(2, 7):
        assert oracle_gmc(params, k) == pytest.approx(genuine_k(state, k), abs=1e-8)


def test_size_caps():
    with pytest.raises(ValueError):
        full_hamiltonian(ModelParams(MAX_SPINS + 1, 0.5, 0.0))
    with pytest.raises(ValueError):
        oracle_gmc(ModelParams(11, 0.5, 0.0), 2)
    with pytest.raises(ValueError):
        equivalence_suite(range(2, 13), gmc=True)


def test_suite_negative_control():
    cases = equivalence_suite(range(2, 4), gammas=(0.5,), fields=(1.0,), perturb=1e-6)
    assert cases and not any(c.passed for c in cases)
