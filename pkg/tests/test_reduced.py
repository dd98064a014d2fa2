import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lmg_gmc.measures import entropy_from_spectrum, von_neumann_entropy
from lmg_gmc.oracle import embed_dicke, partial_trace
from lmg_gmc.reduced import block_spectrum, log_binomial, reduce
from lmg_gmc.symmetric import DickeVector, ModelParams, ground_state

from conftest import random_dicke, symmetric_basis

mpmath.mp.dps = 50


def exact_log_binomial(n, r):
    return mpmath.log(mpmath.mpf(math.comb(n, r)))


def test_log_binomial_small():
    assert log_binomial(4, 2) == pytest.approx(math.log(6), rel=1e-15)
    assert all(log_binomial(n, 0) == 0.0 for n in range(0, 600, 37))
    assert log_binomial(7, 7) == 0.0


def test_log_binomial_out_of_range():
    assert log_binomial(5, -1) == -math.inf
    assert log_binomial(5, 6) == -math.inf


def test_log_binomial_large_exact():
    exact = exact_log_binomial(500, 250)
    assert float(exact) == pytest.approx(343.23999487845016, rel=1e-15)
    assert abs(log_binomial(500, 250) - float(exact)) <= 1e-10 * float(exact)


def test_ghz_two_spin_block():
    rho = reduce(DickeVector.ghz(4), 2)
    np.testing.assert_allclose(rho.matrix, np.diag([0.5, 0.0, 0.5]), atol=1e-15)


def test_single_excitation_one_spin():
    rho = reduce(DickeVector.dicke(2, 1), 1)
    np.testing.assert_allclose(rho.matrix, np.diag([0.5, 0.5]), atol=1e-15)


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("k", [1, 3, 5, 8])
def test_matches_explicit_partial_trace(seed, k):
    n = 8
    state = random_dicke(n, seed)
    rho = reduce(state, k).matrix
    explicit = partial_trace(embed_dicke(state), range(k), n)
    basis = symmetric_basis(k)
    np.testing.assert_allclose(basis @ rho @ basis.T, explicit, atol=1e-10)
    np.testing.assert_allclose(basis.T @ explicit @ basis, rho, atol=1e-10)


@given(n=st.integers(2, 120), seed=st.integers(0, 2**32 - 1), data=st.data())
@settings(max_examples=60, deadline=None)
def test_reduced_state_invariants(n, seed, data):
    k = data.draw(st.integers(1, n))
    rho = reduce(random_dicke(n, seed), k)
    assert rho.matrix.shape == (k + 1, k + 1)
    assert np.array_equal(rho.matrix, rho.matrix.T)
    assert np.trace(rho.matrix) == pytest.approx(1.0, abs=1e-10)
    assert np.linalg.eigvalsh(rho.matrix).min() >= -1e-10


@pytest.mark.parametrize("n", [5, 30, 200])
def test_full_block_is_pure(n):
    w = reduce(random_dicke(n, 1), n).eigenvalues()
    np.testing.assert_allclose(w[:-1], 0.0, atol=1e-10)
    assert w[-1] == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("n", [7, 40, 200])
def test_schmidt_duality(n):
    state = ground_state(ModelParams(n, 0.5, 0.95)).vector
    for k in range(1, n):
        a = np.sort(reduce(state, k).eigenvalues())[::-1]
        b = np.sort(reduce(state, n - k).eigenvalues())[::-1]
        m = max(len(a), len(b))
        a, b = np.pad(a, (0, m - len(a))), np.pad(b, (0, m - len(b)))
        np.testing.assert_allclose(a, b, atol=1e-10)


def test_block_spectrum_agrees_with_reduce():
    state = random_dicke(60, 3)
    for k in (1, 10, 30, 50, 60):
        s_full = von_neumann_entropy(reduce(state, k))
        s_fast = entropy_from_spectrum(block_spectrum(state, k))
        assert s_full == pytest.approx(s_fast, abs=1e-10)


@pytest.mark.parametrize("k", [0, 9])
def test_block_size_out_of_range(k):
    with pytest.raises(ValueError):
        reduce(random_dicke(8, 0), k)
