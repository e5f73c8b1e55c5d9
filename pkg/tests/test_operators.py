import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qmle.operators import (add_white_noise, check_density_matrix, eigh_desc, from_eigensystem, ghz_state,
                            haar_random_pure, hermitize, is_density_matrix, pack_hermitian, pure_to_density,
                            random_density, random_unitary, state_distance, unpack_hermitian, w_state)


def random_hermitian(d, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return hermitize(a)


@pytest.mark.parametrize("d", [1, 2, 5, 16])
def test_eigensystem_contract(d):
    h = random_hermitian(d, d)
    w, v = eigh_desc(h)
    assert np.all(np.diff(w) <= 0)
    assert np.linalg.norm(from_eigensystem(w, v) - h) <= 1e-10 * np.linalg.norm(h)


def test_haar_state_is_normalized_and_seeded():
    a = haar_random_pure(8, 3)
    assert np.isclose(np.linalg.norm(a), 1.0)
    assert np.array_equal(a, haar_random_pure(8, 3))
    assert not np.allclose(a, haar_random_pure(8, 4))
    with pytest.raises(ValueError):
        haar_random_pure(0, 1)


def test_white_noise():
    rho = pure_to_density(haar_random_pure(4, 0))
    noisy = add_white_noise(rho, 0.1)
    check_density_matrix(noisy)
    assert np.isclose(np.linalg.eigvalsh(noisy)[-1], 0.9 + 0.1 / 4)
    assert np.allclose(add_white_noise(rho, 1.0), np.eye(4) / 4)
    with pytest.raises(ValueError):
        add_white_noise(rho, 1.5)


def test_w_and_ghz():
    psi = w_state(3)
    assert np.flatnonzero(psi).tolist() == [1, 2, 4]
    assert np.isclose(np.linalg.norm(psi), 1)
    g = ghz_state(2)
    assert np.allclose(g, [2**-0.5, 0, 0, 2**-0.5])


def test_state_checks():
    assert is_density_matrix(random_density(3, 1))
    assert not is_density_matrix(np.diag([1.2, -0.2]))
    assert not is_density_matrix(np.diag([0.5, 0.4]))
    assert not is_density_matrix(np.array([[0.5, 0.1], [0.0, 0.5]]))


def test_state_distance():
    a, b = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    assert state_distance(a, b) == (1.0, 0.0)
    rho = random_density(4, 2)
    td, fid = state_distance(rho, rho)
    assert td < 1e-12 and abs(fid - 1) < 1e-9
    u = random_unitary(4, 5)
    sigma = random_density(4, 6)
    d1 = state_distance(rho, sigma)
    d2 = state_distance(u @ rho @ u.conj().T, u @ sigma @ u.conj().T)
    assert np.allclose(d1, d2, atol=1e-9)
    with pytest.raises(ValueError):
        state_distance(rho, np.eye(2) / 2)


@settings(max_examples=50, deadline=None)
@given(d=st.integers(1, 6), seed=st.integers(0, 2**31))
def test_packing_is_an_isometry(d, seed):
    a, b = random_hermitian(d, seed), random_hermitian(d, seed + 1)
    x = pack_hermitian(a)
    assert x.shape == (d * d,)
    assert np.allclose(unpack_hermitian(x, d), a)
    assert np.isclose(x @ pack_hermitian(b), np.trace(a @ b).real)
