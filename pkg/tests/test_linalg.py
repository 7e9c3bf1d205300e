import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monocone.linalg import (
    NotHermitianError,
    NotPositiveError,
    binary_entropy,
    hermitian_eigh,
    hermitian_eigs,
    partial_trace,
    psd_sqrt,
    qubit_entropy_from_bloch,
    reduce_pure,
    shannon_entropy,
    tensor_product,
    von_neumann_entropy,
)

from conftest import random_density, random_pure, random_unitary


def test_diagonal_and_pauli_x_spectra():
    assert np.allclose(hermitian_eigs(np.diag([0.2, 0.9, -0.4, 0.0]).astype(complex)), [0.9, 0.2, 0.0, -0.4], atol=1e-15)
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    assert np.allclose(hermitian_eigs(sx), [1.0, -1.0], atol=1e-14)


@pytest.mark.parametrize("dim", [2, 4, 8])
def test_eigenvalues_match_characteristic_polynomial_roots(rng, dim):
    h = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = h + h.conj().T
    # oracle: roots of det(x - H) from the characteristic polynomial
    roots = np.sort(np.roots(np.poly(h)).real)[::-1]
    assert np.allclose(hermitian_eigs(h), roots, atol=1e-9)


@pytest.mark.parametrize("dim", [2, 4, 8])
def test_eigen_decomposition_reconstructs_batch(rng, dim):
    h = rng.normal(size=(16, dim, dim)) + 1j * rng.normal(size=(16, dim, dim))
    h = h + np.swapaxes(h.conj(), -1, -2)
    w, v = hermitian_eigh(h)
    assert np.all(np.diff(w, axis=-1) <= 1e-12)
    recon = v @ (w[..., :, None] * np.swapaxes(v.conj(), -1, -2))
    assert np.max(np.abs(recon - h)) < 1e-11
    eye = np.swapaxes(v.conj(), -1, -2) @ v
    assert np.max(np.abs(eye - np.eye(dim))) < 1e-12


def test_degenerate_spectrum_resolved(rng):
    u = random_unitary(rng, 4)
    h = u @ np.diag([1.0, 1.0, 1.0, -2.0]) @ u.conj().T
    assert np.allclose(hermitian_eigs(h), [1, 1, 1, -2], atol=1e-12)


def test_non_hermitian_rejected():
    with pytest.raises(NotHermitianError):
        hermitian_eigs(np.array([[0, 1], [0, 0]], dtype=complex))


def test_unsupported_dimension_rejected():
    with pytest.raises(ValueError):
        hermitian_eigs(np.eye(3, dtype=complex))
    with pytest.raises(ValueError):
        hermitian_eigs(np.eye(16, dtype=complex))


def test_psd_sqrt_squares_back(rng):
    rho = random_density(rng, 4)
    r = psd_sqrt(rho)
    assert np.allclose(r @ r, rho, atol=1e-13)
    with pytest.raises(NotPositiveError):
        psd_sqrt(np.diag([1.0, -0.1]).astype(complex))


def test_tensor_product_dimension_cap():
    with pytest.raises(ValueError):
        tensor_product(np.eye(4), np.eye(4))


def test_partial_trace_of_product_state(rng):
    ra, rb, rc = (random_density(rng, 2) for _ in range(3))
    rho = tensor_product(tensor_product(ra, rb), rc)
    assert np.allclose(partial_trace(rho, "A"), ra, atol=1e-14)
    assert np.allclose(partial_trace(rho, "C"), rc, atol=1e-14)
    assert np.allclose(partial_trace(rho, "AC"), tensor_product(ra, rc), atol=1e-14)
    # output follows the order of ``keep``
    assert np.allclose(partial_trace(rho, "CA"), tensor_product(rc, ra), atol=1e-14)


def test_partial_trace_composes_and_preserves_trace(rng):
    rho = random_density(rng, 8)
    ab = partial_trace(rho, "AB")
    assert np.isclose(np.trace(ab).real, 1.0, atol=1e-14)
    assert np.allclose(partial_trace(ab, "A", parties="AB"), partial_trace(rho, "A"), atol=1e-14)


def test_reduce_pure_matches_partial_trace(rng):
    psi = random_pure(rng)
    rho = np.outer(psi, psi.conj())
    for keep in ("A", "B", "C", "AB", "AC", "BC"):
        assert np.allclose(reduce_pure(psi, keep), partial_trace(rho, keep), atol=1e-14)


def test_binary_entropy_values():
    # independent reference: 30-digit evaluation of -x log2 x - (1-x) log2(1-x)
    assert binary_entropy(0.25) == pytest.approx(0.811278124459132864, abs=1e-14)
    assert binary_entropy(0.8) == pytest.approx(0.721928094887362348, abs=1e-14)
    assert binary_entropy(0.0) == 0.0 and binary_entropy(1.0) == 0.0
    assert binary_entropy(0.5) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ValueError):
        binary_entropy(1.2)


def test_entropy_extremes():
    assert von_neumann_entropy(np.eye(4) / 4) == pytest.approx(2.0, abs=1e-13)
    assert von_neumann_entropy(np.diag([1.0, 0, 0, 0]).astype(complex)) == pytest.approx(0.0, abs=1e-14)
    assert shannon_entropy(np.array([0.5, 0.5, 0.0])) == pytest.approx(1.0, abs=1e-15)


def test_bloch_entropy_matches_spectrum(rng):
    r = rng.uniform(0, 1, 50)
    assert np.allclose(qubit_entropy_from_bloch(r), binary_entropy((1 + r) / 2), atol=1e-13)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 4, 8]))
def test_entropy_unitary_invariance(seed, dim):
    g = np.random.default_rng(seed)
    rho = random_density(g, dim)
    u = random_unitary(g, dim)
    assert von_neumann_entropy(u @ rho @ u.conj().T) == pytest.approx(von_neumann_entropy(rho), abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_pure_state_marginal_entropies_agree(seed):
    psi = random_pure(np.random.default_rng(seed))
    assert von_neumann_entropy(reduce_pure(psi, "A")) == pytest.approx(
        von_neumann_entropy(reduce_pure(psi, "BC")), abs=1e-10
    )
