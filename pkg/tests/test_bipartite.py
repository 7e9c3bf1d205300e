import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monocone.bipartite import (
    SPIN_FLIP,
    DiscordOptimizationError,
    Measurement1Q,
    concurrence,
    conditional_entropy_at,
    correlation_tensor,
    discord_from_parts,
    eof_from_concurrence,
    eof_two_qubit,
    grid_conditional_entropy,
    measured_conditional_entropy,
    measurement_branches,
    minimize_conditional_entropy,
    quantum_discord,
    quantum_mutual_information,
    spin_flip,
    tangle_bipartition,
)
from monocone.linalg import binary_entropy, tensor_product, von_neumann_entropy
from monocone.states import ghz_state

from conftest import random_density, random_unitary

SINGLET = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)
SWAP = np.eye(4)[[0, 2, 1, 3]]


def proj(v):
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def werner(p):
    return p * proj(SINGLET) + (1 - p) * np.eye(4) / 4


def concurrence_oracle(rho):
    # square roots of the (non-Hermitian) product spectrum, general eigensolver
    lam = np.sqrt(np.clip(np.linalg.eigvals(rho @ SPIN_FLIP @ rho.conj() @ SPIN_FLIP).real, 0, None))
    lam = np.sort(lam)[::-1]
    return max(0.0, lam[0] - lam[1:].sum())


def test_singlet_concurrence_is_one():
    assert concurrence(proj(SINGLET)) == pytest.approx(1.0, abs=1e-12)


def test_product_state_concurrence_zero():
    assert concurrence(proj([1, 0, 0, 0])) == pytest.approx(0.0, abs=1e-12)


def test_spin_flip_maps_00_to_11_and_fixes_singlet():
    assert np.allclose(spin_flip(proj([1, 0, 0, 0])), proj([0, 0, 0, 1]))
    assert np.allclose(spin_flip(proj(SINGLET)), proj(SINGLET))


@pytest.mark.parametrize("p", [0.0, 0.2, 1 / 3, 0.5, 0.9, 1.0])
def test_werner_concurrence_closed_form(p):
    assert concurrence(werner(p)) == pytest.approx(max(0.0, (3 * p - 1) / 2), abs=1e-12)


def test_concurrence_matches_general_eigensolver(rng):
    for rank in (1, 2, 4):
        for _ in range(10):
            rho = random_density(rng, 4, rank)
            assert concurrence(rho) == pytest.approx(concurrence_oracle(rho), abs=1e-6)


def test_concurrence_batch_matches_single(rng):
    rhos = np.stack([random_density(rng, 4, 2) for _ in range(5)])
    assert np.allclose(concurrence(rhos), [concurrence(r) for r in rhos], atol=1e-15)


def test_eof_values():
    assert eof_from_concurrence(0.0) == 0.0
    assert eof_from_concurrence(1.0) == pytest.approx(1.0, abs=1e-15)
    # 30-digit reference for h((1 + sqrt(1 - 4/9)) / 2)
    assert eof_from_concurrence(2 / 3) == pytest.approx(0.550047759582757441, abs=1e-14)
    assert eof_two_qubit(proj(SINGLET)) == pytest.approx(1.0, abs=1e-12)


def test_tangle_of_ghz_bipartition():
    assert tangle_bipartition(ghz_state(), "A") == pytest.approx(1.0, abs=1e-14)


def test_mutual_information_anchors():
    assert quantum_mutual_information(proj(SINGLET)) == pytest.approx(2.0, abs=1e-12)
    classical = 0.5 * (proj([1, 0, 0, 0]) + proj([0, 0, 0, 1]))
    assert quantum_mutual_information(classical) == pytest.approx(1.0, abs=1e-12)
    product = tensor_product(np.diag([0.3, 0.7]), np.diag([0.6, 0.4])).astype(complex)
    assert quantum_mutual_information(product) == pytest.approx(0.0, abs=1e-12)


def test_correlation_tensor_reconstructs(rng):
    rho = random_density(rng, 4)
    a, b, t = correlation_tensor(rho)
    from monocone.bipartite import PAULIS

    r = np.zeros((4, 4))
    r[0, 0] = 1
    r[1:, 0], r[0, 1:], r[1:, 1:] = a, b, t
    recon = sum(r[i, j] * tensor_product(PAULIS[i], PAULIS[j]) for i in range(4) for j in range(4)) / 4
    assert np.allclose(recon, rho, atol=1e-14)


def test_classical_state_measured_in_z():
    classical = 0.5 * (proj([1, 0, 0, 0]) + proj([0, 0, 0, 1]))
    value, m = measured_conditional_entropy(classical)
    assert value == pytest.approx(0.0, abs=1e-9)
    assert min(m.theta, np.pi - m.theta) == pytest.approx(0.0, abs=1e-3)
    assert quantum_discord(classical) == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("p", [0.1, 0.5, 0.8, 1.0])
def test_werner_discord_closed_form(p):
    # isotropic correlations: every measurement leaves h((1 + p) / 2)
    joint = np.array([(1 + 3 * p) / 4] + [(1 - p) / 4] * 3)
    joint = joint[joint > 0]
    expected = 1.0 + np.sum(joint * np.log2(joint)) + binary_entropy((1 + p) / 2)
    assert quantum_discord(werner(p)) == pytest.approx(expected, abs=1e-9)


def test_branch_sum_matches_projector_path(rng):
    for _ in range(10):
        rho = random_density(rng, 4)
        m = Measurement1Q(rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi))
        for side in ("first", "second"):
            br = measurement_branches(rho, m, side)
            direct = sum(b.probability * von_neumann_entropy(b.post_state) for b in br)
            assert conditional_entropy_at(rho, m, side) == pytest.approx(direct, abs=1e-12)
            assert sum(b.probability for b in br) == pytest.approx(1.0, abs=1e-14)


def test_measuring_first_equals_measuring_second_of_swapped(rng):
    rho = random_density(rng, 4, 2)
    swapped = SWAP @ rho @ SWAP
    assert quantum_discord(rho, "first") == pytest.approx(quantum_discord(swapped, "second"), abs=1e-9)


def test_refined_minimum_against_zoomed_grid_oracle(rng):
    rhos = np.stack([random_density(rng, 4, 2) for _ in range(6)])
    fast = minimize_conditional_entropy(rhos)
    slow = grid_conditional_entropy(rhos, n_theta=256, n_phi=512)
    assert np.all(fast.converged)
    assert np.max(np.abs(fast.value - slow)) < 1e-6
    assert np.all(fast.value <= fast.grid_value + 1e-15)


def test_discord_local_unitary_invariance(rng):
    rho = random_density(rng, 4, 2)
    u = tensor_product(random_unitary(rng, 2), random_unitary(rng, 2))
    moved = u @ rho @ u.conj().T
    assert quantum_discord(moved) == pytest.approx(quantum_discord(rho), abs=1e-8)
    assert concurrence(moved) == pytest.approx(concurrence(rho), abs=1e-10)


def test_negative_discord_is_reported():
    assert discord_from_parts(1.0, 1.0, -5e-10) == 0.0
    with pytest.raises(DiscordOptimizationError):
        discord_from_parts(1.0, 1.0, -1e-6)
    assert discord_from_parts(1.0, 1.0, -1e-6, strict=False) == pytest.approx(-1e-6)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([1, 2, 3, 4]))
def test_bipartite_ranges(seed, rank):
    rho = random_density(np.random.default_rng(seed), 4, rank)
    c = concurrence(rho)
    d = quantum_discord(rho)
    assert 0.0 <= c <= 1.0
    assert -1e-12 <= d <= quantum_mutual_information(rho) + 1e-9
    # discord never exceeds the entropy of the measured qubit
    assert d <= von_neumann_entropy(rho.reshape(2, 2, 2, 2).trace(axis1=0, axis2=2)) + 1e-9
