import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monocone.linalg import reduce_pure, tensor_product
from monocone.multipartite import (
    delta_c,
    delta_d,
    delta_d_koashi_winter,
    dissension,
    ggm,
    ggm_arrays,
    koashi_winter_residual,
    marginal_max_eigenvalues,
    monogamy_score,
)
from monocone.states import RngStream, basis_state, generalized_ghz, ghz_state, haar_amplitudes, w_state

from conftest import random_pure, random_unitary

# 30-digit references: h(1/3) - 2 h((1 + sqrt(5)/3) / 2)
W_DELTA_D = -0.181799685111025368
H_08 = 0.721928094887362348


def permute_parties(psi, order):
    """Amplitudes with qubits relabelled so that new party k is old party order[k]."""
    return np.transpose(psi.reshape(2, 2, 2), order).reshape(8)


def test_generalized_ghz_point():
    s = generalized_ghz(np.sqrt(0.8))
    assert ggm(s).ggm == pytest.approx(0.2, abs=1e-12)
    assert delta_c(s) == pytest.approx(0.64, abs=1e-12)
    assert delta_d(s) == pytest.approx(H_08, abs=1e-6)
    assert dissension(s) == pytest.approx(-H_08, abs=1e-6)


def test_ghz_values():
    s = ghz_state()
    g = ggm(s)
    assert g.ggm == pytest.approx(0.5, abs=1e-12)
    assert g.tie and g.max_schmidt_party == "A"
    for node in "ABC":
        assert delta_c(s, node) == pytest.approx(1.0, abs=1e-12)
        assert delta_d(s, node) == pytest.approx(1.0, abs=1e-9)
    assert dissension(s) == pytest.approx(-1.0, abs=1e-9)


def test_w_values():
    s = w_state()
    # oracle: general-purpose Hermitian eigensolver on the marginal
    top = np.linalg.eigvalsh(reduce_pure(s.amplitudes, "A"))[-1]
    assert ggm(s).ggm == pytest.approx(1 - top, abs=1e-12)
    assert ggm(s).ggm == pytest.approx(1 / 3, abs=1e-12)
    assert abs(delta_c(s)) <= 1e-12
    assert delta_d(s) == pytest.approx(W_DELTA_D, abs=1e-6)
    assert dissension(s) == pytest.approx(-W_DELTA_D, abs=1e-6)


def test_product_state_is_zero_everywhere():
    s = basis_state("000")
    assert ggm(s).ggm == 0.0
    for node in "ABC":
        assert delta_c(s, node) == pytest.approx(0.0, abs=1e-14)
        assert delta_d(s, node) == pytest.approx(0.0, abs=1e-12)


def test_biseparable_state_has_zero_ggm():
    bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
    psi = np.kron([1.0, 0.0], bell)
    assert ggm(psi).ggm == pytest.approx(0.0, abs=1e-14)
    assert ggm(psi).max_schmidt_party == "A"
    assert delta_c(psi, "B") == pytest.approx(0.0, abs=1e-12)
    assert delta_d(psi, "B") == pytest.approx(0.0, abs=1e-9)


def test_tie_breaking_prefers_earlier_party():
    _, idx, _, tie = ggm_arrays(np.stack([ghz_state().amplitudes, w_state().amplitudes]))
    assert list(idx) == [0, 0] and tie.all()


def test_batch_matches_single(rng):
    psi = random_pure(rng, 5)
    assert np.allclose(delta_c(psi, "B"), [delta_c(p, "B") for p in psi], atol=1e-15)
    assert np.allclose(delta_d(psi, "C"), [delta_d(p, "C") for p in psi], atol=1e-12)
    assert marginal_max_eigenvalues(psi).shape == (5, 3)


def test_delta_c_is_permutation_invariant():
    psi = haar_amplitudes(RngStream(17), 200)
    vals = np.stack([delta_c(psi, n) for n in "ABC"], axis=1)
    assert np.max(np.ptp(vals, axis=1)) <= 1e-9


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([(1, 0, 2), (2, 1, 0), (1, 2, 0)]))
def test_relabelling_parties_permutes_scores(seed, order):
    psi = random_pure(np.random.default_rng(seed))
    moved = permute_parties(psi, order)
    for new, old in zip("ABC", ("ABC"[k] for k in order)):
        assert delta_d(moved, new) == pytest.approx(delta_d(psi, old), abs=1e-6)
    assert ggm(moved).ggm == pytest.approx(ggm(psi).ggm, abs=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_local_unitary_invariance(seed):
    g = np.random.default_rng(seed)
    psi = random_pure(g)
    u = tensor_product(tensor_product(random_unitary(g, 2), random_unitary(g, 2)), random_unitary(g, 2))
    moved = u @ psi
    assert ggm(moved).ggm == pytest.approx(ggm(psi).ggm, abs=1e-12)
    assert delta_c(moved) == pytest.approx(delta_c(psi), abs=1e-10)
    assert delta_d(moved) == pytest.approx(delta_d(psi), abs=1e-6)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_koashi_winter_cross_path(seed):
    psi = random_pure(np.random.default_rng(seed))
    assert koashi_winter_residual(psi) <= 1e-6
    for node in "ABC":
        assert delta_d(psi, node) == pytest.approx(delta_d_koashi_winter(psi, node), abs=1e-6)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_dissension_is_negative_discord_score(seed):
    psi = random_pure(np.random.default_rng(seed))
    assert dissension(psi) == pytest.approx(-delta_d(psi, "A"), abs=1e-6)


def test_ckw_and_range_on_haar_sample():
    psi = haar_amplitudes(RngStream(23), 500)
    d = delta_c(psi, "A")
    assert d.min() >= -1e-10 and d.max() <= 1 + 1e-10
    g, _, _, _ = ggm_arrays(psi)
    assert g.min() >= 0 and g.max() <= 0.5


def test_monogamy_score_dispatch():
    s = ghz_state()
    assert monogamy_score("concurrence_squared", s, "B").value == pytest.approx(1.0, abs=1e-12)
    assert monogamy_score("discord", s, "C").node == "C"
    with pytest.raises(ValueError):
        monogamy_score("negativity", s, "A")
    with pytest.raises(ValueError):
        delta_c(s, "D")


def test_koashi_winter_caveat_flag():
    s = generalized_ghz(np.sqrt(0.8))
    value, off = delta_d_koashi_winter(s, "B", with_caveat=True)
    assert value == pytest.approx(H_08, abs=1e-12) and off
    _, off_a = delta_d_koashi_winter(s, "A", with_caveat=True)
    assert not off_a
    assert delta_d_koashi_winter(basis_state("000")) == pytest.approx(0.0, abs=1e-14)
