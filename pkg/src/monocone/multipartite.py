"""Genuine multipartite entanglement (GGM), monogamy scores and dissension
for pure three-qubit states.

Functions take a ``PureState3Q`` or an amplitude array of shape ``(n, 8)``;
batch inputs give array results.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bipartite import (
    concurrence,
    discord_from_parts,
    discord_pure_bipartition,
    eof_from_concurrence,
    minimize_conditional_entropy,
    tangle_bipartition,
)
from .linalg import PARTIES, hermitian_eigs, reduce_pure, von_neumann_entropy
from .states import amplitudes

MEASURES = ("concurrence_squared", "discord")
TIE_TOL = 1e-12

PARTNERS = {"A": ("B", "C"), "B": ("A", "C"), "C": ("A", "B")}


def _check_node(node: str) -> None:
    if node not in PARTIES:
        raise ValueError(f"node must be one of {PARTIES}, not {node!r}")


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


@dataclass(frozen=True)
class GgmResult:
    ggm: float
    max_schmidt_party: str
    eigen_triple: tuple[float, float, float]
    tie: bool = False


@dataclass(frozen=True)
class MonogamyScore:
    measure: str
    node: str
    value: float


def marginal_max_eigenvalues(state) -> np.ndarray:
    """Largest eigenvalue of each single-qubit marginal, columns A, B, C."""
    psi = amplitudes(state)
    cols = [hermitian_eigs(reduce_pure(psi, p))[..., 0] for p in PARTIES]
    return np.stack(cols, axis=-1)


def ggm_arrays(state):
    """Batch GGM: ``(ggm, party_index, eigen_triples, tie_flags)``.

    The party index points at the marginal with the largest top eigenvalue;
    values within 1e-12 of the maximum count as ties, broken A < B < C.
    """
    lam = marginal_max_eigenvalues(state)
    top = lam.max(axis=-1)
    near = lam >= top[..., None] - TIE_TOL
    idx = np.argmax(near, axis=-1)
    tie = near.sum(axis=-1) > 1
    g = np.clip(1.0 - top, 0.0, 0.5)
    return g, idx, lam, tie


def ggm(state) -> GgmResult:
    """``1 - max(l_A^2, l_B^2, l_C^2)`` over the single-qubit marginals."""
    g, idx, lam, tie = ggm_arrays(amplitudes(state).reshape(1, 8))
    return GgmResult(float(g[0]), PARTIES[int(idx[0])], tuple(float(x) for x in lam[0]), bool(tie[0]))


def max_schmidt_party(state) -> str:
    return ggm(state).max_schmidt_party


def delta_c(state, node: str = "A"):
    """Entanglement monogamy score (3-tangle) with ``node`` as nodal observer."""
    _check_node(node)
    psi = amplitudes(state)
    y, z = PARTNERS[node]
    c_y = concurrence(reduce_pure(psi, node + y))
    c_z = concurrence(reduce_pure(psi, node + z))
    return _scalar(tangle_bipartition(psi, node) - np.square(c_y) - np.square(c_z))


def pair_discord(state, nodal: str, partner: str, strict: bool = True):
    """Discord of ``rho_{nodal partner}`` with the measurement on ``partner``."""
    psi = amplitudes(state)
    rho = reduce_pure(psi, nodal + partner)
    s_partner = von_neumann_entropy(reduce_pure(psi, partner))
    s_joint = von_neumann_entropy(rho)
    cond = minimize_conditional_entropy(rho, "second").value
    return discord_from_parts(s_partner, s_joint, cond, strict)


def delta_d(state, node: str = "A", strict: bool = True):
    """Discord monogamy score ``S(node) - D(node, y) - D(node, z)`` in bits."""
    _check_node(node)
    psi = amplitudes(state)
    y, z = PARTNERS[node]
    return _scalar(
        discord_pure_bipartition(psi, node)
        - pair_discord(psi, node, y, strict)
        - pair_discord(psi, node, z, strict)
    )


def monogamy_score(measure: str, state, node: str) -> MonogamyScore:
    """Quantum monogamy score ``Q(node:rest) - Q(node, y) - Q(node, z)``."""
    if measure == "concurrence_squared":
        value = delta_c(state, node)
    elif measure == "discord":
        value = delta_d(state, node)
    else:
        raise ValueError(f"measure must be one of {MEASURES}, not {measure!r}")
    return MonogamyScore(measure, node, value)


def delta_d_koashi_winter(state, node: str = "A", with_caveat: bool = False):
    """``S(node) - E(node, y) - E(node, z)`` with closed-form two-qubit EoF.

    Equals the discord monogamy score for every choice of node; the cone
    theorems only use it at the max-Schmidt party.  With ``with_caveat``
    the result is ``(value, off_max_schmidt)``, the flag marking states
    whose max-Schmidt party is not ``node``.
    """
    _check_node(node)
    psi = amplitudes(state)
    y, z = PARTNERS[node]
    e_y = eof_from_concurrence(concurrence(reduce_pure(psi, node + y)))
    e_z = eof_from_concurrence(concurrence(reduce_pure(psi, node + z)))
    value = _scalar(discord_pure_bipartition(psi, node) - e_y - e_z)
    if not with_caveat:
        return value
    idx = ggm_arrays(psi)[1]
    off = idx != PARTIES.index(node)
    return value, (bool(off) if np.ndim(off) == 0 else off)


def koashi_winter_residual(state):
    """``|D(rho_AB) - (E(rho_AC) - [S(rho_AB) - S(rho_B)])|``, ideally zero."""
    psi = amplitudes(state)
    d_ab = pair_discord(psi, "A", "B", strict=False)
    e_ac = eof_from_concurrence(concurrence(reduce_pure(psi, "AC")))
    cond = von_neumann_entropy(reduce_pure(psi, "AB")) - von_neumann_entropy(reduce_pure(psi, "B"))
    return _scalar(np.abs(d_ab - (e_ac - cond)))


def _pure_conditional_entropy_given_pair(psi) -> np.ndarray:
    """Measured ``S(A | BC)`` of a pure three-qubit state.

    Any rank-1 measurement on BC leaves A in a pure state, so the minimum is
    attained by every such basis; it is evaluated here in the computational
    basis of BC.
    """
    t = psi.reshape(psi.shape[:-1] + (2, 4))
    total = 0.0
    for k in range(4):
        v = t[..., :, k]
        p = np.sum(np.abs(v) ** 2, axis=-1)
        branch = v[..., :, None] * np.conj(v[..., None, :])
        safe = np.where(p > 0, p, 1.0)[..., None, None]
        s = von_neumann_entropy(branch / safe)
        total = total + np.where(p > 0, p * s, 0.0)
    return total


def dissension(state):
    """``I(rho_ABC) - J(rho_ABC)`` for a pure state, in bits.

    Three-party mutual information with unmeasured conditional entropies,
    minus the same quantity with measured conditional entropies (single
    qubit measurements on B and C, a joint measurement on BC).
    """
    psi = amplitudes(state)
    r = {k: reduce_pure(psi, k) for k in ("A", "B", "C", "AB", "AC", "BC")}
    s = {k: von_neumann_entropy(v) for k, v in r.items()}
    rho_abc = psi[..., :, None] * np.conj(psi[..., None, :])
    s_abc = von_neumann_entropy(rho_abc)

    i_ab = s["A"] + s["B"] - s["AB"]
    unmeasured_a_c = s["AC"] - s["C"]
    unmeasured_a_bc = s_abc - s["BC"]
    i_abc = i_ab - (unmeasured_a_c - unmeasured_a_bc)

    j_ab = s["A"] - minimize_conditional_entropy(r["AB"], "second").value
    measured_a_c = minimize_conditional_entropy(r["AC"], "second").value
    measured_a_bc = _pure_conditional_entropy_given_pair(psi)
    j_abc = j_ab - (measured_a_c - measured_a_bc)
    return _scalar(i_abc - j_abc)
