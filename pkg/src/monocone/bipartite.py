"""Two-qubit correlation measures: concurrence, entanglement of formation,
mutual information, measured conditional entropy and quantum discord.

All functions taking ``rho`` accept one 4x4 density matrix or a stack of
shape ``(n, 4, 4)``.  The first tensor factor is the "first" party.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    PARTIES,
    binary_entropy,
    dagger,
    hermitian_eigs,
    psd_sqrt,
    qubit_entropy_from_bloch,
    reduce_pure,
    tensor_product,
    von_neumann_entropy,
)
from .optimize import nelder_mead_batch
from .states import amplitudes

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)
PAULIS = (IDENTITY_2, SIGMA_X, SIGMA_Y, SIGMA_Z)
SPIN_FLIP = tensor_product(SIGMA_Y, SIGMA_Y)

# eigenvalues of rho at or below this are treated as exact zeros when forming
# sqrt(rho); reductions of pure states are rank 2 up to ~1e-17 rounding
RANK_CUTOFF = 1e-13

GRID_THETA = 64
GRID_PHI = 128
ORACLE_THETA = 1024
ORACLE_PHI = 2048
FATOL = 1e-8
XATOL = 1e-6
MAXITER = 500
DISCORD_NEG_TOL = 1e-9
_GRID_CHUNK = 4


class DiscordOptimizationError(RuntimeError):
    """Raised when a computed discord is negative beyond rounding noise."""


def _as_two_qubit(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape[-2:] != (4, 4):
        raise ValueError(f"expected a two-qubit (4x4) matrix, got shape {rho.shape}")
    return rho


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def spin_flip(rho) -> np.ndarray:
    """``(sy x sy) rho* (sy x sy)``."""
    rho = _as_two_qubit(rho)
    return SPIN_FLIP @ np.conj(rho) @ SPIN_FLIP


def concurrence_spectrum(rho) -> np.ndarray:
    """Square roots of the eigenvalues of ``rho @ spin_flip(rho)``, descending.

    These are the eigenvalues of ``sqrt(sqrt(rho) rho~ sqrt(rho))``.  Writing
    that product as ``A A^H`` with ``A = sqrt(rho) (sy x sy) sqrt(rho)*``,
    they are the singular values of ``A``, read off as the positive half of
    the spectrum of the Hermitian dilation ``[[0, A], [A^H, 0]]``.  This
    avoids square-rooting eigenvalues that are zero up to rounding.
    """
    rho = _as_two_qubit(rho)
    sq = psd_sqrt(rho, cutoff=RANK_CUTOFF)
    a = sq @ SPIN_FLIP @ np.conj(sq)
    lead = a.shape[:-2]
    dil = np.zeros(lead + (8, 8), dtype=complex)
    dil[..., :4, 4:] = a
    dil[..., 4:, :4] = dagger(a)
    return np.clip(hermitian_eigs(dil)[..., :4], 0.0, None)


def concurrence(rho):
    """``max(0, l1 - l2 - l3 - l4)`` from ``concurrence_spectrum``."""
    lam = concurrence_spectrum(rho)
    c = np.maximum(0.0, lam[..., 0] - lam[..., 1] - lam[..., 2] - lam[..., 3])
    return _scalar(np.minimum(c, 1.0))


def tangle_bipartition(state, node: str):
    """Squared concurrence of a pure state across ``node : rest``, ``4 det rho_node``."""
    r = reduce_pure(amplitudes(state), node)
    det = r[..., 0, 0].real * r[..., 1, 1].real - np.abs(r[..., 0, 1]) ** 2
    return _scalar(4.0 * det)


def eof_from_concurrence(c):
    c = np.clip(np.asarray(c, dtype=float), 0.0, 1.0)
    return binary_entropy(0.5 * (1.0 + np.sqrt(1.0 - c * c)))


def eof_two_qubit(rho):
    """Entanglement of formation in bits, ``h((1 + sqrt(1 - C^2)) / 2)``."""
    return eof_from_concurrence(concurrence(rho))


def _marginals(rho):
    return qubit_marginal(rho, 0), qubit_marginal(rho, 1)


def qubit_marginal(rho, keep_index: int) -> np.ndarray:
    """Single-qubit marginal of a two-qubit matrix (0 = first, 1 = second)."""
    t = np.asarray(rho).reshape(np.shape(rho)[:-2] + (2, 2, 2, 2))
    if keep_index == 0:
        return np.einsum("...ijkj->...ik", t)
    return np.einsum("...jijk->...ik", t)


def quantum_mutual_information(rho):
    """``S(rho_1) + S(rho_2) - S(rho_12)`` in bits."""
    rho = _as_two_qubit(rho)
    r1, r2 = _marginals(rho)
    return _scalar(von_neumann_entropy(r1) + von_neumann_entropy(r2) - von_neumann_entropy(rho))


@dataclass(frozen=True)
class Measurement1Q:
    """Projective qubit measurement along ``cos(t/2)|0> + e^{ip} sin(t/2)|1>``.

    ``theta`` and ``phi`` may be arrays when describing a batch.
    """

    theta: float
    phi: float

    def vector(self) -> np.ndarray:
        t = np.asarray(self.theta, dtype=float)
        p = np.asarray(self.phi, dtype=float)
        return np.stack([np.cos(t / 2) + 0j, np.exp(1j * p) * np.sin(t / 2)], axis=-1)

    def projectors(self) -> tuple[np.ndarray, np.ndarray]:
        v = self.vector()
        p0 = v[..., :, None] * np.conj(v[..., None, :])
        return p0, np.eye(2) - p0

    def bloch(self) -> np.ndarray:
        t = np.asarray(self.theta, dtype=float)
        p = np.asarray(self.phi, dtype=float)
        return np.stack([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)], axis=-1)


@dataclass(frozen=True)
class MeasuredBranch:
    probability: float
    post_state: np.ndarray


def measurement_branches(rho, measurement: Measurement1Q, measured: str = "second") -> list[MeasuredBranch]:
    """Outcome probabilities and post-measurement states of the other qubit."""
    rho = _as_two_qubit(rho)
    out = []
    for proj in measurement.projectors():
        if measured == "second":
            op = tensor_product(IDENTITY_2, proj)
            keep = 0
        elif measured == "first":
            op = tensor_product(proj, IDENTITY_2)
            keep = 1
        else:
            raise ValueError(f"measured must be 'first' or 'second', not {measured!r}")
        unnorm = qubit_marginal(op @ rho @ op, keep)
        p = float(np.trace(unnorm).real)
        post = unnorm / p if p > 0 else np.eye(2) / 2
        out.append(MeasuredBranch(p, post))
    return out


def correlation_tensor(rho):
    """Coefficients of ``rho = 1/4 sum R_ij s_i x s_j``.

    Returns ``(a, b, T)`` with local Bloch vectors ``a`` (first qubit) and
    ``b`` (second qubit) and the 3x3 correlation matrix ``T``.
    """
    rho = _as_two_qubit(rho)
    r = np.empty(rho.shape[:-2] + (4, 4))
    for i, si in enumerate(PAULIS):
        for j, sj in enumerate(PAULIS):
            r[..., i, j] = np.einsum("...ij,ji->...", rho, tensor_product(si, sj)).real
    return r[..., 1:, 0], r[..., 0, 1:], r[..., 1:, 1:]


def _unit_vectors(theta, phi) -> np.ndarray:
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


def _branch_sum(a, bn, tn):
    """``sum_+- p_+- S(branch)``; ``bn`` = b.n, ``tn`` = T n, broadcast together."""
    total = 0.0
    for sign in (1.0, -1.0):
        denom = 1.0 + sign * bn
        p = 0.5 * denom
        safe = np.where(denom > 1e-300, denom, 1.0)
        r = np.linalg.norm(a + sign * tn, axis=-1) / safe
        total = total + np.where(denom > 1e-300, p * qubit_entropy_from_bloch(r), 0.0)
    return total


def _oriented(rho, measured: str):
    a, b, t = correlation_tensor(rho)
    if measured == "second":
        return a, b, t
    if measured == "first":
        return b, a, np.swapaxes(t, -1, -2)
    raise ValueError(f"measured must be 'first' or 'second', not {measured!r}")


def conditional_entropy_at(rho, measurement: Measurement1Q, measured: str = "second"):
    """``sum_i p_i S(rho_{unmeasured|i})`` for one fixed measurement."""
    a, b, t = _oriented(rho, measured)
    n = measurement.bloch()
    bn = np.einsum("...i,...i->...", b, n)
    tn = np.einsum("...ij,...j->...i", t, n)
    return _scalar(_branch_sum(a, bn, tn))


def _grid_directions(n_theta: int, n_phi: int):
    # n and -n define the same measurement, so the z >= 0 hemisphere covers every axis
    thetas = np.linspace(0.0, 0.5 * np.pi, n_theta)
    phis = np.arange(n_phi) * (2.0 * np.pi / n_phi)
    tg, pg = np.meshgrid(thetas, phis, indexing="ij")
    return tg.ravel(), pg.ravel()


def _quad_features(dirs: np.ndarray) -> np.ndarray:
    x, y, z = dirs.T
    return np.stack([x * x, y * y, z * z, 2 * x * y, 2 * x * z, 2 * y * z])


def _grid_values(a, b, t, dirs, quad):
    """Objective for every (problem, direction) pair, shape ``(k, len(dirs))``.

    ``|a +- T n|^2`` is expanded as ``|a|^2 +- 2 (T^T a).n + n^T T^T T n`` so
    the direction dependence reduces to small matrix products; the entropy
    arithmetic runs in place because it dominates the cost.
    """
    m = np.swapaxes(t, -1, -2) @ t
    mc = np.stack([m[:, 0, 0], m[:, 1, 1], m[:, 2, 2], m[:, 0, 1], m[:, 0, 2], m[:, 1, 2]], axis=1)
    bn = b @ dirs.T
    cross = np.einsum("kji,kj->ki", t, a) @ dirs.T
    cross *= 2.0
    base = mc @ quad
    base += np.sum(a * a, axis=1)[:, None]
    total = np.zeros_like(bn)
    r, u, d, w = (np.empty_like(bn) for _ in range(4))
    for sign in (1.0, -1.0):
        # d = 2 p, r = Bloch length of the branch state
        np.multiply(bn, sign, out=d)
        d += 1.0
        np.maximum(d, 0.0, out=d)
        if sign > 0:
            np.add(base, cross, out=r)
        else:
            np.subtract(base, cross, out=r)
        np.maximum(r, 0.0, out=r)
        np.sqrt(r, out=r)
        np.maximum(d, 1e-300, out=w)
        np.divide(r, w, out=r)
        np.minimum(r, 1.0, out=r)
        # u = 2 h((1 + r) / 2) = 2 - ((1 + r) ln(1 + r) + (1 - r) ln(1 - r)) / ln 2
        np.subtract(1.0, r, out=u)
        np.maximum(u, 1e-300, out=u)
        np.log(u, out=w)
        w *= u
        np.log1p(r, out=u)
        r += 1.0
        u *= r
        u += w
        u *= -1.0 / np.log(2.0)
        u += 2.0
        u *= d
        total += u
    total *= 0.25
    return total


def _grid_search(a, b, t, n_theta: int, n_phi: int):
    tg, pg = _grid_directions(n_theta, n_phi)
    dirs = _unit_vectors(tg, pg)
    quad = _quad_features(dirs)
    n = a.shape[0]
    best = np.empty(n)
    arg = np.empty(n, dtype=int)
    chunk = max(1, _GRID_CHUNK * 8192 // dirs.shape[0])
    for lo in range(0, n, chunk):
        hi = min(n, lo + chunk)
        vals = _grid_values(a[lo:hi], b[lo:hi], t[lo:hi], dirs, quad)
        arg[lo:hi] = np.argmin(vals, axis=1)
        best[lo:hi] = vals[np.arange(hi - lo), arg[lo:hi]]
    return best, tg[arg], pg[arg]


def _canonical_angles(theta, phi):
    theta = np.mod(theta, 2.0 * np.pi)
    flip = theta > np.pi
    theta = np.where(flip, 2.0 * np.pi - theta, theta)
    phi = np.mod(np.where(flip, phi + np.pi, phi), 2.0 * np.pi)
    return theta, phi


@dataclass
class ConditionalEntropyResult:
    value: np.ndarray
    grid_value: np.ndarray
    theta: np.ndarray
    phi: np.ndarray
    converged: np.ndarray


def minimize_conditional_entropy(
    rho,
    measured: str = "second",
    grid: tuple[int, int] = (GRID_THETA, GRID_PHI),
    refine: bool = True,
) -> ConditionalEntropyResult:
    """Batch minimization over projective measurements with diagnostics.

    A ``grid[0] x grid[1]`` scan over (theta, phi) seeds a Nelder-Mead
    refinement per matrix.  The refined value never exceeds the grid value.
    """
    rho = _as_two_qubit(rho)
    single = rho.ndim == 2
    a, b, t = _oriented(rho.reshape(-1, 4, 4), measured)
    gval, gth, gph = _grid_search(a, b, t, *grid)
    if refine:

        def objective(x, ids):
            n = _unit_vectors(x[:, 0], x[:, 1])
            bn = np.einsum("mi,mi->m", b[ids], n)
            tn = np.einsum("mij,mj->mi", t[ids], n)
            return _branch_sum(a[ids], bn, tn)

        step = (0.25 * np.pi / (grid[0] - 1), np.pi / grid[1])
        res = nelder_mead_batch(
            objective, np.stack([gth, gph], axis=1), step, fatol=FATOL, xatol=XATOL, maxiter=MAXITER
        )
        val = np.minimum(res.fun, gval)
        th, ph = _canonical_angles(res.x[:, 0], res.x[:, 1])
        conv = res.converged
    else:
        val, th, ph, conv = gval, gth, gph, np.ones_like(gval, dtype=bool)
    if single:
        return ConditionalEntropyResult(val[0], gval[0], th[0], ph[0], conv[0])
    return ConditionalEntropyResult(val, gval, th, ph, conv)


def measured_conditional_entropy(rho, measured: str = "second") -> tuple[float, Measurement1Q]:
    """Minimum over projective measurements on ``measured`` of ``sum p_i S(rho_i)``.

    Returns the minimal value in bits and the minimizing measurement.
    """
    res = minimize_conditional_entropy(rho, measured)
    return _scalar(res.value), Measurement1Q(_scalar(res.theta), _scalar(res.phi))


def grid_conditional_entropy(
    rho,
    measured: str = "second",
    n_theta: int = ORACLE_THETA,
    n_phi: int = ORACLE_PHI,
    zoom: int = 2,
):
    """Grid-search minimum of the measured conditional entropy.

    Scans an exhaustive ``n_theta x n_phi`` grid over the measurement
    hemisphere, then ``zoom`` times rescans a 65 x 65 grid spanning one
    cell either side of the current best point.  ``zoom=0`` returns the raw
    grid minimum.  Shares no code path with the simplex refinement.
    """
    rho = _as_two_qubit(rho)
    single = rho.ndim == 2
    a, b, t = _oriented(rho.reshape(-1, 4, 4), measured)
    best, th, ph = _grid_search(a, b, t, n_theta, n_phi)
    dth = 0.5 * np.pi / (n_theta - 1)
    dph = 2.0 * np.pi / n_phi
    offs = np.linspace(-1.0, 1.0, 65)
    for _ in range(zoom):
        for k in range(a.shape[0]):
            tg, pg = np.meshgrid(th[k] + dth * offs, ph[k] + dph * offs, indexing="ij")
            tg, pg = tg.ravel(), pg.ravel()
            dirs = _unit_vectors(tg, pg)
            vals = _grid_values(a[k : k + 1], b[k : k + 1], t[k : k + 1], dirs, _quad_features(dirs))[0]
            i = int(np.argmin(vals))
            if vals[i] < best[k]:
                best[k], th[k], ph[k] = vals[i], tg[i], pg[i]
        dth *= 2.0 / 64
        dph *= 2.0 / 64
    return _scalar(best[0] if single else best)


def classical_correlation(rho):
    """``J = S(rho_first) - S(first | measurement on second)``."""
    rho = _as_two_qubit(rho)
    s1 = von_neumann_entropy(_marginals(rho)[0])
    return _scalar(s1 - minimize_conditional_entropy(rho, "second").value)


def discord_from_parts(s_measured, s_joint, cond_min, strict: bool = True):
    """``I - J`` assembled from entropies: ``S(m) - S(joint) + min cond. entropy``.

    Negatives within 1e-9 are clamped to zero; larger ones raise
    ``DiscordOptimizationError`` when ``strict``.
    """
    d = np.asarray(s_measured - s_joint + cond_min, dtype=float)
    if strict and np.any(d < -DISCORD_NEG_TOL):
        raise DiscordOptimizationError(f"negative discord {d.min():.3e}")
    return _scalar(np.where(d < 0.0, np.where(d >= -DISCORD_NEG_TOL, 0.0, d), d))


def quantum_discord(rho, measured: str = "second", strict: bool = True):
    """Discord ``I(rho) - J(rho)`` with the projective measurement on ``measured``."""
    rho = _as_two_qubit(rho)
    r1, r2 = _marginals(rho)
    s1, s2, s12 = von_neumann_entropy(r1), von_neumann_entropy(r2), von_neumann_entropy(rho)
    s_meas = s2 if measured == "second" else s1
    cond = minimize_conditional_entropy(rho, measured).value
    return discord_from_parts(s_meas, s12, cond, strict)


def discord_pure_bipartition(state, node: str):
    """Discord of a pure state across ``node : rest``, i.e. ``S(rho_node)``."""
    if node not in PARTIES:
        raise ValueError(f"unknown party {node!r}")
    return von_neumann_entropy(reduce_pure(amplitudes(state), node))
