"""Dense complex linear algebra for one, two and three qubits.

Every routine accepts a single matrix of shape ``(d, d)`` or a stack of
shape ``(..., d, d)`` and maps over the leading axes.  Qubit ordering is
fixed: party A is the most significant bit, so ``|abc>`` has basis index
``4a + 2b + c``.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np
from scipy.special import entr

PARTIES = ("A", "B", "C")

HERMITIAN_TOL = 1e-10
JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 60
CLAMP_TOL = 1e-10
SQRT_NEG_TOL = 1e-8

_LN2 = np.log(2.0)


class NotHermitianError(ValueError):
    pass


class NotPositiveError(ValueError):
    pass


def _as_stack(m) -> tuple[np.ndarray, tuple[int, ...]]:
    m = np.asarray(m, dtype=complex)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {m.shape}")
    lead = m.shape[:-2]
    return m.reshape((-1,) + m.shape[-2:]), lead


def _check_dim(d: int) -> None:
    if d not in (1, 2, 4, 8):
        raise ValueError(f"dimension {d} not in {{2, 4, 8}}")


def is_hermitian(m, tol: float = 1e-12) -> bool:
    m = np.asarray(m)
    return bool(np.max(np.abs(m - np.conj(np.swapaxes(m, -1, -2))), initial=0.0) <= tol)


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def tensor_product(left, right) -> np.ndarray:
    """Kronecker product with the left factor as the more significant qubit(s)."""
    left = np.asarray(left, dtype=complex)
    right = np.asarray(right, dtype=complex)
    d = left.shape[-1] * right.shape[-1]
    if d > 8:
        raise ValueError(f"tensor product dimension {d} exceeds 8")
    out = left[..., :, None, :, None] * right[..., None, :, None, :]
    return out.reshape(out.shape[:-4] + (d, d))


def _party_axes(parties: str, keep: Iterable[str]) -> list[int]:
    keep = list(keep)
    if not keep:
        raise ValueError("keep must name at least one party")
    if len(set(keep)) != len(keep):
        raise ValueError(f"duplicate party in {keep!r}")
    unknown = [p for p in keep if p not in parties]
    if unknown:
        raise ValueError(f"unknown parties {unknown!r} for system {parties!r}")
    if len(keep) == len(parties):
        raise ValueError("keep must be a proper subset of the parties")
    return [parties.index(p) for p in keep]


def partial_trace(rho, keep: Iterable[str], parties: str = "ABC") -> np.ndarray:
    """Reduce ``rho`` to the parties in ``keep``, in the order listed.

    ``parties`` names the qubits of ``rho`` from most to least significant;
    use ``"AB"`` etc. for two-qubit inputs.
    """
    rho = np.asarray(rho, dtype=complex)
    n = len(parties)
    if rho.shape[-1] != 2**n or rho.shape[-2] != 2**n:
        raise ValueError(f"matrix shape {rho.shape[-2:]} does not match parties {parties!r}")
    kept = _party_axes(parties, keep)
    traced = [i for i in range(n) if i not in kept]
    lead = rho.shape[:-2]
    t = rho.reshape(lead + (2,) * (2 * n))
    letters = "abcdefghijkl"
    row = list(letters[:n])
    col = list(letters[n : 2 * n])
    for i in traced:
        col[i] = row[i]
    out = "".join(row[i] for i in kept) + "".join(col[i] for i in kept)
    spec = "..." + "".join(row) + "".join(col) + "->..." + out
    r = np.einsum(spec, t)
    k = 2 ** len(kept)
    return r.reshape(lead + (k, k))


def reduce_pure(psi, keep: Iterable[str], parties: str = "ABC") -> np.ndarray:
    """Reduced density matrix of a pure state given by its amplitudes.

    Equivalent to ``partial_trace(outer(psi, psi*), keep)`` without forming
    the full projector.
    """
    psi = np.asarray(psi, dtype=complex)
    n = len(parties)
    if psi.shape[-1] != 2**n:
        raise ValueError(f"amplitude vector length {psi.shape[-1]} does not match {parties!r}")
    kept = _party_axes(parties, keep)
    traced = [i for i in range(n) if i not in kept]
    lead = psi.shape[:-1]
    t = psi.reshape(lead + (2,) * n)
    nl = len(lead)
    t = np.moveaxis(t, [nl + i for i in kept + traced], list(range(nl, nl + n)))
    m = t.reshape(lead + (2 ** len(kept), 2 ** len(traced)))
    return m @ dagger(m)


def _jacobi_rotation(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    apq = a[:, p, q]
    mag = np.abs(apq)
    active = mag > 1e-300
    safe = np.where(active, mag, 1.0)
    phase = np.where(active, apq / safe, 1.0)
    app = a[:, p, p].real
    aqq = a[:, q, q].real
    tau = (aqq - app) / (2.0 * safe)
    t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
    t = np.where(active, t, 0.0)
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    # G = diag(1, conj(phase)) @ [[c, s], [-s, c]] zeroes the (p, q) entry
    g = np.empty((a.shape[0], 2, 2), dtype=complex)
    g[:, 0, 0] = c
    g[:, 0, 1] = s
    g[:, 1, 0] = -s * np.conj(phase)
    g[:, 1, 1] = c * np.conj(phase)
    idx = [p, q]
    a[:, :, idx] = a[:, :, idx] @ g
    a[:, idx, :] = dagger(g) @ a[:, idx, :]
    v[:, :, idx] = v[:, :, idx] @ g
    a[:, p, q] = 0.0
    a[:, q, p] = 0.0
    a[:, p, p] = a[:, p, p].real
    a[:, q, q] = a[:, q, q].real


def hermitian_eigh(m, tol: float = JACOBI_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of Hermitian matrices by cyclic Jacobi rotations.

    Parameters
    ----------
    m : array_like, shape (..., d, d)
        Hermitian matrices with ``d`` in {2, 4, 8}.
    tol : float
        Sweeps stop once the off-diagonal Frobenius norm of every matrix is
        at most ``tol * max(1, ||m||_F)``.

    Returns
    -------
    w : ndarray, shape (..., d)
        Real eigenvalues in descending order.
    v : ndarray, shape (..., d, d)
        Unitary whose columns are the matching eigenvectors.
    """
    a, lead = _as_stack(m)
    d = a.shape[-1]
    _check_dim(d)
    herm_err = np.max(np.abs(a - dagger(a)), initial=0.0)
    scale = max(1.0, float(np.max(np.abs(a), initial=0.0)))
    if herm_err > HERMITIAN_TOL * scale:
        raise NotHermitianError(f"matrix is not Hermitian (max |M - M^H| = {herm_err:.3e})")
    a = 0.5 * (a + dagger(a))
    v = np.broadcast_to(np.eye(d, dtype=complex), a.shape).copy()
    thresh = tol * np.maximum(1.0, np.linalg.norm(a, axis=(-2, -1)))
    off_mask = ~np.eye(d, dtype=bool)
    pairs = [(p, q) for p in range(d - 1) for q in range(p + 1, d)]
    for _ in range(JACOBI_MAX_SWEEPS):
        off = np.sqrt(np.sum(np.abs(a[:, off_mask]) ** 2, axis=-1))
        todo = off > thresh
        if not todo.any():
            break
        sub_a = a[todo]
        sub_v = v[todo]
        for p, q in pairs:
            _jacobi_rotation(sub_a, sub_v, p, q)
        a[todo] = sub_a
        v[todo] = sub_v
    else:
        raise np.linalg.LinAlgError("Jacobi iteration did not converge")
    w = np.real(np.diagonal(a, axis1=-2, axis2=-1))
    order = np.argsort(-w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    v = np.take_along_axis(v, order[:, None, :], axis=-1)
    return w.reshape(lead + (d,)), v.reshape(lead + (d, d))


def hermitian_eigs(m, tol: float = JACOBI_TOL) -> np.ndarray:
    """Real eigenvalues of Hermitian matrices, sorted descending."""
    return hermitian_eigh(m, tol)[0]


def psd_sqrt(m, cutoff: float = 0.0) -> np.ndarray:
    """Hermitian positive square root of a PSD matrix.

    Eigenvalues below ``-1e-8`` raise ``NotPositiveError``; the remaining
    negatives, and anything at or below ``cutoff``, are treated as zero.
    """
    w, v = hermitian_eigh(m)
    if np.any(w < -SQRT_NEG_TOL):
        raise NotPositiveError(f"matrix has eigenvalue {w.min():.3e} < {-SQRT_NEG_TOL}")
    w = np.where(w > cutoff, w, 0.0)
    return (v * np.sqrt(w)[..., None, :]) @ dagger(v)


def clamp_spectrum(w: np.ndarray) -> np.ndarray:
    """Zero out eigenvalues that are negative by rounding only."""
    w = np.asarray(w, dtype=float)
    if np.any(w < -CLAMP_TOL):
        raise NotPositiveError(f"density matrix has eigenvalue {w.min():.3e} < {-CLAMP_TOL}")
    return np.clip(w, 0.0, None)


def shannon_entropy(p, axis: int = -1) -> np.ndarray:
    """Shannon entropy in bits of probability vectors along ``axis``."""
    return np.sum(entr(np.asarray(p, dtype=float)), axis=axis) / _LN2


def von_neumann_entropy(rho) -> np.ndarray | float:
    """Von Neumann entropy in bits, ``-tr(rho log2 rho)``."""
    w = clamp_spectrum(hermitian_eigs(rho))
    s = shannon_entropy(w)
    return float(s) if np.ndim(s) == 0 else s


def binary_entropy(x) -> np.ndarray | float:
    """``h(x) = -x log2 x - (1 - x) log2 (1 - x)`` with ``h(0) = h(1) = 0``."""
    arr = np.asarray(x, dtype=float)
    if np.any((arr < 0.0) | (arr > 1.0)) or np.any(np.isnan(arr)):
        raise ValueError("binary_entropy argument must lie in [0, 1]")
    h = (entr(arr) + entr(1.0 - arr)) / _LN2
    return float(h) if np.ndim(h) == 0 else h


def qubit_entropy_from_bloch(r) -> np.ndarray:
    """Entropy in bits of a qubit state with Bloch-vector length ``r``.

    ``r`` is clipped to [0, 1] to absorb rounding.
    """
    r = np.clip(np.asarray(r, dtype=float), 0.0, 1.0)
    # floor keeps 0 * log 0 finite; the product is then ~1e-298
    u = np.maximum(1.0 - r, 1e-300)
    return 1.0 - ((1.0 + r) * np.log1p(r) + u * np.log(u)) / (2.0 * _LN2)
