"""Lock-step Nelder-Mead minimization of many independent problems.

Each row of ``x0`` is the start point of its own problem.  The objective
receives an ``(m, dim)`` array of points together with the ``(m,)`` indices
of the problems they belong to, so one vectorized call serves the whole
batch.  Problems that have converged are frozen and no longer evaluated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

Objective = Callable[[np.ndarray, np.ndarray], np.ndarray]

REFLECT, EXPAND, CONTRACT, SHRINK = 1.0, 2.0, 0.5, 0.5


@dataclass
class BatchResult:
    x: np.ndarray
    fun: np.ndarray
    converged: np.ndarray
    nit: np.ndarray


def nelder_mead_batch(
    func: Objective,
    x0: np.ndarray,
    step,
    fatol: float = 1e-8,
    xatol: float = 1e-6,
    maxiter: int = 500,
) -> BatchResult:
    """Minimize ``func`` for every start point in ``x0``.

    Parameters
    ----------
    func : callable
        ``func(points, problem_ids) -> values``.
    x0 : ndarray, shape (n, dim)
        One start point per problem.
    step : float or array_like, shape (dim,)
        Edge lengths of the initial axis-aligned simplex.
    fatol, xatol : float
        A problem converges once the spread of objective values over its
        simplex is at most ``fatol`` and every vertex lies within ``xatol``
        of the best one (max-norm).
    maxiter : int
        Iteration cap per problem.
    """
    x0 = np.atleast_2d(np.asarray(x0, dtype=float))
    n, dim = x0.shape
    step = np.broadcast_to(np.asarray(step, dtype=float), (dim,))
    ids = np.arange(n)

    sim = np.repeat(x0[:, None, :], dim + 1, axis=1)
    for j in range(dim):
        sim[:, j + 1, j] += step[j]
    fs = func(sim.reshape(-1, dim), np.repeat(ids, dim + 1)).reshape(n, dim + 1)

    converged = np.zeros(n, dtype=bool)
    nit = np.zeros(n, dtype=int)

    def order(rows):
        o = np.argsort(fs[rows], axis=1, kind="stable")
        sim[rows] = np.take_along_axis(sim[rows], o[:, :, None], axis=1)
        fs[rows] = np.take_along_axis(fs[rows], o, axis=1)

    order(ids)
    for _ in range(maxiter):
        fspread = fs[:, -1] - fs[:, 0]
        xspread = np.max(np.abs(sim[:, 1:] - sim[:, :1]), axis=(1, 2))
        converged |= (fspread <= fatol) & (xspread <= xatol)
        act = ids[~converged]
        if act.size == 0:
            break
        nit[act] += 1
        s = sim[act]
        f = fs[act]
        worst = s[:, -1]
        centroid = s[:, :-1].mean(axis=1)

        xr = centroid + REFLECT * (centroid - worst)
        fr = func(xr, act)

        new_x = worst.copy()
        new_f = f[:, -1].copy()
        shrink = np.zeros(act.size, dtype=bool)

        better_than_best = fr < f[:, 0]
        mid = (fr >= f[:, 0]) & (fr < f[:, -2])
        outside = (fr >= f[:, -2]) & (fr < f[:, -1])
        inside = fr >= f[:, -1]

        new_x[mid] = xr[mid]
        new_f[mid] = fr[mid]

        if better_than_best.any():
            k = better_than_best
            xe = centroid[k] + EXPAND * (xr[k] - centroid[k])
            fe = func(xe, act[k])
            take_e = fe < fr[k]
            new_x[k] = np.where(take_e[:, None], xe, xr[k])
            new_f[k] = np.where(take_e, fe, fr[k])

        if outside.any():
            k = outside
            xc = centroid[k] + CONTRACT * (xr[k] - centroid[k])
            fc = func(xc, act[k])
            ok = fc <= fr[k]
            kk = np.flatnonzero(k)
            new_x[kk[ok]] = xc[ok]
            new_f[kk[ok]] = fc[ok]
            shrink[kk[~ok]] = True

        if inside.any():
            k = inside
            xc = centroid[k] + CONTRACT * (worst[k] - centroid[k])
            fc = func(xc, act[k])
            ok = fc < f[k, -1]
            kk = np.flatnonzero(k)
            new_x[kk[ok]] = xc[ok]
            new_f[kk[ok]] = fc[ok]
            shrink[kk[~ok]] = True

        s[:, -1] = new_x
        f[:, -1] = new_f

        if shrink.any():
            k = np.flatnonzero(shrink)
            pts = s[k, :1] + SHRINK * (s[k, 1:] - s[k, :1])
            s[k, 1:] = pts
            f[k, 1:] = func(pts.reshape(-1, dim), np.repeat(act[k], dim)).reshape(k.size, dim)

        sim[act] = s
        fs[act] = f
        order(act)

    fspread = fs[:, -1] - fs[:, 0]
    xspread = np.max(np.abs(sim[:, 1:] - sim[:, :1]), axis=(1, 2))
    converged |= (fspread <= fatol) & (xspread <= xatol)
    return BatchResult(sim[:, 0].copy(), fs[:, 0].copy(), converged, nit)
