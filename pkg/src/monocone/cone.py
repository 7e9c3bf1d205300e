"""Boundary curves of the accessible region in the (monogamy score, GGM)
plane and membership tests for individual states."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import binary_entropy
from .multipartite import delta_c, delta_d, ggm

TOL_TANGLE = 1e-9
TOL_DISCORD = 1e-4
SLOPE_STEP = 1e-6
CURVE_POINTS = 512


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def _checked_unit(x, name: str, hi: float = 1.0, slack: float = 1e-10) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(x < -slack) or np.any(x > hi + slack) or np.any(np.isnan(x)):
        raise ValueError(f"{name} must lie in [0, {hi}]")
    return np.clip(x, 0.0, hi)


def entanglement_boundary(delta_c_value):
    """Least GGM compatible with a 3-tangle, ``(1 - sqrt(1 - delta_c)) / 2``."""
    d = _checked_unit(delta_c_value, "delta_c")
    return _scalar(0.5 * (1.0 - np.sqrt(1.0 - d)))


def inverse_entanglement_boundary(ggm_value):
    """3-tangle on the boundary at a given GGM, ``4 E (1 - E)``."""
    e = _checked_unit(ggm_value, "ggm", 0.5)
    return _scalar(4.0 * e * (1.0 - e))


def _inverse_boundary_derivative(e: float) -> float:
    return 4.0 - 8.0 * e


def discord_bound(ggm_value):
    """Largest ``|delta_D|`` compatible with a GGM value, ``h(E)`` in bits."""
    e = _checked_unit(ggm_value, "ggm", 0.5)
    return binary_entropy(e)


def discord_boundary_slope(ggm_value):
    """``d delta_D / dE`` along the discord boundary, ``log2((1 - E) / E)``."""
    e = np.asarray(ggm_value, dtype=float)
    with np.errstate(divide="ignore"):
        return _scalar(np.log2(1.0 - e) - np.log2(e))


def theorem1_margin(delta_c_value, ggm_value):
    """``GGM - entanglement_boundary(delta_c)``; positive means strictly inside."""
    return _scalar(np.asarray(ggm_value) - entanglement_boundary(delta_c_value))


def theorem2_margin(delta_d_value, ggm_value):
    """``h(GGM) - |delta_D|`` in bits; positive means strictly inside."""
    return _scalar(discord_bound(ggm_value) - np.abs(np.asarray(delta_d_value)))


@dataclass(frozen=True)
class ConeVerdict:
    inside: bool
    margin: float
    node_used: str


@dataclass(frozen=True)
class ConeBoundary:
    kind: str
    tolerance: float = 0.0

    def __post_init__(self):
        if self.kind not in ("entanglement_cone", "discord_cone"):
            raise ValueError(f"unknown cone kind {self.kind!r}")
        if self.tolerance < 0:
            raise ValueError("tolerance must be nonnegative")

    def margin(self, score, ggm_value):
        if self.kind == "entanglement_cone":
            return theorem1_margin(score, ggm_value)
        return theorem2_margin(score, ggm_value)

    def contains(self, score, ggm_value):
        return np.asarray(self.margin(score, ggm_value)) >= -self.tolerance

    def curves(self, n: int = CURVE_POINTS) -> list[tuple[np.ndarray, np.ndarray]]:
        """Boundary polylines as ``(score, ggm)`` pairs for plotting."""
        e = np.linspace(0.0, 0.5, n)
        if self.kind == "entanglement_cone":
            return [(inverse_entanglement_boundary(e), e), (np.zeros(2), np.array([0.0, 0.5]))]
        h = discord_bound(e)
        return [(h, e), (-h, e)]


def verify_theorem1(state, tol: float = TOL_TANGLE) -> ConeVerdict:
    """GGM must not fall below the generalized-GHZ curve at the state's 3-tangle."""
    g = ggm(state)
    margin = theorem1_margin(delta_c(state, "A"), g.ggm)
    return ConeVerdict(bool(margin >= -tol), float(margin), "A")


def verify_theorem2(state, tol: float = TOL_DISCORD) -> ConeVerdict:
    """``|delta_D| <= h(GGM)`` with the max-Schmidt party as nodal observer."""
    g = ggm(state)
    node = g.max_schmidt_party
    margin = theorem2_margin(delta_d(state, node), g.ggm)
    return ConeVerdict(bool(margin >= -tol), float(margin), node)


@dataclass(frozen=True)
class ConeSlopes:
    entanglement_slope: float
    entanglement_slope_fd: float
    tip_tangent: float
    discord_slope_unbounded: bool


def cone_slopes(step: float = SLOPE_STEP) -> ConeSlopes:
    """Slopes of the two cones at their common tip.

    The 3-tangle boundary leaves the tip with ``d delta_C / dE = 4`` (the
    derivative of ``4E(1 - E)`` at zero); ``entanglement_slope_fd`` repeats
    this as a forward difference through ``entanglement_boundary``.  The
    discord boundary is tangent to the score axis, since its slope
    ``log2((1 - E) / E)`` has no bound as E goes to zero.
    """
    analytic = _inverse_boundary_derivative(0.0)
    fd = step / entanglement_boundary(step)
    return ConeSlopes(analytic, float(fd), 1.0 / analytic, True)
