"""Pure three-qubit states: fixed families and seeded random samplers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import reduce_pure

FAMILIES = ("haar", "gen_ghz", "ghz_class", "w_class", "explicit")
RNG_ALGORITHM = "numpy.PCG64 seeded by SeedSequence(seed, spawn_key=(stream,))"
NORM_TOL = 1e-12
TANGLE_CUT = 1e-8
MAX_RESAMPLE_ROUNDS = 1000

# basis indices of |abc> = 4a + 2b + c
_I000, _I100, _I101, _I110, _I111 = 0, 4, 5, 6, 7


@dataclass(frozen=True)
class PureState3Q:
    amplitudes: np.ndarray
    family: str = "explicit"

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape != (8,):
            raise ValueError(f"need 8 amplitudes, got {amps.shape[0]}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm = {norm!r})")
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amps, family: str = "explicit", tol: float = 1e-6) -> "PureState3Q":
        """Build a state from amplitudes whose norm is within ``tol`` of one.

        Vectors already normalized to 1e-12 are kept bit for bit so that
        serialized states replay exactly; others are rescaled.
        """
        amps = np.asarray(amps, dtype=complex).reshape(-1)
        norm = np.linalg.norm(amps)
        if norm == 0.0:
            raise ValueError("zero vector is not a state")
        if abs(norm - 1.0) > tol:
            raise ValueError(f"amplitudes have norm {norm:.9g}, not within {tol:g} of 1")
        if abs(norm - 1.0) > NORM_TOL:
            amps = amps / norm
        return cls(amps, family)


@dataclass(frozen=True)
class RngStream:
    """Seed and stream id identifying one reproducible random sequence."""

    seed: int
    stream: int = 0
    algorithm: str = field(default=RNG_ALGORITHM, compare=False)

    def __post_init__(self):
        for name in ("seed", "stream"):
            v = getattr(self, name)
            if not 0 <= int(v) < 2**64:
                raise ValueError(f"{name} must be a 64-bit unsigned integer")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream),))
        return np.random.Generator(np.random.PCG64(ss))


def _generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError("rng must be an RngStream or numpy Generator")


def amplitudes(state) -> np.ndarray:
    """Amplitude array of a ``PureState3Q`` or of a raw ``(..., 8)`` array."""
    if isinstance(state, PureState3Q):
        return state.amplitudes
    a = np.asarray(state, dtype=complex)
    if a.shape[-1] != 8:
        raise ValueError(f"expected 8 amplitudes per state, got shape {a.shape}")
    return a


def basis_state(bits: str) -> PureState3Q:
    """Computational basis state, e.g. ``basis_state("000")``."""
    amps = np.zeros(8, dtype=complex)
    amps[int(bits, 2)] = 1.0
    return PureState3Q(amps)


def ghz_state() -> PureState3Q:
    return generalized_ghz(1.0 / np.sqrt(2.0))


def w_state() -> PureState3Q:
    amps = np.zeros(8, dtype=complex)
    amps[[1, 2, 4]] = 1.0 / np.sqrt(3.0)
    return PureState3Q(amps)


def generalized_ghz(alpha: float) -> PureState3Q:
    """``alpha |000> + sqrt(1 - alpha^2) |111>`` for ``alpha`` in [1/sqrt2, 1]."""
    alpha = float(alpha)
    if not (1.0 / np.sqrt(2.0) - 1e-15 <= alpha <= 1.0):
        raise ValueError(f"alpha = {alpha!r} outside [1/sqrt(2), 1]")
    amps = np.zeros(8, dtype=complex)
    amps[_I000] = alpha
    amps[_I111] = np.sqrt(max(0.0, 1.0 - alpha * alpha))
    return PureState3Q(amps, "gen_ghz")


def ghz_class_state(lams, phi: float) -> PureState3Q:
    """Canonical GHZ-class form with weights ``lams = (l0, ..., l4)``."""
    lams = np.asarray(lams, dtype=float)
    if lams.shape != (5,) or np.any(lams < 0):
        raise ValueError("need five nonnegative weights")
    amps = np.zeros(8, dtype=complex)
    amps[[_I000, _I100, _I101, _I110, _I111]] = lams
    amps[_I100] *= np.exp(1j * phi)
    return PureState3Q.from_amplitudes(amps, "ghz_class")


def w_class_state(lams) -> PureState3Q:
    """Canonical W-class form with weights ``lams = (l0, l1, l2, l3)``."""
    lams = np.asarray(lams, dtype=float)
    if lams.shape != (4,) or np.any(lams < 0):
        raise ValueError("need four nonnegative weights")
    amps = np.zeros(8, dtype=complex)
    amps[[_I000, _I100, _I101, _I110]] = lams
    return PureState3Q.from_amplitudes(amps, "w_class")


def _positive_sphere(gen: np.random.Generator, n: int, k: int) -> np.ndarray:
    x = np.abs(gen.standard_normal((n, k)))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def haar_amplitudes(rng, n: int) -> np.ndarray:
    gen = _generator(rng)
    z = gen.standard_normal((n, 8)) + 1j * gen.standard_normal((n, 8))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def gen_ghz_amplitudes(rng, n: int) -> np.ndarray:
    gen = _generator(rng)
    a2 = gen.uniform(0.5, 1.0, n)
    amps = np.zeros((n, 8), dtype=complex)
    amps[:, _I000] = np.sqrt(a2)
    amps[:, _I111] = np.sqrt(1.0 - a2)
    return amps


def ghz_class_amplitudes(rng, n: int) -> np.ndarray:
    """GHZ-class samples; draws with 3-tangle ``4 l0^2 l4^2 <= 1e-8`` are redrawn."""
    gen = _generator(rng)
    out = np.empty((0, 8), dtype=complex)
    for _ in range(MAX_RESAMPLE_ROUNDS):
        need = n - out.shape[0]
        if need <= 0:
            break
        lams = _positive_sphere(gen, need, 5)
        phi = gen.uniform(0.0, np.pi, need)
        amps = np.zeros((need, 8), dtype=complex)
        amps[:, [_I000, _I100, _I101, _I110, _I111]] = lams
        amps[:, _I100] *= np.exp(1j * phi)
        tangle3 = 4.0 * lams[:, 0] ** 2 * lams[:, 4] ** 2
        out = np.concatenate([out, amps[tangle3 > TANGLE_CUT]])
    else:
        raise RuntimeError("GHZ-class resampling limit exceeded")
    return out[:n]


def w_class_amplitudes(rng, n: int) -> np.ndarray:
    gen = _generator(rng)
    amps = np.zeros((n, 8), dtype=complex)
    amps[:, [_I000, _I100, _I101, _I110]] = _positive_sphere(gen, n, 4)
    return amps


SAMPLERS = {
    "haar": haar_amplitudes,
    "gen_ghz": gen_ghz_amplitudes,
    "ghz_class": ghz_class_amplitudes,
    "w_class": w_class_amplitudes,
}


def sample_amplitudes(family: str, rng, n: int) -> np.ndarray:
    """``n`` amplitude rows of shape ``(n, 8)`` from a sampling family."""
    try:
        sampler = SAMPLERS[family]
    except KeyError:
        raise ValueError(f"cannot sample family {family!r}") from None
    return sampler(rng, n)


def sample_haar(rng) -> PureState3Q:
    return PureState3Q(haar_amplitudes(rng, 1)[0], "haar")


def sample_ghz_class(rng) -> PureState3Q:
    return PureState3Q(ghz_class_amplitudes(rng, 1)[0], "ghz_class")


def sample_w_class(rng) -> PureState3Q:
    return PureState3Q(w_class_amplitudes(rng, 1)[0], "w_class")


def density(state) -> np.ndarray:
    """Projector ``|psi><psi|``; maps over stacked amplitude arrays."""
    a = amplitudes(state)
    return a[..., :, None] * np.conj(a[..., None, :])


def reduced(state, keep: str) -> np.ndarray:
    """Reduced density matrix of ``state`` on ``keep`` (parties in listed order)."""
    return reduce_pure(amplitudes(state), keep)
