"""Monogamy scores, generalized geometric measure and their light-cone
constraints for pure three-qubit states."""

__version__ = "0.1.0"

from .bipartite import (
    concurrence,
    eof_two_qubit,
    measured_conditional_entropy,
    quantum_discord,
    quantum_mutual_information,
)
from .cone import cone_slopes, discord_bound, entanglement_boundary, verify_theorem1, verify_theorem2
from .multipartite import delta_c, delta_d, dissension, ggm, monogamy_score
from .states import PureState3Q, RngStream, generalized_ghz, ghz_state, w_state

__all__ = [
    "PureState3Q",
    "RngStream",
    "concurrence",
    "cone_slopes",
    "delta_c",
    "delta_d",
    "discord_bound",
    "dissension",
    "entanglement_boundary",
    "eof_two_qubit",
    "generalized_ghz",
    "ggm",
    "ghz_state",
    "measured_conditional_entropy",
    "monogamy_score",
    "quantum_discord",
    "quantum_mutual_information",
    "verify_theorem1",
    "verify_theorem2",
    "w_state",
]
