"""Feedback capacity of the Ising channel: DP solution, verification, and a
zero-error capacity-achieving coding scheme."""

from .analytic import (
    AnalyticParams,
    bellman_residual,
    capacity_argmax,
    h_star,
    policy_star,
    quartic,
    solve_root,
)
from .channel import Bit, ForcedNoise, NoiseSource, transmit
from .coding import (
    CodingConfig,
    channel_encode,
    data_decode,
    data_encode,
    decode_stream,
    simulate_rate,
)
from .dp import Action, GridFunction, bellman_operator, entropy

__all__ = [
    "Action",
    "AnalyticParams",
    "Bit",
    "CodingConfig",
    "ForcedNoise",
    "GridFunction",
    "NoiseSource",
    "bellman_operator",
    "bellman_residual",
    "capacity_argmax",
    "channel_encode",
    "data_decode",
    "data_encode",
    "decode_stream",
    "entropy",
    "h_star",
    "policy_star",
    "quartic",
    "simulate_rate",
    "solve_root",
    "transmit",
]
