"""Pinching-antenna placement along a waveguide for a multi-antenna user."""

from .center import CenterSolution, optimize_center
from .channel import (
    LinkBudget,
    Scenario,
    UserArray,
    WaveguideParams,
    achievable_rate,
    aggregate_channel,
    channel_coefficient,
    phase_delay,
    received_snr,
)
from .errors import ConfigError, ModelViolationError, PlacementError, PlacementStateError
from .sequential import (
    benchmark_place,
    candidate_positions,
    deployment_order,
    min_span_select,
    oracle_greedy_place,
    place_all,
    place_next,
)
from .state import PlacementResult, PlacementState

__all__ = [
    "CenterSolution",
    "ConfigError",
    "LinkBudget",
    "ModelViolationError",
    "PlacementError",
    "PlacementResult",
    "PlacementState",
    "PlacementStateError",
    "Scenario",
    "UserArray",
    "WaveguideParams",
    "achievable_rate",
    "aggregate_channel",
    "benchmark_place",
    "candidate_positions",
    "channel_coefficient",
    "deployment_order",
    "min_span_select",
    "optimize_center",
    "oracle_greedy_place",
    "phase_delay",
    "place_all",
    "place_next",
    "received_snr",
]
