"""Data carried through the center-outward deployment."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .center import CenterSolution
from .channel import UserArray, WaveguideParams, channel_coefficients
from .errors import PlacementStateError

PROPOSED = "proposed"
BENCHMARK = "benchmark"
ORACLE_GREEDY = "oracle-greedy"
SCHEMES = (PROPOSED, BENCHMARK, ORACLE_GREEDY)


def center_index(pa_count: int) -> int:
    """1-based label of the PA placed first (``ceil(N / 2)``)."""
    return (pa_count + 1) // 2


def wrap_phase(theta) -> np.ndarray:
    """Reduce phases into ``[0, 2*pi)``."""
    two_pi = 2 * np.pi
    w = np.mod(theta, two_pi)
    return np.where(w >= two_pi, w - two_pi, w)


@dataclass(frozen=True)
class CandidateSet:
    """Phase-aligned positions for one receive antenna, sorted by x.

    ``z`` counts whole phase periods away from the first alignment on the
    branch side of ``reference_x``: 0, 1, 2... to the right and 0, -1, -2...
    to the left.
    """

    antenna: int
    reference_x: float
    reference_phase: float
    phase_slope: float
    candidates: tuple  # of (z, x) pairs

    @property
    def positions(self) -> np.ndarray:
        return np.array([x for _, x in self.candidates])

    @property
    def z_values(self) -> list:
        return [z for z, _ in self.candidates]


@dataclass(frozen=True)
class SpanSelection:
    chosen: tuple  # one position per candidate set, in set order
    span: float
    midpoint: float


@dataclass(frozen=True)
class StepRecord:
    """Diagnostics of one placement step (``k >= 2``)."""

    k: int
    pa_index: int
    reference_x: float
    position: float
    gain: float
    candidate_sets: tuple = ()
    selection: Optional[SpanSelection] = None
    clamped: bool = False
    phase_error: Optional[float] = None


@dataclass(frozen=True)
class PlacementState:
    """Deployment state after the first ``k`` PAs.

    Attributes:
        pa_count: Total number of PAs N.
        center: 1-based label of the central PA.
        placed: PA label -> x-coordinate.
        accumulated: Complex channel per receive antenna summed over placed PAs,
            using the exact per-PA magnitudes.
        amplitude_scale: Path-loss amplitude of each receive antenna from the
            central PA; the per-step amplitude approximation.
    """

    pa_count: int
    center: int
    placed: dict
    accumulated: np.ndarray
    amplitude_scale: np.ndarray
    right_frontier: float
    left_frontier: float

    @classmethod
    def start(cls, wg: WaveguideParams, user: UserArray, pa_count: int, x_center: float) -> "PlacementState":
        h = channel_coefficients(wg, user, x_center)
        return cls(
            pa_count=pa_count,
            center=center_index(pa_count),
            placed={center_index(pa_count): float(x_center)},
            accumulated=h,
            amplitude_scale=np.abs(h),
            right_frontier=float(x_center),
            left_frontier=float(x_center),
        )

    @property
    def k(self) -> int:
        return len(self.placed)

    @property
    def wrapped_phase(self) -> np.ndarray:
        """Normalized phase of the accumulated channel, ``mod(-arg h, 2*pi)``."""
        return wrap_phase(-np.angle(self.accumulated))

    @property
    def gain(self) -> float:
        return float(np.sum(np.abs(self.accumulated) ** 2))

    def direction(self, n: int) -> int:
        """+1 for PAs right of the center, -1 for the left side."""
        if not 1 <= n <= self.pa_count:
            raise IndexError(f"PA index {n} out of range for N={self.pa_count}")
        if n == self.center:
            raise PlacementStateError("the central PA has no deployment direction")
        return 1 if n > self.center else -1

    def reference_position(self, n: int, wg: WaveguideParams) -> float:
        """Closest feasible position for PA ``n``: its inward neighbor shifted by lambda/2."""
        side = self.direction(n)
        if n in self.placed:
            raise PlacementStateError(f"PA {n} is already placed")
        if n - side not in self.placed:
            raise PlacementStateError(f"inward neighbor {n - side} of PA {n} is not placed")
        frontier = self.right_frontier if side > 0 else self.left_frontier
        return frontier + side * wg.min_spacing

    def with_pa(self, n: int, x: float, h_new: np.ndarray) -> "PlacementState":
        placed = dict(self.placed)
        placed[n] = float(x)
        side = self.direction(n)
        return replace(
            self,
            placed=placed,
            accumulated=self.accumulated + h_new,
            right_frontier=float(x) if side > 0 else self.right_frontier,
            left_frontier=float(x) if side < 0 else self.left_frontier,
        )

    def positions(self) -> np.ndarray:
        return np.array([self.placed[n] for n in sorted(self.placed)])


@dataclass(frozen=True)
class PlacementResult:
    positions: np.ndarray
    snr: float
    rate: float
    scheme: str
    center: CenterSolution
    steps: tuple = field(default=())
    gains: tuple = field(default=())

    def min_spacing_slack(self, wg: WaveguideParams) -> float:
        """Smallest adjacent gap minus lambda/2 (``inf`` for a single PA)."""
        if self.positions.size < 2:
            return float("inf")
        return float(np.min(np.diff(self.positions)) - wg.min_spacing)
