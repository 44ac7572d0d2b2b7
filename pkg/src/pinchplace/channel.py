"""Waveguide geometry, line-of-sight channel model and link-budget objective.

All lengths are in meters. Receive antennas are indexed from 0 (array order),
PA positions are plain floats or numpy arrays of x-coordinates on the waveguide.

The channel from the feed point through a PA at ``x`` to receive antenna ``m``
is ``sqrt(eta) / r * exp(-1j * theta)`` with ``r`` the free-space distance and
``theta`` the sum of free-space and in-guide phase. The receiver uses maximum
ratio combining, so the SNR is ``(P / N) / sigma^2 * sum_m |h_m|^2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

SPEED_OF_LIGHT = 2.99792458e8

DEFAULT_CARRIER_FREQUENCY = 28e9
DEFAULT_EFFECTIVE_INDEX = 1.4
DEFAULT_NOISE_POWER_DBM = -90.0


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    return 10.0 * np.log10(watts) + 30.0


@dataclass(frozen=True)
class WaveguideParams:
    """Physical constants of the waveguide and carrier.

    Attributes:
        carrier_frequency: Carrier frequency in Hz.
        effective_refractive_index: Effective index of the guided mode, >= 1.
        feed_x: x-coordinate of the signal feed point.
    """

    carrier_frequency: float = DEFAULT_CARRIER_FREQUENCY
    effective_refractive_index: float = DEFAULT_EFFECTIVE_INDEX
    feed_x: float = 0.0

    def __post_init__(self):
        if not self.carrier_frequency > 0:
            raise ValueError("carrier_frequency must be positive")
        if not self.effective_refractive_index >= 1:
            raise ValueError("effective_refractive_index must be >= 1")
        if not np.isfinite(self.feed_x):
            raise ValueError("feed_x must be finite")

    @property
    def speed_of_light(self) -> float:
        return SPEED_OF_LIGHT

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_frequency

    @property
    def guided_wavelength(self) -> float:
        return self.wavelength / self.effective_refractive_index

    @property
    def eta(self) -> float:
        return SPEED_OF_LIGHT**2 / (16 * np.pi**2 * self.carrier_frequency**2)

    @property
    def wavenumber(self) -> float:
        """Free-space phase per meter, 2*pi/lambda."""
        return 2 * np.pi / self.wavelength

    @property
    def guided_wavenumber(self) -> float:
        """In-guide phase per meter, 2*pi/lambda_g."""
        return 2 * np.pi / self.guided_wavelength

    @property
    def min_spacing(self) -> float:
        return self.wavelength / 2


@dataclass(frozen=True)
class UserArray:
    """Linear receive array at height ``vertical_distance`` above the waveguide."""

    positions: np.ndarray
    vertical_distance: float

    def __post_init__(self):
        x = np.array(self.positions, dtype=float).reshape(-1)
        if x.size < 1:
            raise ValueError("user array needs at least one antenna")
        if not np.all(np.isfinite(x)):
            raise ValueError("antenna positions must be finite")
        if np.any(np.diff(x) <= 0):
            raise ValueError("antenna positions must be strictly increasing")
        if not self.vertical_distance > 0:
            raise ValueError("vertical_distance must be positive")
        x.flags.writeable = False
        object.__setattr__(self, "positions", x)
        object.__setattr__(self, "vertical_distance", float(self.vertical_distance))

    @classmethod
    def uniform(cls, center: float, span: float, count: int, vertical_distance: float) -> "UserArray":
        """``count`` equally spaced antennas covering ``span`` around ``center``."""
        if count == 1:
            return cls(np.array([center]), vertical_distance)
        return cls(center + span * (np.arange(count) / (count - 1) - 0.5), vertical_distance)

    @property
    def count(self) -> int:
        return self.positions.size

    @property
    def span(self) -> float:
        return float(self.positions[-1] - self.positions[0])

    @property
    def midpoint(self) -> float:
        return 0.5 * float(self.positions[0] + self.positions[-1])


@dataclass(frozen=True)
class LinkBudget:
    total_power: float
    noise_power: float = dbm_to_watts(DEFAULT_NOISE_POWER_DBM)

    def __post_init__(self):
        if not self.total_power > 0:
            raise ValueError("total_power must be positive")
        if not self.noise_power > 0:
            raise ValueError("noise_power must be positive")

    @classmethod
    def from_dbm(cls, power_dbm: float, noise_dbm: float = DEFAULT_NOISE_POWER_DBM) -> "LinkBudget":
        return cls(dbm_to_watts(power_dbm), dbm_to_watts(noise_dbm))

    @property
    def transmit_snr(self) -> float:
        return self.total_power / self.noise_power


@dataclass(frozen=True)
class Scenario:
    waveguide: WaveguideParams
    user: UserArray
    pa_count: int
    budget: LinkBudget = field(default_factory=lambda: LinkBudget.from_dbm(30.0))

    def __post_init__(self):
        if int(self.pa_count) != self.pa_count or self.pa_count < 1:
            raise ValueError("pa_count must be a positive integer")


def _check_antenna(user: UserArray, m: int) -> None:
    if not 0 <= m < user.count:
        raise IndexError(f"receive antenna index {m} out of range for M={user.count}")


def distances(user: UserArray, x) -> np.ndarray:
    """Free-space distances, shape ``(M,) + shape(x)``."""
    x = np.asarray(x, dtype=float)
    dx = user.positions.reshape((-1,) + (1,) * x.ndim) - x
    return np.hypot(dx, user.vertical_distance)


def phase_delays(wg: WaveguideParams, user: UserArray, x) -> np.ndarray:
    """Unwrapped channel phase for every receive antenna, shape ``(M,) + shape(x)``."""
    x = np.asarray(x, dtype=float)
    return wg.wavenumber * distances(user, x) + wg.guided_wavenumber * (x - wg.feed_x)


def phase_delay(wg: WaveguideParams, user: UserArray, m: int, x_n: float) -> float:
    """Unwrapped phase (rad) seen at receive antenna ``m`` through a PA at ``x_n``."""
    _check_antenna(user, m)
    r = np.hypot(user.positions[m] - x_n, user.vertical_distance)
    return float(wg.wavenumber * r + wg.guided_wavenumber * (x_n - wg.feed_x))


def phase_slope(wg: WaveguideParams, user: UserArray, m: int, x_n: float) -> float:
    """Exact derivative of :func:`phase_delay` with respect to the PA position."""
    _check_antenna(user, m)
    dx = x_n - user.positions[m]
    return float(wg.wavenumber * dx / np.hypot(dx, user.vertical_distance) + wg.guided_wavenumber)


def channel_coefficients(wg: WaveguideParams, user: UserArray, x) -> np.ndarray:
    """Per-PA channels ``h_{m,n}``, shape ``(M,) + shape(x)``."""
    x = np.asarray(x, dtype=float)
    r = distances(user, x)
    theta = wg.wavenumber * r + wg.guided_wavenumber * (x - wg.feed_x)
    return np.sqrt(wg.eta) / r * np.exp(-1j * theta)


def channel_coefficient(wg: WaveguideParams, user: UserArray, m: int, x_n: float) -> complex:
    _check_antenna(user, m)
    r = np.hypot(user.positions[m] - x_n, user.vertical_distance)
    return complex(np.sqrt(wg.eta) / r * np.exp(-1j * phase_delay(wg, user, m, x_n)))


def aggregate_channel(wg: WaveguideParams, user: UserArray, positions: Sequence[float]) -> np.ndarray:
    """Coherent sum over PAs of the per-PA channels; one complex value per receive antenna."""
    x = np.asarray(positions, dtype=float).reshape(-1)
    if x.size == 0:
        raise ValueError("at least one PA position is required")
    return channel_coefficients(wg, user, x).sum(axis=1)


def channel_gain(wg: WaveguideParams, user: UserArray, positions: Sequence[float]) -> float:
    """Objective of the placement problem, ``sum_m |h_m|^2``."""
    h = aggregate_channel(wg, user, positions)
    return float(np.sum(np.abs(h) ** 2))


def received_snr(scenario: Scenario, positions: Sequence[float]) -> float:
    """Post-MRC SNR with the transmit power split evenly over the PAs."""
    x = np.asarray(positions, dtype=float).reshape(-1)
    if x.size != scenario.pa_count:
        raise ValueError(f"expected {scenario.pa_count} positions, got {x.size}")
    gain = channel_gain(scenario.waveguide, scenario.user, x)
    return scenario.budget.transmit_snr / scenario.pa_count * gain


def rate_from_snr(snr: float) -> float:
    return float(np.log2(1.0 + snr))


def achievable_rate(scenario: Scenario, positions: Sequence[float]) -> float:
    """Achievable rate in bit/s/Hz."""
    return rate_from_snr(received_snr(scenario, positions))
