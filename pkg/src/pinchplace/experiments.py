"""Parameter sweeps and single-step traces with CSV output.

Sweep config (JSON)::

    {
      "scenario": {
        "waveguide": {"carrier_frequency": 28e9, "effective_refractive_index": 1.4, "feed_x": 0.0},
        "user": {"positions": [9.9, 10.1], "vertical_distance": 4.0},
        "pa_count": 16,
        "budget": {"transmit_power_dbm": 30.0, "noise_power_dbm": -90.0}
      },
      "axis": "transmit_power_dBm",
      "values": [10, 20, 30, 40],
      "schemes": ["proposed", "benchmark"],
      "candidates": 4,
      "output": "rates.csv",
      "seed": 0
    }

Unknown keys are rejected at every level.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import oracle
from .center import optimize_center
from .channel import (
    DEFAULT_NOISE_POWER_DBM,
    LinkBudget,
    Scenario,
    UserArray,
    WaveguideParams,
    phase_delays,
)
from .errors import ConfigError, PlacementError
from .sequential import DEFAULT_CANDIDATES, deployment_order, linear_phase_slope, place_next, run_scheme
from .state import SCHEMES, PlacementState

AXES = ("transmit_power_dBm", "user_distance_d_m", "pa_count_N", "user_antenna_count_M")
CSV_HEADER = ["axis_value", "scheme", "rate_bps_hz", "snr_db", "positions_semicolon_separated_m"]

_TOP_KEYS = {"scenario", "axis", "values", "schemes", "candidates", "output", "seed"}
_SCENARIO_KEYS = {"waveguide", "user", "pa_count", "budget"}
_WAVEGUIDE_KEYS = {"carrier_frequency", "effective_refractive_index", "feed_x"}
_USER_KEYS = {"positions", "vertical_distance"}
_BUDGET_KEYS = {"transmit_power_dbm", "noise_power_dbm"}


@dataclass(frozen=True)
class SweepConfig:
    scenario: Scenario
    axis: str
    values: tuple
    schemes: tuple = ("proposed", "benchmark")
    candidates: int = DEFAULT_CANDIDATES
    output: Optional[str] = None
    seed: int = 0
    noise_power_dbm: float = DEFAULT_NOISE_POWER_DBM

    def __post_init__(self):
        if self.axis not in AXES:
            raise ConfigError("axis", f"must be one of {AXES}")
        if len(self.values) == 0:
            raise ConfigError("values", "must be non-empty")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ConfigError("values", "must be strictly increasing")
        if not self.schemes:
            raise ConfigError("schemes", "must be non-empty")
        for s in self.schemes:
            if s not in SCHEMES:
                raise ConfigError("schemes", f"unknown scheme {s!r}")
        if int(self.candidates) != self.candidates or self.candidates < 1:
            raise ConfigError("candidates", "must be a positive integer")


def _check_keys(obj, allowed, required, where):
    if not isinstance(obj, dict):
        raise ConfigError(where, "must be an object")
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"{where}.{key}" if where else key, "unknown key")
    for key in required:
        if key not in obj:
            raise ConfigError(f"{where}.{key}" if where else key, "missing")


def _build(where, factory, *args, **kwargs):
    try:
        return factory(*args, **kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(where, str(exc)) from exc


def scenario_from_dict(data: dict) -> tuple:
    """Returns ``(scenario, noise_power_dbm)``."""
    _check_keys(data, _SCENARIO_KEYS, ("user", "pa_count"), "scenario")
    wg_data = data.get("waveguide", {})
    _check_keys(wg_data, _WAVEGUIDE_KEYS, (), "scenario.waveguide")
    wg = _build("scenario.waveguide", WaveguideParams, **wg_data)
    user_data = data["user"]
    _check_keys(user_data, _USER_KEYS, _USER_KEYS, "scenario.user")
    user = _build("scenario.user", UserArray, np.asarray(user_data["positions"], dtype=float), user_data["vertical_distance"])
    budget_data = data.get("budget", {})
    _check_keys(budget_data, _BUDGET_KEYS, (), "scenario.budget")
    noise = float(budget_data.get("noise_power_dbm", DEFAULT_NOISE_POWER_DBM))
    budget = _build("scenario.budget", LinkBudget.from_dbm, float(budget_data.get("transmit_power_dbm", 30.0)), noise)
    scenario = _build("scenario.pa_count", Scenario, wg, user, data["pa_count"], budget)
    return scenario, noise


def config_from_dict(data: dict) -> SweepConfig:
    _check_keys(data, _TOP_KEYS, ("scenario", "axis", "values"), "")
    scenario, noise = scenario_from_dict(data["scenario"])
    values = data["values"]
    if not isinstance(values, list) or not all(isinstance(v, (int, float)) for v in values):
        raise ConfigError("values", "must be a list of numbers")
    schemes = data.get("schemes", ["proposed", "benchmark"])
    if not isinstance(schemes, list):
        raise ConfigError("schemes", "must be a list")
    return SweepConfig(
        scenario=scenario,
        axis=data["axis"],
        values=tuple(values),
        schemes=tuple(schemes),
        candidates=data.get("candidates", DEFAULT_CANDIDATES),
        output=data.get("output"),
        seed=int(data.get("seed", 0)),
        noise_power_dbm=noise,
    )


def load_config(path) -> SweepConfig:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON: {exc}") from exc
    return config_from_dict(data)


def scenario_at(config: SweepConfig, value) -> Scenario:
    """Base scenario with the swept quantity set to ``value``."""
    base = config.scenario
    if config.axis == "transmit_power_dBm":
        return replace(base, budget=LinkBudget.from_dbm(float(value), config.noise_power_dbm))
    if config.axis == "user_distance_d_m":
        return replace(base, user=_build("values", UserArray, base.user.positions, float(value)))
    if config.axis == "pa_count_N":
        if int(value) != value:
            raise ConfigError("values", "PA counts must be integers")
        return _build("values", replace, base, pa_count=int(value))
    if int(value) != value or value < 1:
        raise ConfigError("values", "antenna counts must be positive integers")
    if value > 1 and base.user.span == 0:
        raise ConfigError("scenario.user", "antenna-count sweeps need a base array with non-zero span")
    user = UserArray.uniform(base.user.midpoint, base.user.span, int(value), base.user.vertical_distance)
    return replace(base, user=user)


@dataclass
class SweepRow:
    axis_value: float
    scheme: str
    rate: Optional[float]
    snr: Optional[float]
    positions: Optional[np.ndarray]
    error: Optional[str] = None


def run_sweep(config: SweepConfig) -> list:
    """One row per (axis value, scheme); a failing scheme yields an error row and the sweep goes on."""
    rows = []
    for value in config.values:
        scenario = scenario_at(config, value)
        for scheme in config.schemes:
            try:
                res = run_scheme(scenario, scheme, config.candidates)
            except (PlacementError, ValueError) as exc:
                rows.append(SweepRow(value, scheme, None, None, None, f"{type(exc).__name__}: {exc}"))
                continue
            rows.append(SweepRow(value, scheme, res.rate, res.snr, res.positions))
    return rows


def _fmt(x: float) -> str:
    return repr(float(x))


def format_rows(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        if r.error is not None:
            w.writerow([_fmt(r.axis_value), r.scheme, "", "", f"ERROR: {r.error}"])
            continue
        snr_db = 10 * np.log10(r.snr) if r.snr > 0 else float("-inf")
        w.writerow([
            _fmt(r.axis_value),
            r.scheme,
            _fmt(r.rate),
            _fmt(snr_db),
            ";".join(_fmt(x) for x in r.positions),
        ])
    return buf.getvalue()


def read_rows(text: str) -> list:
    """Parse a sweep CSV back into dicts with float fields."""
    out = []
    for rec in csv.DictReader(io.StringIO(text)):
        pos = rec["positions_semicolon_separated_m"]
        ok = not pos.startswith("ERROR")
        out.append({
            "axis_value": float(rec["axis_value"]),
            "scheme": rec["scheme"],
            "rate": float(rec["rate_bps_hz"]) if ok else None,
            "snr_db": float(rec["snr_db"]) if ok else None,
            "positions": np.array([float(x) for x in pos.split(";")]) if ok else None,
        })
    return out


@dataclass
class StepTrace:
    """Gain and phase landscape for one placement step over a grid of trial positions."""

    k: int
    pa_index: int
    reference_x: float
    x: np.ndarray
    exact_phase: np.ndarray  # (M, P) unwrapped phase minus accumulated phase
    linear_phase: np.ndarray  # (M, P) same, first-order model
    antenna_gain: np.ndarray  # (M, P)
    total_gain: np.ndarray  # (P,)
    candidate_sets: tuple
    placed_x: float
    placed_gain: float
    grid: oracle.GridSpec = field(repr=False, default=None)
    state: PlacementState = field(repr=False, default=None)

    @property
    def wrapped_exact(self) -> np.ndarray:
        return np.mod(self.exact_phase, 2 * np.pi)

    @property
    def wrapped_linear(self) -> np.ndarray:
        return np.mod(self.linear_phase, 2 * np.pi)


def trace_step(config: SweepConfig, k: int, grid_step: Optional[float] = None, periods: float = 4) -> StepTrace:
    """Landscape seen by the k-th deployed PA (``2 <= k <= N``) after the proposed scheme placed the first k-1."""
    scenario = config.scenario
    wg, user, n_pa = scenario.waveguide, scenario.user, scenario.pa_count
    if not 2 <= k <= n_pa:
        raise ConfigError("step", f"must be in [2, {n_pa}]")
    center = optimize_center(user)
    state = PlacementState.start(wg, user, n_pa, center.x_center)
    order = deployment_order(n_pa)
    for n in order[1 : k - 1]:
        state, _ = place_next(state, n, config.candidates, wg, user)
    n = order[k - 1]
    step = oracle.default_grid_step(wg) if grid_step is None else grid_step
    grid = oracle.search_window(state, n, wg, step, periods)
    x = grid.points()
    xs = state.reference_position(n, wg)
    target = state.wrapped_phase[:, None]
    exact = phase_delays(wg, user, x) - target
    theta_s = phase_delays(wg, user, xs)
    slopes = np.array([linear_phase_slope(wg, user, m, xs) for m in range(user.count)])
    linear = theta_s[:, None] + slopes[:, None] * (x - xs) - target
    gains = oracle.gain_profile(state, x, wg, user)
    after, rec = place_next(state, n, config.candidates, wg, user)
    return StepTrace(
        k=k,
        pa_index=n,
        reference_x=xs,
        x=x,
        exact_phase=exact,
        linear_phase=linear,
        antenna_gain=gains,
        total_gain=gains.sum(axis=0),
        candidate_sets=rec.candidate_sets,
        placed_x=rec.position,
        placed_gain=rec.gain,
        grid=grid,
        state=state,
    )


def format_trace(trace: StepTrace) -> str:
    m_count = trace.antenna_gain.shape[0]
    header = ["x_m"]
    for m in range(m_count):
        header += [f"phase_diff_exact_{m}", f"phase_diff_linear_{m}", f"gain_{m}"]
    header.append("total_gain")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    we, wl = trace.wrapped_exact, trace.wrapped_linear
    for j, xj in enumerate(trace.x):
        row = [_fmt(xj)]
        for m in range(m_count):
            row += [_fmt(we[m, j]), _fmt(wl[m, j]), _fmt(trace.antenna_gain[m, j])]
        row.append(_fmt(trace.total_gain[j]))
        w.writerow(row)
    return buf.getvalue()
