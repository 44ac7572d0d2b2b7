"""Brute-force references for the heuristic steps.

These stay deliberately naive: dense grids, full enumeration, plain centered
differences. Nothing here reuses the linearized phase model.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .channel import UserArray, WaveguideParams, channel_coefficients
from .state import CandidateSet, PlacementState, SpanSelection

MAX_GRID_POINTS = 10_000_000
MAX_COMBINATIONS = 1_000_000
FEASIBILITY_SLACK = 1e-12


def default_grid_step(wg: WaveguideParams) -> float:
    return wg.wavelength / 1000


@dataclass(frozen=True)
class GridSpec:
    lo: float
    hi: float
    step: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("grid needs lo < hi")
        if not self.step > 0:
            raise ValueError("grid step must be positive")
        if (self.hi - self.lo) / self.step > MAX_GRID_POINTS:
            raise ValueError(f"grid exceeds {MAX_GRID_POINTS} points")

    def points(self) -> np.ndarray:
        n = int(np.floor((self.hi - self.lo) / self.step * (1 + 1e-12)))
        return self.lo + self.step * np.arange(n + 1)


def search_window(state: PlacementState, n: int, wg: WaveguideParams, step: float, periods: float = 4) -> GridSpec:
    """Grid covering ``periods`` guided wavelengths outward from PA ``n``'s reference point."""
    xs = state.reference_position(n, wg)
    width = periods * wg.guided_wavelength
    if state.direction(n) > 0:
        return GridSpec(xs, xs + width, step)
    # mirrored so that the grid ends exactly on the reference point
    grid = GridSpec(xs - width, xs, step)
    return GridSpec(xs - step * (len(grid.points()) - 1), xs, step)


def gain_profile(state: PlacementState, x, wg: WaveguideParams, user: UserArray) -> np.ndarray:
    """Per-antenna gain ``|h_acc + h(x)|^2`` for a new PA at each ``x``; shape ``(M, len(x))``."""
    h = channel_coefficients(wg, user, np.asarray(x, dtype=float))
    return np.abs(state.accumulated[:, None] + h) ** 2


def _total_gain(state, x, wg, user) -> np.ndarray:
    return gain_profile(state, x, wg, user).sum(axis=0)


def _refine_peak(state, x, i, wg, user, lo, hi, rounds, factor=100):
    """Nested finer grids around grid point ``i`` (clipped to ``[lo, hi]``)."""
    step = x[1] - x[0] if x.size > 1 else 0.0
    best_x = x[i]
    for _ in range(rounds):
        if step == 0:
            break
        fine = np.linspace(max(best_x - step, lo), min(best_x + step, hi), 2 * factor + 1)
        g = _total_gain(state, fine, wg, user)
        best_x = fine[int(np.argmax(g))]
        step = fine[1] - fine[0]
    return float(best_x), float(_total_gain(state, np.array([best_x]), wg, user)[0])


def grid_argmax_gain(
    state: PlacementState,
    n: int,
    grid: GridSpec,
    wg: WaveguideParams,
    user: UserArray,
    refine_rounds: int = 0,
):
    """Exhaustive maximization of the total gain after adding PA ``n``.

    Returns ``(x_best, gain_best)``; ties resolve to the first grid point.
    With ``refine_rounds > 0`` every local maximum of the grid is re-searched
    on nested grids 100x finer per round before the best peak is picked, so
    nearly equal peaks are compared at their true heights rather than at
    wherever the coarse grid happens to sample them.

    Raises:
        ValueError: if the grid reaches into the lambda/2 exclusion zone.
    """
    xs = state.reference_position(n, wg)
    if state.direction(n) > 0:
        feasible = grid.lo >= xs - FEASIBILITY_SLACK
    else:
        feasible = grid.hi <= xs + FEASIBILITY_SLACK
    if not feasible:
        raise ValueError(f"grid [{grid.lo}, {grid.hi}] leaves the feasible region of PA {n}")
    x = grid.points()
    total = _total_gain(state, x, wg, user)
    if refine_rounds <= 0 or x.size < 2:
        i = int(np.argmax(total))
        return float(x[i]), float(total[i])
    padded = np.concatenate(([-np.inf], total, [-np.inf]))
    peaks = np.flatnonzero((padded[1:-1] >= padded[:-2]) & (padded[1:-1] >= padded[2:]))
    best = None
    for i in peaks:
        cand = _refine_peak(state, x, i, wg, user, x[0], x[-1], refine_rounds)
        if best is None or cand[1] > best[1]:
            best = cand
    return best


def _values(s) -> list:
    if isinstance(s, CandidateSet):
        return list(s.positions)
    return list(s)


def exhaustive_min_span(candidate_sets: Sequence) -> SpanSelection:
    """Try every one-per-set combination; ties go to the lexicographically smallest tuple."""
    sets = [_values(s) for s in candidate_sets]
    if not sets or any(len(s) == 0 for s in sets):
        raise ValueError("every candidate set must be non-empty")
    if np.prod([float(len(s)) for s in sets]) > MAX_COMBINATIONS:
        raise ValueError(f"more than {MAX_COMBINATIONS} combinations")
    best = None
    best_span = None
    for combo in itertools.product(*sets):
        span = max(combo) - min(combo)
        if best is None or span < best_span or (span == best_span and combo < best):
            best, best_span = combo, span
    return SpanSelection(tuple(best), best_span, 0.5 * (max(best) + min(best)))


def finite_difference(f: Callable[[float], float], x: float, h: float) -> float:
    """Centered first difference."""
    if not h > 0:
        raise ValueError("step must be positive")
    return (f(x + h) - f(x - h)) / (2 * h)


def second_difference(f: Callable[[float], float], x: float, h: float) -> float:
    """Centered second difference."""
    if not h > 0:
        raise ValueError("step must be positive")
    return (f(x + h) - 2 * f(x) + f(x - h)) / (h * h)
