"""Center-outward deployment of the remaining PAs.

Each step linearizes the phase seen by every receive antenna around the
closest feasible point, lists the positions where the new PA would add in
phase with the channel accumulated so far, and places the PA at the middle
of the tightest cluster that contains one such position per antenna.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from . import oracle
from .center import DEFAULT_TOLERANCE, CenterSolution, inverse_path_loss, optimize_center
from .channel import (
    Scenario,
    UserArray,
    WaveguideParams,
    achievable_rate,
    channel_coefficients,
    phase_delay,
    received_snr,
)
from .errors import ModelViolationError, PlacementStateError
from .state import (
    BENCHMARK,
    ORACLE_GREEDY,
    PROPOSED,
    CandidateSet,
    PlacementResult,
    PlacementState,
    SpanSelection,
    StepRecord,
    center_index,
    wrap_phase,
)

DEFAULT_CANDIDATES = 4
TWO_PI = 2 * np.pi


def deployment_order(pa_count: int) -> list:
    """PA labels (1-based) in deployment order: center, rightward, then leftward."""
    if pa_count < 1:
        raise ValueError("at least one PA is required")
    c = center_index(pa_count)
    return list(range(c, pa_count + 1)) + list(range(c - 1, 0, -1))


def linear_phase_slope(wg: WaveguideParams, user: UserArray, m: int, x_ref: float) -> float:
    """Phase slope at ``x_ref`` with the lateral offset measured against ``d`` only."""
    return wg.wavenumber * (x_ref - user.positions[m]) / user.vertical_distance + wg.guided_wavenumber


def reference_position(state: PlacementState, n: int, wg: WaveguideParams) -> float:
    return state.reference_position(n, wg)


def candidate_positions(
    state: PlacementState,
    n: int,
    m: int,
    count: int,
    wg: WaveguideParams,
    user: UserArray,
    target_phase: Optional[float] = None,
) -> CandidateSet:
    """Positions where PA ``n`` would be phase-aligned at receive antenna ``m``.

    The first ``count`` alignments on PA ``n``'s side of its reference point,
    nearest first, under a first-order phase model. ``target_phase`` overrides
    the accumulated channel phase of antenna ``m``.

    Raises:
        ModelViolationError: if the linearized phase slope is not positive.
    """
    if count < 1:
        raise ValueError("need at least one candidate")
    side = state.direction(n)
    xs = state.reference_position(n, wg)
    theta_s = phase_delay(wg, user, m, xs)
    slope = linear_phase_slope(wg, user, m, xs)
    if not slope > 0:
        raise ModelViolationError(
            f"phase slope {slope:.6g} rad/m at x={xs:.6g} m for antenna {m} is not positive"
        )
    target = state.wrapped_phase[m] if target_phase is None else target_phase
    residual = float(wrap_phase(target - theta_s))
    if side < 0 and residual > 0:
        residual -= TWO_PI
    zs = range(0, side * count, side)
    cands = sorted(((z, xs + (residual + TWO_PI * z) / slope) for z in zs), key=lambda c: c[1])
    return CandidateSet(m, xs, theta_s, slope, tuple(cands))


def _values(s) -> list:
    if isinstance(s, CandidateSet):
        return list(s.positions)
    return list(s)


def min_span_select(candidate_sets: Sequence) -> SpanSelection:
    """Smallest-range window covering every candidate set (sliding window over the merged list).

    Among windows of equal span the first one in ascending scan order wins.
    """
    sets = [_values(s) for s in candidate_sets]
    if not sets or any(len(s) == 0 for s in sets):
        raise ValueError("every candidate set must be non-empty")
    merged = sorted((x, m) for m, s in enumerate(sets) for x in s)
    need = len(sets)
    counts = [0] * need
    covered = 0
    left = 0
    best = None
    for right, (_, m) in enumerate(merged):
        if counts[m] == 0:
            covered += 1
        counts[m] += 1
        while covered == need:
            span = merged[right][0] - merged[left][0]
            if best is None or span < best[0]:
                best = (span, left, right)
            lm = merged[left][1]
            counts[lm] -= 1
            if counts[lm] == 0:
                covered -= 1
            left += 1
    span, lo, hi = best
    chosen = [None] * need
    for x, m in merged[lo : hi + 1]:
        if chosen[m] is None:
            chosen[m] = x
    return SpanSelection(tuple(chosen), span, 0.5 * (merged[lo][0] + merged[hi][0]))


def _mirror(sel: SpanSelection) -> SpanSelection:
    return SpanSelection(tuple(-x for x in sel.chosen), sel.span, -sel.midpoint)


def next_index(state: PlacementState) -> int:
    order = deployment_order(state.pa_count)
    if state.k >= len(order):
        raise PlacementStateError("all PAs are already placed")
    return order[state.k]


def _commit(state, n, x, xs, wg, user, **diag):
    side = state.direction(n)
    clamped = side * (x - xs) < 0
    if clamped:
        x = xs
    new = state.with_pa(n, x, channel_coefficients(wg, user, x))
    record = StepRecord(k=new.k, pa_index=n, reference_x=xs, position=x, gain=new.gain, clamped=clamped, **diag)
    return new, record


def place_next(state: PlacementState, n: int, count: int, wg: WaveguideParams, user: UserArray):
    """Place PA ``n`` at the midpoint of the min-span cluster of aligned candidates.

    Returns the new state and a :class:`StepRecord`.
    """
    if n != next_index(state):
        raise PlacementStateError(f"PA {n} is not next in deployment order")
    side = state.direction(n)
    xs = state.reference_position(n, wg)
    sets = tuple(candidate_positions(state, n, m, count, wg, user) for m in range(user.count))
    if side > 0:
        selection = min_span_select(sets)
    else:
        # scan outward from the reference point so equal spans favor the nearest cluster
        selection = _mirror(min_span_select([[-x for x in s.positions] for s in sets]))
    return _commit(state, n, selection.midpoint, xs, wg, user, candidate_sets=sets, selection=selection)


def _finish(scenario: Scenario, state: PlacementState, scheme, center, records) -> PlacementResult:
    x = state.positions()
    h_center = channel_coefficients(scenario.waveguide, scenario.user, state.placed[state.center])
    gains = (float(np.sum(np.abs(h_center) ** 2)),) + tuple(r.gain for r in records)
    return PlacementResult(
        positions=x,
        snr=received_snr(scenario, x),
        rate=achievable_rate(scenario, x),
        scheme=scheme,
        center=center,
        steps=tuple(records),
        gains=gains,
    )


def place_all(
    scenario: Scenario,
    count: int = DEFAULT_CANDIDATES,
    tolerance: float = DEFAULT_TOLERANCE,
    center: Optional[CenterSolution] = None,
) -> PlacementResult:
    """Full two-layer placement: optimized center, then N-1 sequential steps."""
    wg, user = scenario.waveguide, scenario.user
    if center is None:
        center = optimize_center(user, tolerance)
    state = PlacementState.start(wg, user, scenario.pa_count, center.x_center)
    records = []
    for n in deployment_order(scenario.pa_count)[1:]:
        state, rec = place_next(state, n, count, wg, user)
        records.append(rec)
    return _finish(scenario, state, PROPOSED, center, records)


def benchmark_place(scenario: Scenario) -> PlacementResult:
    """Single-antenna baseline aimed at a virtual antenna in the middle of the user array.

    Each PA sits one full phase period (2*pi, under the linear phase model)
    beyond its inward neighbor as seen from the virtual antenna.
    """
    wg, user = scenario.waveguide, scenario.user
    xc = user.midpoint
    virtual = UserArray(np.array([xc]), user.vertical_distance)
    center = CenterSolution(xc, float(inverse_path_loss(user, xc)), "array-midpoint", False)
    state = PlacementState.start(wg, user, scenario.pa_count, xc)
    records = []
    for n in deployment_order(scenario.pa_count)[1:]:
        side = state.direction(n)
        xs = state.reference_position(n, wg)
        neighbor_phase = phase_delay(wg, virtual, 0, state.placed[n - side])
        cands = candidate_positions(state, n, 0, 1, wg, virtual, target_phase=neighbor_phase)
        x = cands.candidates[0][1]
        step = phase_delay(wg, virtual, 0, x) - neighbor_phase
        error = step - TWO_PI * round(step / TWO_PI)
        state, rec = _commit(state, n, x, xs, wg, user, candidate_sets=(cands,), phase_error=error)
        records.append(rec)
    return _finish(scenario, state, BENCHMARK, center, records)


def oracle_greedy_place(
    scenario: Scenario,
    grid_step: Optional[float] = None,
    periods: float = 4,
    refine_rounds: int = 2,
    tolerance: float = DEFAULT_TOLERANCE,
    center: Optional[CenterSolution] = None,
) -> PlacementResult:
    """Greedy reference: each PA at the dense-grid maximizer of the exact total gain."""
    wg, user = scenario.waveguide, scenario.user
    step = oracle.default_grid_step(wg) if grid_step is None else grid_step
    if not step > 0:
        raise ValueError("grid_step must be positive")
    if center is None:
        center = optimize_center(user, tolerance)
    state = PlacementState.start(wg, user, scenario.pa_count, center.x_center)
    records = []
    for n in deployment_order(scenario.pa_count)[1:]:
        xs = state.reference_position(n, wg)
        grid = oracle.search_window(state, n, wg, step, periods)
        x, _ = oracle.grid_argmax_gain(state, n, grid, wg, user, refine_rounds)
        state, rec = _commit(state, n, x, xs, wg, user)
        records.append(rec)
    return _finish(scenario, state, ORACLE_GREEDY, center, records)


def run_scheme(scenario: Scenario, scheme: str, count: int = DEFAULT_CANDIDATES, grid_step: Optional[float] = None):
    if scheme == PROPOSED:
        return place_all(scenario, count)
    if scheme == BENCHMARK:
        return benchmark_place(scenario)
    if scheme == ORACLE_GREEDY:
        return oracle_greedy_place(scenario, grid_step)
    raise ValueError(f"unknown scheme {scheme!r}")
