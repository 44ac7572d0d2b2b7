"""Acceptance checks: heuristics against brute force, and the qualitative rate curves.

Every check returns a :class:`CheckResult`; nothing here asserts, so the same
functions back both the test suite and ``pinchplace verify``.
"""

from __future__ import annotations

import functools
import inspect
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import oracle
from .center import (
    inverse_path_loss,
    inverse_path_loss_derivative,
    inverse_path_loss_second_derivative,
    optimize_center,
)
from .channel import (
    LinkBudget,
    Scenario,
    UserArray,
    WaveguideParams,
    channel_coefficient,
    phase_delay,
    phase_slope,
    received_snr,
)
from .experiments import SweepConfig, run_sweep, trace_step
from .sequential import benchmark_place, min_span_select, oracle_greedy_place, place_all

SWEEP_POWERS_DBM = (10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0)
FIXED_POWER_DBM = 30.0


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    metrics: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.detail} ({self.seconds:.2f} s)"


def _timed(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res

    return wrapper


def random_user(rng, max_antennas=8, max_span_ratio=4.0, concave=None) -> UserArray:
    """Random array; ``concave`` forces the span below/above ``d / sqrt(3)``."""
    m = int(rng.integers(1, max_antennas + 1))
    d = float(rng.uniform(0.5, 10.0))
    limit = d / np.sqrt(3.0)
    if m == 1:
        span = 0.0
    elif concave is True:
        span = float(rng.uniform(0.01, 0.99)) * limit
    elif concave is False:
        span = float(rng.uniform(limit, max_span_ratio * d))
    else:
        span = float(rng.uniform(0.0, max_span_ratio * d))
    x0 = float(rng.uniform(0.0, 20.0))
    if m == 1:
        return UserArray(np.array([x0]), d)
    inner = np.sort(rng.uniform(0.0, 1.0, m - 2))
    return UserArray(x0 + span * np.concatenate(([0.0], inner, [1.0])), d)


def random_symmetric_user(rng, max_antennas=8) -> UserArray:
    """Mirror-symmetric array with span below ``d / sqrt(3)``."""
    m = int(rng.integers(2, max_antennas + 1))
    d = float(rng.uniform(0.5, 10.0))
    span = float(rng.uniform(0.01, 0.99)) * d / np.sqrt(3.0)
    half = np.sort(rng.uniform(0.0, 0.5, m // 2 - 1)) if m >= 4 else np.array([])
    offsets = np.concatenate(([0.5], half[::-1])) * span
    centre = np.array([0.0]) if m % 2 else np.array([])
    rel = np.concatenate((-offsets, centre, offsets[::-1]))
    xc = float(rng.uniform(0.0, 20.0))
    return UserArray(xc + rel, d)


def grid_argmax_L(user: UserArray, lo: float, hi: float, resolution: float = 1e-8) -> float:
    """Dense-grid maximizer of the inverse path loss, zooming until the cell is below ``resolution``."""
    if hi <= lo:
        return lo
    a, b = lo, hi
    while True:
        x = np.linspace(a, b, 2001)
        i = int(np.argmax(inverse_path_loss(user, x)))
        step = x[1] - x[0]
        if step <= resolution:
            return float(x[i])
        a, b = max(x[i] - 2 * step, lo), min(x[i] + 2 * step, hi)


@_timed
def check_sliding_window(n=1000, seed=0) -> CheckResult:
    """Sliding-window span equals the exhaustive minimum exactly."""
    rng = np.random.default_rng(seed)
    mismatches = 0
    for _ in range(n):
        m = int(rng.integers(2, 5))
        z = int(rng.integers(2, 7))
        sets = [list(rng.uniform(0.0, 1.0, z)) for _ in range(m)]
        if min_span_select(sets).span != oracle.exhaustive_min_span(sets).span:
            mismatches += 1
    return CheckResult("1 sliding-window exactness", mismatches == 0, f"{mismatches}/{n} span mismatches")


@_timed
def check_center_in_span(n=1000, seed=1, tolerance=1e-6) -> CheckResult:
    """The inverse path loss peaks inside the array span; concave below d/sqrt(3)."""
    rng = np.random.default_rng(seed)
    outside = 0
    not_concave = 0
    center_errors = []
    concave_count = 0
    for i in range(n):
        user = random_user(rng, concave=(i % 2 == 0))
        x1, xm, d = user.positions[0], user.positions[-1], user.vertical_distance
        dense = np.linspace(x1 - 3 * d, xm + 3 * d, 20001)
        # endpoints go in exactly; drop rounding-level neighbours that would tie with them
        dense = dense[(np.abs(dense - x1) > 1e-9) & (np.abs(dense - xm) > 1e-9)]
        grid = np.union1d(dense, user.positions[[0, -1]])
        best = grid[int(np.argmax(inverse_path_loss(user, grid)))]
        if not x1 <= best <= xm:
            outside += 1
        if user.span < d / np.sqrt(3.0):
            concave_count += 1
            interval = np.linspace(x1, xm, 1000)
            if user.span > 0 and np.any(inverse_path_loss_second_derivative(user, interval) >= 0):
                not_concave += 1
            ref = grid_argmax_L(user, x1, xm)
            center_errors.append(abs(optimize_center(user).x_center - ref))
    worst = max(center_errors) if center_errors else 0.0
    ok = outside == 0 and not_concave == 0 and worst <= tolerance
    detail = (
        f"argmax outside span {outside}/{n}; concave subset {concave_count}: "
        f"L''>=0 in {not_concave}, max |x_center - grid| = {worst:.2e} m (tol {tolerance:g})"
    )
    return CheckResult("2 path-loss peak location and concavity", ok, detail, metrics={"worst": worst})


@_timed
def check_symmetric_center(n=200, seed=2) -> CheckResult:
    """Symmetric arrays: the midpoint is stationary and is the grid maximizer."""
    rng = np.random.default_rng(seed)
    slope_fail = 0
    grid_fail = 0
    for _ in range(n):
        user = random_symmetric_user(rng)
        xc = user.midpoint
        interval = np.linspace(user.positions[0], user.positions[-1], 1001)
        scale = np.max(np.abs(inverse_path_loss_derivative(user, interval)))
        if abs(float(inverse_path_loss_derivative(user, xc))) > 1e-9 * scale:
            slope_fail += 1
        step = interval[1] - interval[0]
        best = interval[int(np.argmax(inverse_path_loss(user, interval)))]
        if abs(best - xc) > step:
            grid_fail += 1
    ok = slope_fail == 0 and grid_fail == 0
    return CheckResult(
        "3 symmetric-array center",
        ok,
        f"stationarity failures {slope_fail}/{n}, grid argmax off-center {grid_fail}/{n}",
    )


@_timed
def check_single_antenna(n=100, seed=3, wg=None) -> CheckResult:
    """M = 1: proposed positions sit on the oracle greedy maximizers."""
    wg = wg or WaveguideParams()
    lam = wg.wavelength
    rng = np.random.default_rng(seed)
    worst_dev = 0.0
    worst_ratio = np.inf
    for _ in range(n):
        user = UserArray(np.array([rng.uniform(5.0, 15.0)]), rng.uniform(1.0, 10.0))
        scenario = Scenario(wg, user, int(rng.integers(1, 17)), LinkBudget.from_dbm(rng.uniform(10.0, 40.0)))
        prop = place_all(scenario)
        ref = oracle_greedy_place(scenario, lam / 1000)
        worst_dev = max(worst_dev, float(np.max(np.abs(prop.positions - ref.positions))))
        worst_ratio = min(worst_ratio, prop.rate / ref.rate)
    ok = worst_dev <= lam / 100 and worst_ratio >= 0.999
    detail = f"max position gap {worst_dev / lam:.2e} lambda (tol 1e-2), min rate ratio {worst_ratio:.6f} (tol 0.999)"
    return CheckResult("4 single-antenna near-optimality", ok, detail)


def step_scenario(wg=None) -> Scenario:
    return Scenario(wg or WaveguideParams(), UserArray(np.array([9.9, 10.1]), 4.0), 8, LinkBudget.from_dbm(FIXED_POWER_DBM))


def _local_maxima(y: np.ndarray) -> np.ndarray:
    inner = np.flatnonzero((y[1:-1] >= y[:-2]) & (y[1:-1] >= y[2:])) + 1
    return inner


@_timed
def check_step_landscape(wg=None) -> CheckResult:
    """Placing the 5th of 8 PAs around a center at 10 m."""
    scenario = step_scenario(wg)
    wg = scenario.waveguide
    lam = wg.wavelength
    cfg = SweepConfig(scenario, "transmit_power_dBm", (FIXED_POWER_DBM,), ("proposed",))
    tr = trace_step(cfg, 2)
    near = np.abs(tr.x - tr.reference_x) <= wg.guided_wavelength
    lin_err = float(np.max(np.abs(tr.exact_phase[:, near] - tr.linear_phase[:, near])))
    peak_err = 0.0
    for m, cs in enumerate(tr.candidate_sets):
        peaks = tr.x[_local_maxima(tr.antenna_gain[m])]
        for xc in cs.positions:
            if tr.x[0] + lam / 100 < xc < tr.x[-1] - lam / 100:
                peak_err = max(peak_err, float(np.min(np.abs(peaks - xc))))
    _, g_best = oracle.grid_argmax_gain(tr.state, tr.pa_index, tr.grid, wg, scenario.user)
    ratio = tr.placed_gain / g_best
    ok = lin_err <= 0.05 and peak_err <= lam / 100 and ratio >= 0.95 and tr.state.placed[tr.state.center] == 10.0
    detail = (
        f"(a) linear-model error {lin_err:.4f} rad (tol 0.05); (b) candidate-to-peak {peak_err / lam:.2e} lambda "
        f"(tol 1e-2); (c) G_k ratio {ratio:.6f} (tol 0.95); placed at {tr.placed_x:.6f} m"
    )
    return CheckResult("5 single-step landscape", ok, detail)


def power_sweep_config(wg=None) -> SweepConfig:
    base = Scenario(wg or WaveguideParams(), UserArray(np.array([9.9, 10.1]), 4.0), 8, LinkBudget.from_dbm(30.0))
    return SweepConfig(base, "transmit_power_dBm", SWEEP_POWERS_DBM, ("proposed", "benchmark"))


def _rates(rows, scheme):
    return {r.axis_value: r.rate for r in rows if r.scheme == scheme}


@_timed
def check_power_sweep(wg=None, pa_counts=(8, 16, 32)) -> CheckResult:
    """Rate vs power for several PA counts: proposed >= benchmark, improving with N."""
    cfg = power_sweep_config(wg)
    curves = {}
    below = []
    for n in pa_counts:
        rows = run_sweep(replace(cfg, scenario=replace(cfg.scenario, pa_count=n)))
        prop, bench = _rates(rows, "proposed"), _rates(rows, "benchmark")
        curves[n] = prop
        for p in cfg.values:
            if prop[p] < bench[p]:
                below.append((n, p, prop[p] - bench[p]))
    not_monotone = [
        (p, a, b) for p in cfg.values for a, b in zip(pa_counts, pa_counts[1:]) if curves[b][p] < curves[a][p]
    ]
    ok = not below and not not_monotone
    worst = min((g for *_, g in below), default=0.0)
    by_n = sorted({n for n, *_ in below})
    detail = (
        f"proposed < benchmark at {len(below)} (N, power) points for N in {by_n} "
        f"(worst gap {worst:+.2e} bit/s/Hz); non-monotone in N at {len(not_monotone)} powers"
    )
    return CheckResult("6(i) rate vs power, N in {8,16,32}", ok, detail, metrics={"below": below})


@_timed
def check_antenna_sweep(wg=None) -> CheckResult:
    """Gap between schemes shrinks from two to four receive antennas."""
    base = Scenario(wg or WaveguideParams(), UserArray(np.array([9.7, 10.3]), 4.0), 16, LinkBudget.from_dbm(FIXED_POWER_DBM))
    rows = run_sweep(SweepConfig(base, "user_antenna_count_M", (2, 4), ("proposed", "benchmark")))
    prop, bench = _rates(rows, "proposed"), _rates(rows, "benchmark")
    gap2, gap4 = prop[2] - bench[2], prop[4] - bench[4]
    ok = gap4 < gap2
    return CheckResult(
        "6(ii) gap vs antenna count",
        ok,
        f"gap M=2 {gap2:+.3f}, M=4 {gap4:+.3f} bit/s/Hz at {FIXED_POWER_DBM:g} dBm",
        metrics={"gap2": gap2, "gap4": gap4},
    )


@_timed
def check_distance_sweep(wg=None, distances=tuple(float(d) for d in range(2, 11))) -> CheckResult:
    """Rate vs distance with a 0.4 m array: proposed falls monotonically, benchmark peaks in between.

    The benchmark shape is checked as: not monotone, maximum at an interior
    distance above its d=2 value, strictly falling beyond the maximum.
    """
    base = Scenario(wg or WaveguideParams(), UserArray(np.array([9.8, 10.2]), 4.0), 16, LinkBudget.from_dbm(FIXED_POWER_DBM))
    rows = run_sweep(SweepConfig(base, "user_distance_d_m", tuple(distances), ("proposed", "benchmark")))
    prop, bench = _rates(rows, "proposed"), _rates(rows, "benchmark")
    p = np.array([prop[d] for d in distances])
    b = np.array([bench[d] for d in distances])
    decreasing = bool(np.all(np.diff(p) < 0))
    db = np.diff(b)
    peak = int(np.argmax(b))
    hump = (
        bool(np.any(db > 0) and np.any(db < 0))
        and 0 < peak < len(b) - 1
        and b[peak] > b[0]
        and bool(np.all(db[peak:] < 0))
    )
    ok = decreasing and hump
    detail = (
        f"proposed strictly decreasing: {decreasing}; benchmark {b[0]:.2f} -> peak {b[peak]:.2f} "
        f"at d={distances[peak]:g} m -> {b[-1]:.2f}, rise-then-fall: {hump}"
    )
    return CheckResult("6(iii) rate vs distance", ok, detail)


@_timed
def check_derivatives(n=1000, seed=7, wg=None) -> CheckResult:
    """Analytic slopes and curvature against centered differences."""
    wg = wg or WaveguideParams()
    rng = np.random.default_rng(seed)
    worst = {"L'": 0.0, "L''": 0.0, "theta'": 0.0}
    for _ in range(n):
        user = random_user(rng)
        d = user.vertical_distance
        x = float(rng.uniform(user.positions[0] - 2 * d, user.positions[-1] + 2 * d))

        def L(t):
            return float(inverse_path_loss(user, t))

        a = float(inverse_path_loss_derivative(user, x))
        worst["L'"] = max(worst["L'"], abs(a - oracle.finite_difference(L, x, 1e-6)) / abs(a))
        a = float(inverse_path_loss_second_derivative(user, x))
        worst["L''"] = max(worst["L''"], abs(a - oracle.second_difference(L, x, 1e-4 * d)) / abs(a))
        m = int(rng.integers(user.count))
        a = phase_slope(wg, user, m, x)
        fd = oracle.finite_difference(lambda t: phase_delay(wg, user, m, t), x, 1e-6)
        worst["theta'"] = max(worst["theta'"], abs(a - fd) / abs(a))
    ok = all(v <= 1e-4 for v in worst.values())
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items()) + " (tol 1e-4)"
    return CheckResult("7 derivative checks", ok, detail)


def random_scenario(rng, wg=None, max_antennas=4, max_pa=32) -> Scenario:
    wg = wg or WaveguideParams()
    m = int(rng.integers(1, max_antennas + 1))
    d = float(rng.uniform(2.0, 10.0))
    span = float(rng.uniform(0.05, 0.6)) if m > 1 else 0.0
    user = UserArray.uniform(float(rng.uniform(5.0, 15.0)), span, m, d)
    return Scenario(wg, user, int(rng.integers(1, max_pa + 1)), LinkBudget.from_dbm(float(rng.uniform(10.0, 40.0))))


@_timed
def check_spacing(n=60, seed=8, wg=None) -> CheckResult:
    """Every scheme keeps adjacent PAs at least lambda/2 apart."""
    wg = wg or WaveguideParams()
    rng = np.random.default_rng(seed)
    worst = np.inf
    runs = 0
    scenarios = [random_scenario(rng, wg) for _ in range(n)]
    scenarios += [step_scenario(wg), power_sweep_config(wg).scenario]
    for scenario in scenarios:
        for fn in (place_all, benchmark_place, oracle_greedy_place):
            worst = min(worst, fn(scenario).min_spacing_slack(wg))
            runs += 1
    ok = worst >= -1e-12
    return CheckResult("8 spacing audit", ok, f"{runs} placements, min slack {worst:.3e} m (tol -1e-12)")


@_timed
def check_mrc_identity(n=100, seed=9, wg=None) -> CheckResult:
    """SNR equals (transmit SNR / N) * sum_m |h_m|^2, with h_m summed term by term."""
    wg = wg or WaveguideParams()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        scenario = random_scenario(rng, wg)
        user = scenario.user
        x = np.sort(rng.uniform(8.0, 12.0, scenario.pa_count))
        total = 0.0
        for m in range(user.count):
            h = 0j
            for xn in x:
                h += channel_coefficient(wg, user, m, xn)
            total += abs(h) ** 2
        expected = scenario.budget.transmit_snr / scenario.pa_count * total
        worst = max(worst, abs(received_snr(scenario, x) - expected) / expected)
    return CheckResult("9 MRC identity", worst <= 1e-12, f"max relative error {worst:.1e} (tol 1e-12)")


ALL_CHECKS = (
    check_sliding_window,
    check_center_in_span,
    check_symmetric_center,
    check_single_antenna,
    check_step_landscape,
    check_power_sweep,
    check_antenna_sweep,
    check_distance_sweep,
    check_derivatives,
    check_spacing,
    check_mrc_identity,
)


def run_all(seed=None) -> list:
    """Run every check; ``seed`` reseeds the randomized ones (default: fixed per-check seeds)."""
    results = []
    for i, check in enumerate(ALL_CHECKS):
        kwargs = {}
        if seed is not None and "seed" in inspect.signature(check).parameters:
            kwargs["seed"] = seed + i
        results.append(check(**kwargs))
    return results
