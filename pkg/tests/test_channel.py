import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pinchplace.channel import (
    LinkBudget,
    Scenario,
    UserArray,
    WaveguideParams,
    achievable_rate,
    aggregate_channel,
    channel_coefficient,
    channel_gain,
    dbm_to_watts,
    phase_delay,
    phase_slope,
    received_snr,
)
from pinchplace.oracle import finite_difference

from conftest import make_scenario


def test_waveguide_constants(wg):
    assert wg.wavelength == pytest.approx(0.0107068735, rel=1e-9)
    assert wg.guided_wavelength < wg.wavelength
    assert wg.eta == pytest.approx((wg.wavelength / (4 * np.pi)) ** 2, rel=1e-12)


@pytest.mark.parametrize(
    "kwargs",
    [dict(carrier_frequency=0.0), dict(effective_refractive_index=0.9), dict(feed_x=float("nan"))],
)
def test_waveguide_rejects_bad_values(kwargs):
    with pytest.raises(ValueError):
        WaveguideParams(**kwargs)


def test_user_array_invariants():
    u = UserArray([9.7, 9.9, 10.1, 10.3], 4.0)
    assert u.count == 4
    assert u.span == u.positions[-1] - u.positions[0]
    with pytest.raises(ValueError):
        UserArray([1.0, 1.0], 4.0)
    with pytest.raises(ValueError):
        UserArray([1.0], 0.0)
    with pytest.raises(ValueError):
        UserArray([], 1.0)


def test_link_budget():
    b = LinkBudget.from_dbm(30.0, -90.0)
    assert b.total_power == pytest.approx(1.0)
    assert b.transmit_snr == pytest.approx(1e12)
    with pytest.raises(ValueError):
        LinkBudget(0.0, 1.0)


def test_scenario_needs_a_pa(wg):
    with pytest.raises(ValueError):
        Scenario(wg, UserArray([1.0], 1.0), 0)


def test_phase_delay_single_turn(unit_wg):
    user = UserArray([0.0], 1.0)
    assert phase_delay(unit_wg, user, 0, 0.0) == pytest.approx(2 * np.pi, abs=1e-12)


def test_phase_delay_two_turns(unit_wg):
    user = UserArray([0.5], 1.0)
    assert phase_delay(unit_wg, user, 0, 0.5) == pytest.approx(4 * np.pi, abs=1e-12)


def test_phase_delay_matches_high_precision(pair):
    # 50-digit evaluation of the same expression, frozen
    expected = 10563.79234181343846258261
    for m in range(2):
        assert phase_delay(pair.waveguide, pair.user, m, 10.0) == pytest.approx(expected, rel=1e-14)


def test_phase_delay_live_mpmath(pair):
    mpmath.mp.dps = 40
    lam = mpmath.mpf(299792458) / mpmath.mpf(28e9)
    for m, xm in enumerate(["9.9", "10.1"]):
        for x in ["9.95", "10.0", "10.043"]:
            exact = 2 * mpmath.pi / lam * mpmath.sqrt((mpmath.mpf(xm) - mpmath.mpf(x)) ** 2 + 16) + 2 * mpmath.pi * mpmath.mpf(
                "1.4"
            ) / lam * mpmath.mpf(x)
            assert phase_delay(pair.waveguide, pair.user, m, float(x)) == pytest.approx(float(exact), rel=1e-14)


def test_antenna_index_is_checked(pair):
    with pytest.raises(IndexError):
        phase_delay(pair.waveguide, pair.user, 2, 10.0)
    with pytest.raises(IndexError):
        channel_coefficient(pair.waveguide, pair.user, -1, 10.0)


def test_coefficient_directly_below(wg):
    user = UserArray([3.0], 2.5)
    assert abs(channel_coefficient(wg, user, 0, 3.0)) == pytest.approx(np.sqrt(wg.eta) / 2.5, rel=1e-14)


def test_coefficient_decays_with_height(wg):
    mags = [abs(channel_coefficient(wg, UserArray([0.0], d), 0, 0.3)) for d in np.linspace(0.5, 50, 40)]
    assert all(b < a for a, b in zip(mags, mags[1:]))


def test_coefficient_polar_form(pair):
    h = channel_coefficient(pair.waveguide, pair.user, 1, 10.02)
    # 50-digit polar evaluation, frozen
    assert h.real == pytest.approx(0.0001282881729061523087, rel=1e-10)
    assert h.imag == pytest.approx(0.00016998754043853365182, rel=1e-10)


def test_aggregate_single_position(pair):
    wg, user = pair.waveguide, pair.user
    h = aggregate_channel(wg, user, [10.01])
    for m in range(2):
        assert h[m] == channel_coefficient(wg, user, m, 10.01)


def test_aggregate_destructive_pair(wg):
    user = UserArray([5.0], 3.0)
    q = wg.guided_wavelength / 4
    h = aggregate_channel(wg, user, [5.0 - q, 5.0 + q])
    assert abs(h[0]) <= 1e-12


def test_aggregate_matches_loop(pair):
    wg, user = pair.waveguide, pair.user
    x = 10.0 + wg.guided_wavelength * np.arange(-3, 5) * 1.01
    h = aggregate_channel(wg, user, x)
    for m in range(user.count):
        ref = 0j
        for xn in x:
            r = math.hypot(user.positions[m] - xn, 4.0)
            theta = 2 * math.pi / wg.wavelength * r + 2 * math.pi / wg.guided_wavelength * xn
            ref += math.sqrt(wg.eta) / r * complex(math.cos(theta), -math.sin(theta))
        assert abs(h[m] - ref) <= 1e-12 * abs(ref) + 1e-18


def test_aggregate_rejects_empty(pair):
    with pytest.raises(ValueError):
        aggregate_channel(pair.waveguide, pair.user, [])


def test_snr_zero_channel(wg):
    s = Scenario(wg, UserArray([5.0], 3.0), 2)
    q = wg.guided_wavelength / 4
    assert received_snr(s, [5.0 - q, 5.0 + q]) == pytest.approx(0.0, abs=1e-12)


def test_snr_single_pa_closed_form(wg):
    s = Scenario(wg, UserArray([5.0], 3.0), 1, LinkBudget.from_dbm(20.0))
    assert received_snr(s, [5.0]) == pytest.approx(s.budget.transmit_snr * wg.eta / 9.0, rel=1e-13)


def test_snr_length_mismatch(pair):
    with pytest.raises(ValueError):
        received_snr(pair, [10.0])


def test_snr_power_split(pair):
    x = 10.0 + 0.008 * np.arange(8)
    expected = pair.budget.transmit_snr / 8 * channel_gain(pair.waveguide, pair.user, x)
    assert received_snr(pair, x) == pytest.approx(expected, rel=1e-15)


def test_rate_zero_snr(wg):
    s = Scenario(wg, UserArray([0.0], 2.0), 2)
    q = wg.guided_wavelength / 4
    assert achievable_rate(s, [-q, q]) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("snr, rate", [(1.0, 1.0), (3.0, 2.0)])
def test_rate_values(wg, snr, rate):
    # one PA right below the antenna: snr = (P / noise) * eta / d^2
    d = 2.0
    s = Scenario(wg, UserArray([0.0], d), 1, LinkBudget(1.0, wg.eta / d**2 / snr))
    assert achievable_rate(s, [0.0]) == pytest.approx(rate, rel=1e-12)


def test_phase_increasing_where_slope_positive(wg):
    rng = np.random.default_rng(11)
    checked = 0
    for _ in range(1000):
        d = rng.uniform(0.5, 10)
        xm = rng.uniform(0, 20)
        user = UserArray([xm], d)
        x = xm + d * rng.uniform(-1 / wg.effective_refractive_index, 3)
        fd = finite_difference(lambda t: phase_delay(wg, user, 0, t), x, 1e-6)
        assert fd > 0
        assert phase_slope(wg, user, 0, x) > 0
        checked += 1
    assert checked == 1000


@settings(max_examples=60, deadline=None)
@given(
    shift=st.floats(-50, 50),
    positions=st.lists(st.floats(0, 2), min_size=1, max_size=4, unique=True),
    d=st.floats(0.5, 10),
)
def test_translation_invariance(shift, positions, d):
    positions = sorted(positions)
    if len(positions) > 1 and min(np.diff(positions)) < 1e-6:
        return
    base_wg = WaveguideParams(feed_x=-1.0)
    moved_wg = WaveguideParams(feed_x=-1.0 + shift)
    x = np.array([0.3, 0.31, 0.325, 0.4])
    s0 = Scenario(base_wg, UserArray(positions, d), 4)
    s1 = Scenario(moved_wg, UserArray(np.array(positions) + shift, d), 4)
    assert received_snr(s1, x + shift) == pytest.approx(received_snr(s0, x), rel=1e-9)


@settings(max_examples=50, deadline=None)
@given(
    positions=st.lists(st.floats(5, 15), min_size=1, max_size=12),
    d=st.floats(0.5, 10),
    power=st.floats(0, 40),
)
def test_gain_decomposition(positions, d, power):
    s = make_scenario([9.9, 10.1], d=d, n=len(positions), power_dbm=power)
    h = aggregate_channel(s.waveguide, s.user, positions)
    lhs = received_snr(s, positions) * s.pa_count / s.budget.transmit_snr
    assert lhs == pytest.approx(float(np.sum(np.abs(h) ** 2)), rel=1e-15)


def test_dbm_conversion():
    assert dbm_to_watts(30.0) == pytest.approx(1.0)
    assert dbm_to_watts(-90.0) == pytest.approx(1e-12)
