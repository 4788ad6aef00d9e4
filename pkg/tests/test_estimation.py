import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from seedcv.channel import SampleBatch, simulate_mdi_session
from seedcv.core import AttackConfig, ChannelTruth, DetectorModel, MdiParams
from seedcv.estimation import (MOMENT_NAMES, MomentSet, attacked_estimates_analytic,
                               compute_moments, concealment_gain, estimate_channel,
                               estimate_standard_errors, expected_moments, moment_standard_errors,
                               pir_excess_noise)


def test_compute_moments_zero_batch():
    z = np.zeros(4)
    m = compute_moments(SampleBatch(z, z, z, z, z, z))
    assert all(v == 0 for v in m.as_array())
    assert m.n == 4


def test_compute_moments_hand_arithmetic():
    x_A0 = np.array([1.0, -1.0])
    x_C = np.array([2.0, -2.0])
    z = np.zeros(2)
    m = compute_moments(SampleBatch(x_A0, z, x_C, z, z, z))
    assert m.m_xA0_xC == 2.0
    assert m.m_xA0_sq == 1.0 and m.m_xC_sq == 4.0


def test_roundtrip_example():
    det = DetectorModel(0.6, 0.01)
    ch = ChannelTruth(0.5, 0.05)
    m = expected_moments(ch, ChannelTruth(0.3, 0.02), 40, 40, det)
    est = estimate_channel(m, det)
    assert est.T_AC_hat == pytest.approx(0.5, abs=1e-10)
    assert est.eps_AC_hat == pytest.approx(0.05, abs=1e-10)
    assert est.T_BC_hat == pytest.approx(0.3, abs=1e-10)
    assert est.eps_BC_hat == pytest.approx(0.02, abs=1e-10)


channel = st.tuples(st.floats(1e-3, 1.0), st.floats(0.0, 0.5))


@given(channel, channel, st.floats(0.5, 100), st.floats(0.5, 100), st.floats(0.05, 1.0),
       st.floats(0.0, 0.2), st.floats(1.0, 5.0))
def test_roundtrip_and_bias_law(ac, bc, V_A, V_B, eta, nu, g):
    det = DetectorModel(eta, nu)
    ch_a, ch_b = ChannelTruth(*ac), ChannelTruth(*bc)
    clean = estimate_channel(expected_moments(ch_a, ch_b, V_A, V_B, det), det)
    assert clean.as_tuple() == pytest.approx((ac[0], bc[0], ac[1], bc[1]), rel=1e-9, abs=1e-10)
    biased = estimate_channel(expected_moments(ch_a, ch_b, V_A, V_B, det, g, g), det)
    want = attacked_estimates_analytic(ch_a, ch_b, g)
    assert biased.as_tuple() == pytest.approx(want.as_tuple(), rel=1e-9, abs=1e-10)


def test_estimate_channel_uses_N0():
    det = DetectorModel(0.7, 0.02)
    ch_a, ch_b = ChannelTruth(0.4, 0.1), ChannelTruth(0.8, 0.03)
    m = expected_moments(ch_a, ch_b, 10, 12, det, N0=2.5)
    est = estimate_channel(m, det, N0=2.5)
    assert est.as_tuple() == pytest.approx((0.4, 0.8, 0.1, 0.03), abs=1e-10)


def test_estimate_channel_errors():
    base = dict(m_xA0_sq=1.0, m_pB0_sq=1.0, m_xC_sq=2.0, m_pD_sq=2.0, m_xA0_xC=0.5,
                m_pB0_pD=0.5, m_xC_xD=0.0, m_pC_pD=0.0)
    det = DetectorModel()
    with pytest.raises(ValueError):
        estimate_channel(MomentSet(**{**base, "m_xA0_sq": 0.0}), det)
    with pytest.raises(ZeroDivisionError):
        estimate_channel(MomentSet(**{**base, "m_pB0_pD": 0.0}), det)


def test_negative_noise_flagged_not_clamped():
    det = DetectorModel(0.6, 0.0)
    m = expected_moments(ChannelTruth(0.5, 0.0), ChannelTruth(0.5, 0.0), 40, 40, det)
    shifted = MomentSet(**{**{k: getattr(m, k) for k in MOMENT_NAMES}, "m_xC_sq": m.m_xC_sq - 0.1})
    est = estimate_channel(shifted, det)
    assert est.eps_AC_hat < 0
    assert est.negative_excess_noise


@pytest.mark.parametrize("g, want", [(1, (0.1, 0.1, 0.05, 0.05)), (2, (0.2, 0.2, 0.025, 0.025))])
def test_attacked_estimates_analytic(g, want):
    ch = ChannelTruth(0.1, 0.05)
    assert attacked_estimates_analytic(ch, ch, g).as_tuple() == pytest.approx(want, rel=1e-15)


def test_pir_excess_noise_examples():
    assert pir_excess_noise(0.1, 0.1, 3) == pytest.approx(0.1, abs=1e-12)
    assert pir_excess_noise(0.1, 1.0, 21) == pytest.approx(0.1, abs=1e-12)
    assert pir_excess_noise(0.037, 0, 1) == 0.037


@given(st.floats(1e-3, 1), st.floats(0, 0.9), st.floats(1, 30), st.floats(0.01, 0.1))
def test_pir_monotone(eps, u, g, du):
    assert pir_excess_noise(eps, u, g + 0.5) < pir_excess_noise(eps, u, g)
    assert pir_excess_noise(eps, u + du, g) > pir_excess_noise(eps, u, g)


def test_concealment_gain_examples():
    assert concealment_gain(0.1, 0.1, 0.1) == pytest.approx(3, abs=1e-12)
    assert concealment_gain(0.1, 1.0, 0.1) == pytest.approx(21, abs=1e-12)
    assert concealment_gain(0.1, 0.0, 0.1) == 1
    with pytest.raises(ValueError):
        concealment_gain(0.1, 0.1, 0.0)


@given(st.floats(0, 1), st.floats(0, 1), st.floats(0.01, 1))
def test_concealment_gain_hides_noise(eps, u, target):
    g = concealment_gain(eps, u, target)
    if g >= 1:
        assert pir_excess_noise(eps, u, g) == pytest.approx(target, rel=1e-12)


PARAMS = MdiParams(L_AC_km=6, L_BC_km=2, eps_AC=0.05, eps_BC=0.03,
                   charlie_det=DetectorModel(0.6, 0.01))


def test_monte_carlo_moments_match_closed_form():
    b = simulate_mdi_session(PARAMS, AttackConfig.symmetric(1.5), 10**6, seed=21)
    m = compute_moments(b).as_array()
    ex = expected_moments(PARAMS.channel_AC, PARAMS.channel_BC, 40, 40, PARAMS.charlie_det,
                          1.5, 1.5).as_array()
    assert np.all(np.abs(m - ex) <= 5 * moment_standard_errors(b))


def test_monte_carlo_with_intercept_resend():
    att = AttackConfig(g_alice=3.0, g_bob=3.0, u=0.1)
    p = MdiParams(L_AC_km=2, L_BC_km=2, eps_AC=0.1, eps_BC=0.1,
                  charlie_det=DetectorModel(0.6, 0.01))
    b = simulate_mdi_session(p, att, 10**6, seed=22)
    est = estimate_channel(compute_moments(b), p.charlie_det)
    se = estimate_standard_errors(b, p.charlie_det)
    assert abs(est.eps_AC_hat - pir_excess_noise(0.1, 0.1, 3.0)) < 3 * se.eps_AC_hat
    assert abs(est.T_AC_hat - 3 * p.T_AC) < 3 * se.T_AC_hat


def test_delta_method_se_matches_replicate_spread():
    reps = [simulate_mdi_session(PARAMS, AttackConfig(), 10_000, seed=s) for s in range(200)]
    ests = np.array([estimate_channel(compute_moments(b), PARAMS.charlie_det).as_tuple()
                     for b in reps])
    ses = np.array([estimate_standard_errors(b, PARAMS.charlie_det).as_tuple() for b in reps])
    spread = ests.std(axis=0, ddof=1)
    # the SD of a 200-sample SD is ~5%, so 20% agreement is a loose but meaningful check
    np.testing.assert_allclose(ses.mean(axis=0), spread, rtol=0.2)


def test_error_shrinks_as_inverse_sqrt_n():
    ses = []
    for n in (10**4, 10**5, 10**6):
        b = simulate_mdi_session(PARAMS, AttackConfig(), n, seed=n)
        se = np.array(estimate_standard_errors(b, PARAMS.charlie_det).as_tuple())
        est = np.array(estimate_channel(compute_moments(b), PARAMS.charlie_det).as_tuple())
        truth = np.array([PARAMS.T_AC, PARAMS.T_BC, 0.05, 0.03])
        assert np.all(np.abs(est - truth) < 4 * se)
        ses.append(se)
    ratios = np.array(ses[:-1]) / np.array(ses[1:])
    np.testing.assert_allclose(ratios, math.sqrt(10), rtol=0.1)
