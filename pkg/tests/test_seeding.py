import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from seedcv.core import QuadraturePair
from seedcv.seeding import (PowerTrace, apply_seeding_to_state, apply_seeding_to_variance,
                            intensity_from_power_trace, seeding_gain_from_intensities)


def test_intensity_constant_and_zero():
    assert intensity_from_power_trace(PowerTrace([0, 1], [1, 1], 1.0, 1.0)) == 1.0
    assert intensity_from_power_trace(PowerTrace([0, 0.5, 1], [0, 0, 0], 1.0, 1.0)) == 0.0


def test_intensity_triangular_pulse_matches_dense_grid():
    trace = PowerTrace([0, 0.5, 1], [0, 2, 0], 1.0, mu=0.5)
    # independent oracle: left Riemann sum of the analytic triangle on a fine grid
    t = np.linspace(0, 1, 2_000_001)
    P = np.where(t < 0.5, 4 * t, 4 * (1 - t))
    oracle = 0.5 * float(np.sum(P[:-1]) * (t[1] - t[0]))
    assert oracle == pytest.approx(0.5, abs=1e-6)
    assert intensity_from_power_trace(trace) == pytest.approx(0.5, abs=1e-12)
    assert intensity_from_power_trace(trace) == pytest.approx(oracle, abs=1e-6)


@given(st.lists(st.floats(0, 10), min_size=4, max_size=30), st.floats(0.01, 10))
def test_intensity_linear_in_mu_and_additive(P, mu):
    t = np.linspace(0, 1, len(P))
    full = intensity_from_power_trace(PowerTrace(t, P, 1.0, mu))
    assert intensity_from_power_trace(PowerTrace(t, P, 1.0, 2 * mu)) == pytest.approx(
        2 * full, rel=1e-12, abs=1e-12)
    k = len(P) // 2
    left = intensity_from_power_trace(PowerTrace(t[:k + 1], P[:k + 1], 1.0, mu))
    right = intensity_from_power_trace(PowerTrace(t[k:], P[k:], 1.0, mu))
    assert left + right == pytest.approx(full, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("t, P", [([0.0], [1.0]), ([0, 0.5, 0.4], [1, 1, 1]), ([0, 2], [1, 1])])
def test_power_trace_validation(t, P):
    with pytest.raises(ValueError):
        PowerTrace(t, P, 1.0)


def test_power_trace_csv(tmp_path):
    path = tmp_path / "trace.csv"
    path.write_text("t,P\n0,0\n0.5,2\n1,0\n", encoding="utf-8")
    trace = PowerTrace.from_csv(path, period_T=1.0, mu=0.5)
    assert intensity_from_power_trace(trace) == pytest.approx(0.5)


@pytest.mark.parametrize("Ia, In, g", [(3.0, 1.0, 3.0), (1.0, 1.0, 1.0), (2.5, 2.0, 1.25)])
def test_seeding_gain(Ia, In, g):
    assert seeding_gain_from_intensities(Ia, In) == g


@pytest.mark.parametrize("Ia, In", [(1.0, 0.0), (0.5, 1.0)])
def test_seeding_gain_errors(Ia, In):
    with pytest.raises(ValueError):
        seeding_gain_from_intensities(Ia, In)


def test_apply_seeding_to_state():
    q = apply_seeding_to_state(QuadraturePair(1.0, -2.0), 4.0)
    assert (q.x, q.p) == (2.0, -4.0)
    q = QuadraturePair(0.3, -1.7)
    assert apply_seeding_to_state(q, 1.0) == q
    q = apply_seeding_to_state(QuadraturePair(3.0, 0.0), 1.02)
    assert q.x == pytest.approx(3.02985, abs=5e-6)
    assert q.x == pytest.approx(3 * math.exp(0.5 * math.log(1.02)), rel=1e-14)
    with pytest.raises(ValueError):
        apply_seeding_to_state(q, 0.99)


@given(st.floats(1, 50), st.floats(1, 50), st.floats(-100, 100), st.floats(-100, 100))
def test_seeding_composes(g1, g2, x, p):
    q = QuadraturePair(x, p)
    twice = apply_seeding_to_state(apply_seeding_to_state(q, g1), g2)
    once = apply_seeding_to_state(q, g1 * g2)
    assert twice.x == pytest.approx(once.x, rel=1e-12, abs=1e-12)
    assert twice.p == pytest.approx(once.p, rel=1e-12, abs=1e-12)
    assert twice.intensity == pytest.approx(g1 * g2 * q.intensity, rel=1e-12, abs=1e-12)


def test_apply_seeding_to_variance():
    assert apply_seeding_to_variance(4, 3) == 12
    assert apply_seeding_to_variance(40, 1) == 40
    assert apply_seeding_to_variance(40, 1.02) == pytest.approx(40.8, rel=1e-15)
    with pytest.raises(ValueError):
        apply_seeding_to_variance(0, 2)


def test_seeded_sample_variance(rng):
    n, g = 10**6, 3.0
    x = rng.normal(0, 2.0, n)
    xs = apply_seeding_to_state(QuadraturePair(x, x), g).x
    v0, v1 = x.var(), xs.var()
    assert v1 == pytest.approx(g * v0, rel=1e-12)
    # and against the population value: Var = 4g with SE 4g*sqrt(2/n)
    assert abs(v1 - 4 * g) < 3 * 4 * g * math.sqrt(2 / n)
