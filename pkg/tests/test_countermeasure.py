import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from seedcv.core import DetectorModel, MdiParams, OneWayParams
from seedcv.countermeasure import (MonitorReading, corrected_mdi_keyrate, corrected_oneway_keyrate,
                                   monitor_gain, monitor_noise_sweep, read_monitor_csv)
from seedcv.estimation import ChannelEstimate, attacked_estimates_analytic
from seedcv.keyrate import mdi_link_args, mdi_practical_keyrate, oneway_practical_keyrate


@pytest.mark.parametrize("Im, Ir, g, below", [(1.02, 1.0, 1.02, False), (3, 1, 3, False),
                                              (0.9, 1.0, 0.9, True)])
def test_monitor_gain(Im, Ir, g, below):
    r = monitor_gain(MonitorReading(Im, Ir))
    assert r.g == pytest.approx(g, rel=1e-15)
    assert r.below_reference is below


def test_monitor_reading_validation():
    with pytest.raises(ValueError):
        MonitorReading(0.0, 1.0)
    with pytest.raises(ValueError):
        MonitorReading(1.0, -1.0)


@given(st.floats(1, 40), st.sampled_from([0.01, 0.05]), st.floats(1, 3))
def test_oneway_correction_recovers_practical(L, eps, g):
    p = OneWayParams(L_km=L, eps=eps)
    naive = (p.V_A0, g * p.T, eps / g)
    corrected = corrected_oneway_keyrate(naive, p.det, p.beta, g)
    practical = oneway_practical_keyrate(p, g)
    assert corrected.K == pytest.approx(practical.K, rel=1e-9, abs=1e-12)


@given(st.floats(0.5, 30), st.sampled_from([0.01, 0.05]), st.floats(1, 1.5),
       st.booleans())
def test_mdi_correction_recovers_practical(L, eps, g, sym):
    mk = MdiParams.symmetric if sym else MdiParams.extreme_asymmetric
    p = mk(L, eps_AC=eps, eps_BC=eps)
    naive = attacked_estimates_analytic(p.channel_AC, p.channel_BC, g)
    corrected = corrected_mdi_keyrate(naive, p.V_A, p.V_B, p.beta, g)
    practical = mdi_practical_keyrate(*mdi_link_args(p), g)
    assert corrected.K == pytest.approx(practical.K, rel=1e-9, abs=1e-12)


def test_correction_rejects_bad_inputs():
    det = DetectorModel(0.5, 0.01)
    with pytest.raises(ValueError):
        corrected_oneway_keyrate((4, 0.5, 0.01), det, 0.95, 0.5)
    with pytest.raises(ValueError):
        # a gain too small for the estimate leaves T above one
        corrected_oneway_keyrate((4, 1.5, 0.01), det, 0.95, 1.2)
    with pytest.raises(ValueError):
        corrected_mdi_keyrate(ChannelEstimate(0.0, 0.5, 0.01, 0.01), 40, 40, 0.95, 1.0)


def test_read_monitor_csv(tmp_path):
    path = tmp_path / "lo.csv"
    path.write_text("timestamp,source_id,intensity\n0.0,alice,1.02\n0.5,bob,0.99\n",
                    encoding="utf-8")
    rs = read_monitor_csv(path, {"alice": 1.0, "bob": 1.0})
    assert [r.source_id for r in rs] == ["alice", "bob"]
    assert monitor_gain(rs[0]).g == pytest.approx(1.02)
    with pytest.raises(KeyError):
        read_monitor_csv(path, {"alice": 1.0})
    bad = tmp_path / "bad.csv"
    bad.write_text("t,intensity\n0,1\n", encoding="utf-8")
    with pytest.raises(ValueError):
        read_monitor_csv(bad, {})


def test_monitor_noise_sweep():
    p = MdiParams.symmetric(5.0, eps_AC=0.05, eps_BC=0.05)
    rows = monitor_noise_sweep(p, 1.02, [0.0, 0.01], n_readings=500, seed=3)
    assert rows[0]["error"] == pytest.approx(0.0, abs=1e-9)
    assert rows[0]["g_hat"] == pytest.approx(1.02, rel=1e-12)
    assert math.isfinite(rows[1]["K_practical"])
    again = monitor_noise_sweep(p, 1.02, [0.0, 0.01], n_readings=500, seed=3)
    assert [r["g_hat"] for r in rows] == [r["g_hat"] for r in again]
