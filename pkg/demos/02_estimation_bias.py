#!/usr/bin/env python
# Monte Carlo view of the estimation bias: the receiver sees g*T and eps/g.

import numpy as np

from seedcv import AttackConfig, DetectorModel, MdiParams, simulate_mdi_session
from seedcv.estimation import compute_moments, estimate_channel, estimate_standard_errors

params = MdiParams(L_AC_km=10, L_BC_km=10, eps_AC=0.05, eps_BC=0.05,
                   charlie_det=DetectorModel(0.6, 0.01))
print(f"true T_AC = {params.T_AC:.4f}, eps_AC = {params.eps_AC}")

for g in (1.0, 1.02, 1.5, 2.0, 3.0):
    batch = simulate_mdi_session(params, AttackConfig.symmetric(g), 10**6, seed=7)
    est = estimate_channel(compute_moments(batch), params.charlie_det)
    se = estimate_standard_errors(batch, params.charlie_det)
    print(f"g={g:<5} T_AC_hat={est.T_AC_hat:.4f}+-{se.T_AC_hat:.4f} (gT={g * params.T_AC:.4f})"
          f"  eps_AC_hat={est.eps_AC_hat:.4f}+-{se.eps_AC_hat:.4f} (eps/g={0.05 / g:.4f})")

# at 1e6 rounds the noise estimate is only good to ~0.04 SNU; the transmittance
# bias is the clearly resolved one. The noise bias follows analytically:
# the bias shrinks noise estimates, so moderate seeding already hides real noise
ratio = np.array([0.05 / g for g in (1.0, 1.02, 1.5, 2.0, 3.0)]) / 0.05
print("apparent noise fraction:", np.round(ratio, 3))
