#!/usr/bin/env python
# How much seeding gain hides an intercept-resend attack of strength u.

import numpy as np

from seedcv.estimation import concealment_gain, pir_excess_noise

eps_t = 0.1
for u in np.linspace(0, 1, 11):
    g = concealment_gain(eps_t, u, eps_t)
    print(f"u={u:.1f}  g_min={g:5.1f}  apparent noise={pir_excess_noise(eps_t, u, g):.3f}")

# a full intercept-resend needs a 21x brighter source at eps_t = 0.1
print(concealment_gain(eps_t, 1.0, eps_t))
