#!/usr/bin/env python
# Estimated vs practical key rate for the three reference scenarios.
# Writes keyrate_fig{3,5,6}.png next to this file.

import csv
import io
from pathlib import Path

import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from seedcv.experiments import run_figure, to_csv

here = Path(__file__).parent

for fig_id, title in [(3, "one-way GMCS"), (5, "MDI, symmetric"), (6, "MDI, extreme asymmetric")]:
    rows = list(csv.DictReader(io.StringIO(to_csv(*run_figure(fig_id)))))
    fig, ax = plt.subplots(figsize=(6, 4))
    for key in sorted({(r["epsilon"], r["g"]) for r in rows}):
        sel = [r for r in rows if (r["epsilon"], r["g"]) == key]
        L = np.array([float(r["distance_km"]) for r in sel])
        Ke = np.array([float(r["K_estimated"]) for r in sel])
        Kp = np.array([float(r["K_practical"]) for r in sel])
        # only positive rates make sense on a log axis; nan marks an unphysical estimate
        line, = ax.semilogy(L, np.where(Kp > 0, Kp, np.nan), label=f"eps={key[0]} g={key[1]} practical")
        if float(key[1]) > 1:
            ax.semilogy(L, np.where(Ke > 0, Ke, np.nan), "--", color=line.get_color(),
                        label=f"eps={key[0]} g={key[1]} estimated")
    ax.set_xlabel("distance (km)")
    ax.set_ylabel("K (bits/pulse)")
    ax.set_title(title)
    ax.legend(fontsize=6)
    fig.tight_layout()
    fig.savefig(here / f"keyrate_fig{fig_id}.png", dpi=120)
    plt.close(fig)

    unphysical = sum(r["estimate_physical"] == "0" for r in rows)
    print(f"figure {fig_id}: {len(rows)} points, {unphysical} with an unphysical naive estimate")
