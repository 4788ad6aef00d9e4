"""Laser seeding attack as a scalar intensity gain on a source.

Injected light widens the emitted pulse and raises its energy. The only
quantity that matters downstream is the ratio ``g`` of attacked to nominal
pulse intensity: quadratures scale by ``sqrt(g)`` and modulation variances
by ``g``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import QuadraturePair


@dataclass(frozen=True)
class PowerTrace:
    """Sampled instantaneous power over one pulse period.

    Parameters
    ----------
    t : array_like
        Strictly increasing sample times within ``[0, period_T]``.
    P : array_like
        Non-negative instantaneous power at each time.
    period_T : float
        Pulse period.
    mu : float
        Detection coefficient converting integrated power to intensity.
    """

    t: np.ndarray
    P: np.ndarray
    period_T: float
    mu: float = 1.0

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        P = np.asarray(self.P, dtype=float)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "P", P)
        if t.ndim != 1 or t.shape != P.shape:
            raise ValueError("t and P must be 1-d arrays of equal length")
        if t.size < 2:
            raise ValueError("a power trace needs at least 2 samples")
        if np.any(np.diff(t) <= 0):
            raise ValueError("sample times must be strictly increasing")
        if t[0] < 0 or t[-1] > self.period_T:
            raise ValueError("sample times must lie within [0, period_T]")
        if np.any(P < 0):
            raise ValueError("power must be non-negative")
        if not self.mu > 0:
            raise ValueError("detection coefficient mu must be positive")

    @classmethod
    def from_csv(cls, path, period_T: float, mu: float = 1.0) -> PowerTrace:
        """Read a two-column ``t,P`` CSV with a header row."""
        with open(Path(path), newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            next(reader)
            rows = [(float(r[0]), float(r[1])) for r in reader if r]
        if not rows:
            raise ValueError(f"{path}: no samples")
        t, P = zip(*rows)
        return cls(np.array(t), np.array(P), period_T, mu)


def intensity_from_power_trace(trace: PowerTrace) -> float:
    """Pulse intensity ``mu * integral P(t) dt`` by the trapezoidal rule.

    Power outside the sampled time span counts as zero.
    """
    return float(trace.mu * np.trapezoid(trace.P, trace.t))


def seeding_gain_from_intensities(I_attacked: float, I_nominal: float) -> float:
    if not I_nominal > 0:
        raise ValueError(f"nominal intensity must be positive, got {I_nominal}")
    g = I_attacked / I_nominal
    if g < 1:
        raise ValueError(
            f"attacked intensity {I_attacked} below nominal {I_nominal}; "
            "seeding cannot reduce intensity"
        )
    return g


def _check_gain(g):
    if np.any(np.asarray(g) < 1):
        raise ValueError(f"seeding gain must be >= 1, got {g}")


def apply_seeding_to_state(q: QuadraturePair, g: float) -> QuadraturePair:
    _check_gain(g)
    s = math.sqrt(g)
    return QuadraturePair(s * q.x, s * q.p)


def apply_seeding_to_variance(V: float, g: float) -> float:
    if not V > 0:
        raise ValueError(f"variance must be positive, got {V}")
    _check_gain(g)
    return g * V
