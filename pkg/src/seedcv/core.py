"""Shared domain types and shot-noise-unit conventions.

All variances are expressed in shot-noise units (SNU), i.e. as multiples of
the vacuum quadrature variance N0. Internally N0 is fixed to 1; functions
that divide by N0 still take it as an explicit argument.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

N0 = 1.0
DEFAULT_LOSS_DB_PER_KM = 0.2


class UnphysicalStateError(ArithmeticError):
    """Raised when a covariance matrix or channel violates physicality."""


@dataclass(frozen=True)
class ShotNoiseConvention:
    N0: float = N0

    def __post_init__(self):
        if not self.N0 > 0:
            raise ValueError(f"N0 must be positive, got {self.N0}")


@dataclass(frozen=True)
class QuadraturePair:
    """Quadrature amplitudes (x, p) in sqrt(N0) units.

    Both fields may be floats or equally shaped numpy arrays, which lets the
    channel simulator push whole sample blocks through the same functions.
    """

    x: float | np.ndarray
    p: float | np.ndarray

    @property
    def intensity(self):
        return self.x**2 + self.p**2


@dataclass(frozen=True)
class DetectorModel:
    eta: float = 1.0
    nu_el: float = 0.0

    def __post_init__(self):
        if not 0 < self.eta <= 1:
            raise ValueError(f"detection efficiency must lie in (0, 1], got {self.eta}")
        if self.nu_el < 0:
            raise ValueError(f"electronic noise must be >= 0, got {self.nu_el}")


@dataclass(frozen=True)
class ChannelTruth:
    T: float
    eps: float = 0.0

    def __post_init__(self):
        if not 0 < self.T <= 1:
            raise ValueError(f"transmittance must lie in (0, 1], got {self.T}")
        if self.eps < 0:
            raise ValueError(f"excess noise must be >= 0, got {self.eps}")

    def noise_variance(self, N0: float = N0) -> float:
        """Total added noise variance T*eps*N0 + N0 of the linear channel."""
        return self.T * self.eps * N0 + N0


@dataclass(frozen=True)
class OneWayParams:
    V_A0: float = 4.0
    L_km: float = 0.0
    loss_db_per_km: float = DEFAULT_LOSS_DB_PER_KM
    eps: float = 0.01
    det: DetectorModel = field(default_factory=lambda: DetectorModel(0.5, 0.01))
    beta: float = 0.95

    def __post_init__(self):
        if not self.V_A0 > 0:
            raise ValueError(f"modulation variance must be positive, got {self.V_A0}")
        if self.L_km < 0:
            raise ValueError(f"fiber length must be >= 0, got {self.L_km}")
        if not 0 < self.beta <= 1:
            raise ValueError(f"reconciliation efficiency must lie in (0, 1], got {self.beta}")

    @property
    def T(self) -> float:
        return transmittance_from_distance(self.L_km, self.loss_db_per_km)


@dataclass(frozen=True)
class MdiParams:
    V_A: float = 40.0
    V_B: float = 40.0
    L_AC_km: float = 0.0
    L_BC_km: float = 0.0
    loss_db_per_km: float = DEFAULT_LOSS_DB_PER_KM
    eps_AC: float = 0.01
    eps_BC: float = 0.01
    charlie_det: DetectorModel = field(default_factory=lambda: DetectorModel(0.6, 0.0))
    beta: float = 0.95

    def __post_init__(self):
        if not (self.V_A > 0 and self.V_B > 0):
            raise ValueError("modulation variances must be positive")
        if self.L_AC_km < 0 or self.L_BC_km < 0:
            raise ValueError("link lengths must be >= 0")
        if not 0 < self.beta <= 1:
            raise ValueError(f"reconciliation efficiency must lie in (0, 1], got {self.beta}")

    @classmethod
    def symmetric(cls, L_AB_km: float, **kwargs) -> MdiParams:
        return cls(L_AC_km=L_AB_km / 2, L_BC_km=L_AB_km / 2, **kwargs)

    @classmethod
    def extreme_asymmetric(cls, L_AB_km: float, **kwargs) -> MdiParams:
        return cls(L_AC_km=L_AB_km, L_BC_km=0.0, **kwargs)

    @property
    def L_AB_km(self) -> float:
        return self.L_AC_km + self.L_BC_km

    @property
    def is_symmetric(self) -> bool:
        return self.L_AC_km == self.L_BC_km

    @property
    def is_extreme_asymmetric(self) -> bool:
        return self.L_BC_km == 0

    @property
    def T_AC(self) -> float:
        return transmittance_from_distance(self.L_AC_km, self.loss_db_per_km)

    @property
    def T_BC(self) -> float:
        return transmittance_from_distance(self.L_BC_km, self.loss_db_per_km)

    @property
    def channel_AC(self) -> ChannelTruth:
        return ChannelTruth(self.T_AC, self.eps_AC)

    @property
    def channel_BC(self) -> ChannelTruth:
        return ChannelTruth(self.T_BC, self.eps_BC)


@dataclass(frozen=True)
class AttackConfig:
    """Seeding gains per source and intercept-resend fractions per link.

    ``u`` acts on the Alice-Charlie link; ``u_bob`` optionally on Bob-Charlie.
    """

    g_alice: float = 1.0
    g_bob: float = 1.0
    u: float = 0.0
    u_bob: float = 0.0

    def __post_init__(self):
        if self.g_alice < 1 or self.g_bob < 1:
            raise ValueError("seeding gains must be >= 1")
        for name in ("u", "u_bob"):
            val = getattr(self, name)
            if not 0 <= val <= 1:
                raise ValueError(f"{name} must lie in [0, 1], got {val}")

    @classmethod
    def symmetric(cls, g: float, u: float = 0.0) -> AttackConfig:
        return cls(g_alice=g, g_bob=g, u=u)


def transmittance_from_distance(L_km, loss_db_per_km=DEFAULT_LOSS_DB_PER_KM):
    """Fiber transmittance ``10**(-loss * L / 10)``."""
    if L_km < 0 or loss_db_per_km < 0:
        raise ValueError("fiber length and loss must be non-negative")
    return 10.0 ** (-loss_db_per_km * L_km / 10.0)


def coherent_from_polar(amplitude, theta) -> QuadraturePair:
    if np.any(np.asarray(amplitude) < 0):
        raise ValueError("amplitude must be non-negative")
    return QuadraturePair(amplitude * np.cos(theta), amplitude * np.sin(theta))
