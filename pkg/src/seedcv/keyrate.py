"""Asymptotic secret key rates for one-way GMCS CVQKD and CV-MDI-QKD.

Both protocols use reverse reconciliation against collective attacks:
``K = beta * I_AB - chi_BE``. The MDI scheme is mapped onto an equivalent
one-way heterodyne link with transmittance ``T_m`` and excess noise ``eps_m``
once Bob's displacement gain is chosen to minimise ``eps_m``.

Key rates are returned unclamped; ``feasible`` marks ``K > 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import MdiParams, OneWayParams, UnphysicalStateError

SNAP_TOL = 1e-9
# Splitting a nearly degenerate eigenvalue pair from (sum, product) loses about
# half the significant digits, so the lambda >= 1 test allows ~sqrt(machine eps).
LAMBDA_TOL = 1e-7


@dataclass(frozen=True)
class EffectiveOneWayParams:
    T_m: float
    eps_m: float
    k: float

    @property
    def chi_line(self) -> float:
        return 1 / self.T_m - 1 + self.eps_m


@dataclass(frozen=True)
class CovarianceMatrixAB:
    """Two-mode covariance ``[[a I, c Z], [c Z, b I]]`` in SNU."""

    a: float
    b: float
    c: float

    @classmethod
    def mdi(cls, V_A: float, eff: EffectiveOneWayParams) -> CovarianceMatrixAB:
        T, e = eff.T_m, eff.eps_m
        return cls(V_A + 1, T * V_A + 1 + T * e, math.sqrt(T * ((V_A + 1) ** 2 - 1)))

    @property
    def is_physical(self) -> bool:
        return self.a >= 1 - SNAP_TOL and self.b >= 1 - SNAP_TOL and \
            self.a * self.b - self.c**2 >= 1 - SNAP_TOL

    def matrix(self) -> np.ndarray:
        I, Z = np.eye(2), np.diag([1.0, -1.0])
        return np.block([[self.a * I, self.c * Z], [self.c * Z, self.b * I]])


@dataclass(frozen=True)
class KeyRateReport:
    I_AB: float
    chi_BE: float
    lambdas: tuple[float, ...]
    K: float

    @property
    def feasible(self) -> bool:
        return self.K > 0


def g_entropy(x: float) -> float:
    """Bosonic entropy ``G(x) = (x+1) log2(x+1) - x log2 x`` with ``G(0) = 0``."""
    if x < -SNAP_TOL:
        raise UnphysicalStateError(f"G(x) undefined for x = {x}")
    if x <= 0:
        return 0.0
    return (x + 1) * math.log2(x + 1) - x * math.log2(x)


def _sym_entropy(lam: float) -> float:
    return g_entropy(max((lam - 1) / 2, 0.0))


def _two_roots(A: float, B: float, what: str) -> tuple[float, float]:
    """Roots of ``l^4 - A l^2 + B``, returned as (larger, smaller) ``l``."""
    disc = A * A - 4 * B
    if disc < 0:
        if disc < -SNAP_TOL * max(1.0, A * A):
            raise UnphysicalStateError(f"{what}: negative discriminant {disc}")
        disc = 0.0
    r = math.sqrt(disc)
    hi = (A + r) / 2
    # cancellation-free smaller root via product hi * lo = B
    lo = B / hi if hi > 0 else (A - r) / 2
    if lo < 0:
        raise UnphysicalStateError(f"{what}: negative squared symplectic eigenvalue")
    return math.sqrt(hi), math.sqrt(lo)


def _two_mode_lambdas(a: float, b: float, c2: float, what: str) -> tuple[float, float]:
    """Symplectic eigenvalues of ``[[a I, c Z], [c Z, b I]]`` with ``c2 = c**2``.

    Uses ``A^2 - 4B = (a - b)^2 ((a + b)^2 - 4 c^2)``, which avoids the
    cancellation of the generic quartic near a pure state.
    """
    s2 = (a + b) ** 2 - 4 * c2
    if s2 < 0:
        raise UnphysicalStateError(f"{what}: negative discriminant {s2}")
    s = math.sqrt(s2)
    return (s + abs(b - a)) / 2, (s - abs(b - a)) / 2


def _check_lambdas(lams, what):
    for lam in lams:
        if lam < 1 - LAMBDA_TOL:
            raise UnphysicalStateError(f"{what}: symplectic eigenvalue {lam} < 1")


# --- CV-MDI-QKD --------------------------------------------------------------

def mdi_effective_params(T_AC: float, T_BC: float, eps_AC: float, eps_BC: float,
                         V_B: float) -> EffectiveOneWayParams:
    """Equivalent one-way link with the noise-minimising displacement gain.

    Transmittances only need to be positive, so estimated values above one
    (seeded estimates) can be passed through.
    """
    if not (T_AC > 0 and T_BC > 0):
        raise ValueError("transmittances must be positive")
    if not V_B > 0:
        raise ValueError("V_B must be positive")
    k = math.sqrt(2 * V_B / (T_BC * (V_B + 2)))
    T_m = T_AC / 2 * k * k
    eps_m = T_BC / T_AC * (eps_BC - 2) + eps_AC + 2 / T_AC
    return EffectiveOneWayParams(T_m, eps_m, k)


def mdi_mutual_information(V_A: float, eff: EffectiveOneWayParams) -> float:
    chi = eff.chi_line
    if not eff.T_m > 0:
        raise ValueError("T_m must be positive")
    if 1 + chi <= 0:
        raise UnphysicalStateError(f"1 + chi_line = {1 + chi} <= 0")
    return math.log2((V_A + 1 + chi) / (1 + chi))


def mdi_holevo(V_A: float, eff: EffectiveOneWayParams) -> tuple[float, tuple[float, float, float]]:
    """Holevo bound on Eve's information and the three symplectic eigenvalues.

    The first two belong to the joint Alice-Bob state, the third to Alice's
    mode conditioned on Bob's heterodyne outcome.
    """
    T, e, V = eff.T_m, eff.eps_m, V_A
    # A = a^2 + b^2 - 2c^2 and B = (ab - c^2)^2 for the joint covariance entries
    lam1, lam2 = _two_mode_lambdas(V + 1, T * V + T * e + 1, T * (V * V + 2 * V),
                                   "MDI joint state")
    lam3 = ((T * e + 2) * (V + 1) - T * V) / (T * (e + V) + 2)
    lams = (lam1, lam2, lam3)
    _check_lambdas(lams, "MDI")
    chi = _sym_entropy(lam1) + _sym_entropy(lam2) - _sym_entropy(lam3)
    return chi, lams


def mdi_keyrate_from_effective(V_A: float, eff: EffectiveOneWayParams, beta: float) -> KeyRateReport:
    I_AB = mdi_mutual_information(V_A, eff)
    chi, lams = mdi_holevo(V_A, eff)
    return KeyRateReport(I_AB, chi, lams, beta * I_AB - chi)


def mdi_keyrate(V_A: float, V_B: float, T_AC: float, T_BC: float, eps_AC: float,
                eps_BC: float, beta: float) -> KeyRateReport:
    eff = mdi_effective_params(T_AC, T_BC, eps_AC, eps_BC, V_B)
    return mdi_keyrate_from_effective(V_A, eff, beta)


def mdi_attacked_params(T_AC: float, T_BC: float, eps_AC: float, eps_BC: float,
                        V_A: float, V_B: float, g: float):
    """Quantities primed by a common seeding gain ``g`` on both sources.

    Returns ``(V_A', V_B', T_m', eps_m')``: the true (brighter) modulation
    variances, the true equivalent transmittance for those variances, and the
    equivalent excess noise the unaware parties estimate.
    """
    if g < 1:
        raise ValueError(f"seeding gain must be >= 1, got {g}")
    V_A_p, V_B_p = g * V_A, g * V_B
    T_m_p = g * T_AC * V_B / (T_BC * (g * V_B + 2))
    eps_m_p = T_BC / T_AC * (eps_BC / g - 2) + eps_AC / g + 2 / (g * T_AC)
    return V_A_p, V_B_p, T_m_p, eps_m_p


def mdi_estimated_keyrate(V_A, V_B, T_AC, T_BC, eps_AC, eps_BC, beta, g) -> KeyRateReport:
    """Key rate the unaware parties compute under a common seeding gain ``g``.

    Seeding leaves the estimated ``T_m`` unchanged; only ``eps_m`` is biased.
    """
    true_eff = mdi_effective_params(T_AC, T_BC, eps_AC, eps_BC, V_B)
    eps_m_p = mdi_attacked_params(T_AC, T_BC, eps_AC, eps_BC, V_A, V_B, g)[3]
    return mdi_keyrate_from_effective(V_A, EffectiveOneWayParams(true_eff.T_m, eps_m_p, true_eff.k),
                                      beta)


def mdi_practical_keyrate(V_A, V_B, T_AC, T_BC, eps_AC, eps_BC, beta, g) -> KeyRateReport:
    """Key rate actually secured: brighter modulation, its ``T_m'``, true ``eps_m``."""
    true_eff = mdi_effective_params(T_AC, T_BC, eps_AC, eps_BC, V_B)
    V_A_p, V_B_p, T_m_p, _ = mdi_attacked_params(T_AC, T_BC, eps_AC, eps_BC, V_A, V_B, g)
    k_p = math.sqrt(2 * V_B_p / (T_BC * (V_B_p + 2)))
    return mdi_keyrate_from_effective(V_A_p, EffectiveOneWayParams(T_m_p, true_eff.eps_m, k_p),
                                      beta)


def mdi_link_args(params: MdiParams):
    return (params.V_A, params.V_B, params.T_AC, params.T_BC, params.eps_AC, params.eps_BC,
            params.beta)


def mdi_keyrate_pair(params: MdiParams, g: float) -> tuple[KeyRateReport, KeyRateReport]:
    """(estimated, practical) key-rate reports under seeding gain ``g``."""
    args = mdi_link_args(params)
    return mdi_estimated_keyrate(*args, g), mdi_practical_keyrate(*args, g)


# --- one-way GMCS, homodyne, trusted detector --------------------------------

def oneway_keyrate_raw(V_A0: float, T: float, eps: float, eta: float, nu_el: float,
                       beta: float) -> KeyRateReport:
    """One-way key rate from explicit link values.

    ``T`` is only required to be positive: a seeded estimate ``g*T`` may
    exceed one, and the result is then accepted as long as the implied
    state stays physical.
    """
    if not T > 0:
        raise ValueError(f"transmittance must be positive, got {T}")
    if not 0 < eta <= 1:
        raise ValueError(f"detection efficiency must lie in (0, 1], got {eta}")
    V = V_A0 + 1
    chi_line = 1 / T - 1 + eps
    chi_hom = ((1 - eta) + nu_el) / eta
    chi_tot = chi_line + chi_hom / T
    if 1 + chi_tot <= 0:
        raise UnphysicalStateError(f"1 + chi_tot = {1 + chi_tot} <= 0")
    I_AB = 0.5 * math.log2((V + chi_tot) / (1 + chi_tot))

    A = V * V * (1 - 2 * T) + 2 * T + T * T * (V + chi_line) ** 2
    B = T * T * (V * chi_line + 1) ** 2
    lam1, lam2 = _two_mode_lambdas(V, T * (V + chi_line), T * (V * V - 1), "one-way joint state")
    sqB = math.sqrt(B)
    denom = T * (V + chi_tot)
    C = (A * chi_hom + V * sqB + T * (V + chi_line)) / denom
    D = sqB * (V + sqB * chi_hom) / denom
    lam3, lam4 = _two_roots(C, D, "one-way conditional state")
    lams = (lam1, lam2, lam3, lam4)
    _check_lambdas(lams, "one-way")
    chi = _sym_entropy(lam1) + _sym_entropy(lam2) - _sym_entropy(lam3) - _sym_entropy(lam4)
    return KeyRateReport(I_AB, chi, lams, beta * I_AB - chi)


def oneway_keyrate(params: OneWayParams) -> KeyRateReport:
    return oneway_keyrate_raw(params.V_A0, params.T, params.eps, params.det.eta,
                              params.det.nu_el, params.beta)


def oneway_estimated_keyrate(params: OneWayParams, g: float) -> KeyRateReport:
    """Key rate from the naive estimates ``(V_A0, g*T, eps/g)``."""
    if g < 1:
        raise ValueError(f"seeding gain must be >= 1, got {g}")
    d = params.det
    return oneway_keyrate_raw(params.V_A0, g * params.T, params.eps / g, d.eta, d.nu_el,
                              params.beta)


def oneway_practical_keyrate(params: OneWayParams, g: float) -> KeyRateReport:
    """Key rate of the link as it really is: ``(g*V_A0, T, eps)``."""
    if g < 1:
        raise ValueError(f"seeding gain must be >= 1, got {g}")
    d = params.det
    return oneway_keyrate_raw(g * params.V_A0, params.T, params.eps, d.eta, d.nu_el, params.beta)


def oneway_keyrate_pair(params: OneWayParams, g: float) -> tuple[KeyRateReport, KeyRateReport]:
    return oneway_estimated_keyrate(params, g), oneway_practical_keyrate(params, g)
