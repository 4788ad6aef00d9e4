"""Moment-based channel estimation and the bias a seeded source induces.

The relay outputs C and D carry enough second moments to recover both links
separately: the cross moment with the sender's record fixes the
transmittance, and the sum/difference of the output variances isolates each
link's noise. If the transmitted states were brighter than the records say
(seeding gain ``g``), the same estimators return ``g*T`` and ``eps/g``.
"""

from __future__ import annotations

import math
from dataclasses import astuple, dataclass, fields

import numpy as np

from .channel import SampleBatch
from .core import N0, ChannelTruth, DetectorModel


@dataclass(frozen=True)
class MomentSet:
    m_xA0_sq: float
    m_pB0_sq: float
    m_xC_sq: float
    m_pD_sq: float
    m_xA0_xC: float
    m_pB0_pD: float
    m_xC_xD: float
    m_pC_pD: float
    n: int = 0

    def __post_init__(self):
        for name in ("m_xA0_sq", "m_pB0_sq", "m_xC_sq", "m_pD_sq"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} is a variance and cannot be negative")

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self)[:-1])


MOMENT_NAMES = tuple(f.name for f in fields(MomentSet))[:-1]


@dataclass(frozen=True)
class ChannelEstimate:
    """Estimated link parameters.

    Excess noise estimates may come out slightly negative from sampling
    noise; they are kept as-is and flagged by :attr:`negative_excess_noise`.
    """

    T_AC_hat: float
    T_BC_hat: float
    eps_AC_hat: float
    eps_BC_hat: float

    @property
    def negative_excess_noise(self) -> bool:
        return self.eps_AC_hat < 0 or self.eps_BC_hat < 0

    def as_tuple(self) -> tuple[float, float, float, float]:
        return astuple(self)


def moment_products(batch: SampleBatch) -> np.ndarray:
    """Per-round products whose column means are the :class:`MomentSet` fields."""
    return np.column_stack([
        batch.x_A0 * batch.x_A0,
        batch.p_B0 * batch.p_B0,
        batch.x_C * batch.x_C,
        batch.p_D * batch.p_D,
        batch.x_A0 * batch.x_C,
        batch.p_B0 * batch.p_D,
        batch.x_C * batch.x_D,
        batch.p_C * batch.p_D,
    ])


def compute_moments(batch: SampleBatch) -> MomentSet:
    if batch.n == 0:
        raise ValueError("empty batch")
    means = moment_products(batch).mean(axis=0)
    return MomentSet(*(float(v) for v in means), n=batch.n)


def moment_standard_errors(batch: SampleBatch) -> np.ndarray:
    """Standard error of each sample moment, in :data:`MOMENT_NAMES` order."""
    Y = moment_products(batch)
    return Y.std(axis=0, ddof=1) / math.sqrt(batch.n)


def expected_moments(ch_AC: ChannelTruth, ch_BC: ChannelTruth, V_A: float, V_B: float,
                     det: DetectorModel, g_alice: float = 1.0, g_bob: float = 1.0,
                     u: float = 0.0, u_bob: float = 0.0, N0: float = N0) -> MomentSet:
    """Closed-form second moments of a session.

    Senders' moments use the un-seeded modulation variance; everything the
    relay sees uses the seeded one. Intercept-resend adds ``2u`` to the
    input-referred excess noise of its link.
    """
    eta, v_el = det.eta, det.nu_el * N0
    TA, TB = ch_AC.T, ch_BC.T
    VA_tx, VB_tx = g_alice * V_A * N0, g_bob * V_B * N0
    xiA, xiB = (ch_AC.eps + 2 * u) * N0, (ch_BC.eps + 2 * u_bob) * N0
    out_var = 0.5 * eta * (TA * VA_tx + TB * VB_tx) + N0 + v_el + 0.5 * eta * (TA * xiA + TB * xiB)
    out_cov = 0.5 * eta * (TA * VA_tx - TB * VB_tx) + 0.5 * eta * (TA * xiA - TB * xiB)
    return MomentSet(
        m_xA0_sq=V_A * N0,
        m_pB0_sq=V_B * N0,
        m_xC_sq=out_var,
        m_pD_sq=out_var,
        m_xA0_xC=math.sqrt(eta * TA / 2 * g_alice) * V_A * N0,
        m_pB0_pD=math.sqrt(eta * TB / 2 * g_bob) * V_B * N0,
        m_xC_xD=out_cov,
        m_pC_pD=out_cov,
    )


def _transmittance(cross, var, eta):
    return 2 * cross**2 / (eta * var**2)


def _excess_noise(total, cross, var, nu_el, N0):
    return (total - N0 - nu_el * N0) / (2 * (cross / var) ** 2 * N0) - var / N0


def estimate_channel(m: MomentSet, det: DetectorModel, N0: float = N0) -> ChannelEstimate:
    if not (m.m_xA0_sq > 0 and m.m_pB0_sq > 0):
        raise ValueError("sender modulation variance must be positive")
    if m.m_xA0_xC == 0 or m.m_pB0_pD == 0:
        raise ZeroDivisionError("zero sender/relay cross moment: no correlation to estimate from")
    eta, nu = det.eta, det.nu_el
    return ChannelEstimate(
        T_AC_hat=_transmittance(m.m_xA0_xC, m.m_xA0_sq, eta),
        T_BC_hat=_transmittance(m.m_pB0_pD, m.m_pB0_sq, eta),
        eps_AC_hat=_excess_noise(m.m_xC_sq + m.m_xC_xD, m.m_xA0_xC, m.m_xA0_sq, nu, N0),
        eps_BC_hat=_excess_noise(m.m_pD_sq - m.m_pC_pD, m.m_pB0_pD, m.m_pB0_sq, nu, N0),
    )


def estimate_standard_errors(batch: SampleBatch, det: DetectorModel,
                             N0: float = N0) -> ChannelEstimate:
    """Delta-method standard errors of :func:`estimate_channel` on ``batch``.

    Returned in a :class:`ChannelEstimate` whose fields hold the standard
    error of the corresponding estimate.
    """
    Y = moment_products(batch)
    mu = Y.mean(axis=0)
    cov = np.cov(Y, rowvar=False) / batch.n
    s_a, s_b, xc2, pd2, c_a, c_b, xcxd, pcpd = mu
    eta, nu = det.eta, det.nu_el
    i = {name: k for k, name in enumerate(MOMENT_NAMES)}

    def grad_T(c, s, ic, is_):
        g = np.zeros(8)
        g[ic] = 4 * c / (eta * s**2)
        g[is_] = -4 * c**2 / (eta * s**3)
        return g

    def grad_eps(q, c, s, iq, sign, ic, is_):
        # q is the relay variance combination, sign is the coefficient of its cross term
        r = q - N0 - nu * N0
        g = np.zeros(8)
        g[iq[0]] = s**2 / (2 * c**2 * N0)
        g[iq[1]] = sign * s**2 / (2 * c**2 * N0)
        g[ic] = -r * s**2 / (c**3 * N0)
        g[is_] = r * s / (c**2 * N0) - 1 / N0
        return g

    grads = [
        grad_T(c_a, s_a, i["m_xA0_xC"], i["m_xA0_sq"]),
        grad_T(c_b, s_b, i["m_pB0_pD"], i["m_pB0_sq"]),
        grad_eps(xc2 + xcxd, c_a, s_a, (i["m_xC_sq"], i["m_xC_xD"]), 1.0,
                 i["m_xA0_xC"], i["m_xA0_sq"]),
        grad_eps(pd2 - pcpd, c_b, s_b, (i["m_pD_sq"], i["m_pC_pD"]), -1.0,
                 i["m_pB0_pD"], i["m_pB0_sq"]),
    ]
    return ChannelEstimate(*(math.sqrt(float(g @ cov @ g)) for g in grads))


def attacked_estimates_analytic(truth_AC: ChannelTruth, truth_BC: ChannelTruth,
                                g: float) -> ChannelEstimate:
    """What an unaware receiver estimates when both sources carry gain ``g``."""
    if g < 1:
        raise ValueError(f"seeding gain must be >= 1, got {g}")
    return ChannelEstimate(g * truth_AC.T, g * truth_BC.T, truth_AC.eps / g, truth_BC.eps / g)


def pir_excess_noise(eps_t: float, u: float, g: float) -> float:
    """Estimated excess noise ``(eps_t + 2u)/g`` under seeding plus partial intercept-resend."""
    if not 0 <= u <= 1:
        raise ValueError(f"intercept fraction must lie in [0, 1], got {u}")
    if g < 1:
        raise ValueError(f"seeding gain must be >= 1, got {g}")
    if eps_t < 0:
        raise ValueError(f"technical excess noise must be >= 0, got {eps_t}")
    return (eps_t + 2 * u) / g


def concealment_gain(eps_t: float, u: float, eps_target: float) -> float:
    """Smallest gain that pulls the estimated noise down to ``eps_target``."""
    if not eps_target > 0:
        raise ValueError(f"target excess noise must be positive, got {eps_target}")
    return (eps_t + 2 * u) / eps_target
