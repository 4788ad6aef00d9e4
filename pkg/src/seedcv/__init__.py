"""Laser seeding attack on continuous-variable QKD.

Key-rate models for one-way GMCS and CV-MDI-QKD under a seeded light source,
a Monte Carlo simulator of the relay measurements, the moment estimators
that the attack biases, and the intensity-monitoring correction.
"""

from .core import (AttackConfig, ChannelTruth, DetectorModel, MdiParams, OneWayParams,
                   QuadraturePair, ShotNoiseConvention, UnphysicalStateError, coherent_from_polar,
                   transmittance_from_distance)
from .seeding import (PowerTrace, apply_seeding_to_state, apply_seeding_to_variance,
                      intensity_from_power_trace, seeding_gain_from_intensities)
from .channel import SampleBatch, apply_intercept_resend, sample_linear_channel, simulate_mdi_session
from .estimation import (ChannelEstimate, MomentSet, attacked_estimates_analytic, compute_moments,
                         concealment_gain, estimate_channel, estimate_standard_errors,
                         expected_moments, pir_excess_noise)
from .keyrate import (CovarianceMatrixAB, EffectiveOneWayParams, KeyRateReport, g_entropy,
                      mdi_attacked_params, mdi_effective_params, mdi_holevo, mdi_keyrate,
                      mdi_keyrate_pair, mdi_mutual_information, oneway_keyrate,
                      oneway_keyrate_pair)
from .countermeasure import (MonitorReading, corrected_mdi_keyrate, corrected_oneway_keyrate,
                             monitor_gain)

__version__ = "0.1.0"
