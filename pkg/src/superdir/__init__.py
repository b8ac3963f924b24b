"""superdir: superdirective multi-user precoding on compact antenna arrays.

A research simulation library covering the full chain for arrays with
sub-half-wavelength spacing: mutual-coupling impedance models, coupled
channel synthesis, coupling-aware MMSE channel estimation, superdirective
precoder families with closed-form interference nulling, ohmic-loss
regularization, wideband per-subcarrier beamforming, and a deterministic
Monte-Carlo harness with CSV output (CLI: `superdir`).
"""

from ._version import __version__
from .errors import (ConfigError, IllConditionedWarning,
                     InfeasibleChannelError, ParameterError,
                     SingularMatrixError, SuperdirError)
from .em_array import (RADIATION_RESISTANCE_DIPOLE, ArrayConfig, SpdSolver,
                       dipole_loss_resistance, directivity,
                       directivity_pattern, impedance_matrix,
                       load_coupling_matrix, max_directivity,
                       regularized_impedance, save_coupling_matrix,
                       solve_spd, steering_vector, synth_coupling_matrix)
from .channel import (ChannelRealization, CovarianceSet, MultipathSpec,
                      analytic_covariance, apply_coupling, block_covariance,
                      draw_channel)
from .estimation import (LinearEstimator, PilotBook, ReceivedBlock,
                         fca_estimator, make_pilots, normalized_error,
                         synth_uplink, trad_estimator)
from .precoding import (NullSpaceBasis, build_weights, insp, mrt,
                        normalize_power, null_space_basis, oracle_max_gain,
                        power_gain, radiation_efficiency, rinsp, sp, zf)
from .wideband import (SubcarrierGrid, WidebandPlan, channel_across_grid,
                       measured_half_power_offset,
                       predicted_half_power_offset, steering_at_freq,
                       wideband_precode, z_at_freq)
from .simharness import (ResultRow, ResultTable, ScenarioConfig,
                         downlink_snr_to_noise, endfire_sectors,
                         render_pattern, run_estimation_sweep,
                         run_gain_sweep, run_se_sweep, run_wideband_sweep,
                         spectral_efficiency, training_snr_to_noise)

__all__ = [
    "__version__",
    # errors
    "SuperdirError", "ParameterError", "ConfigError", "SingularMatrixError",
    "InfeasibleChannelError", "IllConditionedWarning",
    # array / electromagnetics
    "ArrayConfig", "steering_vector", "impedance_matrix",
    "regularized_impedance", "dipole_loss_resistance",
    "RADIATION_RESISTANCE_DIPOLE", "SpdSolver", "solve_spd",
    "max_directivity", "directivity", "directivity_pattern",
    "synth_coupling_matrix", "save_coupling_matrix", "load_coupling_matrix",
    # channel
    "MultipathSpec", "ChannelRealization", "CovarianceSet", "draw_channel",
    "apply_coupling", "analytic_covariance", "block_covariance",
    # estimation
    "PilotBook", "ReceivedBlock", "LinearEstimator", "make_pilots",
    "synth_uplink", "fca_estimator", "trad_estimator", "normalized_error",
    # precoding
    "mrt", "zf", "sp", "insp", "rinsp", "oracle_max_gain", "NullSpaceBasis",
    "null_space_basis", "power_gain", "radiation_efficiency",
    "normalize_power", "build_weights",
    # wideband
    "SubcarrierGrid", "WidebandPlan", "z_at_freq", "steering_at_freq",
    "channel_across_grid", "wideband_precode", "predicted_half_power_offset",
    "measured_half_power_offset",
    # harness
    "ScenarioConfig", "endfire_sectors", "ResultRow", "ResultTable",
    "spectral_efficiency", "downlink_snr_to_noise", "training_snr_to_noise",
    "run_gain_sweep", "run_se_sweep", "run_estimation_sweep",
    "run_wideband_sweep", "render_pattern",
]
