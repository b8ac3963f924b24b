"""Frequency-dependent array behavior and per-subcarrier precoding.

A compact array's electrical spacing scales with frequency, so both the
steering vectors and the coupling impedance drift across a wide band. The
peak of a superdirective beam is extremely narrow in frequency — its
half-power bandwidth shrinks roughly as the inverse square of the array
size — so wideband operation needs weights designed per subcarrier rather
than one narrowband design reused across the band.

Frequencies are absolute (Hz); ArrayConfig.carrier_freq pins the physical
geometry, and cfg.spacing stays the spacing in wavelengths *at the carrier*.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import MultipathSpec
from .em_array import ArrayConfig, impedance_matrix, solve_spd, steering_vector
from .errors import ParameterError
from .precoding import build_weights

_FULL_BEAM_CONSTANT = np.sqrt(4.0 * np.pi)  # endfire beam solid-angle constant


def _require_carrier(cfg: ArrayConfig) -> float:
    if cfg.carrier_freq is None:
        raise ParameterError("ArrayConfig.carrier_freq is required for wideband use")
    return cfg.carrier_freq


@dataclass(frozen=True)
class SubcarrierGrid:
    """A carrier frequency plus the absolute subcarrier frequencies around it."""

    carrier_freq: float
    frequencies: tuple[float, ...]

    def __post_init__(self):
        if not self.carrier_freq > 0:
            raise ParameterError("carrier_freq must be positive")
        freqs = tuple(float(f) for f in self.frequencies)
        if not freqs:
            raise ParameterError("at least one subcarrier frequency is required")
        if any(f <= 0 for f in freqs):
            raise ParameterError("subcarrier frequencies must be positive")
        object.__setattr__(self, "frequencies", freqs)

    @classmethod
    def uniform(cls, carrier_freq: float, total_span: float,
                num_subcarriers: int) -> "SubcarrierGrid":
        """Evenly spaced subcarriers centered on the carrier."""
        if num_subcarriers < 1:
            raise ParameterError("num_subcarriers must be positive")
        if total_span < 0:
            raise ParameterError("total_span must be non-negative")
        if num_subcarriers == 1:
            freqs = np.array([carrier_freq])
        else:
            freqs = carrier_freq + np.linspace(-0.5, 0.5, num_subcarriers) * total_span
        return cls(carrier_freq=carrier_freq, frequencies=tuple(freqs))

    @property
    def num_subcarriers(self) -> int:
        return len(self.frequencies)

    @property
    def ratios(self) -> np.ndarray:
        """Subcarrier frequencies relative to the carrier."""
        return np.asarray(self.frequencies) / self.carrier_freq


def z_at_freq(cfg: ArrayConfig, freq: float) -> np.ndarray:
    """Coupling impedance at an absolute frequency.

    The physical spacing is fixed, so the electrical spacing scales by
    freq / carrier_freq; entry (m, n) is sin(x)/x with
    x = 2*pi*spacing*(freq/carrier)*(n-m), unit diagonal.
    """
    fc = _require_carrier(cfg)
    if not freq > 0:
        raise ParameterError("freq must be positive")
    scaled = ArrayConfig(num_antennas=cfg.num_antennas,
                         spacing=cfg.spacing * (freq / fc))
    return impedance_matrix(scaled)


def steering_at_freq(cfg: ArrayConfig, freq: float, phi: float,
                     theta: float = np.pi / 2) -> np.ndarray:
    """Array response at an absolute frequency for direction (theta, phi)."""
    fc = _require_carrier(cfg)
    if not freq > 0:
        raise ParameterError("freq must be positive")
    m = np.arange(cfg.num_antennas)
    return np.exp(-2j * np.pi * m * cfg.spacing * (freq / fc)
                  * np.cos(phi) * np.sin(theta))


def channel_across_grid(cfg: ArrayConfig, grid: SubcarrierGrid,
                        spec: MultipathSpec, gains) -> np.ndarray:
    """One user's channel at every subcarrier, holding paths and gains fixed.

    Models a frequency-flat scattering geometry: the path angles and complex
    gains are common to the band and only the array response varies. Returns
    (num_subcarriers, num_antennas).
    """
    gains = np.asarray(gains, dtype=complex)
    if gains.shape != (spec.num_paths,):
        raise ParameterError("gains must have one entry per path")
    rows = []
    for f in grid.frequencies:
        E = np.stack([steering_at_freq(cfg, f, a) for a in spec.angles], axis=1)
        rows.append(spec.prefactor * (E @ gains))
    return np.stack(rows, axis=0)


@dataclass(frozen=True)
class WidebandPlan:
    """Per-subcarrier precoding weights for one channel realization."""

    grid: SubcarrierGrid
    kind: str
    weights: tuple[np.ndarray, ...]

    def weights_at(self, subcarrier_index: int) -> np.ndarray:
        return self.weights[subcarrier_index]


def wideband_precode(cfg: ArrayConfig, grid: SubcarrierGrid, channels,
                     kind: str = "insp", loss_ratio: float = 0.0) -> WidebandPlan:
    """Design the chosen precoder family independently on every subcarrier.

    channels is (num_subcarriers, num_antennas, num_users). Each subcarrier
    uses its own impedance matrix and its own channel matrix, so the per-user
    guarantees of the family (nulling, power normalization) hold exactly at
    every frequency in the grid.
    """
    H_all = np.asarray(channels, dtype=complex)
    if H_all.ndim != 3 or H_all.shape[0] != grid.num_subcarriers:
        raise ParameterError(
            "channels must be (num_subcarriers, num_antennas, num_users)")
    if H_all.shape[1] != cfg.num_antennas:
        raise ParameterError("channel antenna dimension disagrees with the array")
    ws = []
    for k, f in enumerate(grid.frequencies):
        Zf = z_at_freq(cfg, f)
        ws.append(build_weights(kind, H_all[k], Zf, loss_ratio=loss_ratio))
    return WidebandPlan(grid=grid, kind=kind, weights=tuple(ws))


def predicted_half_power_offset(num_antennas: int,
                                carrier_freq: float = 1.0) -> tuple[float, float]:
    """Predicted lower half-power frequency offset of an endfire superdirective beam.

    Returns (exact, asymptotic) offsets in the units of carrier_freq. The
    exact form is carrier * (1 - cos(sqrt(4*pi) / (2*M))); its small-angle
    limit is carrier * pi / (2*M^2), exhibiting the inverse-square shrinkage
    of usable bandwidth with array size.
    """
    if num_antennas < 1:
        raise ParameterError("num_antennas must be positive")
    if not carrier_freq > 0:
        raise ParameterError("carrier_freq must be positive")
    M = num_antennas
    exact = carrier_freq * (1.0 - np.cos(_FULL_BEAM_CONSTANT / (2.0 * M)))
    asymptotic = carrier_freq * np.pi / (2.0 * M ** 2)
    return float(exact), float(asymptotic)


def measured_half_power_offset(cfg: ArrayConfig, num_points: int = 401,
                               scan_floor: float = 0.9,
                               power_reference: str = "carrier",
                               diag_loading: float = 0.0) -> float:
    """Measured lower half-power frequency offset of the endfire beam.

    Designs maximum-directivity endfire weights at the carrier, sweeps the
    frequency down to scan_floor * carrier, and locates where the beam power
    first falls to half its carrier value (linear interpolation between grid
    points). power_reference picks the denominator of the scanned quotient:

    - "carrier": radiated power frozen at its carrier value, so the scan
      traces the beam *pattern* over frequency (the quantity the predicted
      offset describes);
    - "per-frequency": radiated power re-evaluated at each frequency, i.e.
      the realized directivity of the fixed weights.

    Returns the offset in Hz (carrier minus the crossing frequency).
    """
    fc = _require_carrier(cfg)
    if num_points < 3:
        raise ParameterError("num_points must be at least 3")
    if not 0 < scan_floor < 1:
        raise ParameterError("scan_floor must lie in (0, 1)")
    if power_reference not in ("carrier", "per-frequency"):
        raise ParameterError("power_reference must be 'carrier' or 'per-frequency'")
    Zc = impedance_matrix(cfg)
    e_c = steering_vector(cfg, 0.0)
    w = np.conj(solve_spd(Zc, e_c, diag_loading=diag_loading))
    freqs = np.linspace(scan_floor * fc, fc, num_points)
    m = np.arange(cfg.num_antennas)
    phases = np.exp(-2j * np.pi * np.outer(freqs / fc, m * cfg.spacing))
    beam = np.abs(phases @ w) ** 2
    if power_reference == "carrier":
        power = np.full(num_points, np.real(w @ Zc @ np.conj(w)))
    else:
        power = np.array([np.real(w @ z_at_freq(cfg, f) @ np.conj(w))
                          for f in freqs])
    D = beam / power
    half = D[-1] / 2.0
    below = np.where(D < half)[0]
    if below.size == 0 or below[-1] == num_points - 1:
        raise ParameterError(
            "half-power point not bracketed; lower scan_floor or adjust the array")
    j = int(below[-1])
    f_half = freqs[j] + (half - D[j]) * (freqs[j + 1] - freqs[j]) / (D[j + 1] - D[j])
    return float(fc - f_half)
