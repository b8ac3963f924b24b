"""Multipath channel model for compact arrays, with optional mutual coupling.

A user's channel is a sum of plane-wave paths at fixed azimuth angles with
complex gains, scaled by a path-count normalization. Coupling at the array is
applied as a left multiplication by the transpose of the coupling matrix, so
uncoupled channels stay available for error accounting.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .em_array import ArrayConfig, steering_vector
from .errors import ParameterError


@dataclass(frozen=True)
class MultipathSpec:
    """Per-user multipath description.

    angles are path azimuths in radians. Gains are i.i.d. circular complex
    Gaussian with variance gain_variance unless fixed_gains pins them.
    normalization selects the path-count prefactor on the channel sum:
    "mean" divides by the number of paths, "sqrt" by its square root (the
    latter keeps average channel energy independent of the path count).
    """

    angles: tuple[float, ...]
    gain_variance: float = 1.0
    fixed_gains: tuple[complex, ...] | None = None
    normalization: str = "mean"

    def __post_init__(self):
        object.__setattr__(self, "angles", tuple(float(a) for a in self.angles))
        if len(self.angles) == 0:
            raise ParameterError("at least one path angle is required")
        if not self.gain_variance > 0:
            raise ParameterError("gain_variance must be positive")
        if self.fixed_gains is not None:
            gains = tuple(complex(g) for g in self.fixed_gains)
            if len(gains) != len(self.angles):
                raise ParameterError("fixed_gains must match the number of angles")
            object.__setattr__(self, "fixed_gains", gains)
        if self.normalization not in ("mean", "sqrt"):
            raise ParameterError("normalization must be 'mean' or 'sqrt'")

    @property
    def num_paths(self) -> int:
        return len(self.angles)

    @property
    def prefactor(self) -> float:
        P = self.num_paths
        return 1.0 / P if self.normalization == "mean" else 1.0 / np.sqrt(P)


@dataclass(frozen=True)
class ChannelRealization:
    """One drawn channel: the array-domain vector plus the draw that made it."""

    vector: np.ndarray
    angles: tuple[float, ...]
    gains: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "vector", np.asarray(self.vector, dtype=complex))
        object.__setattr__(self, "gains", np.asarray(self.gains, dtype=complex))


def draw_channel(cfg: ArrayConfig, spec: MultipathSpec, rng=None) -> ChannelRealization:
    """Draw one channel realization for the given multipath spec."""
    rng = np.random.default_rng(rng)
    P = spec.num_paths
    if spec.fixed_gains is not None:
        gains = np.asarray(spec.fixed_gains, dtype=complex)
    else:
        scale = np.sqrt(spec.gain_variance / 2.0)
        gains = scale * (rng.standard_normal(P) + 1j * rng.standard_normal(P))
    E = np.stack([steering_vector(cfg, a) for a in spec.angles], axis=1)
    h = spec.prefactor * (E @ gains)
    return ChannelRealization(vector=h, angles=spec.angles, gains=gains)


def apply_coupling(C: np.ndarray, channels: np.ndarray) -> np.ndarray:
    """Channel seen through a coupled array: transpose of C times the channel.

    Accepts a single vector or a matrix whose columns are per-user channels.
    """
    C = np.asarray(C)
    h = np.asarray(channels)
    if C.shape[0] != C.shape[1] or C.shape[1] != h.shape[0]:
        raise ParameterError("coupling matrix and channel dimensions disagree")
    return C.T @ h


def analytic_covariance(cfg: ArrayConfig, spec: MultipathSpec) -> np.ndarray:
    """Exact channel covariance conditioned on the path angles.

    Only defined for random Gaussian gains; with fixed gains the channel is
    deterministic given the angles and has no covariance in this sense.
    """
    if spec.fixed_gains is not None:
        raise ParameterError(
            "analytic covariance requires random gains, not fixed_gains")
    E = np.stack([steering_vector(cfg, a) for a in spec.angles], axis=1)
    scale = spec.gain_variance * spec.prefactor ** 2
    return scale * (E @ E.conj().T)


@dataclass(frozen=True)
class CovarianceSet:
    """Per-user channel covariances plus their block-diagonal stacking."""

    per_user: tuple[np.ndarray, ...]
    block: np.ndarray = field(repr=False)

    @property
    def num_users(self) -> int:
        return len(self.per_user)


def block_covariance(cfg: ArrayConfig, specs) -> CovarianceSet:
    """Covariances for a set of users, stacked for joint (all-user) estimation.

    The block ordering matches a column stack of per-user channel vectors:
    user u occupies rows/columns [u*M, (u+1)*M).
    """
    specs = list(specs)
    if not specs:
        raise ParameterError("at least one user spec is required")
    per_user = tuple(analytic_covariance(cfg, s) for s in specs)
    return CovarianceSet(per_user=per_user, block=sla.block_diag(*per_user))
