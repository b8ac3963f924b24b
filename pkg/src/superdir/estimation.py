"""Uplink pilot training and linear MMSE channel estimation.

The received pilot block is modeled in stacked (vectorized) form: with
per-user pilot sequences s_u and coupling matrix C, the design matrix has one
horizontal block kron(s_u, C^T) per user, acting on the stack of per-user
channel vectors. A coupling-aware estimator builds its MMSE filter from that
design matrix; a conventional one assumes an uncoupled array (C = I) and
therefore inherits a bias whenever coupling is present.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .channel import CovarianceSet
from .errors import ParameterError


def make_pilots(num_users: int, pilot_len: int, kind: str = "orthogonal",
                rng=None) -> np.ndarray:
    """Per-user pilot sequences, one row per user, unit-modulus entries.

    "orthogonal" uses rows of a DFT: user u sends exp(-2j*pi*u*t/pilot_len),
    mutually orthogonal when pilot_len >= num_users. "random" draws i.i.d.
    uniform phases. Every sequence has energy equal to pilot_len.
    """
    if num_users < 1 or pilot_len < 1:
        raise ParameterError("num_users and pilot_len must be positive")
    if kind == "orthogonal":
        if pilot_len < num_users:
            raise ParameterError(
                "orthogonal pilots need pilot_len >= num_users")
        u = np.arange(num_users)[:, None]
        t = np.arange(pilot_len)[None, :]
        return np.exp(-2j * np.pi * u * t / pilot_len)
    if kind == "random":
        rng = np.random.default_rng(rng)
        return np.exp(2j * np.pi * rng.uniform(size=(num_users, pilot_len)))
    raise ParameterError(f"unknown pilot kind {kind!r}")


@dataclass(frozen=True)
class PilotBook:
    """Pilot sequences plus the coupling matrix in effect during training.

    coupling=None means an ideal uncoupled array. The design matrices map the
    column-stack of per-user channels to the vectorized received block.
    """

    pilots: np.ndarray
    coupling: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "pilots", np.asarray(self.pilots, dtype=complex))
        if self.pilots.ndim != 2:
            raise ParameterError("pilots must be a (num_users, pilot_len) array")
        if self.coupling is not None:
            C = np.asarray(self.coupling, dtype=complex)
            if C.ndim != 2 or C.shape[0] != C.shape[1]:
                raise ParameterError("coupling matrix must be square")
            object.__setattr__(self, "coupling", C)

    @property
    def num_users(self) -> int:
        return self.pilots.shape[0]

    @property
    def pilot_len(self) -> int:
        return self.pilots.shape[1]

    def design_matrix(self, num_antennas: int, coupled: bool = True) -> np.ndarray:
        """Stacked pilot design matrix.

        With coupled=True the stored coupling matrix enters each block
        (kron(s_u, C^T)); with coupled=False, or when no coupling is stored,
        the blocks use the identity instead.
        """
        if self.coupling is not None and self.coupling.shape[0] != num_antennas:
            raise ParameterError("coupling matrix size disagrees with num_antennas")
        if coupled and self.coupling is not None:
            block = self.coupling.T
        else:
            block = np.eye(num_antennas)
        return np.hstack([np.kron(s[:, None], block) for s in self.pilots])


@dataclass(frozen=True)
class ReceivedBlock:
    """Vectorized uplink pilot observation and the unit noise that made it."""

    samples: np.ndarray
    unit_noise: np.ndarray


def synth_uplink(book: PilotBook, channels: np.ndarray, noise_power: float,
                 rng=None, unit_noise: np.ndarray | None = None) -> ReceivedBlock:
    """Simulate the received pilot block for the given per-user channels.

    channels is (num_antennas, num_users), one column per user (uncoupled;
    the book's coupling matrix is applied here). unit_noise, when given,
    reuses a previously drawn unit-variance complex noise vector so different
    noise powers can share one noise realization.
    """
    H = np.asarray(channels)
    if H.ndim != 2 or H.shape[1] != book.num_users:
        raise ParameterError("channels must be (num_antennas, num_users)")
    if noise_power < 0:
        raise ParameterError("noise_power must be non-negative")
    M = H.shape[0]
    S = book.design_matrix(M, coupled=True)
    n_obs = S.shape[0]
    if unit_noise is None:
        rng = np.random.default_rng(rng)
        unit_noise = np.sqrt(0.5) * (rng.standard_normal(n_obs)
                                     + 1j * rng.standard_normal(n_obs))
    else:
        unit_noise = np.asarray(unit_noise, dtype=complex)
        if unit_noise.shape != (n_obs,):
            raise ParameterError("unit_noise has the wrong length")
    y = S @ H.reshape(-1, order="F") + np.sqrt(noise_power) * unit_noise
    return ReceivedBlock(samples=y, unit_noise=unit_noise)


@dataclass(frozen=True)
class LinearEstimator:
    """Precomputed linear MMSE filter for a fixed pilot book and statistics."""

    matrix: np.ndarray
    num_antennas: int
    num_users: int

    def apply(self, received) -> np.ndarray:
        """Estimate all user channels; returns (num_antennas, num_users)."""
        y = received.samples if isinstance(received, ReceivedBlock) else np.asarray(received)
        stacked = self.matrix @ y
        return stacked.reshape(self.num_antennas, self.num_users, order="F")


def _mmse_filter(S_model: np.ndarray, R: np.ndarray, noise_power: float) -> np.ndarray:
    G = S_model @ R @ S_model.conj().T + noise_power * np.eye(S_model.shape[0])
    return sla.solve(G, S_model @ R, assume_a="pos", check_finite=False).conj().T


def fca_estimator(book: PilotBook, cov: CovarianceSet,
                  noise_power: float) -> LinearEstimator:
    """Coupling-aware MMSE estimator (the model matches the true uplink)."""
    if noise_power <= 0:
        raise ParameterError("noise_power must be positive")
    if cov.num_users != book.num_users:
        raise ParameterError("covariance set and pilot book disagree on users")
    M = cov.per_user[0].shape[0]
    S = book.design_matrix(M, coupled=True)
    return LinearEstimator(matrix=_mmse_filter(S, cov.block, noise_power),
                           num_antennas=M, num_users=book.num_users)


def trad_estimator(book: PilotBook, cov: CovarianceSet,
                   noise_power: float) -> LinearEstimator:
    """Conventional MMSE estimator that ignores coupling in its signal model.

    Applied to data from a coupled array this filter is mismatched and its
    error saturates at a coupling-dependent floor instead of falling with SNR.
    """
    if noise_power <= 0:
        raise ParameterError("noise_power must be positive")
    if cov.num_users != book.num_users:
        raise ParameterError("covariance set and pilot book disagree on users")
    M = cov.per_user[0].shape[0]
    S = book.design_matrix(M, coupled=False)
    return LinearEstimator(matrix=_mmse_filter(S, cov.block, noise_power),
                           num_antennas=M, num_users=book.num_users)


def normalized_error(true_channels: np.ndarray, estimated: np.ndarray) -> float:
    """Per-block estimation error in dB.

    Mean over users of ||estimate - truth||^2 / ||truth||^2, in decibels.
    Returns -inf for an exact reconstruction.
    """
    Ht = np.asarray(true_channels)
    He = np.asarray(estimated)
    if Ht.shape != He.shape:
        raise ParameterError("true and estimated channel shapes disagree")
    if Ht.ndim == 1:
        Ht = Ht[:, None]
        He = He[:, None]
    norms = np.sum(np.abs(Ht) ** 2, axis=0)
    if np.any(norms == 0):
        raise ParameterError("true channel has a zero-norm user column")
    ratio = np.mean(np.sum(np.abs(He - Ht) ** 2, axis=0) / norms)
    if ratio == 0:
        return -np.inf
    return float(10.0 * np.log10(ratio))
