"""Multi-user transmit precoders for coupled compact arrays.

Channels are columns of an (antennas, users) matrix and the downlink symbol
seen by user u is h_u^T x, so a precoder column w_u serves user u with
amplitude gain h_u^T w_u while h_j^T w_u leaks to user j. Radiated power is
the impedance quadratic form Re(w^H Z w), which is what makes superdirective
(coupling-exploiting) designs differ from their half-wavelength limits.

Families:
  mrt   -- per-user conjugate beamforming, ignores both coupling and users
  zf    -- zero-forcing on the channel Gram matrix, ignores coupling
  sp    -- single-user superdirective steering through the impedance inverse
  insp  -- interference-nulling superdirective: maximizes coupled power gain
           subject to exact zero leakage to every other user
  rinsp -- insp against a loss-regularized impedance, trading a little
           directivity for bounded currents and realistic efficiency
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .em_array import solve_spd
from .errors import InfeasibleChannelError, ParameterError, SingularMatrixError

_NULL_REL_TOL = 1e-10


def _as_channel_matrix(channels) -> np.ndarray:
    H = np.asarray(channels, dtype=complex)
    if H.ndim != 2:
        raise ParameterError("channels must be an (antennas, users) matrix")
    if H.shape[0] < H.shape[1]:
        raise ParameterError("need at least as many antennas as users")
    return H


def mrt(channels) -> np.ndarray:
    """Maximum-ratio (conjugate) precoder: one conjugated channel per column."""
    return np.conj(_as_channel_matrix(channels))


def zf(channels) -> np.ndarray:
    """Zero-forcing precoder: exact unit gain to each user, zero leakage.

    Columns solve H^T W = I with minimum conventional (identity-Gram) power.
    Requires linearly independent user channels.
    """
    H = _as_channel_matrix(channels)
    Hc = np.conj(H)
    gram = H.T @ Hc
    try:
        inv_gram = sla.solve(gram, np.eye(H.shape[1]), assume_a="pos",
                             check_finite=False)
    except sla.LinAlgError as exc:
        raise SingularMatrixError(
            "zero-forcing needs linearly independent user channels") from exc
    return Hc @ inv_gram


def sp(channels, impedance, power_allocation=None) -> np.ndarray:
    """Single-user superdirective precoder (no interference management).

    Each column points along Z^{-1} conj(h_u), the direction that maximizes
    the coupled power gain |h^T w|^2 / (w^H Z w) for that user alone, scaled
    so its radiated power Re(w^H Z w) equals the user's allocation (uniform
    unit allocation by default).
    """
    H = _as_channel_matrix(channels)
    U = H.shape[1]
    if power_allocation is None:
        rho = np.ones(U)
    else:
        rho = np.asarray(power_allocation, dtype=float)
        if rho.shape != (U,) or np.any(rho <= 0):
            raise ParameterError("power_allocation must be positive, one per user")
    X = solve_spd(impedance, np.conj(H))
    # radiated power of column u scales as gamma_u^2 * Re(h_u^T Z^{-1} h_u*)
    quad = np.real(np.einsum("mu,mu->u", H, X))
    gamma = np.sqrt(rho / quad)
    return X * gamma


@dataclass(frozen=True)
class NullSpaceBasis:
    """Orthonormal split of the array space around one user's interferers.

    interference_basis spans the other users' channels (dimension
    interference_dim); null_basis spans its orthogonal complement, where any
    weight vector produces exactly zero leakage. The impedance quadratic form
    and the served user's channel are exposed in the same split:
    gram_* are the blocks of V^H Z V and target_* the blocks of V^H h for
    V = [interference_basis | null_basis].
    """

    null_basis: np.ndarray
    interference_basis: np.ndarray
    interference_dim: int
    gram_interference: np.ndarray
    gram_cross: np.ndarray
    gram_null: np.ndarray
    target_interference: np.ndarray
    target_null: np.ndarray


def null_space_basis(channels, user_index: int, impedance,
                     rel_tol: float = _NULL_REL_TOL) -> NullSpaceBasis:
    """Eigen-decomposition of the interference subspace for one user.

    The interference dimension counts eigenvalues of the interferers' outer
    product above rel_tol times the largest; everything below is treated as
    numerically zero and assigned to the null side.
    """
    H = _as_channel_matrix(channels)
    M, U = H.shape
    if not 0 <= user_index < U:
        raise ParameterError("user_index out of range")
    others = [j for j in range(U) if j != user_index]
    H_int = H[:, others]
    R_int = H_int @ H_int.conj().T
    vals, vecs = sla.eigh(R_int)
    lam_max = vals[-1] if len(vals) else 0.0
    if lam_max <= 0:
        n_int = 0
    else:
        n_int = int(np.sum(vals > rel_tol * lam_max))
    k = M - n_int
    null_b = vecs[:, :k]
    span_b = vecs[:, k:]
    Z = np.asarray(impedance)
    h = H[:, user_index]
    return NullSpaceBasis(
        null_basis=null_b,
        interference_basis=span_b,
        interference_dim=n_int,
        gram_interference=span_b.conj().T @ Z @ span_b,
        gram_cross=span_b.conj().T @ Z @ null_b,
        gram_null=null_b.conj().T @ Z @ null_b,
        target_interference=span_b.conj().T @ h,
        target_null=null_b.conj().T @ h,
    )


def _insp_column(H: np.ndarray, u: int, Z: np.ndarray, rel_tol: float) -> np.ndarray:
    basis = null_space_basis(H, u, Z, rel_tol=rel_tol)
    h = H[:, u]
    eta = basis.target_null
    if np.linalg.norm(eta) <= 1e-10 * np.linalg.norm(h):
        raise InfeasibleChannelError(
            f"user {u}: channel lies in the interference subspace; "
            "no null-steering weight can serve it")
    alpha = solve_spd(basis.gram_null, eta)
    return np.conj(basis.null_basis @ alpha)


def insp(channels, impedance, rel_tol: float = _NULL_REL_TOL) -> np.ndarray:
    """Interference-nulling superdirective precoder.

    Column u maximizes the coupled power gain |h_u^T w|^2 / (w^H Z w) over
    all w with exactly zero leakage h_j^T w = 0 to every other user; the
    closed form is the conjugate of the null-basis expansion of the
    impedance-whitened projected channel. Raises InfeasibleChannelError when
    a user's channel is numerically inside its interference subspace.
    """
    H = _as_channel_matrix(channels)
    Z = np.asarray(impedance)
    cols = [_insp_column(H, u, Z, rel_tol) for u in range(H.shape[1])]
    return np.stack(cols, axis=1)


def rinsp(channels, impedance, loss_ratio: float,
          rel_tol: float = _NULL_REL_TOL) -> np.ndarray:
    """Loss-regularized interference-nulling superdirective precoder.

    Identical nulling constraints to insp, but the power metric is the
    loss-aware impedance Z + loss_ratio * I, which penalizes the large
    circulating currents of extreme superdirectivity and so maximizes gain
    per watt *consumed* rather than per watt radiated.
    """
    if loss_ratio < 0:
        raise ParameterError("loss_ratio must be non-negative")
    Z = np.asarray(impedance)
    Z_reg = Z + loss_ratio * np.eye(Z.shape[0])
    return insp(channels, Z_reg, rel_tol=rel_tol)


def oracle_max_gain(channels, user_index: int, impedance,
                    rel_tol: float = _NULL_REL_TOL) -> np.ndarray:
    """Reference solver for the nulling-constrained gain maximization.

    Independent route used to validate insp: a pivoted QR factorization of
    the conjugated interferer matrix yields an orthonormal basis of the
    feasible (zero-leakage) space, and the gain maximizer follows from a
    generalized eigenproblem in that basis. Returned with unit radiated
    power and the served gain phase-aligned to be real positive.
    """
    H = _as_channel_matrix(channels)
    M, U = H.shape
    if not 0 <= user_index < U:
        raise ParameterError("user_index out of range")
    Z = np.asarray(impedance)
    h = H[:, user_index]
    others = [j for j in range(U) if j != user_index]
    if others:
        A = np.conj(H[:, others])
        Q, R, _ = sla.qr(A, pivoting=True)
        diag = np.abs(np.diag(R))
        rank = int(np.sum(diag > rel_tol * diag[0])) if diag.size and diag[0] > 0 else 0
        Q2 = Q[:, rank:]
    else:
        Q2 = np.eye(M)
    v = Q2.conj().T @ np.conj(h)
    if np.linalg.norm(v) <= 1e-10 * np.linalg.norm(h):
        raise InfeasibleChannelError(
            f"user {user_index}: channel lies in the interference subspace")
    numerator = np.outer(v, v.conj())
    denominator = Q2.conj().T @ Z @ Q2
    vals, vecs = sla.eigh(numerator, denominator)
    w = Q2 @ vecs[:, -1]
    w = w / np.sqrt(np.real(np.vdot(w, Z @ w)))
    g = h @ w
    if np.abs(g) > 0:
        w = w * (np.conj(g) / np.abs(g))
    return w


def power_gain(channel, weights) -> float:
    """Squared amplitude gain |h^T w|^2 delivered to one user."""
    h = np.asarray(channel)
    w = np.asarray(weights)
    return float(np.abs(h @ w) ** 2)


def radiation_efficiency(weights, impedance, loss_ratio: float) -> float:
    """Fraction of consumed power actually radiated, in (0, 1].

    Ratio of the radiated quadratic form w^H Z w to the consumed form
    w^H (Z + loss_ratio I) w; equals 1 for a lossless array.
    """
    if loss_ratio < 0:
        raise ParameterError("loss_ratio must be non-negative")
    w = np.asarray(weights)
    if not np.any(w):
        raise ParameterError("weights must be a nonzero vector")
    Z = np.asarray(impedance)
    rad = np.real(np.vdot(w, Z @ w))
    consumed = rad + loss_ratio * np.real(np.vdot(w, w))
    return float(rad / consumed)


def normalize_power(weights, gram) -> np.ndarray:
    """Scale each precoder column to unit quadratic-form power Re(w^H A w)."""
    W = np.asarray(weights, dtype=complex)
    squeeze = W.ndim == 1
    if squeeze:
        W = W[:, None]
    A = np.asarray(gram)
    powers = np.real(np.einsum("mu,mn,nu->u", W.conj(), A, W))
    if np.any(powers <= 0):
        raise ParameterError("every column must have positive power in the gram")
    out = W / np.sqrt(powers)
    return out[:, 0] if squeeze else out


_FAMILIES = ("mrt", "zf", "sp", "insp", "rinsp")


def build_weights(kind: str, channels, impedance, loss_ratio: float = 0.0) -> np.ndarray:
    """Uniform entry point over the precoder families, by name.

    Every family is returned power-normalized per user against the lossless
    radiated-power gram, so cross-family gain comparisons are fair.
    """
    H = _as_channel_matrix(channels)
    Z = np.asarray(impedance)
    if kind == "mrt":
        W = mrt(H)
    elif kind == "zf":
        W = zf(H)
    elif kind == "sp":
        W = sp(H, Z)
    elif kind == "insp":
        W = insp(H, Z)
    elif kind == "rinsp":
        W = rinsp(H, Z, loss_ratio)
    else:
        raise ParameterError(
            f"unknown precoder kind {kind!r}; expected one of {_FAMILIES}")
    return normalize_power(W, Z)
