"""Electromagnetic core: array geometry, steering, coupling impedance, directivity.

All single-frequency quantities live in wavelength units (antenna spacing given
as a multiple of the wavelength); absolute frequencies only matter to the
wideband module. The array is a uniform linear array along the x axis with
antenna 1 at the origin; elevation theta is measured from the z axis and
azimuth phi in the xy plane, both in radians.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import IllConditionedWarning, ParameterError, SingularMatrixError

RADIATION_RESISTANCE_DIPOLE = 73.0  # ohms, thin half-wave dipole

_COND_WARN_THRESHOLD = 1e10


@dataclass(frozen=True)
class ArrayConfig:
    """Uniform linear array description.

    spacing is in wavelengths (dimensionless). carrier_freq (Hz) is optional
    and only required by the wideband module, which pins the physical element
    spacing at the carrier.
    """

    num_antennas: int
    spacing: float
    carrier_freq: float | None = None

    def __post_init__(self):
        if int(self.num_antennas) != self.num_antennas or self.num_antennas < 1:
            raise ParameterError("num_antennas must be a positive integer")
        if not self.spacing > 0:
            raise ParameterError("spacing must be positive (in wavelengths)")
        if self.carrier_freq is not None and not self.carrier_freq > 0:
            raise ParameterError("carrier_freq must be positive when given")

    @property
    def positions(self) -> np.ndarray:
        """Antenna positions along x, in wavelengths."""
        return np.arange(self.num_antennas) * self.spacing


def steering_vector(cfg: ArrayConfig, phi: float, theta: float = np.pi / 2) -> np.ndarray:
    """Unit-modulus array response for a plane wave from direction (theta, phi).

    Entry m (0-based) is exp(-2j*pi*m*spacing*cos(phi)*sin(theta)); the first
    entry is always 1 (phase reference at the origin).
    """
    m = np.arange(cfg.num_antennas)
    return np.exp(-2j * np.pi * m * cfg.spacing * np.cos(phi) * np.sin(theta))


def impedance_matrix(cfg: ArrayConfig) -> np.ndarray:
    """Normalized mutual-impedance (field-coupling) matrix of the array.

    Entry (m, n) is sinc of the electrical separation: sin(x)/x with
    x = 2*pi*spacing*(n-m), and exactly 1 on the diagonal. Real, symmetric,
    unit-diagonal; the identity at half-wavelength spacing.
    """
    idx = np.arange(cfg.num_antennas)
    diff = idx[:, None] - idx[None, :]
    x = 2.0 * np.pi * cfg.spacing * diff
    out = np.ones((cfg.num_antennas, cfg.num_antennas))
    off = diff != 0
    out[off] = np.sin(x[off]) / x[off]
    return out


def regularized_impedance(Z: np.ndarray, loss_resistance: float,
                          radiation_resistance: float) -> np.ndarray:
    """Loss-aware impedance: Z plus (loss/radiation resistance) on the diagonal."""
    if not radiation_resistance > 0:
        raise ParameterError("radiation_resistance must be positive")
    if loss_resistance < 0:
        raise ParameterError("loss_resistance must be non-negative")
    return Z + (loss_resistance / radiation_resistance) * np.eye(Z.shape[0])


def dipole_loss_resistance(length: float, radius: float, frequency: float,
                           conductivity: float, permeability: float) -> float:
    """Ohmic loss resistance of a cylindrical dipole from the skin-effect formula.

    (length / (4*pi*radius)) * sqrt(pi*frequency*permeability / conductivity),
    in ohms.
    """
    for name, val in (("length", length), ("radius", radius), ("frequency", frequency),
                      ("conductivity", conductivity), ("permeability", permeability)):
        if not val > 0:
            raise ParameterError(f"{name} must be positive")
    return (length / (4.0 * np.pi * radius)) * np.sqrt(
        np.pi * frequency * permeability / conductivity)


class SpdSolver:
    """One-time Cholesky factorization of a symmetric positive-definite matrix.

    Raises SingularMatrixError (with a condition estimate) if the matrix is not
    numerically positive definite; emits IllConditionedWarning above a condition
    number of 1e10. Optional non-negative diagonal loading is added before
    factorization.
    """

    def __init__(self, matrix: np.ndarray, diag_loading: float = 0.0):
        if diag_loading < 0:
            raise ParameterError("diag_loading must be non-negative")
        A = np.asarray(matrix)
        if diag_loading:
            A = A + diag_loading * np.eye(A.shape[0])
        vals = sla.eigvalsh(A)
        self.condition_estimate = (
            float(vals[-1] / vals[0]) if vals[0] > 0 else np.inf)
        try:
            self._factor = sla.cho_factor(A, lower=True, check_finite=False)
        except sla.LinAlgError as exc:
            raise SingularMatrixError(
                "matrix is not numerically positive definite",
                condition_estimate=abs(vals[-1]) / max(abs(vals[0]), np.finfo(float).tiny),
            ) from exc
        if self.condition_estimate > _COND_WARN_THRESHOLD:
            # round to the decade so repeated warnings deduplicate
            if np.isfinite(self.condition_estimate):
                level = f"~1e{int(np.floor(np.log10(self.condition_estimate)))}"
            else:
                level = "above float range"
            warnings.warn(
                f"positive-definite solve with condition number {level}; "
                f"results may lose precision", IllConditionedWarning,
                stacklevel=2)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return sla.cho_solve(self._factor, rhs, check_finite=False)


def solve_spd(matrix: np.ndarray, rhs: np.ndarray, diag_loading: float = 0.0) -> np.ndarray:
    """Solve matrix @ x = rhs for a symmetric positive-definite matrix."""
    return SpdSolver(matrix, diag_loading=diag_loading).solve(rhs)


def max_directivity(Z: np.ndarray, steering: np.ndarray, diag_loading: float = 0.0) -> float:
    """Maximum achievable directivity toward the given steering direction.

    Computed as the quadratic form steering^H Z^{-1} steering through a
    positive-definite solve (never an explicit inverse).
    """
    x = solve_spd(Z, steering, diag_loading=diag_loading)
    return float(np.real(np.vdot(steering, x)))


def directivity(cfg: ArrayConfig, weights: np.ndarray, Z: np.ndarray,
                phi: float, theta: float = np.pi / 2) -> float:
    """Directivity of the weighted array toward (theta, phi).

    Quotient of the beam power |w^T e|^2 over the radiated power w^T Z w*;
    invariant under complex scaling of the weights.
    """
    w = np.asarray(weights)
    if not np.any(w):
        raise ParameterError("weights must be a nonzero vector")
    e = steering_vector(cfg, phi, theta)
    num = np.abs(w @ e) ** 2
    den = np.real(w @ Z @ np.conj(w))
    return float(num / den)


def directivity_pattern(cfg: ArrayConfig, weights: np.ndarray, Z: np.ndarray,
                        phi_grid) -> np.ndarray:
    """Directivity at theta = pi/2 over an azimuth grid.

    Returns an (n, 2) array of rows (phi, directivity), ordered as the input.
    """
    grid = np.atleast_1d(np.asarray(phi_grid, dtype=float))
    if grid.size == 0:
        raise ParameterError("phi_grid must be non-empty")
    w = np.asarray(weights)
    if not np.any(w):
        raise ParameterError("weights must be a nonzero vector")
    den = np.real(w @ Z @ np.conj(w))
    m = np.arange(cfg.num_antennas)
    phases = np.exp(-2j * np.pi * np.outer(np.cos(grid), m * cfg.spacing))
    vals = np.abs(phases @ w) ** 2 / den
    return np.column_stack([grid, vals])


def synth_coupling_matrix(cfg: ArrayConfig, strength: float, seed: int,
                          decay: float = 0.9) -> np.ndarray:
    """Synthetic (non-physical) coupling matrix for estimator experiments.

    C = I + strength * P where P has unit-magnitude random-phase entries whose
    magnitude decays as decay^|m-n| with antenna separation. Deterministic in
    (cfg, strength, seed). This is a stand-in for a measured or full-wave
    coupling matrix and claims no electromagnetic validity.
    """
    if strength < 0:
        raise ParameterError("strength must be non-negative")
    if not 0 < decay <= 1:
        raise ParameterError("decay must lie in (0, 1]")
    M = cfg.num_antennas
    rng = np.random.default_rng(seed)
    idx = np.arange(M)
    profile = decay ** np.abs(idx[:, None] - idx[None, :])
    phases = rng.uniform(0.0, 2.0 * np.pi, size=(M, M))
    C = np.eye(M) + strength * np.exp(1j * phases) * profile
    if np.linalg.cond(C) > 1e12:
        raise ParameterError(
            "synthetic coupling matrix is numerically singular; "
            "reduce strength or increase decay")
    return C


def save_coupling_matrix(path, C: np.ndarray) -> None:
    """Write a complex coupling matrix in the package text format.

    Header line "M <size>", then one line per row with comma-separated
    real,imag pairs joined by semicolons. repr() round-trips every float
    bit-exactly.
    """
    C = np.asarray(C)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ParameterError("coupling matrix must be square")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"M {C.shape[0]}\n")
        for row in C:
            fh.write(";".join(f"{repr(float(v.real))},{repr(float(v.imag))}"
                              for v in row) + "\n")


def load_coupling_matrix(path, expected_size: int | None = None,
                         condition_ceiling: float = 1e12) -> np.ndarray:
    """Read a complex coupling matrix written by save_coupling_matrix.

    Validates squareness (and expected_size when given) and warns when the
    matrix is close to singular.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or not lines[0].startswith("M "):
        raise ParameterError(f"{path}: missing 'M <size>' header line")
    try:
        size = int(lines[0].split()[1])
    except (IndexError, ValueError) as exc:
        raise ParameterError(f"{path}: malformed header {lines[0]!r}") from exc
    rows = lines[1:]
    if len(rows) != size:
        raise ParameterError(
            f"{path}: expected {size} rows after header, found {len(rows)}")
    C = np.empty((size, size), dtype=complex)
    for i, row in enumerate(rows):
        cells = row.split(";")
        if len(cells) != size:
            raise ParameterError(
                f"{path}: row {i + 1} has {len(cells)} entries, expected {size}")
        for j, cell in enumerate(cells):
            try:
                re_s, im_s = cell.split(",")
                C[i, j] = complex(float(re_s), float(im_s))
            except ValueError as exc:
                raise ParameterError(
                    f"{path}: cannot parse entry {cell!r} at row {i + 1}") from exc
    if expected_size is not None and size != expected_size:
        raise ParameterError(
            f"{path}: matrix is {size}x{size}, expected {expected_size}")
    cond = np.linalg.cond(C)
    if cond > condition_ceiling:
        warnings.warn(
            f"coupling matrix from {path} is near singular "
            f"(condition number {cond:.2e})", IllConditionedWarning, stacklevel=2)
    return C
