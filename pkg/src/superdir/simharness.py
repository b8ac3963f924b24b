"""Monte-Carlo harness: scenario configs, seeded sweeps, and result tables.

Every sweep is a pure function of its ScenarioConfig: trial t of a run with
master seed s draws from a generator seeded by the pair (s, (t, attempt)),
where attempt counts redraws forced by infeasible channel realizations (a
user falling numerically inside its own interference subspace). Results are
emitted as sorted CSV tables with a sidecar metadata file carrying the
configuration hash, so identical configs produce byte-identical outputs.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from ._version import __version__
from .channel import MultipathSpec, block_covariance, draw_channel
from .em_array import (ArrayConfig, SpdSolver, impedance_matrix,
                       load_coupling_matrix, steering_vector,
                       synth_coupling_matrix)
from .errors import ConfigError, InfeasibleChannelError, ParameterError, \
    SingularMatrixError
from .estimation import (PilotBook, fca_estimator, make_pilots,
                         normalized_error, synth_uplink, trad_estimator)
from .precoding import (insp, mrt, normalize_power, rinsp, sp, zf)
from .wideband import SubcarrierGrid, channel_across_grid, wideband_precode, \
    z_at_freq

_KNOWN_PRECODERS = ("mrt", "zf", "sp", "insp", "rinsp")
_MAX_REDRAWS_PER_TRIAL = 50


# ---------------------------------------------------------------------------
# scenario configuration


def endfire_sectors(num_users: int) -> tuple[tuple[float, float], ...]:
    """Standard user placement near the two endfire directions, in degrees.

    Users are assigned 10-degree angular sectors walking outward from each
    array axis: the first ceil(U/2) users occupy [0,10], [10,20], ... degrees
    and the rest occupy [140,150], [150,160], ... degrees. Supports up to
    eight users.
    """
    if not 1 <= num_users <= 8:
        raise ParameterError("endfire layout supports 1..8 users")
    half = (num_users + 1) // 2
    sectors = []
    for i in range(num_users):
        if i < half:
            sectors.append((10.0 * i, 10.0 * (i + 1)))
        else:
            j = i - half
            sectors.append((140.0 + 10.0 * j, 140.0 + 10.0 * (j + 1)))
    return tuple(sectors)


@dataclass(frozen=True)
class ScenarioConfig:
    """Complete description of one simulation scenario.

    Only the fields relevant to a given sweep are consulted by it (the
    estimation fields are ignored by gain sweeps and vice versa), but all
    fields participate in the configuration hash recorded with results.
    Angles are degrees here (converted to radians internally).
    """

    num_antennas: int
    spacing: float
    num_users: int = 4
    num_paths: int = 4
    gain_variance: float = 1.0
    gain_model: str = "rayleigh"          # "rayleigh" | "unit"
    path_normalization: str = "mean"      # "mean" | "sqrt"
    sector_layout: str = "endfire"        # "endfire" | "full" | "custom"
    sectors_deg: tuple[tuple[float, float], ...] | None = None
    snr_db: tuple[float, ...] = (0.0, 10.0, 20.0, 30.0)
    trials: int = 500
    master_seed: int = 1
    precoders: tuple[str, ...] = ("mrt", "zf", "sp", "insp", "rinsp")
    loss_ratio: float = 0.0
    interference: str = "leakage"         # "leakage" | "served-power"
    # uplink training fields
    pilot_len: int | None = None
    coupling_strength: float = 0.3
    coupling_decay: float = 0.9
    coupling_seed: int = 7
    coupling_file: str | None = None
    # wideband fields
    carrier_freq: float = 10e9
    num_subcarriers: int = 5
    band_span: float = 1.2e9
    wideband_precoder: str = "insp"

    def __post_init__(self):
        if self.num_antennas < 1:
            raise ConfigError("num_antennas must be positive")
        if not self.spacing > 0:
            raise ConfigError("spacing must be positive")
        if not 1 <= self.num_users <= self.num_antennas:
            raise ConfigError("need 1 <= num_users <= num_antennas")
        if self.num_paths < 1:
            raise ConfigError("num_paths must be positive")
        if not self.gain_variance > 0:
            raise ConfigError("gain_variance must be positive")
        if self.gain_model not in ("rayleigh", "unit"):
            raise ConfigError("gain_model must be 'rayleigh' or 'unit'")
        if self.path_normalization not in ("mean", "sqrt"):
            raise ConfigError("path_normalization must be 'mean' or 'sqrt'")
        if self.sector_layout not in ("endfire", "full", "custom"):
            raise ConfigError("sector_layout must be 'endfire', 'full' or 'custom'")
        if self.sector_layout == "custom":
            if self.sectors_deg is None or len(self.sectors_deg) != self.num_users:
                raise ConfigError("custom layout needs one (lo, hi) sector per user")
            sectors = tuple((float(a), float(b)) for a, b in self.sectors_deg)
            if any(not 0 <= a < b <= 180 for a, b in sectors):
                raise ConfigError("sectors must satisfy 0 <= lo < hi <= 180 degrees")
            object.__setattr__(self, "sectors_deg", sectors)
        elif self.sectors_deg is not None:
            raise ConfigError("sectors_deg is only allowed with sector_layout='custom'")
        object.__setattr__(self, "snr_db", tuple(float(s) for s in self.snr_db))
        if len(self.snr_db) == 0:
            raise ConfigError("snr_db must list at least one operating point")
        if self.trials < 1:
            raise ConfigError("trials must be positive")
        object.__setattr__(self, "precoders", tuple(self.precoders))
        for kind in self.precoders:
            if kind not in _KNOWN_PRECODERS:
                raise ConfigError(
                    f"unknown precoder {kind!r}; expected one of {_KNOWN_PRECODERS}")
        if len(self.precoders) == 0:
            raise ConfigError("at least one precoder is required")
        if self.loss_ratio < 0:
            raise ConfigError("loss_ratio must be non-negative")
        if self.interference not in ("leakage", "served-power"):
            raise ConfigError("interference must be 'leakage' or 'served-power'")
        if self.pilot_len is not None and self.pilot_len < self.num_users:
            raise ConfigError("pilot_len must be at least num_users")
        if self.coupling_strength < 0:
            raise ConfigError("coupling_strength must be non-negative")
        if not 0 < self.coupling_decay <= 1:
            raise ConfigError("coupling_decay must lie in (0, 1]")
        if not self.carrier_freq > 0:
            raise ConfigError("carrier_freq must be positive")
        if self.num_subcarriers < 1:
            raise ConfigError("num_subcarriers must be positive")
        if self.band_span < 0:
            raise ConfigError("band_span must be non-negative")
        if self.wideband_precoder not in _KNOWN_PRECODERS:
            raise ConfigError(f"unknown wideband precoder {self.wideband_precoder!r}")

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        """Build a config from a plain dict (e.g. parsed JSON), strictly.

        Unknown keys are rejected rather than ignored, so typos in config
        files fail loudly instead of silently running the defaults.
        """
        if not isinstance(data, dict):
            raise ConfigError("scenario config must be a JSON object")
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        kwargs = dict(data)
        if "sectors_deg" in kwargs and kwargs["sectors_deg"] is not None:
            kwargs["sectors_deg"] = tuple(tuple(s) for s in kwargs["sectors_deg"])
        for key in ("snr_db", "precoders"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self) -> dict:
        """JSON-serializable dict; inverse of from_dict."""
        out = dataclasses.asdict(self)
        out["snr_db"] = list(self.snr_db)
        out["precoders"] = list(self.precoders)
        if self.sectors_deg is not None:
            out["sectors_deg"] = [list(s) for s in self.sectors_deg]
        return out

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def user_sectors_deg(self) -> tuple[tuple[float, float], ...]:
        if self.sector_layout == "endfire":
            return endfire_sectors(self.num_users)
        if self.sector_layout == "full":
            return tuple((0.0, 180.0) for _ in range(self.num_users))
        return self.sectors_deg

    def array(self, with_carrier: bool = False) -> ArrayConfig:
        return ArrayConfig(num_antennas=self.num_antennas, spacing=self.spacing,
                           carrier_freq=self.carrier_freq if with_carrier else None)


# ---------------------------------------------------------------------------
# result tables


@dataclass(frozen=True)
class ResultRow:
    sweep: float
    label: str
    metric: str
    mean: float
    stderr: float
    trials: int


@dataclass
class ResultTable:
    """Sweep results plus provenance metadata.

    CSV output is fully deterministic: rows are sorted by (sweep, label,
    metric), floats are rendered with repr-faithful %.17g, and lines end in
    LF regardless of platform. Metadata goes to a JSON sidecar next to the
    CSV (same path with '.meta.json' appended), never into the CSV itself.
    """

    rows: list[ResultRow] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def add(self, sweep: float, label: str, metric: str, mean: float,
            stderr: float, trials: int) -> None:
        self.rows.append(ResultRow(float(sweep), str(label), str(metric),
                                   float(mean), float(stderr), int(trials)))

    def sorted_rows(self) -> list[ResultRow]:
        return sorted(self.rows, key=lambda r: (r.sweep, r.label, r.metric))

    def values(self, label: str, metric: str) -> dict[float, float]:
        """Mapping sweep -> mean for one (label, metric) series."""
        return {r.sweep: r.mean for r in self.sorted_rows()
                if r.label == label and r.metric == metric}

    def to_csv_text(self) -> str:
        fmt = lambda x: "%.17g" % x
        lines = ["sweep,label,metric,mean,stderr,trials"]
        for r in self.sorted_rows():
            lines.append(f"{fmt(r.sweep)},{r.label},{r.metric},"
                         f"{fmt(r.mean)},{fmt(r.stderr)},{r.trials}")
        return "\n".join(lines) + "\n"

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_csv_text())
        meta = dict(self.metadata)
        meta.setdefault("package", "superdir")
        meta.setdefault("version", __version__)
        with open(f"{path}.meta.json", "w", encoding="utf-8", newline="\n") as fh:
            json.dump(meta, fh, sort_keys=True, indent=2)
            fh.write("\n")


def _base_metadata(config: ScenarioConfig, sweep_kind: str) -> dict:
    return {
        "package": "superdir",
        "version": __version__,
        "sweep": sweep_kind,
        "config_sha256": config.config_hash(),
        "master_seed": config.master_seed,
    }


def _mean_stderr(samples: np.ndarray) -> tuple[float, float]:
    samples = np.asarray(samples, dtype=float)
    n = samples.size
    mean = float(np.mean(samples))
    stderr = float(np.std(samples, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return mean, stderr


# ---------------------------------------------------------------------------
# link-level metrics


def downlink_snr_to_noise(snr_db: float, num_users: int) -> float:
    """Effective noise power for a downlink sum-power budget split over users.

    The scenario normalizes each user's precoder column to unit transmit
    power, so total power is num_users and the per-user noise that realizes
    the requested total SNR is num_users / 10^(snr/10).
    """
    if num_users < 1:
        raise ParameterError("num_users must be positive")
    return num_users / (10.0 ** (snr_db / 10.0))


def training_snr_to_noise(snr_db: float, pilot_len: int) -> float:
    """Uplink noise power giving the requested post-despreading pilot SNR.

    Pilot sequences carry energy pilot_len, so noise pilot_len / 10^(snr/10)
    makes the matched-filter SNR equal to the nominal value.
    """
    if pilot_len < 1:
        raise ParameterError("pilot_len must be positive")
    return pilot_len / (10.0 ** (snr_db / 10.0))


def spectral_efficiency(channels, weights, noise_power: float,
                        interference: str = "leakage") -> float:
    """Sum spectral efficiency (bits/s/Hz) of one precoded realization.

    With G = H^T W, user u decodes its own column: signal |G_uu|^2 against
    noise plus interference. interference="leakage" uses the physically
    received cross terms sum_{j != u} |G_uj|^2; "served-power" instead
    charges user u with the other users' delivered signal powers
    sum_{j != u} |G_jj|^2, a pessimistic bookkeeping sometimes used when
    beams are treated as unit-power interferers regardless of direction.
    """
    H = np.asarray(channels)
    W = np.asarray(weights)
    if H.shape != W.shape:
        raise ParameterError("channels and weights must have matching shapes")
    if noise_power <= 0:
        raise ParameterError("noise_power must be positive")
    if interference not in ("leakage", "served-power"):
        raise ParameterError("interference must be 'leakage' or 'served-power'")
    G = H.T @ W
    sig = np.abs(np.diag(G)) ** 2
    if interference == "leakage":
        intf = np.sum(np.abs(G) ** 2, axis=1) - sig
    else:
        intf = np.sum(sig) - sig
    sinr = sig / (intf + noise_power)
    return float(np.sum(np.log2(1.0 + sinr)))


# ---------------------------------------------------------------------------
# trial generation


def _trial_rng(master_seed: int, trial: int, attempt: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(entropy=master_seed, spawn_key=(trial, attempt)))


def _draw_user_channels(arr: ArrayConfig, config: ScenarioConfig,
                        rng: np.random.Generator):
    """One trial's channel draw: (H, specs) with H of shape (M, U).

    Per user, in order: the path angles (uniform over the user's sector),
    then the path gains. Keeping this order fixed is part of the seeding
    contract — it makes every sweep reproducible from (config, master_seed).
    """
    sectors = config.user_sectors_deg()
    fixed = (1.0 + 0.0j,) * config.num_paths if config.gain_model == "unit" else None
    specs = []
    cols = []
    for lo_deg, hi_deg in sectors:
        angles = rng.uniform(np.deg2rad(lo_deg), np.deg2rad(hi_deg),
                             config.num_paths)
        spec = MultipathSpec(angles=tuple(angles),
                             gain_variance=config.gain_variance,
                             fixed_gains=fixed,
                             normalization=config.path_normalization)
        realization = draw_channel(arr, spec, rng)
        specs.append(spec)
        cols.append(realization.vector)
    return np.stack(cols, axis=1), specs


def _raw_weights(kind: str, H: np.ndarray, Z: np.ndarray,
                 loss_ratio: float) -> np.ndarray:
    if kind == "mrt":
        return mrt(H)
    if kind == "zf":
        return zf(H)
    if kind == "sp":
        return sp(H, Z)
    if kind == "insp":
        return insp(H, Z)
    if kind == "rinsp":
        return rinsp(H, Z, loss_ratio)
    raise ParameterError(f"unknown precoder kind {kind!r}")


def _trial_weights(config: ScenarioConfig, H: np.ndarray, Z: np.ndarray,
                   consumed_gram: np.ndarray) -> dict[str, np.ndarray]:
    """All requested precoders for one realization, unit consumed power each."""
    out = {}
    for kind in config.precoders:
        W = _raw_weights(kind, H, Z, config.loss_ratio)
        out[kind] = normalize_power(W, consumed_gram)
    return out


def _run_trials(config: ScenarioConfig, arr: ArrayConfig, Z: np.ndarray):
    """Yield (trial_index, H, weights_by_kind), redrawing infeasible channels."""
    consumed = Z + config.loss_ratio * np.eye(config.num_antennas)
    # fail fast (and warn once) if the scenario's impedance is not usable,
    # instead of burning the redraw budget on a deterministic failure
    try:
        SpdSolver(consumed)
    except SingularMatrixError as exc:
        raise SingularMatrixError(
            f"scenario impedance at spacing {arr.spacing} is not numerically "
            f"positive definite; this geometry cannot be simulated in double "
            f"precision") from exc
    redraws = 0
    for t in range(config.trials):
        for attempt in range(_MAX_REDRAWS_PER_TRIAL):
            rng = _trial_rng(config.master_seed, t, attempt)
            H, _ = _draw_user_channels(arr, config, rng)
            try:
                weights = _trial_weights(config, H, Z, consumed)
            except (InfeasibleChannelError, SingularMatrixError):
                redraws += 1
                continue
            yield t, H, weights
            break
        else:
            raise InfeasibleChannelError(
                f"trial {t}: no feasible channel realization after "
                f"{_MAX_REDRAWS_PER_TRIAL} redraws; the scenario geometry is "
                "degenerate for an interference-nulling precoder")
    # communicate the redraw count to the caller via generator return value
    return redraws


# ---------------------------------------------------------------------------
# sweeps


def run_gain_sweep(config: ScenarioConfig, spacings=None) -> ResultTable:
    """Mean per-user power gain and radiation efficiency per precoder family.

    Sweeps antenna spacing (default: just the config's own spacing). All
    families are normalized to unit *consumed* power per user, so with a
    positive loss_ratio the reported gain already pays the efficiency cost
    of superdirective currents.
    """
    if spacings is None:
        spacings = (config.spacing,)
    table = ResultTable(metadata=_base_metadata(config, "gain"))
    total_redraws = 0
    for d in spacings:
        cfg_d = dataclasses.replace(config, spacing=float(d))
        arr = cfg_d.array()
        Z = impedance_matrix(arr)
        gains = {k: [] for k in cfg_d.precoders}
        effs = {k: [] for k in cfg_d.precoders}
        gen = _run_trials(cfg_d, arr, Z)
        while True:
            try:
                _, H, weights = next(gen)
            except StopIteration as stop:
                total_redraws += stop.value or 0
                break
            for kind, W in weights.items():
                g = np.abs(np.einsum("mu,mu->u", H, W)) ** 2
                gains[kind].append(float(np.mean(g)))
                rad = np.real(np.einsum("mu,mn,nu->u", W.conj(), Z, W))
                consumed = rad + cfg_d.loss_ratio * np.real(
                    np.einsum("mu,mu->u", W.conj(), W))
                effs[kind].append(float(np.mean(rad / consumed)))
        for kind in cfg_d.precoders:
            mean, stderr = _mean_stderr(np.array(gains[kind]))
            table.add(d, kind, "power_gain", mean, stderr, cfg_d.trials)
            mean, stderr = _mean_stderr(np.array(effs[kind]))
            table.add(d, kind, "radiation_efficiency", mean, stderr, cfg_d.trials)
    table.metadata["redraws"] = total_redraws
    return table


def run_se_sweep(config: ScenarioConfig) -> ResultTable:
    """Sum spectral efficiency versus downlink SNR for each precoder family."""
    arr = config.array()
    Z = impedance_matrix(arr)
    noise = {snr: downlink_snr_to_noise(snr, config.num_users)
             for snr in config.snr_db}
    se = {(kind, snr): [] for kind in config.precoders for snr in config.snr_db}
    gen = _run_trials(config, arr, Z)
    redraws = 0
    while True:
        try:
            _, H, weights = next(gen)
        except StopIteration as stop:
            redraws = stop.value or 0
            break
        for kind, W in weights.items():
            for snr in config.snr_db:
                se[(kind, snr)].append(
                    spectral_efficiency(H, W, noise[snr],
                                        interference=config.interference))
    table = ResultTable(metadata=_base_metadata(config, "se"))
    table.metadata["redraws"] = redraws
    for kind in config.precoders:
        for snr in config.snr_db:
            mean, stderr = _mean_stderr(np.array(se[(kind, snr)]))
            table.add(snr, kind, "spectral_efficiency", mean, stderr,
                      config.trials)
    return table


def _scenario_coupling(config: ScenarioConfig, arr: ArrayConfig) -> np.ndarray:
    if config.coupling_file is not None:
        return load_coupling_matrix(config.coupling_file,
                                    expected_size=config.num_antennas)
    return synth_coupling_matrix(arr, config.coupling_strength,
                                 config.coupling_seed,
                                 decay=config.coupling_decay)


def run_estimation_sweep(config: ScenarioConfig) -> ResultTable:
    """Channel-estimation error versus training SNR, coupled array.

    Compares the coupling-aware MMSE estimator (its signal model contains
    the true coupling matrix) against the conventional one (identity model)
    on identical received pilot blocks. Reported metric is the per-trial
    normalized error in dB, averaged over trials.
    """
    arr = config.array()
    C = _scenario_coupling(config, arr)
    tau = config.pilot_len or config.num_users
    pilots = make_pilots(config.num_users, tau, kind="orthogonal")
    book = PilotBook(pilots, coupling=C)
    noise = {snr: training_snr_to_noise(snr, tau) for snr in config.snr_db}
    labels = ("coupling-aware", "conventional")
    errs = {(lab, snr): [] for lab in labels for snr in config.snr_db}
    n_obs = config.num_antennas * tau
    for t in range(config.trials):
        rng = _trial_rng(config.master_seed, t, 0)
        H, specs = _draw_user_channels(arr, config, rng)
        cov = block_covariance(arr, specs)
        unit_noise = np.sqrt(0.5) * (rng.standard_normal(n_obs)
                                     + 1j * rng.standard_normal(n_obs))
        for snr in config.snr_db:
            eps2 = noise[snr]
            block = synth_uplink(book, H, eps2, unit_noise=unit_noise)
            est_aware = fca_estimator(book, cov, eps2).apply(block)
            est_conv = trad_estimator(book, cov, eps2).apply(block)
            errs[("coupling-aware", snr)].append(normalized_error(H, est_aware))
            errs[("conventional", snr)].append(normalized_error(H, est_conv))
    table = ResultTable(metadata=_base_metadata(config, "estimation"))
    table.metadata["coupling_sha256"] = hashlib.sha256(
        C.tobytes()).hexdigest()
    for lab in labels:
        for snr in config.snr_db:
            mean, stderr = _mean_stderr(np.array(errs[(lab, snr)]))
            table.add(snr, lab, "normalized_error_db", mean, stderr,
                      config.trials)
    return table


def run_wideband_sweep(config: ScenarioConfig) -> ResultTable:
    """Summed spectral efficiency across subcarriers: per-subcarrier designs
    versus one carrier-frequency design reused over the whole band.

    Path angles and gains are drawn once per trial and shared by all
    subcarriers; only the array response and coupling vary with frequency.
    The narrowband baseline keeps the weights designed at the subcarrier
    closest to the carrier and applies them band-wide.
    """
    arr = config.array(with_carrier=True)
    grid = SubcarrierGrid.uniform(config.carrier_freq, config.band_span,
                                  config.num_subcarriers)
    eye = np.eye(config.num_antennas)
    for f in grid.frequencies:
        try:
            SpdSolver(z_at_freq(arr, f) + config.loss_ratio * eye)
        except SingularMatrixError as exc:
            raise SingularMatrixError(
                f"impedance at subcarrier {f:.6g} Hz is not numerically "
                f"positive definite; this geometry cannot be simulated in "
                f"double precision") from exc
    center = int(np.argmin(np.abs(np.asarray(grid.frequencies)
                                  - grid.carrier_freq)))
    noise = {snr: downlink_snr_to_noise(snr, config.num_users)
             for snr in config.snr_db}
    labels = ("wideband", "narrowband")
    se = {(lab, snr): [] for lab in labels for snr in config.snr_db}
    sectors = config.user_sectors_deg()
    fixed = (1.0 + 0.0j,) * config.num_paths if config.gain_model == "unit" else None
    redraws = 0
    for t in range(config.trials):
        for attempt in range(_MAX_REDRAWS_PER_TRIAL):
            rng = _trial_rng(config.master_seed, t, attempt)
            users = []
            for lo_deg, hi_deg in sectors:
                angles = rng.uniform(np.deg2rad(lo_deg), np.deg2rad(hi_deg),
                                     config.num_paths)
                spec = MultipathSpec(angles=tuple(angles),
                                     gain_variance=config.gain_variance,
                                     fixed_gains=fixed,
                                     normalization=config.path_normalization)
                if fixed is not None:
                    gains = np.asarray(fixed)
                else:
                    scale = np.sqrt(config.gain_variance / 2.0)
                    gains = scale * (rng.standard_normal(config.num_paths)
                                     + 1j * rng.standard_normal(config.num_paths))
                users.append(channel_across_grid(arr, grid, spec, gains))
            H_all = np.stack(users, axis=2)  # (K, M, U)
            try:
                plan = wideband_precode(arr, grid, H_all,
                                        kind=config.wideband_precoder,
                                        loss_ratio=config.loss_ratio)
            except (InfeasibleChannelError, SingularMatrixError):
                redraws += 1
                continue
            W_center = plan.weights_at(center)
            for snr in config.snr_db:
                eps2 = noise[snr]
                wide = sum(spectral_efficiency(H_all[k], plan.weights_at(k),
                                               eps2,
                                               interference=config.interference)
                           for k in range(grid.num_subcarriers))
                narrow = sum(spectral_efficiency(H_all[k], W_center, eps2,
                                                 interference=config.interference)
                             for k in range(grid.num_subcarriers))
                se[("wideband", snr)].append(wide)
                se[("narrowband", snr)].append(narrow)
            break
        else:
            raise InfeasibleChannelError(
                f"trial {t}: no feasible wideband realization after "
                f"{_MAX_REDRAWS_PER_TRIAL} redraws")
    table = ResultTable(metadata=_base_metadata(config, "wideband"))
    table.metadata["redraws"] = redraws
    table.metadata["subcarriers_hz"] = list(grid.frequencies)
    for lab in labels:
        for snr in config.snr_db:
            mean, stderr = _mean_stderr(np.array(se[(lab, snr)]))
            table.add(snr, lab, "sum_spectral_efficiency", mean, stderr,
                      config.trials)
    return table


def render_pattern(num_antennas: int = 20, spacing: float = 0.25,
                   user_angles_deg=(3.0, 18.0, 30.0, 79.0, 156.0, 119.0),
                   kinds=("zf", "insp"), served_user: int = 0,
                   num_points: int = 721,
                   loss_ratio: float = 0.0) -> ResultTable:
    """Azimuth directivity cut of one user's beam under each precoder.

    Uses a deterministic single-path line-of-sight channel per user (unit
    gain at the user's angle), designs each requested family, and tabulates
    the directivity of the served user's column over [0, 180] degrees.
    """
    if not 0 <= served_user < len(user_angles_deg):
        raise ParameterError("served_user out of range")
    arr = ArrayConfig(num_antennas=num_antennas, spacing=spacing)
    Z = impedance_matrix(arr)
    H = np.stack([steering_vector(arr, np.deg2rad(a)) for a in user_angles_deg],
                 axis=1)
    phi_deg = np.linspace(0.0, 180.0, num_points)
    phi = np.deg2rad(phi_deg)
    m = np.arange(num_antennas)
    responses = np.exp(-2j * np.pi * np.outer(np.cos(phi), m * spacing))
    table = ResultTable(metadata={
        "package": "superdir",
        "version": __version__,
        "sweep": "pattern",
        "config_sha256": hashlib.sha256(json.dumps({
            "num_antennas": num_antennas, "spacing": spacing,
            "user_angles_deg": list(map(float, user_angles_deg)),
            "kinds": list(kinds), "served_user": served_user,
            "num_points": num_points, "loss_ratio": loss_ratio,
        }, sort_keys=True).encode()).hexdigest(),
        "user_angles_deg": list(map(float, user_angles_deg)),
        "served_user": served_user,
    })
    consumed = Z + loss_ratio * np.eye(num_antennas)
    for kind in kinds:
        W = normalize_power(_raw_weights(kind, H, Z, loss_ratio), consumed)
        w = W[:, served_user]
        den = np.real(w @ Z @ np.conj(w))
        vals = np.abs(responses @ w) ** 2 / den
        for p_deg, v in zip(phi_deg, vals):
            table.add(p_deg, kind, "directivity", float(v), 0.0, 1)
    return table
