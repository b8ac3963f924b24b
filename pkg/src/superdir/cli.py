"""Command-line interface for the simulation harness.

Subcommands mirror the harness sweeps; every run writes a deterministic CSV
(plus a .meta.json sidecar) and optionally a PNG plot. Exit codes: 0 on
success, 2 for configuration or usage problems, 3 when a simulation cannot
complete (e.g. a degenerate scenario with no feasible channels).
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import (ConfigError, InfeasibleChannelError, ParameterError,
                     SingularMatrixError)
from .simharness import (ResultTable, ScenarioConfig, render_pattern,
                         run_estimation_sweep, run_gain_sweep, run_se_sweep,
                         run_wideband_sweep)

_PLOT_METRICS = {
    "pattern": ("directivity", "azimuth (degrees)", "directivity"),
    "gain": ("power_gain", "antenna spacing (wavelengths)", "mean power gain"),
    "se": ("spectral_efficiency", "downlink SNR (dB)", "sum SE (bits/s/Hz)"),
    "estimation": ("normalized_error_db", "training SNR (dB)",
                   "normalized error (dB)"),
    "wideband": ("sum_spectral_efficiency", "downlink SNR (dB)",
                 "summed SE over subcarriers (bits/s/Hz)"),
}


def _add_common(p: argparse.ArgumentParser, *, antennas: int, spacing: float,
                users: int) -> None:
    p.add_argument("--config", metavar="FILE",
                   help="JSON scenario config; command-line flags override it")
    p.add_argument("--antennas", type=int, default=None,
                   help=f"array size (default {antennas})")
    p.add_argument("--spacing", type=float, default=None,
                   help=f"antenna spacing in wavelengths (default {spacing})")
    p.add_argument("--users", type=int, default=None,
                   help=f"number of users (default {users})")
    p.add_argument("--trials", type=int, default=None,
                   help="Monte-Carlo trials (default from config)")
    p.add_argument("--seed", type=int, default=None,
                   help="master seed for the trial tree")
    p.add_argument("--out", required=True, metavar="CSV",
                   help="output CSV path (metadata sidecar written next to it)")
    p.add_argument("--plot", metavar="PNG", default=None,
                   help="also render a PNG plot (requires matplotlib)")
    p.set_defaults(default_antennas=antennas, default_spacing=spacing,
                   default_users=users)


def _load_scenario(args) -> ScenarioConfig:
    data = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ConfigError(f"{args.config}: top-level JSON must be an object")
    data.setdefault("num_antennas", args.default_antennas)
    data.setdefault("spacing", args.default_spacing)
    data.setdefault("num_users", args.default_users)
    if args.antennas is not None:
        data["num_antennas"] = args.antennas
    if args.spacing is not None:
        data["spacing"] = args.spacing
    if args.users is not None:
        data["num_users"] = args.users
    if args.trials is not None:
        data["trials"] = args.trials
    if args.seed is not None:
        data["master_seed"] = args.seed
    return ScenarioConfig.from_dict(data)


def _plot_table(table: ResultTable, path: str, sweep_kind: str) -> None:
    try:
        import matplotlib
    except ImportError as exc:
        raise ConfigError(
            "--plot needs matplotlib; install the 'plot' extra") from exc
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    metric, x_label, y_label = _PLOT_METRICS[sweep_kind]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    labels = sorted({r.label for r in table.rows if r.metric == metric})
    for label in labels:
        series = table.values(label, metric)
        xs = sorted(series)
        ys = [series[x] for x in xs]
        ax.plot(xs, ys, marker="" if sweep_kind == "pattern" else "o",
                label=label)
    if sweep_kind == "pattern":
        ax.set_yscale("log")
    ax.set_xlabel(x_label)
    ax.set_ylabel(y_label)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _finish(table: ResultTable, args, sweep_kind: str) -> int:
    table.write(args.out)
    print(f"wrote {args.out} and {args.out}.meta.json")
    if args.plot:
        _plot_table(table, args.plot, sweep_kind)
        print(f"wrote {args.plot}")
    return 0


def _cmd_pattern(args) -> int:
    angles = tuple(float(a) for a in args.angles.split(","))
    kinds = tuple(k.strip() for k in args.kinds.split(","))
    table = render_pattern(num_antennas=args.antennas, spacing=args.spacing,
                           user_angles_deg=angles, kinds=kinds,
                           served_user=args.served_user,
                           num_points=args.points,
                           loss_ratio=args.loss_ratio)
    return _finish(table, args, "pattern")


def _cmd_gain(args) -> int:
    config = _load_scenario(args)
    spacings = None
    if args.spacings:
        spacings = tuple(float(s) for s in args.spacings.split(","))
    return _finish(run_gain_sweep(config, spacings=spacings), args, "gain")


def _cmd_se(args) -> int:
    return _finish(run_se_sweep(_load_scenario(args)), args, "se")


def _cmd_estimate(args) -> int:
    return _finish(run_estimation_sweep(_load_scenario(args)), args,
                   "estimation")


def _cmd_wideband(args) -> int:
    return _finish(run_wideband_sweep(_load_scenario(args)), args, "wideband")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="superdir",
        description="Superdirective multi-user precoding simulations for "
                    "compact antenna arrays")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pattern",
                       help="azimuth directivity cut for a fixed user layout")
    p.add_argument("--antennas", type=int, default=20)
    p.add_argument("--spacing", type=float, default=0.25)
    p.add_argument("--angles", default="3,18,30,79,156,119",
                   help="comma-separated user azimuths in degrees")
    p.add_argument("--kinds", default="zf,insp",
                   help="comma-separated precoder families")
    p.add_argument("--served-user", type=int, default=0)
    p.add_argument("--points", type=int, default=721)
    p.add_argument("--loss-ratio", type=float, default=0.0)
    p.add_argument("--out", required=True, metavar="CSV")
    p.add_argument("--plot", metavar="PNG", default=None)
    p.set_defaults(func=_cmd_pattern)

    p = sub.add_parser("gain-sweep",
                       help="mean power gain per precoder family")
    _add_common(p, antennas=8, spacing=0.25, users=4)
    p.add_argument("--spacings", default=None,
                   help="comma-separated spacings to sweep (wavelengths)")
    p.set_defaults(func=_cmd_gain)

    p = sub.add_parser("se-sweep",
                       help="sum spectral efficiency versus downlink SNR")
    _add_common(p, antennas=16, spacing=0.25, users=4)
    p.set_defaults(func=_cmd_se)

    p = sub.add_parser("estimate-sweep",
                       help="channel estimation error versus training SNR")
    _add_common(p, antennas=8, spacing=0.25, users=5)
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("wideband-sweep",
                       help="per-subcarrier versus carrier-only precoding")
    _add_common(p, antennas=20, spacing=0.25, users=8)
    p.set_defaults(func=_cmd_wideband)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON config: {exc}", file=sys.stderr)
        return 2
    except (InfeasibleChannelError, SingularMatrixError) as exc:
        print(f"simulation failed: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
