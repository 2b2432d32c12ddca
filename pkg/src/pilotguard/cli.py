"""Command-line experiment runner.

    pilotguard <fig1|fig2|detect> [--config file.toml] [overrides] --out x.csv

Flag names mirror configuration keys; command-line values override the
config file, which overrides built-in defaults. Exit codes: 0 success,
1 configuration/validation error, 2 numerical error (non-PSD covariance,
infeasible attack scale, singular matrix) with the offending parameter
printed.
"""

import argparse
import sys

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import (
    AlphaInfeasibleError,
    ConfigError,
    InsufficientEntropyError,
    NotPSDError,
    ParameterError,
    SingularError,
)
from .experiments import (
    DETECT_MODES,
    EXPERIMENTS,
    make_config,
    run_experiment,
    write_csv,
)

_DEFAULT_OUT = {"fig1": "fig1.csv", "fig2": "fig2.csv", "detect": "detect.csv"}


def _int_list(text):
    return tuple(int(v) for v in text.split(",") if v.strip())


def _float_list(text):
    return tuple(float(v) for v in text.split(",") if v.strip())


def _str_list(text):
    return tuple(v.strip() for v in text.split(",") if v.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pilotguard",
        description="Pilot-contamination attack and detection experiments",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", help="TOML config file")
        p.add_argument("--out", help="output CSV path")
        p.add_argument("--seed", type=int)
        p.add_argument("--trials", type=int)
        p.add_argument("--trials-r0", type=int, dest="trials_r0")
        p.add_argument("--workers", type=int)
        p.add_argument("--sigma-h2", type=float, dest="sigma_h2")
        p.add_argument("--sigma-g2", type=float, dest="sigma_g2")
        p.add_argument("--gamma", type=float,
                       help="estimation-noise power (detect: single-point "
                            "gamma grid)")
        p.add_argument("--rate-fraction", type=float, dest="rate_fraction")
        p.add_argument("--quiet", action="store_true",
                       help="suppress the per-point progress counter")
        if name == "fig1":
            p.add_argument("--n-list", type=_int_list, dest="n_list")
            p.add_argument("--baseline-both-phases", action="store_true",
                           dest="baseline_both_phases", default=None)
        if name == "fig2":
            p.add_argument("--n", type=int)
            p.add_argument("--zeta-list", type=_float_list, dest="zeta_list")
        if name == "detect":
            p.add_argument("--n", type=int)
            p.add_argument("--m", type=int, help="target key length in bits")
            p.add_argument("--delta", type=float,
                           help="guard band (single-point delta grid)")
            p.add_argument("--epsilon", type=float,
                           help="trace-check relative tolerance")
            p.add_argument("--sigma-q2", type=float, dest="sigma_q2")
            p.add_argument("--modes", type=_str_list,
                           help=f"comma list from {DETECT_MODES}")
    return parser


def _load_file_settings(path: str, experiment: str) -> dict:
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    settings = {}
    for key, value in data.items():
        if key in EXPERIMENTS:
            continue
        settings[key] = value
    settings.update(data.get(experiment, {}))
    return settings


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    experiment = args.experiment
    settings = {}
    if args.config:
        try:
            settings.update(_load_file_settings(args.config, experiment))
        except (OSError, tomllib.TOMLDecodeError) as exc:
            print(f"config: {exc}", file=sys.stderr)
            return 1
    cli_overrides = {
        k: v for k, v in vars(args).items()
        if k not in ("experiment", "config", "quiet") and v is not None
    }
    if args.gamma is not None and experiment == "detect":
        cli_overrides.pop("gamma", None)
        cli_overrides["gamma_list"] = (args.gamma,)
    if getattr(args, "delta", None) is not None:
        cli_overrides.pop("delta", None)
        cli_overrides["delta_list"] = (args.delta,)
    settings.update(cli_overrides)
    out = settings.pop("out", None) or _DEFAULT_OUT[experiment]

    try:
        cfg = make_config(experiment, out=out, **settings)
    except (ConfigError, ParameterError, TypeError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 1
    except (NotPSDError, AlphaInfeasibleError, SingularError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 2

    progress = None if args.quiet else (
        lambda msg: print(msg, file=sys.stderr))
    try:
        result = run_experiment(cfg, progress=progress)
    except (ConfigError, ParameterError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 1
    except (NotPSDError, AlphaInfeasibleError, SingularError,
            InsufficientEntropyError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 2
    write_csv(result, out)
    if not args.quiet:
        print(f"wrote {out}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
