"""Command-line entry point: ``covadjust {simulate,audit,replicate}``.

Exit codes: 0 success, 2 configuration / input error, 3 numeric error
(covariance not positive definite, or overflow), 4 rank-deficient design.
"""

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .dataset import read_csv, write_csv
from .errors import (
    ConfigError,
    CovAdjustError,
    DegenerateColumn,
    NotPositiveDefinite,
    ParseError,
    RankDeficient,
    UnknownColumn,
    ZeroVariance,
)
from .linalg import sample_covariance
from .randomization import Policy, TrialConfig, replication_study
from .regression import DesignSpec
from .report import build_report, format_ledger
from .simulate import (
    CovarianceSpec,
    SimulationConfig,
    generate_mvn,
    orthogonalize_columns,
    preset_scenario,
)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_RANK = 0, 2, 3, 4

DEFAULT_N = 10000
DEFAULT_SEED = 2001


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    return cfg


def _merge(cfg, args, keys):
    # command-line flags override config-file values
    out = dict(cfg)
    for key in keys:
        val = getattr(args, key, None)
        if val is not None:
            out[key] = val
    return out


def _spec_from(cfg, default_preset=None):
    if "names" in cfg or "covariance" in cfg:
        try:
            return CovarianceSpec(tuple(cfg["names"]), np.array(cfg["covariance"], dtype=float))
        except KeyError as exc:
            raise ConfigError(f"config needs both 'names' and 'covariance' (missing {exc})") from None
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad covariance in config: {exc}") from None
    preset = cfg.get("preset", default_preset)
    if preset is None:
        raise ConfigError("give --preset or a config with 'preset' or 'names'/'covariance'")
    return preset_scenario(preset)


def _as_int(cfg, key, default):
    val = cfg.get(key, default)
    if isinstance(val, bool) or not isinstance(val, (int, float)) or int(val) != val:
        raise ConfigError(f"{key} must be an integer, got {val!r}")
    return int(val)


def cmd_simulate(args):
    cfg = _merge(_load_config(args.config), args, ("preset", "n", "seed", "out"))
    spec = _spec_from(cfg)
    sim = SimulationConfig(spec, _as_int(cfg, "n", DEFAULT_N), _as_int(cfg, "seed", DEFAULT_SEED))
    if "out" not in cfg:
        raise ConfigError("simulate needs --out")
    d = generate_mvn(sim)
    write_csv(d, cfg["out"])
    cov = sample_covariance(d.values.T)
    names = spec.variable_names
    print(f"wrote {d.n} rows x {len(names)} columns to {cfg['out']}")
    print("sample covariance (target in brackets):")
    for i, nm in enumerate(names):
        cells = "  ".join(
            f"{cov[i, j]:8.4f} [{spec.matrix[i, j]:5.2f}]" for j in range(len(names))
        )
        print(f"  {nm:>6}  {cells}")
    return EXIT_OK


def cmd_audit(args):
    cfg = _merge(
        _load_config(args.config), args,
        ("preset", "n", "seed", "data", "outcome", "regressors", "out"),
    )
    if args.orthogonalize:
        cfg["orthogonalize"] = True
    if "data" in cfg:
        try:
            d = read_csv(cfg["data"])
        except OSError as exc:
            raise ConfigError(f"cannot read data {cfg['data']}: {exc}") from None
        scenario = {"data": str(cfg["data"])}
        seed = None
    else:
        spec = _spec_from(cfg)
        seed = _as_int(cfg, "seed", DEFAULT_SEED)
        sim = SimulationConfig(spec, _as_int(cfg, "n", DEFAULT_N), seed)
        d = generate_mvn(sim)
        scenario = {"preset": str(cfg.get("preset", "custom")).upper(), "n": sim.n}

    regressors = cfg.get("regressors")
    if isinstance(regressors, str):
        regressors = [r.strip() for r in regressors.split(",") if r.strip()]
    outcome = cfg.get("outcome", d.column_names[0])
    if not regressors:
        regressors = [c for c in d.column_names if c != outcome]
    d.require(outcome, *regressors)
    try:
        design = DesignSpec(outcome, tuple(regressors))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    if cfg.get("orthogonalize"):
        d = orthogonalize_columns(d, design.regressors)
        scenario["orthogonalized"] = True
    report = build_report(d, design, scenario, seed=seed)
    text = report.to_json()
    if "out" in cfg:
        Path(cfg["out"]).write_text(text)
    else:
        sys.stdout.write(text)
    print(format_ledger(report), file=sys.stderr if "out" not in cfg else sys.stdout)
    return EXIT_OK


def _summary_path(out):
    p = Path(out)
    return p.with_name(p.stem + ".summary.json")


def cmd_replicate(args):
    cfg = _merge(
        _load_config(args.config), args,
        ("preset", "n", "seed", "alpha", "policy", "replications", "effect", "out", "workers"),
    )
    if args.n is not None:
        cfg["n_subjects"] = args.n
    spec = _spec_from(cfg, default_preset="COV2")
    n_subjects = _as_int(cfg, "n_subjects", _as_int(cfg, "n", 100))
    try:
        alpha = float(cfg.get("alpha", 0.05))
        effect = float(cfg.get("effect", 0.0))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad numeric setting: {exc}") from None
    trial = TrialConfig(n_subjects, spec, alpha, _as_int(cfg, "seed", DEFAULT_SEED))
    policy = Policy.parse(cfg.get("policy", "never"))
    reps = _as_int(cfg, "replications", 1000)
    if "out" not in cfg:
        raise ConfigError("replicate needs --out")
    summary = replication_study(trial, effect, policy, reps, workers=cfg.get("workers"))

    covs = trial.covariates
    with open(cfg["out"], "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["replication", "estimate", "selected", *[f"p_{c}" for c in covs]])
        for rec in summary.records:
            w.writerow([
                rec.index, f"{rec.estimate:.17g}", ";".join(rec.selected),
                *[f"{rec.pvalues[c]:.17g}" for c in covs],
            ])
    doc = {
        "schema_version": "1.0",
        "tool_version": __version__,
        "n_subjects": n_subjects,
        "alpha": alpha,
        "seed": trial.seed,
        "covariates": list(covs),
        **summary.to_dict(),
    }
    path = _summary_path(cfg["out"])
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    print(f"wrote {reps} replications to {cfg['out']} and summary to {path}")
    print(json.dumps(summary.to_dict(), indent=2))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="covadjust",
        description="Simulate, audit and replicate covariate adjustment in linear regression.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", metavar="PATH", help="JSON config file")
        p.add_argument("--preset", type=str.upper, choices=["COV1", "COV2"])
        p.add_argument("--n", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--out", metavar="PATH")

    p = sub.add_parser("simulate", help="draw a dataset from a covariance spec")
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("audit", help="decompose a dataset or simulated preset")
    common(p)
    p.add_argument("--data", metavar="PATH", help="CSV dataset instead of a preset")
    p.add_argument("--outcome")
    p.add_argument("--regressors", help="comma-separated regressor names")
    p.add_argument("--orthogonalize", action="store_true",
                   help="make regressors exactly orthogonal in-sample first")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("replicate", help="randomized-trial replication study")
    common(p)
    p.add_argument("--alpha", type=float)
    p.add_argument("--policy", choices=["never", "always", "reactive"])
    p.add_argument("--replications", type=int)
    p.add_argument("--effect", type=float)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_replicate)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (NotPositiveDefinite, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (RankDeficient, DegenerateColumn, ZeroVariance) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RANK
    except (ConfigError, ParseError, UnknownColumn, CovAdjustError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
