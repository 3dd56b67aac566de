"""Command-line entry point.

Exit status: 0 on success (for ``assess``: good at ``--tau`` under every
selected metric), 2 when ``assess`` judges the prediction bad, 1 on any error
including usage errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import io
from .assessment import DEFAULT_THETA_GRID, assess_all, decide
from .calibration import CALIBRATION_THETA_GRID, CalibrationSpec, run_calibration
from .degradation import REFERENCE_PARAMS, derive_coefficients, simulate_ensemble, simulate_trajectory
from .errors import ConfigError
from .estimation import WindowModel, fit_window, simulate_from_window_model
from .metrics import ALL_METRICS, MetricKind
from .pipeline import RealDataRun, estimate, run_real_data

EXIT_OK, EXIT_ERROR, EXIT_BAD = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _metric_list(text: str) -> list[MetricKind]:
    try:
        return [MetricKind.parse(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    # SUPPRESS keeps a subcommand's parser from resetting flags given before it
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, help="master seed (overrides config)")
    common.add_argument("--config", help="JSON config path or bundled config name")
    common.add_argument("--out", type=Path, help="output directory (default: out)")
    common.add_argument("--metrics", type=_metric_list, help="comma list of MSE,MAPE,SQIF,POF,TUFF")
    common.add_argument("--theta", type=_float_list, help="comma list of thresholds in percent")

    parser = _Parser(prog="hiassess", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", parents=[common], help="simulate degradation trajectories")
    p.add_argument("--window", type=int, nargs=2, metavar=("START", "END"))
    p.add_argument("-n", type=int, default=1, help="number of trajectories (1 writes a single series)")
    p.add_argument("--noise-scale", type=float, default=None)

    p = sub.add_parser("assess", parents=[common], help="grade an actual HI series against prognoses")
    p.add_argument("--ensemble", type=Path, help="ensemble CSV (t,T1,...,Tn)")
    p.add_argument("--model", type=Path, help="window model JSON from `estimate`")
    p.add_argument("--actual", type=Path, help="actual HI CSV")
    p.add_argument("--data", type=Path, help="full HI CSV for a boundaries-based run")
    p.add_argument("--window", type=int, nargs=2, metavar=("START", "END"))
    p.add_argument("-n", type=int, default=None, help="prognoses to simulate from a model")
    p.add_argument("--tau", type=float, default=None, help="acceptance threshold for the exit status")

    p = sub.add_parser("calibrate", parents=[common], help="null calibration tables")
    p.add_argument("--regime", choices=["second", "third"])
    p.add_argument("--n-prognoses", type=int)
    p.add_argument("--n-tests", type=int)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("estimate", parents=[common], help="fit a window model to HI data")
    p.add_argument("--data", type=Path)
    p.add_argument("--window", type=int, nargs=2, metavar=("START", "END"))
    p.add_argument("--kind", choices=["linear", "exponential"])

    p = sub.add_parser("report", parents=[common], help="re-emit tables and plot data from report.json")
    p.add_argument("--report", type=Path, required=True)
    return parser


def _config(args) -> tuple[dict, Path]:
    if args.config:
        return io.load_config(args.config)
    return {}, Path.cwd()


def _pick(cli_value, cfg: dict, key: str, default):
    if cli_value is not None:
        return cli_value
    return cfg.get(key, default)


def _metrics(args, cfg) -> tuple[MetricKind, ...]:
    if args.metrics:
        return tuple(args.metrics)
    if "metrics" in cfg:
        return tuple(MetricKind.parse(m) for m in cfg["metrics"])
    return ALL_METRICS


def _thetas(args, cfg, default) -> tuple[float, ...]:
    grid = args.theta if args.theta is not None else cfg.get("theta", default)
    grid = tuple(float(t) for t in grid)
    if not grid:
        raise ConfigError("theta grid is empty")
    return grid


def _out(args, cfg) -> Path:
    if args.out is not None:
        return args.out
    return Path(cfg.get("out", "out"))


def _resolve(base: Path, value) -> Path:
    path = Path(value)
    return path if path.is_absolute() else base / path


def cmd_simulate(args) -> int:
    cfg, base = _config(args)
    params = io.params_from_config(cfg) if "model" in cfg else REFERENCE_PARAMS
    coeffs = derive_coefficients(params)
    window = tuple(args.window) if args.window else (1, params.m)
    seed = _pick(args.seed, cfg, "seed", 0)
    noise = _pick(args.noise_scale, cfg, "noise_scale", 1.0)
    out = _out(args, cfg)
    if args.n == 1:
        traj = simulate_trajectory(params, coeffs, window, seed, noise_scale=noise)
        path = io.write_hi_csv(traj, out / "trajectory.csv")
    else:
        ens = simulate_ensemble(params, window, args.n, seed, noise_scale=noise)
        path = io.write_ensemble_csv(ens, out / "ensemble.csv")
    print(path)
    return EXIT_OK


def _real_data_run(args, cfg, base) -> RealDataRun:
    if getattr(args, "data", None):
        data = Path(args.data)
    elif "data" in cfg:
        data = _resolve(base, cfg["data"])
    else:
        raise ConfigError("no HI data given (--data or 'data' in config)")
    if "boundaries" not in cfg:
        raise ConfigError("config lacks 'boundaries' (end indices of regimes 1, 2 and 3)")
    return RealDataRun(
        data=data,
        boundaries=tuple(cfg["boundaries"]),
        regime=cfg.get("regime", "second"),
        split=float(cfg.get("split", 0.8)),
        fit_on=cfg.get("fit_on", "regime"),
        assess_on=cfg.get("assess_on", "test"),
        model_kind=cfg.get("model_kind"),
        n_prognoses=int(_pick(getattr(args, "n", None), cfg, "n_prognoses", 1000)),
        seed=int(_pick(args.seed, cfg, "seed", 0)),
        metrics=_metrics(args, cfg),
        theta_grid=_thetas(args, cfg, DEFAULT_THETA_GRID),
    )


def cmd_assess(args) -> int:
    cfg, base = _config(args)
    out = _out(args, cfg)
    metrics = _metrics(args, cfg)
    grid = _thetas(args, cfg, DEFAULT_THETA_GRID)
    seed = int(_pick(args.seed, cfg, "seed", 0))
    tau = float(_pick(args.tau, cfg, "tau", 50.0))

    if args.ensemble or args.model:
        if args.actual is None:
            raise ConfigError("--actual is required with --ensemble or --model")
        actual = io.read_hi_csv(args.actual)
        if args.ensemble:
            ensemble = io.read_ensemble_csv(args.ensemble)
        else:
            model = WindowModel.from_dict(io.load_json(args.model))
            n = int(_pick(args.n, cfg, "n_prognoses", 1000))
            ensemble = simulate_from_window_model(model, actual.window, n, seed)
        if args.window:
            actual = actual.slice(*args.window)
        reports = assess_all(ensemble, actual, metrics, grid, meta={"seed": seed})
    else:
        reports = run_real_data(_real_data_run(args, cfg, base))

    io.write_report(reports, out)
    verdict = all(r.good(tau) for r in reports)
    for r in reports:
        print(f"{r.metric.value:5s} score={r.score:6.2f}%  {'good' if r.good(tau) else 'bad'} at tau={tau:g}")
    print(f"written to {out}")
    return EXIT_OK if verdict else EXIT_BAD


def cmd_calibrate(args) -> int:
    cfg, base = _config(args)
    params = io.params_from_config(cfg) if "model" in cfg else REFERENCE_PARAMS
    spec = CalibrationSpec(
        params=params,
        regime=_pick(args.regime, cfg, "regime", "second"),
        split=float(cfg.get("split", 0.8)),
        n_prognoses=int(_pick(args.n_prognoses, cfg, "n_prognoses", 1000)),
        n_tests=int(_pick(args.n_tests, cfg, "n_tests", 1000)),
        metrics=_metrics(args, cfg),
        theta_grid=_thetas(args, cfg, CALIBRATION_THETA_GRID),
        master_seed=int(_pick(args.seed, cfg, "seed", 0)),
        noise_scale=float(cfg.get("noise_scale", 1.0)),
    )
    table = run_calibration(spec, workers=args.workers)
    paths = io.write_report(table, _out(args, cfg))
    with open(paths[0]) as fh:
        sys.stdout.write(fh.read())
    return EXIT_OK


def cmd_estimate(args) -> int:
    cfg, base = _config(args)
    out = _out(args, cfg)
    if args.window:
        if args.data is None and "data" not in cfg:
            raise ConfigError("--data is required")
        data = io.read_hi_csv(args.data or _resolve(base, cfg["data"]))
        kind = args.kind or cfg.get("model_kind") or "linear"
        model = fit_window(data.slice(*args.window), kind)
    else:
        run = _real_data_run(args, cfg, base)
        if args.kind:
            run.model_kind = args.kind
        model = estimate(run)
    path = io.save_json(model.to_dict(), out / "model.json")
    print(path)
    return EXIT_OK


def cmd_report(args) -> int:
    reports = io.load_reports(args.report)
    if args.theta is not None:
        grid = tuple(args.theta)
        if not grid:
            raise ConfigError("theta grid is empty")
        for r in reports:
            r.theta_grid = grid
            r.decisions = decide(r.score, grid)
    out = args.out or args.report.parent
    for path in io.write_report(reports, out):
        print(path)
    return EXIT_OK


GLOBAL_FLAGS = ("seed", "config", "out", "metrics", "theta")

COMMANDS = {
    "simulate": cmd_simulate,
    "assess": cmd_assess,
    "calibrate": cmd_calibrate,
    "estimate": cmd_estimate,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"hiassess: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_ERROR
    for name in GLOBAL_FLAGS:
        if not hasattr(args, name):
            setattr(args, name, None)
    try:
        return COMMANDS[args.command](args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"hiassess: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
