"""Command-line entry point.

::

    hdsim simulate   [flags]            grid paths as CSV
    hdsim experiment <name> [flags]     Monte Carlo report as CSV or JSON
    hdsim transforms [flags]            F_0, F_eps and sigma_eps on a grid

Exit codes: 0 success or pass, 1 experiment fail, 2 usage or parameter
error, 3 numerical or I/O error (an inconclusive verdict counts as
numerical).
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass
from datetime import datetime, timezone
from importlib import metadata

import numpy as np

from . import exact, harness, integrate, noise
from .errors import HdsimError, NumericalError, ParameterError
from .lamperti import ModelParams, f0, f_eps, sigma_eps

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

SIM_SCHEMES = ("euler_ito", "heun_stratonovich", "exact")

# per-experiment defaults: running `hdsim experiment <name>` reproduces the acceptance point
EXPERIMENT_DEFAULTS = {
    "selection": dict(alpha=0.5, eps=0.0, x0=0.0, level=14, paths=1000, eps_grid=(0.4, 0.2, 0.1, 0.05)),
    "bracket": dict(alpha=0.5, eps=0.5, x0=1.0, paths=200, level_grid=(10, 12, 14, 16)),
    "skew": dict(alpha=0.5, x0=0.0, paths=10_000),
    "weak": dict(alpha=0.5, eps=0.5, x0=0.0, level=14, paths=1000),
    "uniqueness": dict(alpha=0.5, eps=0.25, x0=0.0, paths=200, level_grid=(10, 11, 12, 13, 14, 15, 16)),
    "moments": dict(alpha=0.5, eps=0.5, x0=0.0, paths=10_000),
}
GLOBAL_DEFAULTS = dict(alpha=0.5, eps=0.0, x0=0.0, t=1.0, level=12, paths=10_000, seed=42)
SIMULATE_PATHS = 10


class UsageError(HdsimError):
    pass


@dataclass(frozen=True)
class CliConfig:
    command: str
    params: ModelParams
    experiment_name: str | None = None
    t_end: float = 1.0
    level: int = 12
    n_paths: int = 10_000
    seed: int = 42
    workers: int = 1
    eps_grid: tuple | None = None
    level_grid: tuple | None = None
    scheme: str = "euler_ito"
    taming: str = "none"
    out_path: str | None = None
    format: str = "csv"
    x_max: float = 10.0
    points: int = 201
    moment_order: float = -0.5


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _float_list(text):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated reals, got {text!r}") from None


def _int_list(text):
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _add_common(p):
    p.add_argument("--alpha", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--x0", type=float)
    p.add_argument("--theta", type=float)
    p.add_argument("--plateau-a", type=float, default=0.0)
    p.add_argument("--plateau-b", type=float, default=0.0)
    p.add_argument("--t", type=float)
    p.add_argument("--level", type=int)
    p.add_argument("--paths", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hdsim", description="Heterogeneous diffusion simulation and Monte Carlo checks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {tool_version()}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="dump solution paths as CSV")
    _add_common(sim)
    sim.add_argument("--scheme", choices=SIM_SCHEMES, default="euler_ito")
    sim.add_argument("--taming", choices=integrate.TAMINGS, default="none")
    sim.add_argument("--format", choices=("csv",), default="csv")

    exp = sub.add_parser("experiment", help="run a Monte Carlo experiment")
    exp.add_argument("name", choices=harness.EXPERIMENTS)
    _add_common(exp)
    exp.add_argument("--eps-grid", type=_float_list)
    exp.add_argument("--level-grid", type=_int_list)
    exp.add_argument("--moment-order", type=float, default=-0.5)
    exp.add_argument("--scheme", choices=("euler_ito",), default="euler_ito")
    exp.add_argument("--format", choices=("csv", "json"), default="csv")

    tr = sub.add_parser("transforms", help="tabulate F_0, F_eps and sigma_eps")
    _add_common(tr)
    tr.add_argument("--x-max", type=float, default=10.0)
    tr.add_argument("--points", type=int, default=201)
    tr.add_argument("--format", choices=("csv",), default="csv")
    return parser


def _pick(ns, name, defaults, key=None):
    v = getattr(ns, name, None)
    if v is not None:
        return v
    key = key or name
    return defaults.get(key, GLOBAL_DEFAULTS.get(key))


def parse_args(argv) -> CliConfig:
    """Parse and validate a command line.

    Raises :class:`UsageError` for malformed input and
    :class:`ParameterError` for values outside the admissible range.
    """
    ns = build_parser().parse_args(list(argv))
    defaults = EXPERIMENT_DEFAULTS.get(getattr(ns, "name", None), {}) if ns.command == "experiment" else {}
    params = ModelParams(
        alpha=_pick(ns, "alpha", defaults),
        eps=_pick(ns, "eps", defaults),
        x0=_pick(ns, "x0", defaults),
        theta=ns.theta,
        plateau_a=ns.plateau_a,
        plateau_b=ns.plateau_b,
    )
    paths = _pick(ns, "paths", defaults)
    if ns.command == "simulate" and ns.paths is None:
        paths = SIMULATE_PATHS
    if paths < (0 if ns.command == "simulate" else 1):
        raise ParameterError(f"--paths must be positive, got {paths}")
    workers = ns.workers if ns.workers is not None else harness.default_workers()
    if workers < 1:
        raise ParameterError(f"--workers must be >= 1, got {workers}")
    seed = _pick(ns, "seed", defaults)
    if seed < 0:
        raise ParameterError(f"--seed must be >= 0, got {seed}")
    t_end = _pick(ns, "t", defaults)
    if not (math.isfinite(t_end) and t_end > 0):
        raise ParameterError(f"--t must be > 0, got {t_end}")
    level = _pick(ns, "level", defaults)
    if not 1 <= level <= noise.MAX_LEVEL:
        raise ParameterError(f"--level must lie in [1, {noise.MAX_LEVEL}], got {level}")
    cfg = CliConfig(
        command=ns.command,
        params=params,
        experiment_name=getattr(ns, "name", None),
        t_end=t_end,
        level=level,
        n_paths=paths,
        seed=seed,
        workers=workers,
        eps_grid=getattr(ns, "eps_grid", None) or defaults.get("eps_grid"),
        level_grid=getattr(ns, "level_grid", None) or defaults.get("level_grid"),
        scheme=ns.scheme if hasattr(ns, "scheme") else "euler_ito",
        taming=getattr(ns, "taming", "none"),
        out_path=ns.out,
        format=ns.format,
        x_max=getattr(ns, "x_max", 10.0),
        points=getattr(ns, "points", 201),
        moment_order=getattr(ns, "moment_order", -0.5),
    )
    if cfg.command == "transforms":
        if not (cfg.x_max > 0 and cfg.points >= 2):
            raise ParameterError("--x-max must be > 0 and --points >= 2")
    if cfg.command == "simulate" and cfg.scheme == "exact" and params.theta is None \
            and params.plateau_a == 0 and params.plateau_b == 0 and params.eps == 0:
        params.require_unit_alpha("the exact benchmark solution")
    return cfg


def tool_version() -> str:
    try:
        return metadata.version("hdsim")
    except metadata.PackageNotFoundError:
        return "0+unknown"


# output


def _fmt(v) -> str:
    return format(float(v), ".17g")


def _check_writable(path):
    if path is None:
        return
    target = os.path.abspath(path)
    d = os.path.dirname(target)
    if os.path.isdir(target):
        raise ParameterError(f"cannot write {path!r}: [Errno 21] Is a directory")
    if not os.path.isdir(d):
        raise ParameterError(f"cannot write {path!r}: [Errno 2] No such file or directory: {d!r}")
    if not os.access(d, os.W_OK) or (os.path.exists(target) and not os.access(target, os.W_OK)):
        raise ParameterError(f"cannot write {path!r}: [Errno 13] Permission denied")


def _write(text: str, path):
    """Write atomically: temp file in the target directory, then rename."""
    if path is None:
        sys.stdout.write(text)
        return
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".hdsim-", dir=d)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def paths_csv(paths) -> str:
    """CSV dump with header ``path_index,t,value``; ``paths`` maps path index to Path."""
    buf = io.StringIO()
    buf.write("path_index,t,value\n")
    for idx, path in paths:
        for t, v in zip(path.times, path.values):
            buf.write(f"{idx},{_fmt(t)},{_fmt(v)}\n")
    return buf.getvalue()


def emit_paths(paths, cfg: CliConfig):
    _write(paths_csv(paths), cfg.out_path)


def report_csv(report: harness.ExperimentReport) -> str:
    buf = io.StringIO()
    buf.write("param,mean,std_error,ci_low,ci_high,pass\n")
    for r in report.rows:
        s = r.summary
        param = '"' + r.param.replace('"', '""') + '"' if ("," in r.param or '"' in r.param) else r.param
        buf.write(f"{param},{_fmt(s.mean)},{_fmt(s.std_error)},{_fmt(s.ci_low)},{_fmt(s.ci_high)},"
                  f"{str(bool(r.passed)).lower()}\n")
    return buf.getvalue()


def _json_num(v):
    v = float(v)
    return v if math.isfinite(v) else None


def report_json(report: harness.ExperimentReport, cfg: CliConfig | None = None, now=None) -> str:
    """JSON report; ``timestamp`` holds the only run-dependent values."""
    now = now or datetime.now(timezone.utc)
    doc = {
        "name": report.name,
        "verdict": report.verdict,
        "rows": [
            {"param": r.param, "kind": r.kind, "pass": bool(r.passed),
             "mean": _json_num(r.summary.mean), "std_error": _json_num(r.summary.std_error),
             "n": r.summary.n, "ci_low": _json_num(r.summary.ci_low),
             "ci_high": _json_num(r.summary.ci_high)}
            for r in report.rows
        ],
        "seed": report.seed,
        "level": report.level,
        "n_paths": report.n_paths,
        "tool_version": tool_version(),
        "timestamp": {"utc": now.isoformat(timespec="seconds"), "wall_time": report.wall_time},
    }
    if cfg is not None:
        mp = cfg.params
        doc["config"] = {
            "alpha": mp.alpha, "eps": mp.eps, "x0": mp.x0, "theta": mp.theta,
            "t_end": cfg.t_end, "eps_grid": cfg.eps_grid, "level_grid": cfg.level_grid,
            "workers": cfg.workers, "moment_order": cfg.moment_order,
        }
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def emit_report(report: harness.ExperimentReport, cfg: CliConfig):
    text = report_json(report, cfg) if cfg.format == "json" else report_csv(report)
    _write(text, cfg.out_path)


# commands


def _simulate(cfg: CliConfig):
    mp = cfg.params
    p = noise.make_partition(cfg.t_end, cfg.level)
    out = []
    for i in range(cfg.n_paths):
        pair = noise.sample_bm_pair(p, cfg.seed, i)
        if cfg.scheme == "exact":
            if mp.theta is not None:
                sp = noise.SkewParams(mp.theta, float(f0(mp.x0, mp.alpha)))
                path = exact.skew_solution_path(noise.sample_skew_bm(p, sp, cfg.seed, i), mp.alpha)
            elif mp.plateau_a > 0 or mp.plateau_b > 0:
                path = exact.plateau_path(pair.b, mp.alpha, mp.plateau_a, mp.plateau_b)
            elif mp.eps > 0:
                w_hat = noise.Path(p, (pair.b.values + pair.w.values) / exact.SQRT2)
                path = exact.regularized_exact_path(w_hat, mp.x0, mp)
            else:
                path = exact.benchmark_path(pair.b, mp.x0, mp.alpha)
        else:
            path = integrate.solve(pair, mp.x0, mp, integrate.SchemeConfig(cfg.scheme, cfg.taming))
        out.append((i, path))
    emit_paths(out, cfg)
    return EXIT_OK


def _transforms(cfg: CliConfig):
    mp = cfg.params
    x = np.linspace(-cfg.x_max, cfg.x_max, cfg.points)
    fe = f_eps(x, mp)
    f_zero = f0(x, mp.alpha)
    sig = sigma_eps(x, mp)
    buf = io.StringIO()
    buf.write("x,sigma_eps,f_eps,f0\n")
    for row in zip(x, sig, fe, f_zero):
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    _write(buf.getvalue(), cfg.out_path)
    return EXIT_OK


def _experiment(cfg: CliConfig):
    mp = cfg.params
    theta_grid = (mp.theta,) if mp.theta is not None else None
    ecfg = harness.ExperimentConfig(
        params=mp, t_end=cfg.t_end, level=cfg.level, n_paths=cfg.n_paths, seed=cfg.seed,
        eps_grid=cfg.eps_grid, level_grid=cfg.level_grid, workers=cfg.workers,
        theta_grid=theta_grid, moment_order=cfg.moment_order,
    )
    report = harness.run_experiment(cfg.experiment_name, ecfg)
    emit_report(report, cfg)
    print(f"{report.name}: {report.verdict} ({len(report.rows)} rows, {report.wall_time:.1f}s)", file=sys.stderr)
    return {"pass": EXIT_OK, "fail": EXIT_FAIL}.get(report.verdict, EXIT_NUMERIC)


def run(cfg: CliConfig) -> int:
    """Execute a parsed command and map the outcome to an exit code."""
    try:
        _check_writable(cfg.out_path)
        if cfg.command == "simulate":
            return _simulate(cfg)
        if cfg.command == "transforms":
            return _transforms(cfg)
        return _experiment(cfg)
    except ParameterError as e:
        print(f"hdsim: parameter error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as e:
        print(f"hdsim: numerical error: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as e:
        print(f"hdsim: I/O error: {e}", file=sys.stderr)
        return EXIT_NUMERIC


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_args(argv)
    except UsageError as e:
        print(f"hdsim: usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ParameterError as e:
        print(f"hdsim: parameter error: {e}", file=sys.stderr)
        return EXIT_USAGE
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
