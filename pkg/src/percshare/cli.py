"""Command-line front end.

Every command writes a CSV table.  The first two lines are comments holding
the SHA-256 of the resolved configuration, the seed, and the configuration
itself as canonical JSON, which is enough to reproduce the table exactly.

Exit codes: 0 success, 2 configuration/IO error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import analytic
from .analytic import AnalyticError
from .montecarlo import (
    HexLattice,
    SweepSpec,
    run_gdm_sweep,
    run_hex_site,
    run_sweep,
    trial_seed,
)
from .params import ParameterError, SharingStrategy, SystemParams
from .spatial import Window, coverage_grid, default_guard, sample_deployment, write_pgm

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

PARAM_KEYS = ("pt_db", "n0_db", "beta_db", "gamma", "alpha")

DEFAULTS = {
    "radius": {"lambda_grid": "lin:0:1e-6:11"},
    "critical": {"strategy": "none,active,passive", "lambda_b": 0.0},
    "sweep": {
        "strategy": "none", "lambda_a_grid": "lin:1e-7:1e-6:10", "lambda_b": 0.0,
        "trials": 200, "seed": 0, "width": 4000.0, "height": None, "pixel": 10.0,
        "guard": None, "connectivity": 8, "crossing": "horizontal", "workers": 1,
        "svg": None, "coverage_svg": None, "pgm": None,
    },
    "gdm": {
        "radius": 50.0, "multiples": "0.5,1,2", "trials": 200, "seed": 0, "width": 2000.0,
        "pixel": 5.0, "guard": None, "connectivity": 8, "crossing": "horizontal",
        "workers": 1, "svg": None,
    },
    "hex": {"p_grid": "0.3,0.5,0.7", "cols": 100, "rows": 100, "trials": 500, "seed": 0,
            "svg": None},
}

# options that only affect side outputs, excluded from the config hash
_SIDE_OUTPUTS = {"svg", "coverage_svg", "pgm", "workers", "out", "config"}


class ConfigError(ValueError):
    pass


def parse_grid(text) -> list[float]:
    """Parse ``lin:start:stop:steps``, ``log:start:stop:steps``, a bare
    ``start:stop:steps`` (linear) or a comma-separated list."""
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    if isinstance(text, (int, float)):
        return [float(text)]
    s = str(text).strip()
    kind = "lin"
    if s.startswith(("lin:", "log:")):
        kind, s = s[:3], s[4:]
    if ":" in s:
        try:
            start, stop, steps = s.split(":")
            start, stop, n = float(start), float(stop), int(steps)
        except ValueError:
            raise ConfigError(f"bad grid {text!r}") from None
        if n < 1:
            raise ConfigError("grid needs at least one step")
        if kind == "log":
            if start <= 0 or stop <= 0:
                raise ConfigError("log grid bounds must be positive")
            return [float(x) for x in np.geomspace(start, stop, n)]
        return [float(x) for x in np.linspace(start, stop, n)]
    try:
        vals = [float(x) for x in s.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"bad grid {text!r}") from None
    if not vals:
        raise ConfigError("empty grid")
    return vals


def _strategies(text) -> list[SharingStrategy]:
    items = text if isinstance(text, (list, tuple)) else str(text).split(",")
    try:
        return [SharingStrategy.parse(s) for s in items if str(s).strip()]
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, float):
        if math.isinf(x):
            return "inf"
        return repr(float(x))
    return str(x)


def load_config(path) -> tuple[dict, dict]:
    """Split a JSON config into (radio parameters, command options)."""
    if path is None:
        return {}, {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    data = dict(data)
    if isinstance(data.get("params"), dict):
        params = data.pop("params")
    else:
        params = {k: data.pop(k) for k in PARAM_KEYS if k in data}
    return params, {k.replace("-", "_"): v for k, v in data.items()}


def resolve(command: str, ns: argparse.Namespace) -> tuple[SystemParams, dict]:
    cli = {k: v for k, v in vars(ns).items() if k not in ("command",)}
    file_params, file_opts = load_config(cli.pop("config", None))
    base = SystemParams().to_dict()
    base.update(file_params)
    for k in PARAM_KEYS:
        if k in cli:
            base[k] = cli.pop(k)
    try:
        params = SystemParams.from_dict(base)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    opts = dict(DEFAULTS[command])
    unknown = set(file_opts) - set(opts) - {"out"}
    if unknown:
        raise ConfigError(f"unknown options for {command}: {sorted(unknown)}")
    opts.update(file_opts)
    opts.update(cli)
    return params, opts


def config_record(command: str, params: SystemParams, opts: dict) -> tuple[str, str]:
    rec = {"command": command, "params": params.to_dict(),
           "options": {k: v for k, v in sorted(opts.items()) if k not in _SIDE_OUTPUTS}}
    text = json.dumps(rec, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest(), text


def _csv_text(command, params, opts, header, rows) -> str:
    digest, text = config_record(command, params, opts)
    buf = io.StringIO()
    buf.write(f"# percshare {command} seed={opts.get('seed', '')} config_sha256={digest}\n")
    buf.write(f"# config={text}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def cmd_radius(params: SystemParams, opts: dict) -> str:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        ok = params.validate()
    rows = []
    for lam in parse_grid(opts["lambda_grid"]):
        try:
            r = analytic.avg_coverage_radius(lam, params)
            lo, hi = analytic.radius_bounds(lam, params)
            err = ""
        except AnalyticError as exc:
            r = lo = hi = None
            err = type(exc).__name__
        rows.append([lam, r, lo, hi, "" if ok else "no-percolation", err])
    header = ["lambda", "r_m", "lower_bound", "upper_bound", "warning", "error"]
    return _csv_text("radius", params, opts, header, rows)


def cmd_critical(params: SystemParams, opts: dict) -> str:
    lb = float(opts["lambda_b"])
    rows = []
    # the no-percolation case is reported in the warning column instead
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        ok = params.validate()
        for strat in _strategies(opts["strategy"]):
            la = analytic.critical_lambda_a(strat, lb, params)
            if strat is SharingStrategy.NO_SHARING:
                total = la
            elif strat is SharingStrategy.PASSIVE_SHARING:
                total = analytic.critical_density_passive(params)
            else:
                total = la + lb
            rows.append([strat.value, lb if strat is not SharingStrategy.NO_SHARING else 0.0,
                         la, total, "" if ok else "no-percolation"])
    header = ["strategy", "lambda_b", "lambda_a_critical", "total_density", "warning"]
    return _csv_text("critical", params, opts, header, rows)


def _sweep_window(params: SystemParams, opts: dict, strategies, grid) -> Window:
    lb = float(opts["lambda_b"])
    if opts.get("guard") is None:
        peak = max(grid)
        if SharingStrategy.PASSIVE_SHARING in strategies:
            peak += lb
        else:
            peak = max(peak, lb)
        opts["guard"] = default_guard(peak, params)
    width = float(opts["width"])
    height = float(opts["height"]) if opts.get("height") is not None else width
    return Window(width, height, float(opts["guard"]), float(opts["pixel"]))


def cmd_sweep(params: SystemParams, opts: dict) -> tuple[str, dict]:
    params.validate()
    strategies = _strategies(opts["strategy"])
    grid = parse_grid(opts["lambda_a_grid"])
    window = _sweep_window(params, opts, strategies, grid)
    results = {}
    rows = []
    for strat in strategies:
        spec = SweepSpec(strat, grid, float(opts["lambda_b"]), int(opts["trials"]), window,
                         int(opts["seed"]), int(opts["connectivity"]), opts["crossing"])
        res = run_sweep(spec, params, workers=int(opts["workers"]))
        results[strat.value] = res
        for p in res:
            rows.append([p.strategy, p.lambda_a, p.lambda_b, p.trials, p.perc_prob,
                         p.ci_low, p.ci_high, p.cov_prop_mean, p.cov_prop_sd])
        if opts.get("pgm"):
            _dump_pgm(Path(opts["pgm"]), strat, spec, params)
    header = ["strategy", "lambda_a", "lambda_b", "trials", "perc_prob", "ci_low", "ci_high",
              "cov_prop_mean", "cov_prop_sd"]
    return _csv_text("sweep", params, opts, header, rows), results


def _dump_pgm(directory: Path, strat: SharingStrategy, spec: SweepSpec, params: SystemParams):
    directory.mkdir(parents=True, exist_ok=True)
    for gi, la in enumerate(spec.lambda_a_grid):
        dep = sample_deployment(la, spec.lambda_b, spec.window, trial_seed(spec.master_seed, gi, 0))
        grid = coverage_grid(strat, dep, params)
        write_pgm(directory / f"{strat.value}_{gi:03d}_trial000.pgm", grid.covered)


def _sweep_svgs(params: SystemParams, opts: dict, results: dict):
    from . import plotting

    if opts.get("svg"):
        plotting.plot_percolation(results, opts["svg"])
    if opts.get("coverage_svg"):
        theory = {}
        lb = float(opts["lambda_b"])
        for key, res in results.items():
            xs = [p.lambda_a for p in res]
            theory[key] = (xs, [analytic.theoretical_coverage(key, x, lb, params) for x in xs])
        plotting.plot_coverage(results, opts["coverage_svg"], theory=theory)


def cmd_gdm(params: SystemParams, opts: dict) -> tuple[str, object]:
    r = float(opts["radius"])
    crit = analytic.gdm_critical_density(r)
    mults = parse_grid(opts["multiples"])
    if opts.get("guard") is None:
        opts["guard"] = 2.0 * r
    window = Window(float(opts["width"]), float(opts["width"]), float(opts["guard"]),
                    float(opts["pixel"]))
    res = run_gdm_sweep([m * crit for m in mults], r, int(opts["trials"]), window,
                        int(opts["seed"]), int(opts["connectivity"]), opts["crossing"],
                        workers=int(opts["workers"]))
    rows = [[m, p.lambda_a, r, p.trials, p.perc_prob, p.ci_low, p.ci_high, p.cov_prop_mean,
             analytic.coverage_probability_gdm(p.lambda_a, r)] for m, p in zip(mults, res)]
    header = ["multiple", "lambda", "radius", "trials", "perc_prob", "ci_low", "ci_high",
              "cov_prop_mean", "p_cov_theory"]
    return _csv_text("gdm", params, opts, header, rows), res


def cmd_hex(params: SystemParams, opts: dict) -> tuple[str, list]:
    rows = []
    for p in parse_grid(opts["p_grid"]):
        lat = HexLattice(int(opts["cols"]), int(opts["rows"]), p, int(opts["seed"]))
        rows.append([p, run_hex_site(lat, int(opts["trials"]))])
    return _csv_text("hex", params, opts, ["open_prob", "crossing_freq"], rows), rows


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    parser = argparse.ArgumentParser(
        prog="percshare",
        description="Percolation criteria and Monte Carlo checks for BS infrastructure sharing.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default=S, help="JSON config file")
        p.add_argument("--out", default=S, help="CSV output path (default: stdout)")
        p.add_argument("--pt-db", dest="pt_db", type=float, default=S)
        p.add_argument("--n0-db", dest="n0_db", type=float, default=S)
        p.add_argument("--beta-db", dest="beta_db", type=float, default=S)
        p.add_argument("--gamma", type=float, default=S)
        p.add_argument("--alpha", type=float, default=S)

    def mc(p):
        p.add_argument("--trials", type=int, default=S)
        p.add_argument("--seed", type=int, default=S)
        p.add_argument("--pixel", type=float, default=S)
        p.add_argument("--guard", type=float, default=S)
        p.add_argument("--width", type=float, default=S)
        p.add_argument("--connectivity", type=int, choices=(4, 8), default=S)
        p.add_argument("--crossing", choices=("horizontal", "vertical", "both"), default=S)
        p.add_argument("--workers", type=int, default=S)
        p.add_argument("--svg", default=S, help="write a percolation chart here")

    p = sub.add_parser("radius", help="average coverage radius over a density grid")
    common(p)
    p.add_argument("--lambda-grid", dest="lambda_grid", default=S)

    p = sub.add_parser("critical", help="critical densities per sharing strategy")
    common(p)
    p.add_argument("--strategy", default=S, help="comma list of none,active,passive")
    p.add_argument("--lambda-b", dest="lambda_b", type=float, default=S)

    p = sub.add_parser("sweep", help="Monte Carlo percolation sweep over lambda_a")
    common(p)
    mc(p)
    p.add_argument("--strategy", default=S, help="comma list of none,active,passive")
    p.add_argument("--lambda-a-grid", dest="lambda_a_grid", default=S,
                   help="lin:start:stop:steps, log:start:stop:steps or a comma list")
    p.add_argument("--lambda-b", dest="lambda_b", type=float, default=S)
    p.add_argument("--height", type=float, default=S)
    p.add_argument("--coverage-svg", dest="coverage_svg", default=S)
    p.add_argument("--pgm", default=S, help="directory for first-trial coverage rasters")

    p = sub.add_parser("gdm", help="Gilbert disk model crossing sweep")
    common(p)
    mc(p)
    p.add_argument("--radius", type=float, default=S)
    p.add_argument("--multiples", default=S, help="densities as multiples of the critical one")

    p = sub.add_parser("hex", help="hexagonal site percolation crossing frequencies")
    common(p)
    p.add_argument("--p-grid", dest="p_grid", default=S)
    p.add_argument("--cols", type=int, default=S)
    p.add_argument("--rows", type=int, default=S)
    p.add_argument("--trials", type=int, default=S)
    p.add_argument("--seed", type=int, default=S)
    p.add_argument("--svg", default=S)
    return parser


def run(argv=None) -> tuple[int, str, str | None]:
    """Execute a command.

    Returns (exit code, CSV text or error message, CSV path or None when the
    table should go to stdout).
    """
    ns = build_parser().parse_args(argv)
    command = ns.command
    out = None
    try:
        params, opts = resolve(command, ns)
        out = opts.pop("out", None)
        if command == "radius":
            text = cmd_radius(params, opts)
        elif command == "critical":
            text = cmd_critical(params, opts)
        elif command == "sweep":
            text, results = cmd_sweep(params, opts)
            _sweep_svgs(params, opts, results)
        elif command == "gdm":
            text, res = cmd_gdm(params, opts)
            if opts.get("svg"):
                from . import plotting
                plotting.plot_percolation({"gdm": res}, opts["svg"])
        else:
            text, rows = cmd_hex(params, opts)
            if opts.get("svg"):
                from . import plotting
                plotting.plot_hex(rows, opts["svg"])
        if out == "-":
            out = None
        if out:
            Path(out).write_text(text)
        return EXIT_OK, text, out
    except AnalyticError as exc:
        return EXIT_NUMERIC, f"numerical error: {type(exc).__name__}: {exc}", None
    except (ParameterError, ConfigError, ValueError, OSError) as exc:
        return EXIT_CONFIG, f"config error: {type(exc).__name__}: {exc}", None


def main(argv=None) -> int:
    code, text, out = run(argv)
    if code != EXIT_OK:
        print(text, file=sys.stderr)
        return code
    if out is None:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
