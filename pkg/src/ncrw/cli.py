"""Command-line front end.

Subcommands: ``kernel``, ``density``, ``correlation``, ``simulate``,
``relaxation``, ``selftest``.  Global knobs (tail/quadrature tolerances,
threads, seed, output format, output path) resolve in the order
command-line flag > key=value file named by $NCRW_CONFIG > built-in
default.  Exit codes: 0 success, 1 numerical-convergence failure, 2 usage
error.  All output is deterministic for a fixed argv and seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from .correlations import MultiTimePointSet, correlation_function
from .errors import ConvergenceError
from .kernels import (KernelSpec, StationarySpec, kernel_stationary)
from .martingales import FiniteConfiguration, LatticeSpec
from .montecarlo import OccupationProduct, estimate_many
from .relaxation import relaxation_sweep
from .selftest import run_selftest

_DEFAULTS = {
    "tol_tail": 1e-14,
    "tol_quad": 1e-13,
    "threads": 1,
    "seed": 0,
    "output": None,
    "out": None,
}
_CONFIG_KEYS = {
    "tol-tail": "tol_tail", "tol_tail": "tol_tail",
    "tol-quad": "tol_quad", "tol_quad": "tol_quad",
    "threads": "threads", "seed": "seed", "output": "output", "out": "out",
}


@dataclass(frozen=True)
class RunConfig:
    tol_tail: float
    tol_quad: float
    threads: int
    seed: int
    output: str | None
    out: str | None

    def __post_init__(self):
        for name in ("tol_tail", "tol_quad"):
            v = getattr(self, name)
            if not 0.0 < v <= 1e-4:
                raise ValueError(f"{name} must be in (0, 1e-4], got {v}")
        if self.threads < 1:
            raise ValueError(f"threads must be >= 1, got {self.threads}")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")
        if self.output not in (None, "csv", "json"):
            raise ValueError(f"output must be csv or json, got {self.output}")


def _load_config_file() -> dict:
    path = os.environ.get("NCRW_CONFIG")
    if not path:
        return {}
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            if not sep or key not in _CONFIG_KEYS:
                raise ValueError(
                    f"{path}:{lineno}: expected 'key=value' with a known key, "
                    f"got {raw.strip()!r}")
            out[_CONFIG_KEYS[key]] = value.strip()
    return out


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    merged = dict(_DEFAULTS)
    file_vals = _load_config_file()
    for key, raw in file_vals.items():
        if key in ("tol_tail", "tol_quad"):
            merged[key] = float(raw)
        elif key in ("threads", "seed"):
            merged[key] = int(raw)
        else:
            merged[key] = raw
    for key in _DEFAULTS:
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag
    return RunConfig(**merged)


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(doc: dict, cfg: RunConfig) -> None:
    _emit(json.dumps(doc, indent=2, allow_nan=True) + "\n", cfg)


def _emit_csv(header: list[str], rows: list[list], cfg: RunConfig) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, float) else str(v)
                              for v in row))
    _emit("\n".join(lines) + "\n", cfg)


def _parse_point(text: str) -> tuple[float, int]:
    try:
        t_str, x_str = text.split(",")
        return float(t_str), int(x_str)
    except ValueError as exc:
        raise ValueError(f"--point expects 'T,X', got {text!r}") from exc


def _parse_range(text: str) -> range:
    lo_str, sep, hi_str = text.partition(":")
    if not sep:
        raise ValueError(f"expected 'LO:HI', got {text!r}")
    lo, hi = int(lo_str), int(hi_str)
    if hi < lo:
        raise ValueError(f"empty range {text!r}")
    return range(lo, hi + 1)


def _parse_at_groups(at_args: list[str]) -> MultiTimePointSet:
    groups = []
    for item in at_args:
        t_str, sep, sites_str = item.partition(":")
        if not sep:
            raise ValueError(f"--at expects 'T:X1,X2,...', got {item!r}")
        sites = tuple(sorted(int(v) for v in sites_str.split(",")))
        groups.append((float(t_str), sites))
    groups.sort(key=lambda g: g[0])
    return MultiTimePointSet(tuple(groups))


def _spec_opts(cfg: RunConfig) -> dict:
    return {"eps_tail": cfg.tol_tail, "tol": cfg.tol_quad}


def _points_doc(pts: MultiTimePointSet) -> list:
    return [[t, list(sites)] for t, sites in pts.groups]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_kernel(args, cfg: RunConfig) -> int:
    spec = KernelSpec.parse(args.spec, args.gauge)
    if args.grid:
        parts = args.grid.split(",")
        if len(parts) != 4:
            raise ValueError("--grid expects 'S,XLO:XHI,T,YLO:YHI'")
        s, t = float(parts[0]), float(parts[2])
        xs, ys = _parse_range(parts[1]), _parse_range(parts[3])
        rows = [[_fmt(s), x, _fmt(t), y,
                 spec.evaluate((s, x), (t, y), **_spec_opts(cfg))]
                for x in xs for y in ys]
        _emit_csv(["s", "x", "t", "y", "value"], rows, cfg)
        return 0
    if isinstance(spec.variant, StationarySpec) and args.dt is not None:
        if args.dx is None:
            raise ValueError("--dt requires --dx")
        value = kernel_stationary(spec.variant.rho, args.dt, args.dx,
                                  args.gauge, tol=cfg.tol_quad)
        points = [[0.0, 0], [args.dt, args.dx]] if args.dt >= 0 \
            else [[-args.dt, 0], [0.0, args.dx]]
    else:
        if not args.point or len(args.point) != 2:
            raise ValueError("kernel needs exactly two --point T,X "
                             "(or --dt/--dx with a stationary spec)")
        p, q = (_parse_point(v) for v in args.point)
        value = spec.evaluate(p, q, **_spec_opts(cfg))
        points = [list(p), list(q)]
    if cfg.output == "json":
        _emit_json({"spec": args.spec, "gauge": args.gauge,
                    "points": points, "value": value}, cfg)
    elif cfg.output == "csv":
        _emit_csv(["s", "x", "t", "y", "value"],
                  [[_fmt(float(points[0][0])), int(points[0][1]),
                    _fmt(float(points[1][0])), int(points[1][1]), value]], cfg)
    else:
        _emit(_fmt(value) + "\n", cfg)
    return 0


def _cmd_density(args, cfg: RunConfig) -> int:
    spec = KernelSpec.parse(args.spec, args.gauge)
    window = _parse_range(args.window)
    rows = [[_fmt(args.t), x,
             spec.evaluate((args.t, x), (args.t, x), **_spec_opts(cfg))]
            for x in window]
    if cfg.output == "json":
        _emit_json({"spec": args.spec, "t": args.t,
                    "rows": [[int(r[1]), r[2]] for r in rows]}, cfg)
    else:
        _emit_csv(["t", "x", "rho"], rows, cfg)
    return 0


def _cmd_correlation(args, cfg: RunConfig) -> int:
    spec = KernelSpec.parse(args.spec, args.gauge)
    pts = _parse_at_groups(args.at)
    value = correlation_function(spec, pts, **_spec_opts(cfg))
    if cfg.output == "csv":
        _emit_csv(["points", "value"],
                  [[";".join(f"{t}:" + "|".join(map(str, sites))
                             for t, sites in pts.groups), value]], cfg)
    else:
        _emit_json({"spec": args.spec, "points": _points_doc(pts),
                    "value": value}, cfg)
    return 0


def _cmd_simulate(args, cfg: RunConfig) -> int:
    sites = tuple(int(v) for v in args.config.split(","))
    config = FiniteConfiguration(sites)
    pts = _parse_at_groups(args.at)
    if pts.max_time > args.T:
        raise ValueError(f"--at time {pts.max_time} beyond --T {args.T}")
    result = estimate_many(config, [OccupationProduct(pts)], args.T,
                           args.samples, cfg.seed, args.estimator,
                           threads=cfg.threads)[0]
    analytic = correlation_function(KernelSpec(config), pts,
                                    **_spec_opts(cfg))
    z = (result.mean - analytic) / result.std_error \
        if result.std_error > 0 else None
    doc = {
        "config": list(sites),
        "estimator": args.estimator,
        "T": args.T,
        "n_samples": result.n_samples,
        "seed": cfg.seed,
        "points": _points_doc(pts),
        "estimate": result.mean,
        "std_error": result.std_error,
        "ess": result.effective_samples,
        "analytic_value": analytic,
        "z_score": z,
    }
    if cfg.output == "csv":
        _emit_csv(["estimate", "std_error", "ess", "analytic_value", "z_score"],
                  [[result.mean, result.std_error, result.effective_samples,
                    analytic, float("nan") if z is None else z]], cfg)
    else:
        _emit_json(doc, cfg)
    return 0


def _cmd_relaxation(args, cfg: RunConfig) -> int:
    lattice = LatticeSpec(args.a)
    taus = tuple(float(v) for v in args.tau.split(","))
    displacements = [(args.dt, dx) for dx in range(0, args.dx_max + 1)]
    report = relaxation_sweep(lattice, displacements, taus,
                              tol=cfg.tol_quad, threads=cfg.threads)
    rows = []
    for i, tau in enumerate(report.tau_grid):
        for j, (dt, dx) in enumerate(report.displacements):
            rows.append([_fmt(tau), _fmt(dt), dx,
                         float(report.lattice_values[i, j]),
                         float(report.stationary_values[j]),
                         float(report.gaps[i, j])])
    if cfg.output == "json":
        _emit_json({"a": args.a, "entries": [
            {"tau": float(r[0]), "dt": float(r[1]), "dx": r[2],
             "lattice_value": r[3], "stationary_value": r[4], "gap": r[5]}
            for r in rows]}, cfg)
    else:
        _emit_csv(["tau", "dt", "dx", "lattice_value", "stationary_value",
                   "gap"], rows, cfg)
    return 0


def _cmd_selftest(args, cfg: RunConfig) -> int:
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            return run_selftest(fh)
    return run_selftest(sys.stdout)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-tail", dest="tol_tail", type=float,
                        default=None,
                        help="truncation tail for lattice sums (default 1e-14)")
    common.add_argument("--tol-quad", dest="tol_quad", type=float,
                        default=None,
                        help="quadrature tolerance (default 1e-13)")
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads for sweeps (default 1)")
    common.add_argument("--seed", type=int, default=None,
                        help="base seed for sampling (default 0)")
    common.add_argument("--output", choices=("csv", "json"), default=None,
                        help="override the subcommand's default encoding")
    common.add_argument("--out", default=None,
                        help="write to this path instead of stdout")

    parser = argparse.ArgumentParser(
        prog="ncrw",
        description="Noncolliding continuous-time random walks on Z: "
                    "correlation kernels, determinantal correlations, "
                    "Monte Carlo validation, relaxation diagnostics.")
    sub = parser.add_subparsers(dest="command", required=True)

    k = sub.add_parser("kernel", parents=[common],
                       help="evaluate a correlation kernel at two points")
    k.add_argument("--spec", required=True,
                   help="finite:u1,u2,... | lattice:a | stationary:rho")
    k.add_argument("--gauge", choices=("prob", "paper"), default="prob")
    k.add_argument("--point", action="append", metavar="T,X",
                   help="space-time point; give twice")
    k.add_argument("--dt", type=float, default=None,
                   help="time lag (stationary spec only)")
    k.add_argument("--dx", type=int, default=None,
                   help="displacement (stationary spec only)")
    k.add_argument("--grid", metavar="S,XLO:XHI,T,YLO:YHI", default=None,
                   help="emit CSV over a product of site ranges")
    k.set_defaults(handler=_cmd_kernel)

    d = sub.add_parser("density", parents=[common],
                       help="one-point correlation over a site window")
    d.add_argument("--spec", required=True)
    d.add_argument("--gauge", choices=("prob", "paper"), default="prob")
    d.add_argument("--t", type=float, required=True)
    d.add_argument("--window", required=True, metavar="LO:HI")
    d.set_defaults(handler=_cmd_density)

    c = sub.add_parser("correlation", parents=[common],
                       help="multi-time correlation determinant")
    c.add_argument("--spec", required=True)
    c.add_argument("--gauge", choices=("prob", "paper"), default="prob")
    c.add_argument("--at", action="append", required=True,
                   metavar="T:X1,X2,...", help="one time group; repeatable")
    c.set_defaults(handler=_cmd_correlation)

    s = sub.add_parser("simulate", parents=[common],
                       help="Monte Carlo estimate vs the analytic kernel")
    s.add_argument("--config", required=True, metavar="U1,U2,...",
                   help="strictly increasing start sites")
    s.add_argument("--T", type=float, required=True, help="sampling horizon")
    s.add_argument("--samples", type=int, required=True)
    s.add_argument("--estimator", choices=("h", "dmr"), required=True)
    s.add_argument("--at", action="append", required=True,
                   metavar="T:X1,X2,...")
    s.set_defaults(handler=_cmd_simulate)

    r = sub.add_parser("relaxation", parents=[common],
                       help="gap to the stationary kernel over a tau grid")
    r.add_argument("--a", type=int, required=True, help="lattice spacing >= 2")
    r.add_argument("--dt", type=float, default=0.0)
    r.add_argument("--dx-max", dest="dx_max", type=int, default=5)
    r.add_argument("--tau", required=True, metavar="T1,T2,...")
    r.set_defaults(handler=_cmd_relaxation)

    st = sub.add_parser("selftest", parents=[common],
                        help="run the numerical acceptance checks")
    st.set_defaults(handler=_cmd_selftest)
    return parser


# options whose values may start with '-' (ranges, point lists); argparse
# would read such a value as a flag unless it is fused with '='.
_FUSE_VALUE_FLAGS = ("--window", "--grid", "--point", "--at", "--tau")


def _normalize_argv(argv: list[str]) -> list[str]:
    out = []
    i = 0
    while i < len(argv):
        arg = argv[i]
        if arg in _FUSE_VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{arg}={argv[i + 1]}")
            i += 2
        else:
            out.append(arg)
            i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_normalize_argv(
        sys.argv[1:] if argv is None else list(argv)))
    try:
        cfg = _resolve_config(args)
        return args.handler(args, cfg)
    except ConvergenceError as exc:
        print(f"ncrw: numerical convergence failure: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"ncrw: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
