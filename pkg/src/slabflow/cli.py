"""Command-line front end: runs, verification reports, and CSV series.

Subcommands
-----------
oval       write one closed-form oval slice (theta, kappa, x, y, residual)
run        evolve an approximant and write timeseries.csv + record.npz
verify     run (or load --record) and write report.json; exit 0 iff all
           gated bounds pass
fit        displacement-constant fit for a run or saved record
benchmark  shrinking-sphere extinction error for n in {1,2,3}

Configuration comes from flags, which override an optional `key=value`
file (--config).  The output directory is, in order of precedence, the
--out flag, an `out` entry in the config file, the SLABFLOW_OUTDIR
environment variable, then the current directory.  CSV output is
deterministic: fixed %.14g formatting, no timestamps.
"""
import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .angenent_oval import oval_curvature, oval_point, oval_residual
from .harness import (
    build_report, fit_displacement_constant, run_approximant,
    sphere_benchmark,
)
from .profile import grid
from .solver import Diagnostics, RunRecord, SolverConfig
from .harness import _fill_cross_snapshot
from .solver import _diagnose

__all__ = [
    "CliConfig", "parse_config", "write_timeseries", "write_report",
    "save_record", "load_record", "main",
]

_HEADER = "t,h,l,A,Hmin,Hmax,kmin,lambdamax,area_residual,edge_gap,g"


@dataclass
class CliConfig:
    subcommand: str
    n: int = 2
    R: float = 10.0
    N: int = 512
    safety: float = 0.25
    kappa_stop: float = 1e3
    area_stop: float = 1e-3
    stride: Optional[float] = None
    out: Optional[str] = None
    delta: float = np.pi / 8
    record: Optional[str] = None

    def solver_config(self):
        return SolverConfig(N=self.N, safety=self.safety,
                            kappa_max_stop=self.kappa_stop,
                            area_stop=self.area_stop)

    def outdir(self):
        if self.out is not None:
            return self.out
        return os.environ.get("SLABFLOW_OUTDIR", ".")


def _read_config_file(path, parser):
    vals = {}
    try:
        with open(path) as f:
            for lineno, raw in enumerate(f, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    parser.error(f"{path}:{lineno}: expected key=value")
                key, val = (s.strip() for s in line.split("=", 1))
                vals[key] = val
    except OSError as e:
        parser.error(f"cannot read config file {path}: {e}")
    return vals

_FILE_KEYS = {
    "n": int, "R": float, "N": int, "safety": float, "kappa_stop": float,
    "area_stop": float, "stride": float, "out": str, "delta": float,
    "record": str,
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="slabflow",
        description="rotationally symmetric mean curvature flow in a slab")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    subcommands = {}
    for name, help_ in (
            ("oval", "write a closed-form oval slice as CSV"),
            ("run", "evolve an approximant; write timeseries + record"),
            ("verify", "check all bounds; write report.json"),
            ("fit", "fit the displacement constant"),
            ("benchmark", "shrinking-sphere extinction benchmark")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", metavar="FILE",
                       help="key=value file; flags override it")
        p.add_argument("--n", type=int, default=2, help="ambient dimension")
        p.add_argument("--R", type=float, default=10.0,
                       help="oval age (initial tip height ~ R + log 2)")
        p.add_argument("--N", type=int, default=512, help="grid size")
        p.add_argument("--safety", type=float, default=0.25,
                       help="CFL fraction in (0, 0.5]")
        p.add_argument("--kappa-stop", dest="kappa_stop", type=float,
                       default=1e3, help="curvature stop threshold")
        p.add_argument("--area-stop", dest="area_stop", type=float,
                       default=1e-3, help="area stop threshold")
        p.add_argument("--stride", type=float, default=None,
                       help="snapshot time stride (default: span/1800)")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--delta", type=float, default=np.pi / 8,
                       help="slab inset for the edge gap window")
        if name in ("verify", "fit"):
            p.add_argument("--record", default=None,
                           help="saved record.npz to load instead of running")
        subcommands[name] = p
    return parser, subcommands


def parse_config(argv):
    """Parse argv into a validated CliConfig (flags > config file)."""
    parser, subcommands = _build_parser()
    args = parser.parse_args(argv)
    if args.config:
        vals = _read_config_file(args.config, parser)
        defaults = {}
        for key, raw in vals.items():
            if key not in _FILE_KEYS:
                parser.error(f"unknown config key {key!r}")
            try:
                defaults[key] = _FILE_KEYS[key](raw)
            except ValueError:
                parser.error(f"bad value for {key!r}: {raw!r}")
        # file values become the parse defaults, so explicit flags still
        # win; they must land on the subparser actually consuming them
        subcommands[args.subcommand].set_defaults(
            **{k: v for k, v in defaults.items()
               if k != "record" or args.subcommand in ("verify", "fit")})
        args = parser.parse_args(argv)
    cfg = CliConfig(subcommand=args.subcommand, n=args.n, R=args.R, N=args.N,
                    safety=args.safety, kappa_stop=args.kappa_stop,
                    area_stop=args.area_stop, stride=args.stride,
                    out=args.out, delta=args.delta,
                    record=getattr(args, "record", None))
    if cfg.n < 1:
        parser.error(f"n must be >= 1, got {cfg.n}")
    if cfg.R <= 0:
        parser.error(f"R must be positive, got {cfg.R}")
    if cfg.stride is not None and cfg.stride < 0:
        parser.error("stride must be nonnegative")
    if not 0 < cfg.delta < np.pi / 4:
        parser.error(f"delta must lie in (0, pi/4), got {cfg.delta}")
    try:
        cfg.solver_config()
    except ValueError as e:
        parser.error(str(e))
    return cfg


# ------------------------------------------------------------ serialization
def write_timeseries(r, path):
    """CSV time series, one row per snapshot, %.14g throughout.

    The final column g = ell + t - (n-1) log(-t) is the displacement
    combination whose limit is the constant C; it needs t < 0 and is nan
    on rows (or records) outside that clock.
    """
    lines = [_HEADER]
    for d in r.diagnostics:
        with np.errstate(invalid="ignore", divide="ignore"):
            g = (d.ell + d.t - (r.n - 1) * np.log(-d.t)
                 if d.t < 0 else np.nan)
        row = (d.t, d.h, d.ell, d.A, d.H_min, d.H_max, d.kappa_min,
               d.lambda_max, d.area_identity_residual, d.edge_gap, g)
        lines.append(",".join("%.14g" % v for v in row))
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def _jsonable(v):
    if v is None:
        return None
    v = float(v)
    return v if np.isfinite(v) else None


def write_report(report, fits, path, run_info=None):
    """JSON verification report: run metadata, per-bound verdicts, the
    displacement fit, and a pass/fail summary over the gated bounds."""
    bounds = []
    for e in report.entries:
        entry = {"id": e.id, "margin": _jsonable(e.margin),
                 "worst_t": _jsonable(e.worst_t), "pass": bool(e.passed)}
        if e.vacuous:
            entry["vacuous"] = True
        if not e.gated:
            entry["gated"] = False
        bounds.append(entry)
    gated = [e for e in report.entries if e.gated]
    doc = {
        "run": run_info or {},
        "bounds": bounds,
        "fits": fits,
        "summary": {
            "passed": sum(1 for e in gated if e.passed),
            "failed": sum(1 for e in gated if not e.passed),
        },
    }
    with open(path, "w") as f:
        json.dump(doc, f, indent=2, allow_nan=False)
        f.write("\n")


def _run_info(r):
    return {
        "n": r.n, "R": r.R, "N": r.config.N, "safety": r.config.safety,
        "kappa_max_stop": r.config.kappa_max_stop,
        "area_stop": r.config.area_stop, "termination": r.termination,
        "T_est": _jsonable(r.T_est), "steps": r.steps,
        "dt_max": r.dt_max, "snapshots": len(r.diagnostics),
    }


def save_record(r, path):
    """Archive the raw snapshot state; everything else is recomputable."""
    np.savez_compressed(
        path, times=r.times, kappas=r.kappas, ells=r.ells,
        n=r.n, R=np.nan if r.R is None else r.R,
        T_est=np.nan if r.T_est is None else r.T_est,
        t0=r.t0, dt_max=r.dt_max, steps=r.steps,
        termination=r.termination,
        N=r.config.N, safety=r.config.safety,
        kappa_max_stop=r.config.kappa_max_stop,
        area_stop=r.config.area_stop)


def load_record(path):
    """Rebuild a RunRecord (diagnostics included) from save_record output.

    Diagnostics are recomputed deterministically from the raw snapshots,
    so a round-tripped record yields identical verify verdicts.
    """
    z = np.load(path, allow_pickle=False)
    cfg = SolverConfig(N=int(z["N"]), safety=float(z["safety"]),
                       kappa_max_stop=float(z["kappa_max_stop"]),
                       area_stop=float(z["area_stop"]))
    n = int(z["n"])
    Rv = float(z["R"])
    Tv = float(z["T_est"])
    times = z["times"]
    kappas = z["kappas"]
    ells = z["ells"]
    diags = [_diagnose(kappas[i], float(ells[i]), n, float(times[i]))
             for i in range(len(times))]
    rec = RunRecord(
        n=n, R=None if np.isnan(Rv) else Rv, config=cfg, diagnostics=diags,
        termination=str(z["termination"]), T_est=None if np.isnan(Tv) else Tv,
        t0=float(z["t0"]), times=times, kappas=kappas, ells=ells,
        dt_max=float(z["dt_max"]), steps=int(z["steps"]))
    if rec.T_est is not None:
        _fill_cross_snapshot(rec)
    return rec


# ------------------------------------------------------------- subcommands
def _cmd_oval(cfg):
    outdir = cfg.outdir()
    os.makedirs(outdir, exist_ok=True)
    t = -cfg.R
    theta = grid(cfg.N)[0]
    kap = oval_curvature(theta, t)
    p = oval_point(theta, t)
    res = oval_residual(p, t)
    path = os.path.join(outdir, "oval.csv")
    lines = ["theta,kappa,x,y,residual"]
    for row in zip(theta, kap, p.x, p.y, res):
        lines.append(",".join("%.14g" % v for v in row))
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")
    print(f"wrote {path}")
    return 0


def _obtain_record(cfg):
    if cfg.record is not None:
        return load_record(cfg.record)
    return run_approximant(cfg.n, cfg.R, cfg.solver_config(),
                           stride=cfg.stride)


def _cmd_run(cfg):
    outdir = cfg.outdir()
    os.makedirs(outdir, exist_ok=True)
    r = run_approximant(cfg.n, cfg.R, cfg.solver_config(), stride=cfg.stride)
    ts_path = os.path.join(outdir, "timeseries.csv")
    rec_path = os.path.join(outdir, "record.npz")
    write_timeseries(r, ts_path)
    save_record(r, rec_path)
    print(f"n={r.n} R={r.R} N={r.config.N}: T_est={r.T_est:.6f} "
          f"({r.termination} stop, {r.steps} steps)")
    print(f"wrote {ts_path} and {rec_path}")
    return 0


def _cmd_verify(cfg):
    outdir = cfg.outdir()
    os.makedirs(outdir, exist_ok=True)
    r = _obtain_record(cfg)
    report = build_report(r)
    fits = None
    try:
        fit = fit_displacement_constant(r)
        fits = {"C_est": fit.C_est, "stability": fit.stability}
    except ValueError:
        pass
    path = os.path.join(outdir, "report.json")
    write_report(report, fits, path, run_info=_run_info(r))
    ok = report.passed()
    for e in report.entries:
        tag = "vacuous" if e.vacuous else ("pass" if e.passed else "FAIL")
        print(f"  {e.id:18s} {tag:8s} margin={e.margin:+.4e}"
              if e.margin == e.margin else f"  {e.id:18s} {tag}")
    print(f"wrote {path}; {'all gated bounds pass' if ok else 'FAILURES'}")
    return 0 if ok else 1


def _cmd_fit(cfg):
    r = _obtain_record(cfg)
    fit = fit_displacement_constant(r)
    print(f"C_est={fit.C_est:.6f} stability={fit.stability:.4e} "
          f"(n={r.n}, R={r.R}, T_est={r.T_est:.6f})")
    return 0


def _cmd_benchmark(cfg):
    worst = 0.0
    for n in (1, 2, 3):
        err = sphere_benchmark(n, 1.0, SolverConfig(
            N=256, safety=cfg.safety, kappa_max_stop=cfg.kappa_stop,
            area_stop=cfg.area_stop))
        worst = max(worst, err)
        print(f"n={n}: relative extinction error {err:.3e} "
              f"(target 1/{2 * n})")
    return 0 if worst < 1e-2 else 1


def main(argv=None):
    cfg = parse_config(sys.argv[1:] if argv is None else argv)
    cmd = {"oval": _cmd_oval, "run": _cmd_run, "verify": _cmd_verify,
           "fit": _cmd_fit, "benchmark": _cmd_benchmark}[cfg.subcommand]
    return cmd(cfg)


if __name__ == "__main__":
    sys.exit(main())
