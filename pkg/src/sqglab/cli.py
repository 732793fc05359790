"""
Command-line driver::

    sqg <simulate|picard|verify|decay|lp-inspect> --config FILE [--seed U64] [--out DIR] [--no-timestamp]

Exit codes: 0 success, 1 runtime or numerical failure (or a failed
verdict), 2 usage or validation error. Failures print a JSON error record
to stderr and, when the output directory is usable, write ``error.json``.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import io as sio
from .config import ConfigError, Experiment, ExperimentConfig, load_config
from .inequalities import (
    Family,
    HypothesisError,
    TrialSpec,
    report_rows,
    run_decay_family,
    run_family,
    sweep_uniformity,
)
from .littlewood_paley import band_range, lp_project, reconstruction_residual
from .norms import FitError, fit_gevrey_radius, shell_statistics, sobolev_norm
from .solver import BlowUpError, CFLError, gevrey_track, picard_iterate, solve
from .spectral import GevreyOverflowError, make_grid

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2

_USAGE_ERRORS = (ConfigError, HypothesisError, sio.SnapshotFormatError, sio.ManifestError, FileNotFoundError)
_RUNTIME_ERRORS = (BlowUpError, CFLError, GevreyOverflowError, FitError, FloatingPointError, ArithmeticError,
                   ValueError)


class _Context:
    def __init__(self, cfg: ExperimentConfig, out: Path, timestamp: bool):
        self.cfg = cfg
        self.out = out
        self.timestamp = timestamp
        self.hash = sio.config_hash(cfg.hash_record())

    def path(self, name: str) -> Path:
        return self.out / name

    def stamp(self) -> Optional[str]:
        if not self.timestamp:
            return None
        return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


# simulate ----------------------------------------------------------------------------------


def _initial(ctx: _Context):
    cfg = ctx.cfg
    return cfg.initial_data().sample(cfg.grid_spec(), cfg.gevrey.kappa, cfg.seed)


def _trajectory(ctx: _Context, *, resume: bool = False):
    cfg = ctx.cfg
    tdir = ctx.path("trajectory")
    scfg = cfg.solver_config()
    if resume and (tdir / sio.MANIFEST).exists():
        return sio.resume_trajectory(tdir, scfg, config_hash=ctx.hash)
    traj = solve(_initial(ctx), scfg)
    sio.save_trajectory(tdir, traj, config_hash=ctx.hash, seed=cfg.seed)
    return traj


def _gevrey_or_none(cfg: ExperimentConfig):
    try:
        return cfg.gevrey_params()
    except ValueError:
        return None


def cmd_simulate(ctx: _Context, *, resume: bool = False) -> int:
    cfg = ctx.cfg
    traj = _trajectory(ctx, resume=resume)
    gp = _gevrey_or_none(cfg)
    kappa = cfg.gevrey.kappa
    track = gevrey_track(traj, gp) if gp is not None else None
    rows, fits = [], []
    for i, (t, st) in enumerate(traj):
        row = [t, st.l2(), sobolev_norm(st, 2.0 - kappa)]
        if track is not None:
            tr = track[i]
            fit = tr.fit
            row += [tr.gevrey, tr.weighted]
            row += [fit.rho_hat, fit.alpha_hat, fit.residual] if fit else [None, None, None]
            fits.append({"t": t, "fit": fit.to_record() if fit else None, "overflow": tr.overflow})
        else:
            row += [None] * 5
            fits.append({"t": t, "fit": None, "overflow": False})
        rows.append(row)
    sio.write_csv(
        ctx.path("norm_track.csv"),
        ["t", "l2", "h_crit", "gevrey_h_crit", "weighted_path", "rho_hat", "alpha_hat", "fit_residual"],
        rows,
    )
    sio.write_json(ctx.path("radius_fits.json"), {"config_hash": ctx.hash, "snapshots": fits})
    sio.write_json(ctx.path("run.json"), {
        "config_hash": ctx.hash,
        "seed": cfg.seed,
        "blew_up": traj.blew_up,
        "message": traj.message,
        "n_snapshots": len(traj),
        "monitors": {k: v for k, v in traj.monitors.items() if not isinstance(v, list)},
    })
    _write_spectrum_svg(ctx, traj, gp)
    return EXIT_RUNTIME if traj.blew_up else EXIT_OK


def _write_spectrum_svg(ctx: _Context, traj, gp) -> None:
    t, st = traj.times[-1], traj.states[-1]
    ks, ys = [], []
    if not st.is_zero():
        for sh in shell_statistics(st):
            ks.append(sh.mean(sh.kmag))
            ys.append(sh.mean(sh.log_amp))
    line = None
    if ks and gp is not None:
        try:
            fit = fit_gevrey_radius(st, alpha_fixed=gp.alpha)
            xs = np.linspace(min(ks), max(ks), 64)
            line = (xs.tolist(), (fit.intercept - fit.rho_hat * xs**fit.alpha_hat).tolist())
        except FitError:
            line = None
    svg = sio.spectrum_svg(ks, ys, fit_line=line, title=f"shell-averaged spectrum at t = {t:g}",
                           timestamp=ctx.stamp())
    ctx.path("spectrum.svg").write_text(svg, encoding="utf-8")


# picard ---------------------------------------------------------------------------------------


def cmd_picard(ctx: _Context) -> int:
    cfg = ctx.cfg
    gp = cfg.gevrey_params()
    p = cfg.picard
    _traj, rep = picard_iterate(_initial(ctx), gp, cfg.solver_config(), p.n_max, p.tol, advection=p.advection)
    rec = rep.to_record()
    rec["config_hash"] = ctx.hash
    sio.write_json(ctx.path("picard.json"), rec)
    sio.write_csv(
        ctx.path("contraction.csv"),
        ["iterate", "increment", "contraction_factor"],
        [[i + 1, inc, rep.contraction_factors[i - 1] if i >= 1 else None] for i, inc in enumerate(rep.increments)],
    )
    return EXIT_OK if rep.converged else EXIT_RUNTIME


# verify ----------------------------------------------------------------------------------------


def _families(cfg: ExperimentConfig) -> list[Family]:
    names = cfg.verify.families
    if "all" in names:
        return list(Family)
    return [Family(n) for n in names]


def _decay_trajectory(ctx: _Context):
    """Small-data trajectory that carries the decay snapshot times."""
    return solve(_initial(ctx), ctx.cfg.solver_config())


def cmd_verify(ctx: _Context) -> int:
    cfg = ctx.cfg
    v = cfg.verify
    grid = cfg.grid_spec()
    rdir = ctx.path("reports")
    rdir.mkdir(parents=True, exist_ok=True)
    all_rows: list[dict] = []
    summary = []
    ok = True
    for fam in _families(cfg):
        spec = TrialSpec(fam, dict(v.params.get(fam.value, {})), v.n_trials, cfg.seed, grid)
        if fam is Family.DECAY_COROLLARY:
            spec = spec.with_params(lam=cfg.gevrey.lam, alpha=cfg.gevrey.alpha, kappa=cfg.gevrey.kappa,
                                    beta=cfg.gevrey.beta, n_max=cfg.decay.n_max)
            reps = run_decay_family(spec, _decay_trajectory(ctx), cfg.decay.times)
            for t, rep in zip(cfg.decay.times, reps):
                name = f"{fam.value}_s{t:g}"
                sio.write_json(rdir / f"{name}.json", rep.to_record())
                all_rows += report_rows(rep, spec.with_params(s=float(t)))
                summary.append({"family": name, "c_empirical": rep.c_empirical, "verdict": rep.verdict})
                ok &= rep.verdict
            continue
        if v.axis is not None:
            sw = sweep_uniformity(spec, v.axis, list(v.values), ceiling=v.ceiling)
            sio.write_json(rdir / f"{fam.value}_sweep_{v.axis}.json",
                           {"sweep": sw.to_record(), "reports": [r.to_record() for r in sw.reports]})
            summary.append({"family": fam.value, "axis": v.axis, "uniformity": sw.uniformity,
                            "verdict": sw.passed})
            ok &= sw.passed
            continue
        cmp_grid = make_grid(v.compare_n, grid.domain_length, grid.dealias_fraction) if v.compare_n else None
        rep = run_family(spec, compare_grid=cmp_grid)
        sio.write_json(rdir / f"{fam.value}.json", rep.to_record())
        all_rows += report_rows(rep, spec)
        summary.append({"family": fam.value, "c_empirical": rep.c_empirical, "c_stability": rep.c_stability,
                        "verdict": rep.verdict})
        ok &= rep.verdict
    sio.write_csv(ctx.path("trials.csv"), ["family", "param_hash", "trial", "lhs", "rhs", "ratio"],
                  [[r["family"], r["param_hash"], r["trial"], r["lhs"], r["rhs"], r["ratio"]] for r in all_rows])
    sio.write_json(ctx.path("summary.json"), {"config_hash": ctx.hash, "all_pass": ok, "families": summary})
    return EXIT_OK if ok else EXIT_RUNTIME


# decay ------------------------------------------------------------------------------------------


def cmd_decay(ctx: _Context) -> int:
    cfg = ctx.cfg
    traj = _trajectory(ctx)
    g = cfg.gevrey
    spec = TrialSpec(Family.DECAY_COROLLARY, {"lam": g.lam, "alpha": g.alpha, "kappa": g.kappa, "beta": g.beta,
                                              "n_max": cfg.decay.n_max}, 1, cfg.seed, cfg.grid_spec())
    reps = run_decay_family(spec, traj, cfg.decay.times)
    rows = []
    for t, rep in zip(cfg.decay.times, reps):
        for r in rep.diagnostics["rows"]:
            rows.append([t, r["n"], r["norm"], r["bound"], r["ratio"], r["overflow"]])
    sio.write_csv(ctx.path("decay.csv"), ["s", "n", "norm", "bound", "ratio", "overflow"], rows)
    sio.write_json(ctx.path("decay.json"), {
        "config_hash": ctx.hash,
        "reports": [{"s": t, **rep.to_record()} for t, rep in zip(cfg.decay.times, reps)],
    })
    return EXIT_OK if all(r.verdict for r in reps) else EXIT_RUNTIME


# lp-inspect ---------------------------------------------------------------------------------------


def cmd_lp_inspect(ctx: _Context) -> int:
    cfg = ctx.cfg
    lp = cfg.lp_inspect
    if not lp.snapshot:
        raise ConfigError("lp_inspect.snapshot", "a snapshot path is required")
    f = sio.read_snapshot(lp.snapshot, dealias_fraction=cfg.grid.dealias_fraction)
    br = band_range(f.grid)
    j0 = br.j_min if lp.j_min is None else lp.j_min
    j1 = br.j_max if lp.j_max is None else lp.j_max
    if j1 < j0:
        raise ConfigError("lp_inspect.j_max", "must be >= j_min")
    m = 2.0 - cfg.gevrey.kappa
    rows = []
    for j in range(j0, j1 + 1):
        d = lp_project(f, j)
        rows.append([j, d.l2(), sobolev_norm(d, m)])
    sio.write_csv(ctx.path("bands.csv"), ["j", "l2", "h_crit"], rows)
    res = reconstruction_residual(f)
    sio.write_json(ctx.path("lp_inspect.json"), {"snapshot": Path(lp.snapshot).name, "n": f.grid.n,
                                                 "reconstruction_residual": res, "j_min": j0, "j_max": j1})
    print(f"reconstruction_residual={format(res, '.17g')}")
    return EXIT_OK


_COMMANDS = {
    Experiment.SIMULATE: cmd_simulate,
    Experiment.PICARD: cmd_picard,
    Experiment.VERIFY: cmd_verify,
    Experiment.DECAY: cmd_decay,
    Experiment.LP_INSPECT: cmd_lp_inspect,
}


# entry point ----------------------------------------------------------------------------------------


def _u64(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sqg", description="Dissipative SQG and Gevrey-regularity lab.")
    ap.add_argument("command", choices=[e.value for e in Experiment])
    ap.add_argument("--config", help="YAML config file (default: $SQG_CONFIG)")
    ap.add_argument("--seed", type=_u64, help="override the config seed")
    ap.add_argument("--out", help="override the output directory")
    ap.add_argument("--no-timestamp", action="store_true", help="omit timestamps so every output is byte-stable")
    ap.add_argument("--resume", action="store_true", help="simulate: continue a stored trajectory")
    return ap


def _error(kind: str, exc: BaseException, code: int, out: Optional[Path]) -> int:
    rec = {"error": kind, "type": type(exc).__name__, "message": str(exc), "exit_code": code}
    if isinstance(exc, ConfigError):
        rec["field"] = exc.field_name
    sys.stderr.write(sio.dumps_json(rec))
    if out is not None and out.is_dir():
        try:
            sio.write_json(out / "error.json", rec)
        except OSError:
            pass
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    out: Optional[Path] = None
    try:
        cfg = load_config(args.config)
        cfg = cfg.with_overrides(seed=args.seed, output_dir=args.out)
        cmd = Experiment(args.command)
        if cfg.experiment is not cmd:
            cfg = ExperimentConfig.from_dict({**cfg.to_dict(), "experiment": cmd.value})
        out = Path(cfg.output_dir)
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigError("output_dir", f"not writable: {exc}") from None
        ctx = _Context(cfg, out, timestamp=not args.no_timestamp)
        if cmd is Experiment.SIMULATE:
            return cmd_simulate(ctx, resume=args.resume)
        return _COMMANDS[cmd](ctx)
    except _USAGE_ERRORS as exc:
        return _error("validation", exc, EXIT_USAGE, out)
    except _RUNTIME_ERRORS as exc:
        return _error("runtime", exc, EXIT_RUNTIME, out)


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
