"""
Acceptance suite. Every test prints one ``criterion k: PASS/FAIL`` line, and
the lines are repeated in the pytest terminal summary.
"""

import math

import numpy as np
import pytest

from conftest import random_field, record_criterion
from sqglab.cli import main
from sqglab.inequalities import Family, TrialSpec, run_decay_family, run_family, sweep_uniformity
from sqglab.littlewood_paley import (
    band_range,
    bony_residual,
    gevrey_commutator,
    gevrey_commutator_expansion,
    interior_bands,
    lp_lowpass,
    lp_project,
    spectral_localization_check,
)
from sqglab.norms import path_norm, sobolev_norm
from sqglab.solver import (
    InitialData,
    Scheme,
    SolverConfig,
    default_snapshot_times,
    gevrey_track,
    nonlinear_term,
    picard_iterate,
    solve,
)
from sqglab.spectral import GevreyParams, dissipative_semigroup, make_grid, to_physical, to_spectral
from sqglab.trajectory import Trajectory

TOL = 1e-10
LAB = GevreyParams.make(0.1, 0.6, 0.8, 0.2)
PRESET = GevreyParams.make(1.0, 0.6, 0.8, 0.2)
S_VALUES = (0.05, 0.2, 1.0, 5.0)


def _small_data(grid, seed):
    return InitialData(target_norm=0.01).sample(grid, 0.8, seed)


@pytest.fixture(scope="module")
def small_run():
    grid = make_grid(128)
    theta0 = _small_data(grid, 0)
    cfg = SolverConfig(kappa=0.8, dt=0.02, t_end=1.0, snapshot_times=default_snapshot_times(1.0))
    return theta0, cfg, solve(theta0, cfg)


def test_criterion_1_exact_identities():
    grid = make_grid(128)
    bands = interior_bands(grid)
    br = band_range(grid)
    worst = {"parseval": 0.0, "bony": 0.0, "expansion": 0.0, "localization": 0.0, "cancellation": 0.0}
    for seed in range(100):
        f = random_field(grid, 2 * seed, cutoff=40)
        g = random_field(grid, 2 * seed + 1, cutoff=40)
        x = to_physical(f)
        back = to_spectral(x, grid)
        parseval = abs(np.mean(x**2) - f.l2() ** 2) / f.l2() ** 2
        worst["parseval"] = max(worst["parseval"], parseval, (back - f).l2() / f.l2())
        worst["bony"] = max(worst["bony"], bony_residual(f, g))

        j = bands[seed % len(bands)]
        comm = gevrey_commutator(f, g, j, LAB, 1.0)
        terms = gevrey_commutator_expansion(f, g, j, LAB, 1.0)
        total = sum(terms.values(), grid.zeros())
        worst["expansion"] = max(worst["expansion"], (total - comm).l2() / comm.l2())

        # relative to the size of the inputs to each product
        for k in br:
            scale_lh = lp_lowpass(f, k).l2() * lp_project(g, k).l2()
            scale_hh = lp_project(f, k).l2() * g.l2()
            for i in br:
                lh, hh = spectral_localization_check(f, g, i, k)
                if abs(i - k) >= 3 and scale_lh > 0:
                    worst["localization"] = max(worst["localization"], lh / scale_lh)
                if i >= k + 6 and scale_hh > 0:
                    worst["localization"] = max(worst["localization"], hh / scale_hh)

        nl = nonlinear_term(f)
        inner = float(np.real(np.vdot(f.coeffs, nl.coeffs)))
        worst["cancellation"] = max(worst["cancellation"], abs(inner) / (nl.l2() * f.l2()))
    ok = all(v <= TOL for v in worst.values())
    record_criterion(1, ok, "max relative errors " + ", ".join(f"{k}={v:.2e}" for k, v in worst.items()))
    assert ok, worst


ZERO_SLACK = (Family.CONVEXITY, Family.TITI_INTERP, Family.SEMIGROUP_SMOOTHING, Family.GEVREY_YOUNG)


def test_criterion_2_zero_slack_families():
    grid = make_grid(128)
    parts, ok = [], True
    for fam in ZERO_SLACK:
        rep = run_family(TrialSpec(fam, n_trials=50, seed=0, grid=grid))
        good = rep.violations == 0 and rep.c_empirical <= 1 + TOL and rep.verdict
        ok &= good
        parts.append(f"{fam.value}: max ratio {rep.c_empirical:.12f}, {rep.violations} violations")
    rep = run_family(TrialSpec(Family.CONVEXITY, {"n_scalar": 10_000}, n_trials=50, grid=grid))
    ok &= rep.diagnostics["scalar_trials"] >= 10_000
    record_criterion(2, ok, "; ".join(parts))
    assert ok, parts


@pytest.mark.slow
def test_criterion_3_commutator_uniformity():
    grids = {128: make_grid(128), 256: make_grid(256)}
    base = {n: TrialSpec(Family.COMMUTATOR, n_trials=50, seed=7, grid=g) for n, g in grids.items()}
    problems, cells = [], {}
    for n, spec in base.items():
        js = interior_bands(grids[n])
        s_sweep = sweep_uniformity(spec, "s", S_VALUES)
        for s, rep in zip(S_VALUES, s_sweep.reports):
            cells[(n, "s", s)] = rep.c_empirical
        if not s_sweep.passed:
            problems.append(f"N={n} s-sweep uniformity {s_sweep.uniformity:.2f}")
        for s in S_VALUES:
            j_sweep = sweep_uniformity(spec.with_params(s=s), "j", js)
            for j, rep in zip(js, j_sweep.reports):
                cells[(n, j, s)] = rep.c_empirical
            if not j_sweep.passed:
                problems.append(f"N={n} s={s} j-sweep uniformity {j_sweep.uniformity:.2f}")
    finite = all(math.isfinite(c) and c > 0 for c in cells.values())
    ratios = [cells[(256,) + key[1:]] / c for key, c in cells.items() if key[0] == 128]
    stab = (min(ratios), max(ratios))
    if not 0.5 <= stab[0] <= stab[1] <= 2.0:
        problems.append(f"N=128->256 stability range [{stab[0]:.2f}, {stab[1]:.2f}]")
    ok = finite and not problems
    detail = f"{len(cells)} cells, stability [{stab[0]:.2f}, {stab[1]:.2f}]"
    record_criterion(3, ok, detail + ("; " + "; ".join(problems) if problems else ""))
    assert ok, problems


def test_criterion_4_linear_caloric():
    grid = make_grid(128)
    p = {"lam": PRESET.lam, "alpha": PRESET.alpha, "kappa": PRESET.kappa, "beta": PRESET.beta}
    rep = run_family(TrialSpec(Family.LINEAR_CALORIC, p, n_trials=20, seed=0, grid=grid))
    d = rep.diagnostics
    C = d["proof_constant"]
    bounded = all(r <= C * (1 + TOL) for row in d["ratios_by_T"] for r in row)
    monotone = all(all(b >= a for a, b in zip(row, row[1:])) for row in d["ratios_by_T"])
    strict = all(row[0] < row[1] < row[2] for row in d["ratios_by_T"])
    ok = bounded and monotone and strict and rep.verdict
    worst_small = max(row[0] for row in d["ratios_by_T"])
    record_criterion(
        4, ok,
        f"max ratio {rep.c_empirical:.3f} <= C={C:.3f}; ratio at T={d['T'][0]:g} at most {worst_small:.3f}; "
        f"non-increasing as T decreases: {monotone}",
    )
    assert ok


def test_criterion_5_picard_contraction():
    grid = make_grid(128)
    theta0 = _small_data(grid, 0)
    cfg = SolverConfig(kappa=0.8, dt=0.02, t_end=1.0, snapshot_times=default_snapshot_times(1.0))
    tol = 1e-10
    traj, rep = picard_iterate(theta0, PRESET, cfg, n_max=20, tol=tol)
    direct = solve(theta0, cfg)
    diff = Trajectory(traj.times, [a - b for a, b in zip(traj.states, direct.states)])
    gap = path_norm(diff, PRESET)
    limit = 5 * tol * rep.path_norms[0]
    factors_ok = all(f < 0.5 for f in rep.contraction_factors)
    ok = rep.converged and factors_ok and gap <= limit
    record_criterion(
        5, ok,
        f"{rep.n_iters} iterates, max factor {max(rep.contraction_factors, default=0):.2e}, "
        f"E_T gap {gap:.2e} <= {limit:.2e}",
    )
    assert ok


def test_criterion_6_gevrey_regularization(small_run):
    theta0, cfg, traj = small_run
    rows = gevrey_track(traj, PRESET)
    fits = [(r.s, r.fit) for r in rows if r.s > 0]
    positive = all(f is not None and f.rho_hat > 0 for _, f in fits)
    window = [f.rho_hat for s, f in fits if 0.05 <= s <= 1.0 and f is not None]
    nondecreasing = all(b >= a for a, b in zip(window, window[1:]))
    consts = []
    for seed in range(3):
        th = _small_data(traj.grid, seed)
        tr = traj if seed == 0 else solve(th, cfg)
        consts.append(path_norm(tr, PRESET) / sobolev_norm(th, 2 - PRESET.kappa, homogeneous=False))
    spread = max(consts) / min(consts)
    ok = positive and nondecreasing and spread <= 2.0
    record_criterion(
        6, ok,
        f"rho_hat {window[0]:.4f} -> {window[-1]:.4f} on [0.05, 1], positive={positive}, "
        f"nondecreasing={nondecreasing}; path constants {[round(c, 4) for c in consts]} spread {spread:.3f}",
    )
    assert ok


def test_criterion_7_decay_corollary(small_run):
    _, _, traj = small_run
    p = {"lam": PRESET.lam, "alpha": PRESET.alpha, "kappa": PRESET.kappa, "beta": PRESET.beta, "n_max": 10}
    reps = run_decay_family(TrialSpec(Family.DECAY_COROLLARY, p, n_trials=1, grid=traj.grid), traj, [0.5, 1.0])
    worst = max(r.c_empirical for r in reps)
    lowest = min(t.ratio for r in reps for t in r.trials)
    ok = all(r.verdict for r in reps) and worst <= 2.0 and lowest >= 0.0
    record_criterion(7, ok, f"ratios in [{lowest:.3e}, {worst:.3f}] for n <= 10 at s = 0.5, 1")
    assert ok


def test_criterion_8_solver_order():
    grid = make_grid(64)
    theta0 = InitialData(target_norm=1.0, k0=6.0).sample(grid, 0.8, 0)
    cfg = lambda dt: SolverConfig(kappa=0.8, dt=dt, t_end=0.5, scheme=Scheme.IFRK4, cfl_safety=0.99)
    ref = solve(theta0, cfg(0.05 / 32)).states[-1]
    errs = [(solve(theta0, cfg(dt)).states[-1] - ref).l2() for dt in (0.05, 0.025, 0.0125)]
    orders = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
    th = random_field(grid, 1)
    lin = solve(th, SolverConfig(kappa=0.8, dt=0.05, t_end=1.0, linear_only=True)).states[-1]
    exact = dissipative_semigroup(th, 0.8, 1.0)
    lin_err = (lin - exact).l2() / exact.l2()
    ok = min(orders) >= 3.7 and lin_err <= 1e-12
    record_criterion(8, ok, f"observed orders {[round(o, 3) for o in orders]}, linear-only error {lin_err:.1e}")
    assert ok


def _write_config(path, text):
    path.write_text(text)
    return str(path)


def test_criterion_9_determinism(tmp_path):
    from sqglab.io import write_snapshot

    snap = tmp_path / "snap.sqgf"
    write_snapshot(snap, random_field(make_grid(64), 3))
    common = (
        "grid: {n: 64}\n"
        "solver: {dt: 0.05, t_end: 0.5, snapshot_times: [0.125, 0.25]}\n"
        "decay: {times: [0.25, 0.5], n_max: 8}\n"
        "picard: {n_max: 6, tol: 1.0e-9}\n"
        "verify: {families: [Convexity, GevreyYoung, Commutator], n_trials: 3}\n"
        f"lp_inspect: {{snapshot: '{snap}'}}\n"
    )
    cfg = _write_config(tmp_path / "cfg.yaml", common)
    mismatched, compared = [], 0
    for cmd in ("simulate", "picard", "verify", "decay", "lp-inspect"):
        outs = []
        for run in ("a", "b"):
            out = tmp_path / f"{cmd}_{run}"
            code = main([cmd, "--config", cfg, "--seed", "11", "--out", str(out), "--no-timestamp"])
            assert code in (0, 1)
            outs.append(out)
        files = sorted(p.relative_to(outs[0]) for p in outs[0].rglob("*") if p.is_file())
        for rel in files:
            if rel.suffix in (".csv", ".json", ".svg", ".sqgf"):
                compared += 1
                if (outs[0] / rel).read_bytes() != (outs[1] / rel).read_bytes():
                    mismatched.append(f"{cmd}/{rel}")
    ok = not mismatched and compared > 0
    record_criterion(9, ok, f"{compared} output files compared across 5 commands, {len(mismatched)} differ")
    assert ok, mismatched
