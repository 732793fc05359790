"""
Pseudo-spectral time integration of the dissipative SQG equation

    d_t theta + u . grad theta + Lambda^kappa theta = 0,   u = (-R2 theta, R1 theta),

and the Picard sequence in which iterate ``n+1`` is advected by the velocity
of iterate ``n``.

Dissipation is integrated exactly by the factor ``exp(-t Lambda^kappa)``.
The explicit part is either classical RK4 in the integrating-factor variable
(``IFRK4``) or the two-stage exponential Runge-Kutta scheme (``ETD2``).

Both the direct solve and each Picard iterate run the same integrator core;
they differ only in where the advecting velocity comes from at each stage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import exprel

from .norms import FitError, RadiusFit, fit_gevrey_radius, gevrey_norm, path_norm, sobolev_norm
from .spectral import (
    GevreyOverflowError,
    GevreyParams,
    GridSpec,
    SpectralField,
    field_from_envelope,
    semigroup_multiplier,
)
from .trajectory import Trajectory

BLOWUP_MAX = 1e100
BLOWUP_GROWTH = 1e6
CFL_CHECK_EVERY = 10


class Scheme(str, Enum):
    IFRK4 = "IFRK4"
    ETD2 = "ETD2"


class BlowUpError(FloatingPointError):
    """Physical values or per-step norm growth exceeded the blow-up guard."""


class CFLError(ValueError):
    """The time step violates the advective CFL limit."""


@dataclass(frozen=True)
class SolverConfig:
    """
    Time-stepping parameters.

    Between consecutive output times the interval is split into the smallest
    number of equal steps not exceeding ``dt``, so outputs land exactly on
    ``snapshot_times`` and the step sequence is a pure function of the config.
    """

    kappa: float
    dt: float
    t_end: float
    scheme: Scheme = Scheme.IFRK4
    snapshot_times: tuple[float, ...] = ()
    cfl_safety: float = 0.5
    linear_only: bool = False

    def __post_init__(self) -> None:
        if not self.kappa > 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.t_end > 0:
            raise ValueError(f"t_end must be positive, got {self.t_end}")
        if not 0 < self.cfl_safety < 1:
            raise ValueError(f"cfl_safety must lie in (0, 1), got {self.cfl_safety}")
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        ts = tuple(float(t) for t in self.snapshot_times)
        if any(t < 0 or t > self.t_end for t in ts):
            raise ValueError("snapshot_times must lie in [0, t_end]")
        object.__setattr__(self, "snapshot_times", ts)

    def output_times(self) -> list[float]:
        return sorted({0.0, self.t_end, *self.snapshot_times})

    def schedule(self, t_start: float = 0.0) -> list[tuple[float, float, int]]:
        """``(t0, t1, n_steps)`` per output interval after ``t_start``."""
        out = []
        times = [t for t in self.output_times() if t >= t_start]
        for a, b in zip(times, times[1:]):
            n = max(1, math.ceil((b - a) / self.dt - 1e-9))
            out.append((a, b, n))
        return out


def default_snapshot_times(t_end: float, n_uniform: int = 64, n_refine: int = 16) -> tuple[float, ...]:
    """``n_uniform`` equispaced times plus ``n_refine`` geometric ones below the first."""
    uni = [t_end * i / n_uniform for i in range(1, n_uniform + 1)]
    first = uni[0]
    geo = np.geomspace(first * 1e-3, first, n_refine + 1)[:-1]
    return tuple(sorted(set(float(t) for t in geo) | set(uni)))


# nonlinear term ---------------------------------------------------------------


def _physical(c: np.ndarray) -> np.ndarray:
    return np.fft.ifft2(c).real * c.shape[0] ** 2


def velocity_physical(theta: SpectralField) -> tuple[np.ndarray, np.ndarray]:
    """Physical samples of the truncated velocity of ``theta``."""
    g = theta.grid
    keep = g.nonzero & ~g.nyquist & g.dealias_mask
    inv = np.zeros((g.n, g.n))
    inv[keep] = 1.0 / g.kmag[keep]
    c = theta.coeffs * inv
    return _physical(-1j * g.k2 * c), _physical(1j * g.k1 * c)


def _advect(u: tuple[np.ndarray, np.ndarray], phi: SpectralField) -> np.ndarray:
    """Coefficients of the dealiased ``u . grad phi``."""
    g = phi.grid
    keep = g.dealias_mask & ~g.nyquist
    c = np.where(keep, phi.coeffs, 0.0)
    prod = u[0] * _physical(1j * g.k1 * c) + u[1] * _physical(1j * g.k2 * c)
    top = float(np.max(np.abs(prod))) if prod.size else 0.0
    if not top <= BLOWUP_MAX:
        raise BlowUpError(f"physical advection term reached {top:.3g}")
    out = np.fft.fft2(prod) / g.n**2
    out *= g.dealias_mask
    out[0, 0] = 0.0
    return out


def nonlinear_term(theta: SpectralField) -> SpectralField:
    """Dealiased ``u . grad theta`` with ``u`` the Riesz velocity of ``theta``."""
    return SpectralField(theta.grid, _advect(velocity_physical(theta), theta))


# integrator core -----------------------------------------------------------------

# (step index, stage index, stage time, stage state) -> physical velocity or None
VelocitySource = Callable[[int, int, float, SpectralField], Optional[tuple[np.ndarray, np.ndarray]]]


def _self_velocity(_i: int, _s: int, _t: float, state: SpectralField):
    return velocity_physical(state)


class _Factors:
    """Per-step-size multipliers, cached because the schedule reuses few sizes."""

    def __init__(self, grid: GridSpec, kappa: float):
        self.grid = grid
        self.kappa = kappa
        self._cache: dict[float, dict[str, np.ndarray]] = {}

    def get(self, h: float) -> dict[str, np.ndarray]:
        if h not in self._cache:
            lk = self.grid.power(self.kappa)
            z = -h * lk
            phi1 = exprel(z)
            small = np.abs(z) < 1e-3
            phi2 = np.where(small, 0.5 + z / 6 + z**2 / 24, (phi1 - 1.0) / np.where(small, 1.0, z))
            self._cache[h] = {
                "E": semigroup_multiplier(self.grid, self.kappa, h),
                "E2": semigroup_multiplier(self.grid, self.kappa, h / 2),
                "phi1": phi1,
                "phi2": phi2,
            }
        return self._cache[h]


def _rhs(source: Optional[VelocitySource], i: int, s: int, t: float, state: SpectralField,
         record: Optional[list]) -> np.ndarray:
    """``-u . grad state`` with ``u`` from ``source``; records the velocity of ``state``."""
    own = velocity_physical(state) if record is not None or source is _self_velocity else None
    if record is not None:
        record.append(own)
    if source is None:
        return np.zeros_like(state.coeffs)
    u = own if source is _self_velocity else source(i, s, t, state)
    if u is None:
        return np.zeros_like(state.coeffs)
    return -_advect(u, state)


def _step(theta: SpectralField, h: float, t: float, i: int, scheme: Scheme, fac: dict,
          source: Optional[VelocitySource], record: Optional[list]) -> SpectralField:
    g = theta.grid
    c = theta.coeffs
    E, E2 = fac["E"], fac["E2"]
    if scheme is Scheme.IFRK4:
        k1 = _rhs(source, i, 0, t, theta, record)
        a = SpectralField(g, E2 * (c + 0.5 * h * k1))
        k2 = _rhs(source, i, 1, t + h / 2, a, record)
        b = SpectralField(g, E2 * c + 0.5 * h * k2)
        k3 = _rhs(source, i, 2, t + h / 2, b, record)
        d = SpectralField(g, E * c + h * E2 * k3)
        k4 = _rhs(source, i, 3, t + h, d, record)
        new = E * c + (h / 6.0) * (E * k1 + 2.0 * E2 * (k2 + k3) + k4)
    else:
        k1 = _rhs(source, i, 0, t, theta, record)
        a = SpectralField(g, E * c + h * fac["phi1"] * k1)
        k2 = _rhs(source, i, 1, t + h, a, record)
        new = a.coeffs + h * fac["phi2"] * (k2 - k1)
    return SpectralField(g, new)


def step(theta: SpectralField, cfg: SolverConfig, *, h: Optional[float] = None) -> SpectralField:
    """
    One step of size ``h`` (default ``cfg.dt``).

    Raises
    ------
    CFLError
        ``h`` exceeds ``cfl_safety * dx / max|u|``.
    BlowUpError
        Physical values exceed the blow-up guard.
    """
    h = cfg.dt if h is None else h
    if not cfg.linear_only:
        _check_cfl(theta, h, cfg.cfl_safety)
    fac = _Factors(theta.grid, cfg.kappa).get(h)
    src = None if cfg.linear_only else _self_velocity
    return _step(theta, h, 0.0, 0, cfg.scheme, fac, src, None)


def max_velocity(theta: SpectralField) -> float:
    u1, u2 = velocity_physical(theta)
    return float(np.sqrt(np.max(u1**2 + u2**2)))


def _check_cfl(theta: SpectralField, h: float, safety: float) -> None:
    umax = max_velocity(theta)
    dx = theta.grid.domain_length / theta.grid.n
    if umax > 0 and h > safety * dx / umax:
        raise CFLError(f"dt={h:.3g} exceeds CFL limit {safety * dx / umax:.3g} (max|u|={umax:.3g})")


@dataclass
class _RunResult:
    traj: Trajectory
    stages: list = field(default_factory=list)


def _integrate(theta0: SpectralField, cfg: SolverConfig, source: Optional[VelocitySource], *,
               t_start: float = 0.0, record: bool = False, check_cfl: bool = True) -> _RunResult:
    factors = _Factors(theta0.grid, cfg.kappa)
    times = [t_start]
    states = [theta0]
    stages: list = []
    l2 = [theta0.l2()]
    hnorm = [sobolev_norm(theta0, 2.0 - cfg.kappa)]
    worst_increase = 0.0
    theta = theta0
    i = 0
    blew_up = False
    message = ""
    try:
        for a, b, n in cfg.schedule(t_start):
            h = (b - a) / n
            fac = factors.get(h)
            for m in range(n):
                if check_cfl and source is not None and i % CFL_CHECK_EVERY == 0:
                    _check_cfl(theta, h, cfg.cfl_safety)
                t = a + m * h
                rec = [] if record else None
                prev = theta.l2()
                theta = _step(theta, h, t, i, cfg.scheme, fac, source, rec)
                if record:
                    stages.append(rec)
                cur = theta.l2()
                if not np.isfinite(cur) or (prev > 0 and cur > BLOWUP_GROWTH * prev):
                    raise BlowUpError(f"L2 norm jumped from {prev:.3g} to {cur:.3g} at t={t + h:.6g}")
                if prev > 0:
                    worst_increase = max(worst_increase, (cur - prev) / prev)
                i += 1
            times.append(b)
            states.append(theta)
            l2.append(theta.l2())
            hnorm.append(sobolev_norm(theta, 2.0 - cfg.kappa))
    except BlowUpError as exc:
        blew_up = True
        message = str(exc)
    monitors = {
        "l2": l2,
        "h_crit": hnorm,
        "l2_max_relative_increase": worst_increase,
        "n_steps": i,
    }
    traj = Trajectory(times, states, blew_up=blew_up, message=message, monitors=monitors)
    return _RunResult(traj, stages)


def solve(theta0: SpectralField, cfg: SolverConfig, *, t_start: float = 0.0) -> Trajectory:
    """
    Integrate from ``t_start`` (default 0) to ``cfg.t_end``.

    The returned trajectory holds ``theta0`` at ``t_start`` and a snapshot at
    every later output time. On blow-up the trajectory is truncated at the
    last completed output time and ``blew_up`` is set. Monitors record the
    L2 and critical Sobolev norms at each snapshot and the largest relative
    per-step L2 increase.

    Raises
    ------
    CFLError
        The advective CFL limit is violated at a check (every 10 steps).
    """
    src = None if cfg.linear_only else _self_velocity
    return _integrate(theta0, cfg, src, t_start=t_start).traj


# Picard iteration -----------------------------------------------------------------------


@dataclass
class PicardReport:
    n_iters: int
    path_norms: list[float]
    increments: list[float]
    contraction_factors: list[float]
    converged: bool
    message: str = ""

    def __post_init__(self) -> None:
        if len(self.contraction_factors) != max(len(self.increments) - 1, 0):
            raise ValueError("one contraction factor per consecutive increment pair")

    def to_record(self) -> dict:
        return {
            "n_iters": self.n_iters,
            "path_norms": list(self.path_norms),
            "increments": list(self.increments),
            "contraction_factors": list(self.contraction_factors),
            "converged": self.converged,
            "message": self.message,
        }


def _stored_source(stages: list) -> VelocitySource:
    def src(i, s, _t, _state):
        return stages[i][s]

    return src


def _interp_source(traj: Trajectory) -> VelocitySource:
    times = np.asarray(traj.times)
    vel = [velocity_physical(st) for st in traj.states]

    def src(_i, _s, t, _state):
        k = int(np.searchsorted(times, t, side="right")) - 1
        k = min(max(k, 0), len(times) - 2)
        w = (t - times[k]) / (times[k + 1] - times[k])
        w = min(max(w, 0.0), 1.0)
        return ((1 - w) * vel[k][0] + w * vel[k + 1][0], (1 - w) * vel[k][1] + w * vel[k + 1][1])

    return src


def _difference(a: Trajectory, b: Trajectory) -> Trajectory:
    return Trajectory(list(a.times), [x - y for x, y in zip(a.states, b.states)])


def picard_iterate(
    theta0: SpectralField,
    params: GevreyParams,
    cfg: SolverConfig,
    n_max: int = 20,
    tol: float = 1e-10,
    *,
    advection: str = "stage",
) -> tuple[Trajectory, PicardReport]:
    """
    Picard sequence with ``theta^(-1) = 0``: iterate ``n+1`` solves the linear
    transport-dissipation equation advected by the velocity of iterate ``n``.

    ``advection="stage"`` feeds each step stage the velocity of the previous
    iterate at the same stage, so the fixed point is exactly the direct
    solver's discrete solution. ``advection="interp"`` interpolates the
    previous iterate linearly in time between output snapshots.

    Iteration stops when ``||theta^(n+1) - theta^(n)||_{E_T} <= tol *
    ||theta^(0)||_{E_T}``, at ``n_max`` iterates, or after three consecutive
    contraction factors ``>= 1``.
    """
    if advection not in ("stage", "interp"):
        raise ValueError(f"unknown advection mode {advection!r}")
    if abs(params.kappa - cfg.kappa) > 1e-15:
        raise ValueError("GevreyParams.kappa and SolverConfig.kappa differ")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    run = _integrate(theta0, cfg, None, record=advection == "stage", check_cfl=False)
    cur = run.traj
    norms = [path_norm(cur, params)]
    base = norms[0]
    if base == 0.0:
        return cur, PicardReport(1, norms, [], [], True, "zero data")
    increments: list[float] = []
    factors: list[float] = []
    converged = False
    message = ""
    bad = 0
    while len(norms) < n_max:
        src = _stored_source(run.stages) if advection == "stage" else _interp_source(cur)
        nxt = _integrate(theta0, cfg, src, record=advection == "stage", check_cfl=False)
        if nxt.traj.blew_up:
            message = f"iterate {len(norms)} blew up: {nxt.traj.message}"
            break
        inc = path_norm(_difference(nxt.traj, cur), params)
        increments.append(inc)
        norms.append(path_norm(nxt.traj, params))
        if len(increments) > 1:
            f = increments[-1] / increments[-2] if increments[-2] > 0 else 0.0
            factors.append(f)
            bad = bad + 1 if f >= 1 else 0
        run, cur = nxt, nxt.traj
        if inc <= tol * base:
            converged = True
            break
        if bad >= 3:
            message = "non-contraction: three consecutive factors >= 1"
            break
    else:
        message = f"not converged after {n_max} iterates"
    if converged:
        message = "converged"
    return cur, PicardReport(len(norms), norms, increments, factors, converged, message)


# diagnostics --------------------------------------------------------------------------


@dataclass(frozen=True)
class TrackRow:
    s: float
    gevrey: float
    weighted: float
    fit: Optional[RadiusFit]
    overflow: bool = False


def gevrey_track(traj: Trajectory, params: GevreyParams, *, alpha_fixed: Optional[float] = None) -> list[TrackRow]:
    """
    Per snapshot: ``||theta(s)||_{G(s), H^(2-kappa)}``, the path-norm weight
    ``s^(beta/kappa) ||theta(s)||_{G(s), H^(2-kappa+beta)}``, and a radius fit
    (``None`` when the spectrum is unusable). Overflowing snapshots are
    flagged with NaN norms.
    """
    rows = []
    m = 2.0 - params.kappa
    alpha = params.alpha if alpha_fixed is None else alpha_fixed
    for s, st in traj:
        try:
            gn = gevrey_norm(st, params, s, m)
            wn = s ** (params.beta / params.kappa) * gevrey_norm(st, params, s, m + params.beta) if s > 0 else 0.0
            over = False
        except GevreyOverflowError:
            gn = wn = math.nan
            over = True
        fit = None
        if not st.is_zero():
            try:
                fit = fit_gevrey_radius(st, alpha_fixed=alpha)
            except FitError:
                fit = None
        rows.append(TrackRow(float(s), gn, wn, fit, over))
    return rows


# initial data ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InitialData:
    """
    Envelope ``A |k|^a exp(-|k|^2/k0^2)`` with random phases. If
    ``target_norm`` is set, ``A`` is rescaled so that the homogeneous
    ``H^(2-kappa)`` norm equals it.
    """

    amplitude: float = 1.0
    exponent: float = -1.5
    k0: float = 8.0
    target_norm: Optional[float] = None

    def __post_init__(self) -> None:
        if not self.amplitude >= 0:
            raise ValueError("amplitude must be non-negative")
        if not self.k0 > 0:
            raise ValueError("k0 must be positive")
        if self.target_norm is not None and not self.target_norm >= 0:
            raise ValueError("target_norm must be non-negative")

    def sample(self, grid: GridSpec, kappa: float, seed: int) -> SpectralField:
        rng = np.random.default_rng(seed)
        env = lambda k: self.amplitude * k**self.exponent * np.exp(-(k**2) / self.k0**2)
        f = field_from_envelope(grid, env, rng)
        if self.target_norm is not None:
            cur = sobolev_norm(f, 2.0 - kappa)
            f = f * (self.target_norm / cur) if cur > 0 else f
        return f


def snapshot_subset(traj: Trajectory, times: Sequence[float]) -> Trajectory:
    keep = [traj.at(t) for t in times]
    return Trajectory(list(times), keep)
