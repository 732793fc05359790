"""
Sobolev, Gevrey and path norms, and spectral-tail estimates of the Gevrey
radius.

All norms use the unit Parseval normalization of :mod:`sqglab.spectral`
and exclude the zero mode.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy import optimize

from .spectral import GevreyParams, SpectralField, gevrey_exponent, gevrey_multiplier
from .trajectory import Trajectory


class NormKind(str, Enum):
    SOBOLEV = "Sobolev"
    HOM_SOBOLEV = "HomSobolev"
    GEVREY = "Gevrey"
    PATH = "Path"


@dataclass(frozen=True)
class NormReport:
    kind: NormKind
    order: float
    value: float
    s: Optional[float] = None
    params: Optional[GevreyParams] = None

    def __post_init__(self) -> None:
        if not self.value >= 0:
            raise ValueError("norm value must be non-negative")
        if self.kind is NormKind.GEVREY and self.params is None:
            raise ValueError("Gevrey norm reports carry their parameters")

    def to_record(self) -> dict:
        rec = {"kind": self.kind.value, "order": self.order, "s": self.s, "value": self.value}
        if self.params is not None:
            rec["params"] = asdict(self.params)
        return rec


def sobolev_norm(field: SpectralField, m: float, homogeneous: bool = True) -> float:
    """``(sum_k w(k)^(2m) |c_k|^2)^(1/2)`` with ``w = |k|`` or ``1 + |k|``."""
    g = field.grid
    nz = g.nonzero
    c2 = np.abs(field.coeffs[nz]) ** 2
    w = g.kmag[nz] if homogeneous else 1.0 + g.kmag[nz]
    return float(np.sqrt(np.sum(w ** (2.0 * m) * c2)))


def gevrey_norm(field: SpectralField, params: GevreyParams, s: float, m: float) -> float:
    """``||exp(lam s^(alpha/kappa) Lambda^alpha) f||`` in the homogeneous ``H^m`` norm."""
    return sobolev_norm(gevrey_multiplier(field, params, s, +1), m, homogeneous=True)


def path_norm(
    traj: Trajectory,
    params: GevreyParams,
    m_base: Optional[float] = None,
    *,
    t_max: Optional[float] = None,
) -> float:
    """
    ``max_s s^(beta/kappa) ||theta(s)||_{G(s), H^m}`` over stored samples with
    ``0 < s <= t_max``; ``m`` defaults to ``2 - kappa + beta``.
    """
    if len(traj) == 0:
        raise ValueError("path norm of an empty trajectory")
    if m_base is None:
        m_base = 2.0 - params.kappa + params.beta
    best = 0.0
    for s, st in traj:
        if s <= 0 or (t_max is not None and s > t_max):
            continue
        val = s ** (params.beta / params.kappa) * gevrey_norm(st, params, s, m_base)
        best = max(best, val)
    return best


# radius fitting ------------------------------------------------------------------


class FitError(ValueError):
    """Not enough usable spectral shells for a radius fit."""


class NonDecayingSpectrumError(FitError):
    """The fitted decay rate is not positive: no Gevrey-type decay detected."""

    def __init__(self, message: str, fit: "RadiusFit"):
        super().__init__(message)
        self.fit = fit


@dataclass(frozen=True)
class RadiusFit:
    """
    Fit of ``log|c(k)| ~ c0 - rho_hat |k|^alpha_hat`` over spectral shells.

    ``rho_hat`` is the exponential rate; the corresponding radius in the
    derivative estimates is ``alpha_hat * rho_hat``.
    """

    rho_hat: float
    alpha_hat: float
    residual: float
    band_range: tuple[float, float]
    intercept: float = 0.0
    n_shells: int = 0

    def to_record(self) -> dict:
        return {
            "rho_hat": self.rho_hat,
            "alpha_hat": self.alpha_hat,
            "residual": self.residual,
            "band_range": list(self.band_range),
            "intercept": self.intercept,
            "n_shells": self.n_shells,
        }


@dataclass(frozen=True)
class Shell:
    """Modes of one unit-width annulus with their fit weights in ``[0, 1]``."""

    index: int
    kmag: np.ndarray
    log_amp: np.ndarray
    weight: np.ndarray

    @property
    def total(self) -> float:
        return float(self.weight.sum())

    def mean(self, values: np.ndarray) -> float:
        return float(np.sum(self.weight * values) / self.total)


def mode_weights(log_amp: np.ndarray, log_floor: float, taper_decades: float) -> np.ndarray:
    """Linear ramp from 0 at ``log_floor`` to 1 at ``taper_decades`` decades above it."""
    return np.clip((log_amp - log_floor) / (taper_decades * math.log(10.0)), 0.0, 1.0)


def shell_statistics(field: SpectralField, noise_floor: float = 1e-14, taper_decades: float = 2.0) -> list[Shell]:
    """
    Unit-width annuli (width ``2 pi / L``) centred at integer multiples of the
    lattice spacing, inside the dealiasing radius.

    A mode at amplitude ``a`` gets weight :func:`mode_weights` of ``log a``
    relative to ``noise_floor * max|c|``, so modes fade out of the fit
    continuously as they decay instead of dropping out at a hard cut. Shells
    with zero total weight are skipped.
    """
    g = field.grid
    amp = np.abs(field.coeffs)
    top = amp.max()
    if top == 0:
        raise FitError("zero field has no spectrum to fit")
    with np.errstate(divide="ignore"):
        log_amp = np.log(amp)
    weights = mode_weights(log_amp, math.log(noise_floor * top), taper_decades)
    shell = np.rint(g.kmag / g.k_spacing).astype(np.int64)
    usable = g.nonzero & g.dealias_mask & ~g.nyquist
    shells = []
    for n in range(1, g.dealias_cutoff + 1):
        sel = (shell == n) & usable & (weights > 0)
        if np.any(sel):
            shells.append(Shell(n, g.kmag[sel], log_amp[sel], weights[sel]))
    return shells


def fit_gevrey_radius(
    field: SpectralField,
    alpha_fixed: Optional[float] = None,
    *,
    noise_floor: float = 1e-14,
    taper_decades: float = 2.0,
    min_shells: int = 8,
    alpha_bounds: tuple[float, float] = (0.05, 2.0),
    min_decay: float = 1e-3,
) -> RadiusFit:
    """
    Least-squares fit of the shell log-amplitudes to ``c0 - rho |k|^alpha``.

    Each shell contributes its weighted mean log-amplitude against the
    weighted shell mean of ``|k|^alpha`` (exact for exact exponential-of-power
    spectra, whatever the weights), weighted by its total mode weight. With ``alpha_fixed`` the fit is linear in ``(c0, rho)``;
    otherwise ``alpha`` is seeded by a coarse scan of the profiled residual and
    refined by Levenberg-Marquardt on all three parameters.

    Raises
    ------
    FitError
        Fewer than ``min_shells`` usable shells.
    NonDecayingSpectrumError
        The fitted log-amplitude drop across the window is below ``min_decay``.
    """
    shells = shell_statistics(field, noise_floor, taper_decades)
    if len(shells) < min_shells:
        raise FitError(f"only {len(shells)} usable shells, need {min_shells}")
    totals = np.array([s.total for s in shells])
    ybar = np.array([s.mean(s.log_amp) for s in shells])
    w = totals / totals.sum()

    def xbar(alpha: float) -> np.ndarray:
        return np.array([s.mean(s.kmag**alpha) for s in shells])

    def solve(alpha: float):
        x = xbar(alpha)
        xm = np.sum(w * x)
        ym = np.sum(w * ybar)
        sxx = np.sum(w * (x - xm) ** 2)
        sxy = np.sum(w * (x - xm) * (ybar - ym))
        slope = sxy / sxx
        c0 = ym - slope * xm
        res = ybar - (c0 + slope * x)
        rms = math.sqrt(float(np.sum(w * res**2)))
        return -slope, c0, rms, x

    if alpha_fixed is not None:
        alpha = float(alpha_fixed)
    else:
        grid = np.linspace(alpha_bounds[0], alpha_bounds[1], 40)
        errs = [solve(a)[2] for a in grid]
        a0 = float(grid[int(np.argmin(errs))])
        rho0, c00, _, _ = solve(a0)
        sw = np.sqrt(w)
        def resid(p):
            c0_, rho_, a_ = p
            return sw * (ybar - c0_ + rho_ * xbar(a_))

        def jac(p):
            c0_, rho_, a_ = p
            x = xbar(a_)
            dx = np.array([s.mean(s.kmag**a_ * np.log(s.kmag)) for s in shells])
            return np.column_stack([-sw, sw * x, sw * rho_ * dx])

        out = optimize.least_squares(resid, [c00, rho0, a0], jac=jac, method="lm",
                                     xtol=1e-15, ftol=1e-15, gtol=1e-15)
        alpha = float(np.clip(out.x[2], *alpha_bounds))
    rho, c0, rms, x = solve(alpha)
    lo_k = float(min(s.kmag.min() for s in shells))
    hi_k = float(max(s.kmag.max() for s in shells))
    fit = RadiusFit(float(rho), alpha, rms, (lo_k, hi_k), float(c0), len(shells))
    drop = rho * (x.max() - x.min())
    if not drop > min_decay:
        raise NonDecayingSpectrumError(f"no spectral decay detected (rho_hat={rho:.3g})", fit)
    return fit


# derivative decay table ---------------------------------------------------------------


@dataclass(frozen=True)
class DecayRow:
    n: int
    norm: float
    bound: float
    ratio: float
    overflow: bool = False


def smallest_admissible_order(kappa: float) -> int:
    """Smallest integer ``n > 2 - kappa``."""
    return int(math.floor(2.0 - kappa)) + 1


def log_decay_bound(n: int, rho: float, alpha: float) -> float:
    """``log[(n!)^(1/alpha) / rho^(n/alpha)]``."""
    return (math.lgamma(n + 1) - n * math.log(rho)) / alpha


def derivative_decay_table(
    field: SpectralField,
    params: GevreyParams,
    s: float,
    n_max: int,
    *,
    n_cal: Optional[int] = None,
) -> list[DecayRow]:
    """
    Rows ``(n, ||Lambda^n f||_{H^(2-kappa)}, C (n!)^(1/alpha) / rho^(n/alpha), ratio)``
    for admissible ``n <= n_max``, with ``rho = lam alpha s^(alpha/kappa)`` and
    ``C`` fixed so that the ratio is 1 at ``n_cal`` (default: smallest admissible n).
    """
    if n_max > 12:
        raise ValueError("n_max must be <= 12")
    if s <= 0:
        raise ValueError("s must be positive")
    m0 = 2.0 - params.kappa
    n0 = smallest_admissible_order(params.kappa)
    if n_cal is None:
        n_cal = n0
    rho = params.radius(s)
    norm_cal = sobolev_norm(field, n_cal + m0)
    log_c = math.log(norm_cal) - log_decay_bound(n_cal, rho, params.alpha) if norm_cal > 0 else -math.inf
    rows = []
    for n in range(n0, n_max + 1):
        nv = sobolev_norm(field, n + m0)
        lb = log_c + log_decay_bound(n, rho, params.alpha)
        overflow = lb > 709.0
        bound = math.inf if overflow else (math.exp(lb) if log_c > -math.inf else 0.0)
        if nv == 0:
            ratio = 0.0
        elif overflow:
            ratio = 0.0
        else:
            ratio = nv / bound
        rows.append(DecayRow(n, nv, bound, ratio, overflow))
    return rows


def gevrey_rate_weights(field: SpectralField, params: GevreyParams, s: float) -> np.ndarray:
    """Exponent ``lam s^(alpha/kappa) |k|^alpha`` on the field's lattice."""
    return gevrey_exponent(field.grid, params.lam, params.alpha, params.kappa, s)
