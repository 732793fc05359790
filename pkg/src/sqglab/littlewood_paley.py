"""
Homogeneous dyadic Littlewood-Paley analysis on the periodic lattice.

``Delta_j`` multiplies by ``phi(|k| / 2^j)`` with ``phi(r) = psi(r/2) - psi(r)``;
``S_j`` multiplies by ``psi(|k| / 2^(j-3))``. On the mean-zero lattice the
telescoping identity ``S_j = sum_{k <= j-4} Delta_k`` is exact, because only
finitely many bands meet the lattice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .spectral import (
    DEFAULT_OVERFLOW_CAP,
    GevreyOverflowError,
    GevreyParams,
    GridSpec,
    SpectralField,
    dealiased_product,
    gevrey_exponent,
)


def _h(x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x, dtype=np.float64)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def smooth_cutoff(r: np.ndarray) -> np.ndarray:
    """C-infinity radial cutoff: 1 on [0, 1/2], 0 on [1, inf)."""
    r = np.asarray(r, dtype=np.float64)
    out = np.where(r <= 0.5, 1.0, 0.0)
    mid = (r > 0.5) & (r < 1.0)
    if np.any(mid):
        rm = r[mid]
        a = _h(2.0 - 2.0 * rm)
        b = _h(2.0 * rm - 1.0)
        out = out.astype(np.float64)
        out[mid] = a / (a + b)
    return out


@dataclass(frozen=True)
class DyadicProfile:
    """Radial cutoff ``psi`` and the annular bump ``phi(r) = psi(r/2) - psi(r)``."""

    name: str = "smooth"

    def psi(self, r: np.ndarray) -> np.ndarray:
        return smooth_cutoff(r)

    def phi(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=np.float64)
        return self.psi(r / 2.0) - self.psi(r)


DEFAULT_PROFILE = DyadicProfile()


@dataclass(frozen=True)
class BandIndexRange:
    j_min: int
    j_max: int

    def __post_init__(self) -> None:
        if self.j_min > self.j_max:
            raise ValueError("j_min must not exceed j_max")

    def __iter__(self):
        return iter(range(self.j_min, self.j_max + 1))

    def __len__(self) -> int:
        return self.j_max - self.j_min + 1


def band_range(grid: GridSpec) -> BandIndexRange:
    """Bands that can meet the lattice; all others project to zero."""
    j_min = math.floor(math.log2(grid.k_min)) - 1
    j_max = math.ceil(math.log2(grid.k_max)) + 1
    return BandIndexRange(j_min, j_max)


def interior_bands(grid: GridSpec) -> list[int]:
    """
    Bands whose full annulus ``A(2^(j-1), 2^(j+1))`` lies between the
    smallest lattice wavenumber and the dealiasing radius.
    """
    lo = math.ceil(math.log2(grid.k_min) + 1 - 1e-12)
    hi = math.floor(math.log2(grid.dealias_cutoff * grid.k_spacing) - 1 + 1e-12)
    return list(range(lo, hi + 1))


# cached multipliers ----------------------------------------------------------


@lru_cache(maxsize=512)
def _phi_mult(profile: DyadicProfile, grid: GridSpec, j: int) -> np.ndarray:
    m = profile.phi(grid.kmag / 2.0**j)
    m[0, 0] = 0.0
    m.flags.writeable = False
    return m


@lru_cache(maxsize=512)
def _psi_mult(profile: DyadicProfile, grid: GridSpec, j: int) -> np.ndarray:
    m = profile.psi(grid.kmag / 2.0 ** (j - 3))
    m[0, 0] = 0.0
    m.flags.writeable = False
    return m


@lru_cache(maxsize=512)
def _tilde_mult(profile: DyadicProfile, grid: GridSpec, j: int) -> np.ndarray:
    # telescoped: sum_{k=j-3}^{j+3} phi(r/2^k) = psi(r/2^(j+4)) - psi(r/2^(j-3))
    m = profile.psi(grid.kmag / 2.0 ** (j + 4)) - profile.psi(grid.kmag / 2.0 ** (j - 3))
    m[0, 0] = 0.0
    m.flags.writeable = False
    return m


def band_multiplier(grid: GridSpec, j: int, profile: DyadicProfile = DEFAULT_PROFILE) -> np.ndarray:
    return _phi_mult(profile, grid, int(j))


def lowpass_multiplier(grid: GridSpec, j: int, profile: DyadicProfile = DEFAULT_PROFILE) -> np.ndarray:
    return _psi_mult(profile, grid, int(j))


def lp_project(field: SpectralField, j: int, profile: DyadicProfile = DEFAULT_PROFILE) -> SpectralField:
    """``Delta_j f``."""
    return field.apply(_phi_mult(profile, field.grid, int(j)))


def lp_lowpass(field: SpectralField, j: int, profile: DyadicProfile = DEFAULT_PROFILE) -> SpectralField:
    """``S_j f``, supported in ``B(2^(j-3))``."""
    return field.apply(_psi_mult(profile, field.grid, int(j)))


def lp_tilde(field: SpectralField, j: int, profile: DyadicProfile = DEFAULT_PROFILE) -> SpectralField:
    """``sum_{|k - j| <= 3} Delta_k f``."""
    return field.apply(_tilde_mult(profile, field.grid, int(j)))


# paraproducts ----------------------------------------------------------------


def _bilinear_sum(pairs, grid: GridSpec) -> SpectralField:
    """Sum of dealiased products, accumulated in physical space."""
    mask = grid.dealias_mask
    acc = np.zeros((grid.n, grid.n))
    for a, b in pairs:
        if not np.any(a) or not np.any(b):
            continue
        acc += np.fft.ifft2(a * mask).real * np.fft.ifft2(b * mask).real
    c = np.fft.fft2(acc) * grid.n**2
    c *= mask
    c[0, 0] = 0.0
    return SpectralField(grid, c)


def _same_grid(f: SpectralField, g: SpectralField) -> GridSpec:
    if f.grid != g.grid:
        raise ValueError("fields live on different grids")
    return f.grid


def paraproduct_T(f: SpectralField, g: SpectralField, profile: DyadicProfile = DEFAULT_PROFILE) -> SpectralField:
    """``T_f g = sum_j S_j f Delta_j g`` over the resolvable bands."""
    grid = _same_grid(f, g)
    pairs = (
        (f.coeffs * _psi_mult(profile, grid, j), g.coeffs * _phi_mult(profile, grid, j))
        for j in band_range(grid)
    )
    return _bilinear_sum(pairs, grid)


def paraproduct_R(f: SpectralField, g: SpectralField, profile: DyadicProfile = DEFAULT_PROFILE) -> SpectralField:
    """``R(f, g) = sum_j Delta_j f Delta~_j g``."""
    grid = _same_grid(f, g)
    pairs = (
        (f.coeffs * _phi_mult(profile, grid, j), g.coeffs * _tilde_mult(profile, grid, j))
        for j in band_range(grid)
    )
    return _bilinear_sum(pairs, grid)


def bony_residual(f: SpectralField, g: SpectralField, profile: DyadicProfile = DEFAULT_PROFILE) -> float:
    """``||fg - T_f g - T_g f - R(f,g)|| / ||fg||`` (0 when fg vanishes)."""
    fg = dealiased_product(f, g)
    rest = fg - paraproduct_T(f, g, profile) - paraproduct_T(g, f, profile) - paraproduct_R(f, g, profile)
    den = fg.l2()
    return rest.l2() / den if den > 0 else rest.l2()


# Gevrey commutator -----------------------------------------------------------


def gevrey_band_multiplier(
    grid: GridSpec,
    j: int,
    params: GevreyParams,
    s: float,
    profile: DyadicProfile = DEFAULT_PROFILE,
    *,
    cap: float = DEFAULT_OVERFLOW_CAP,
) -> np.ndarray:
    """``exp(lam s^(alpha/kappa) |k|^alpha) phi(|k|/2^j)``, checked against ``cap`` on the band."""
    phi = _phi_mult(profile, grid, int(j))
    expo = gevrey_exponent(grid, params.lam, params.alpha, params.kappa, s)
    band = phi > 0
    if np.any(band):
        top = float(expo[band].max())
        if top > cap:
            raise GevreyOverflowError(f"Gevrey exponent {top:.3g} exceeds cap {cap:g} on band {j}")
    out = np.zeros_like(phi)
    out[band] = phi[band] * np.exp(expo[band])
    return out


def gevrey_commutator(
    f: SpectralField,
    g: SpectralField,
    j: int,
    params: GevreyParams,
    s: float,
    profile: DyadicProfile = DEFAULT_PROFILE,
) -> SpectralField:
    """``[f, M Delta_j] g = f (M Delta_j g) - M Delta_j (f g)`` with ``M = exp(lam s^(a/k) Lambda^a)``."""
    grid = _same_grid(f, g)
    mult = gevrey_band_multiplier(grid, j, params, s, profile)
    left = dealiased_product(f, g.apply(mult))
    right = dealiased_product(f, g).apply(mult)
    return left - right


def gevrey_commutator_expansion(
    f: SpectralField,
    g: SpectralField,
    j: int,
    params: GevreyParams,
    s: float,
    profile: DyadicProfile = DEFAULT_PROFILE,
) -> dict[str, SpectralField]:
    """
    Five-term paraproduct expansion of ``[f, M Delta_j] g``::

        [T_f, M Delta_j] g + T_{M Delta_j g} f - M Delta_j (T_g f)
            + R(f, M Delta_j g) - M Delta_j R(f, g)
    """
    grid = _same_grid(f, g)
    mult = gevrey_band_multiplier(grid, j, params, s, profile)
    mg = g.apply(mult)
    terms = {
        "T_f_commutator": paraproduct_T(f, mg, profile) - paraproduct_T(f, g, profile).apply(mult),
        "T_Mg_f": paraproduct_T(mg, f, profile),
        "M_T_g_f": -paraproduct_T(g, f, profile).apply(mult),
        "R_f_Mg": paraproduct_R(f, mg, profile),
        "M_R_f_g": -paraproduct_R(f, g, profile).apply(mult),
    }
    return terms


def lowhigh_commutator(
    f: SpectralField,
    g: SpectralField,
    j: int,
    k: int,
    params: GevreyParams,
    s: float,
    profile: DyadicProfile = DEFAULT_PROFILE,
) -> SpectralField:
    """``[S_k f, M Delta_j] Delta_k g`` evaluated with dealiased products."""
    grid = _same_grid(f, g)
    mult = gevrey_band_multiplier(grid, j, params, s, profile)
    sf = lp_lowpass(f, k, profile)
    dg = lp_project(g, k, profile)
    return dealiased_product(sf, dg.apply(mult)) - dealiased_product(sf, dg).apply(mult)


def commutator_split_terms(
    f: SpectralField,
    g: SpectralField,
    j: int,
    k: int,
    params: GevreyParams,
    s: float,
    profile: DyadicProfile = DEFAULT_PROFILE,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Frequency-space pieces ``I`` and ``II`` with ``I + II = -F[S_k f, M Delta_j] Delta_k g``.

    ``I`` carries ``M(xi) [phi(xi/2^j) - phi((xi-eta)/2^j)]`` and ``II`` carries
    ``phi((xi-eta)/2^j) [M(xi) - M(xi-eta)]``, where ``eta`` runs over the
    spectrum of ``S_k f``. Both are evaluated by direct summation over the
    lattice and returned as coefficient arrays on the dealiased modes.
    """
    grid = _same_grid(f, g)
    mask = grid.dealias_mask
    a = lp_lowpass(f, k, profile).coeffs * mask
    b = lp_project(g, k, profile).coeffs * mask
    phi = _phi_mult(profile, grid, int(j))
    expo = gevrey_exponent(grid, params.lam, params.alpha, params.kappa, s)
    if float(expo[mask].max()) > DEFAULT_OVERFLOW_CAP:
        raise GevreyOverflowError("Gevrey exponent exceeds cap on retained modes")
    M = np.where(mask, np.exp(expo), 0.0)
    I = np.zeros((grid.n, grid.n), dtype=np.complex128)
    II = np.zeros((grid.n, grid.n), dtype=np.complex128)
    if not np.any(a) or not np.any(b):
        return I, II
    for p, q in zip(*np.nonzero(a)):
        # roll by eta: shifted[xi] = arr[xi - eta]; exact for xi, xi - eta in the mask
        shift = (int(p), int(q))
        bs = np.roll(b, shift, axis=(0, 1))
        if not np.any(bs):
            continue
        prod = a[p, q] * bs
        phis = np.roll(phi, shift, axis=(0, 1))
        Ms = np.roll(M, shift, axis=(0, 1))
        I += prod * M * (phi - phis)
        II += prod * phis * (M - Ms)
    I *= mask
    II *= mask
    I[0, 0] = 0.0
    II[0, 0] = 0.0
    return I, II


# localization and band diagnostics ------------------------------------------------


def spectral_localization_check(
    f: SpectralField,
    g: SpectralField,
    i: int,
    k: int,
    profile: DyadicProfile = DEFAULT_PROFILE,
) -> tuple[float, float]:
    """
    ``(||Delta_i(S_k f Delta_k g)||, ||Delta_i(Delta_k f Delta~_k g)||)``.

    The first vanishes for ``|i - k| >= 3`` and the second for ``i >= k + 6``.
    """
    lowhigh = dealiased_product(lp_lowpass(f, k, profile), lp_project(g, k, profile))
    highhigh = dealiased_product(lp_project(f, k, profile), lp_tilde(g, k, profile))
    return lp_project(lowhigh, i, profile).l2(), lp_project(highhigh, i, profile).l2()


def band_energies(field: SpectralField, profile: DyadicProfile = DEFAULT_PROFILE) -> list[tuple[int, SpectralField]]:
    return [(j, lp_project(field, j, profile)) for j in band_range(field.grid)]


def reconstruction_residual(field: SpectralField, profile: DyadicProfile = DEFAULT_PROFILE) -> float:
    """``||sum_j Delta_j f - f|| / ||f||`` over the resolvable bands."""
    acc = np.zeros_like(field.coeffs)
    for j in band_range(field.grid):
        acc = acc + field.coeffs * _phi_mult(profile, field.grid, j)
    den = field.l2()
    num = float(np.sqrt(np.sum(np.abs(acc - field.coeffs) ** 2)))
    return num / den if den > 0 else num
