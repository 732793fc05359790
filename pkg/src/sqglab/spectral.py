"""
Periodic spectral grid, real mean-zero fields and diagonal Fourier multipliers.

Normalization
-------------
Coefficients are ``fft2(samples) / n**2``, so a field is
``sum_k c_k exp(i k.x)`` and the mean-square of the samples equals the
squared l2 norm of the coefficients (Parseval with unit constant)::

    mean(samples**2) == sum(abs(coeffs)**2)

Every norm in the package is taken in this normalization. Arrays are stored
on the full ``n x n`` lattice in FFT order; axis 0 carries ``k1`` and axis 1
carries ``k2`` (physical samples are indexed ``[x1, x2]``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

DEFAULT_OVERFLOW_CAP = 700.0


class GevreyOverflowError(OverflowError):
    """A Gevrey exponent exceeded the configured overflow cap."""


@dataclass(frozen=True, eq=True)
class GridSpec:
    """
    Square periodic grid ``[0, L)^2`` with ``n`` modes per axis.

    Parameters
    ----------
    n : int
        Modes per axis; even and at least 16.
    domain_length : float
        Torus side ``L``. The lattice is ``(2 pi / L) * (i, j)``.
    dealias_fraction : float
        Fraction of ``n/2`` retained by products (square truncation).
    """

    n: int
    domain_length: float = 2.0 * math.pi
    dealias_fraction: float = 2.0 / 3.0

    def __post_init__(self) -> None:
        if not isinstance(self.n, (int, np.integer)) or isinstance(self.n, bool):
            raise TypeError("n must be an integer")
        if self.n % 2 != 0:
            raise ValueError(f"n must be even, got {self.n}")
        if self.n < 16:
            raise ValueError(f"n must be >= 16, got {self.n}")
        if not self.domain_length > 0 or not math.isfinite(self.domain_length):
            raise ValueError(f"domain_length must be positive, got {self.domain_length}")
        if not 0.0 < self.dealias_fraction <= 1.0:
            raise ValueError(f"dealias_fraction must lie in (0, 1], got {self.dealias_fraction}")
        if self.dealias_fraction * (self.n // 2) < 4:
            raise ValueError("dealias_fraction * n/2 must be >= 4")

    # lattice ---------------------------------------------------------------

    @property
    def k_spacing(self) -> float:
        return 2.0 * math.pi / self.domain_length

    @cached_property
    def index(self) -> np.ndarray:
        """Integer lattice index per axis in FFT order (0..n/2-1, -n/2..-1)."""
        return np.fft.fftfreq(self.n, d=1.0 / self.n).astype(np.int64)

    @cached_property
    def k1(self) -> np.ndarray:
        return _frozen(np.broadcast_to(self.k_spacing * self.index[:, None], (self.n, self.n)).copy())

    @cached_property
    def k2(self) -> np.ndarray:
        return _frozen(np.broadcast_to(self.k_spacing * self.index[None, :], (self.n, self.n)).copy())

    @cached_property
    def kmag(self) -> np.ndarray:
        return _frozen(np.hypot(self.k1, self.k2))

    @cached_property
    def nonzero(self) -> np.ndarray:
        """Boolean mask of every lattice mode except k = 0."""
        m = np.ones((self.n, self.n), dtype=bool)
        m[0, 0] = False
        return _frozen(m)

    @cached_property
    def nyquist(self) -> np.ndarray:
        """Modes with either index equal to -n/2 (no Hermitian partner)."""
        ny = self.index == -(self.n // 2)
        return _frozen(ny[:, None] | ny[None, :])

    @property
    def dealias_cutoff(self) -> int:
        """Largest retained |index| along each axis."""
        return int(math.floor(self.dealias_fraction * (self.n // 2) + 1e-9))

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        keep = np.abs(self.index) <= self.dealias_cutoff
        return _frozen(keep[:, None] & keep[None, :])

    @property
    def k_min(self) -> float:
        return self.k_spacing

    @property
    def k_max(self) -> float:
        """Largest |k| on the full lattice."""
        return float(self.kmag.max())

    @property
    def k_max_retained(self) -> float:
        """Largest |k| surviving dealiasing."""
        return float(self.kmag[self.dealias_mask].max())

    def power(self, m: float) -> np.ndarray:
        """``|k|^m`` with the zero mode set to 0."""
        out = np.zeros((self.n, self.n))
        nz = self.nonzero
        out[nz] = self.kmag[nz] ** m
        return out

    def physical_coords(self) -> tuple[np.ndarray, np.ndarray]:
        x = np.arange(self.n) * (self.domain_length / self.n)
        return np.meshgrid(x, x, indexing="ij")

    def zeros(self) -> "SpectralField":
        return SpectralField(self, np.zeros((self.n, self.n), dtype=np.complex128))


def make_grid(n: int, domain_length: float = 2.0 * math.pi, dealias_fraction: float = 2.0 / 3.0) -> GridSpec:
    return GridSpec(int(n) if isinstance(n, np.integer) else n, float(domain_length), float(dealias_fraction))


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class SpectralField:
    """
    Fourier coefficients of a real, mean-zero scalar on ``grid``.

    The coefficient array is stored read-only; every operation returns a
    new field.
    """

    grid: GridSpec
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.shape != (self.grid.n, self.grid.n):
            raise ValueError(f"coefficient shape {c.shape} does not match grid n={self.grid.n}")
        if c[0, 0] != 0:
            raise ValueError("zero mode must be exactly 0 (fields are mean-zero)")
        if c is self.coeffs and c.flags.writeable:
            c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_coeffs(cls, grid: GridSpec, coeffs: np.ndarray, *, symmetrize: bool = True) -> "SpectralField":
        """Build a field from arbitrary coefficients, projecting onto real mean-zero fields."""
        c = np.array(coeffs, dtype=np.complex128)
        if symmetrize:
            c = 0.5 * (c + np.conj(_reflect(c)))
        c[0, 0] = 0.0
        return cls(grid, c)

    def _new(self, coeffs: np.ndarray) -> "SpectralField":
        coeffs[0, 0] = 0.0
        return SpectralField(self.grid, coeffs)

    def _check_grid(self, other: "SpectralField") -> None:
        if other.grid != self.grid:
            raise ValueError("fields live on different grids")

    def __add__(self, other: "SpectralField") -> "SpectralField":
        self._check_grid(other)
        return self._new(self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        self._check_grid(other)
        return self._new(self.coeffs - other.coeffs)

    def __neg__(self) -> "SpectralField":
        return self._new(-self.coeffs)

    def __mul__(self, scalar: float) -> "SpectralField":
        if isinstance(scalar, SpectralField):
            raise TypeError("use dealiased_product for field products")
        return self._new(self.coeffs * float(scalar))

    __rmul__ = __mul__

    def apply(self, multiplier: np.ndarray) -> "SpectralField":
        """Multiply coefficients by a real diagonal multiplier."""
        return self._new(self.coeffs * multiplier)

    def l2(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2)))

    def hermitian_defect(self) -> float:
        """max |c(-k) - conj c(k)| relative to max |c|."""
        scale = np.max(np.abs(self.coeffs))
        if scale == 0:
            return 0.0
        return float(np.max(np.abs(_reflect(self.coeffs) - np.conj(self.coeffs))) / scale)

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)


def _reflect(c: np.ndarray) -> np.ndarray:
    """Array whose entry at k is c(-k) (index arithmetic mod n)."""
    return np.roll(np.flip(c, axis=(0, 1)), shift=1, axis=(0, 1))


# transforms ----------------------------------------------------------------


def to_spectral(samples: np.ndarray, grid: GridSpec, *, remove_mean: bool = False) -> SpectralField:
    """
    Forward transform of real samples on the physical grid.

    Samples with a nonzero mean are rejected unless ``remove_mean`` is set,
    in which case the mean is discarded.
    """
    x = np.asarray(samples)
    if x.shape != (grid.n, grid.n):
        raise ValueError(f"samples shape {x.shape} does not match grid n={grid.n}")
    if np.iscomplexobj(x):
        if np.any(x.imag != 0):
            raise ValueError("samples must be real-valued")
        x = x.real
    c = np.fft.fft2(x.astype(np.float64)) / grid.n**2
    mean = c[0, 0]
    if not remove_mean:
        scale = math.sqrt(float(np.mean(x * x))) if x.size else 0.0
        if abs(mean) > 1e-12 * max(scale, 1e-300):
            raise ValueError("samples have nonzero mean; pass remove_mean=True to discard it")
    c[0, 0] = 0.0
    return SpectralField(grid, c)


def to_physical(field: SpectralField) -> np.ndarray:
    return np.fft.ifft2(field.coeffs * field.grid.n**2).real


def dealias(field: SpectralField) -> SpectralField:
    return field.apply(field.grid.dealias_mask)


def dealiased_product(f: SpectralField, g: SpectralField) -> SpectralField:
    """
    Pointwise product with the grid's truncation applied to both factors and
    to the result; the mean of the product is discarded.

    For the 2/3 rule the retained coefficients are the exact lattice
    convolution of the truncated inputs (no aliasing).
    """
    f._check_grid(g)
    grid = f.grid
    mask = grid.dealias_mask
    fp = np.fft.ifft2(f.coeffs * mask).real
    gp = np.fft.ifft2(g.coeffs * mask).real
    c = np.fft.fft2(fp * gp) * grid.n**2
    c *= mask
    c[0, 0] = 0.0
    return SpectralField(grid, c)


def field_from_envelope(
    grid: GridSpec,
    envelope: Callable[[np.ndarray], np.ndarray],
    rng: np.random.Generator,
    *,
    dealiased: bool = True,
) -> SpectralField:
    """
    Field with ``|c(k)| = envelope(|k|)`` and independent uniform phases.

    Phases are drawn on the full lattice and then made Hermitian by taking
    the phase of the lexicographically smaller partner, so amplitudes are
    exactly the envelope on non-Nyquist modes. Nyquist modes are zeroed.
    """
    amp = np.zeros((grid.n, grid.n))
    nz = grid.nonzero & ~grid.nyquist
    if dealiased:
        nz = nz & grid.dealias_mask
    amp[nz] = np.asarray(envelope(grid.kmag[nz]), dtype=np.float64)
    if not np.all(np.isfinite(amp)) or np.any(amp < 0):
        raise ValueError("envelope must be finite and non-negative")
    phase = rng.uniform(0.0, 2.0 * np.pi, size=(grid.n, grid.n))
    # Hermitian phases: phase(-k) = -phase(k); pick a canonical half
    i = grid.index[:, None] * np.ones((1, grid.n), dtype=np.int64)
    j = grid.index[None, :] * np.ones((grid.n, 1), dtype=np.int64)
    upper = (i > 0) | ((i == 0) & (j > 0))
    ph = np.where(upper, phase, -_reflect(phase))
    c = amp * np.exp(1j * ph)
    c[0, 0] = 0.0
    return SpectralField(grid, c)


# multipliers ---------------------------------------------------------------


def fractional_laplacian(field: SpectralField, m: float) -> SpectralField:
    """Apply ``Lambda^m``: ``c(k) -> |k|^m c(k)``, zero mode pinned to 0."""
    if m == 0:
        return field
    return field.apply(field.grid.power(m))


def gradient(field: SpectralField) -> tuple[SpectralField, SpectralField]:
    """``(d1 f, d2 f)``; Nyquist modes are dropped so the outputs stay real."""
    g = field.grid
    keep = ~g.nyquist
    c1 = np.where(keep, 1j * g.k1 * field.coeffs, 0.0)
    c2 = np.where(keep, 1j * g.k2 * field.coeffs, 0.0)
    return SpectralField(g, c1), SpectralField(g, c2)


def riesz_velocity(theta: SpectralField) -> tuple[SpectralField, SpectralField]:
    """
    ``u = (-R2 theta, R1 theta)`` with ``R_j`` the multiplier ``i k_j / |k|``.

    Nyquist modes are dropped from both components, which keeps the output
    real and ``k . u(k) = 0`` exactly on the lattice.
    """
    g = theta.grid
    keep = g.nonzero & ~g.nyquist
    inv = np.zeros((g.n, g.n))
    inv[keep] = 1.0 / g.kmag[keep]
    u1 = -1j * g.k2 * inv * theta.coeffs
    u2 = 1j * g.k1 * inv * theta.coeffs
    return SpectralField(g, u1), SpectralField(g, u2)


def gevrey_exponent(grid: GridSpec, lam: float, alpha: float, kappa: float, s: float) -> np.ndarray:
    """``lam * s^(alpha/kappa) * |k|^alpha`` on the lattice (0 at k = 0)."""
    if s < 0:
        raise ValueError(f"s must be non-negative, got {s}")
    if s == 0:
        return np.zeros((grid.n, grid.n))
    return lam * s ** (alpha / kappa) * grid.power(alpha)


def gevrey_multiplier(
    field: SpectralField,
    params: "GevreyParams",
    s: float,
    sign: int = 1,
    *,
    cap: float = DEFAULT_OVERFLOW_CAP,
) -> SpectralField:
    """
    Apply ``exp(sign * lam s^(alpha/kappa) Lambda^alpha)``.

    Raises
    ------
    GevreyOverflowError
        If ``sign = +1`` and the exponent exceeds ``cap`` anywhere on the lattice.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    expo = gevrey_exponent(field.grid, params.lam, params.alpha, params.kappa, s)
    if sign > 0:
        top = float(expo.max())
        if top > cap:
            raise GevreyOverflowError(
                f"Gevrey exponent {top:.3g} exceeds cap {cap:g} (lam={params.lam}, s={s})"
            )
    return field.apply(np.exp(sign * expo))


def semigroup_multiplier(grid: GridSpec, kappa: float, t: float) -> np.ndarray:
    return np.exp(-t * grid.power(kappa))


def dissipative_semigroup(field: SpectralField, kappa: float, t: float) -> SpectralField:
    """Apply ``exp(-t Lambda^kappa)``."""
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    if not kappa > 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    if t == 0:
        return field
    return field.apply(semigroup_multiplier(field.grid, kappa, t))


# parameters ----------------------------------------------------------------


@dataclass(frozen=True)
class GevreyParams:
    """
    Gevrey weight ``lam * s^(alpha/kappa) * |k|^alpha`` plus the path-norm
    exponents ``beta`` and ``zeta``.

    Constraints: ``0 < alpha < kappa <= 1``, ``lam > 0``,
    ``0 < beta < min(kappa/2, 2(kappa - alpha), alpha)`` and
    ``zeta = alpha - beta/2``.
    """

    lam: float
    alpha: float
    kappa: float
    beta: float
    zeta: float

    def __post_init__(self) -> None:
        lam, a, k, b, z = self.lam, self.alpha, self.kappa, self.beta, self.zeta
        if not lam > 0:
            raise ValueError(f"lam must be positive, got {lam}")
        if not 0 < k <= 1:
            raise ValueError(f"kappa must lie in (0, 1], got {k}")
        if not 0 < a < k:
            raise ValueError(f"alpha must lie in (0, kappa), got alpha={a}, kappa={k}")
        bmax = min(k / 2, 2 * (k - a), a)
        if not 0 < b < bmax:
            raise ValueError(f"beta must lie in (0, {bmax:.6g}), got {b}")
        if abs(z - (a - b / 2)) > 1e-12:
            raise ValueError(f"zeta must equal alpha - beta/2 = {a - b / 2}, got {z}")
        if not (min(b, z) > 0 and b + z < k and z < a):
            raise ValueError("derived constraints min(beta, zeta) > 0, beta + zeta < kappa, zeta < alpha fail")

    @classmethod
    def make(cls, lam: float, alpha: float, kappa: float, beta: float) -> "GevreyParams":
        return cls(float(lam), float(alpha), float(kappa), float(beta), float(alpha) - float(beta) / 2)

    def weight(self, s: float) -> float:
        """``lam * s^(alpha/kappa)``."""
        return self.lam * s ** (self.alpha / self.kappa) if s > 0 else 0.0

    def radius(self, s: float) -> float:
        """``rho = lam * alpha * s^(alpha/kappa)``."""
        return self.alpha * self.weight(s)
