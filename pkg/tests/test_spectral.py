import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_field
from sqglab.spectral import (
    GevreyOverflowError,
    GevreyParams,
    GridSpec,
    SpectralField,
    dealiased_product,
    dissipative_semigroup,
    field_from_envelope,
    fractional_laplacian,
    gevrey_multiplier,
    gradient,
    make_grid,
    riesz_velocity,
    to_physical,
    to_spectral,
)


def _samples(grid, fn):
    x, y = grid.physical_coords()
    return fn(x, y)


class TestGrid:
    def test_rejects_odd_and_small(self):
        with pytest.raises(ValueError):
            make_grid(33)
        with pytest.raises(ValueError):
            make_grid(8)
        with pytest.raises(TypeError):
            GridSpec(32.0)

    def test_lattice_layout(self, grid32):
        assert grid32.index[:3].tolist() == [0, 1, 2]
        assert grid32.index[16] == -16
        assert grid32.k1[1, 0] == 1.0 and grid32.k2[0, 1] == 1.0
        assert grid32.dealias_cutoff == 10

    def test_domain_length_scales_lattice(self):
        g = make_grid(32, domain_length=4 * math.pi)
        assert g.k_spacing == pytest.approx(0.5)
        assert g.k1[1, 0] == pytest.approx(0.5)


class TestTransforms:
    def test_parseval_unit_constant(self, grid64):
        rng = np.random.default_rng(0)
        x = rng.standard_normal((64, 64))
        x -= x.mean()
        f = to_spectral(x, grid64)
        assert np.mean(x**2) == pytest.approx(f.l2() ** 2, rel=1e-13)

    def test_round_trip(self, grid64):
        rng = np.random.default_rng(1)
        x = rng.standard_normal((64, 64))
        x -= x.mean()
        assert np.max(np.abs(to_physical(to_spectral(x, grid64)) - x)) < 1e-13

    def test_nonzero_mean_rejected(self, grid32):
        with pytest.raises(ValueError, match="mean"):
            to_spectral(np.ones((32, 32)) + _samples(grid32, lambda x, y: np.cos(x)), grid32)
        f = to_spectral(np.ones((32, 32)), grid32, remove_mean=True)
        assert f.is_zero()

    def test_cosine_coefficients(self, grid32):
        f = to_spectral(_samples(grid32, lambda x, y: np.cos(3 * x + 4 * y)), grid32)
        assert f.coeffs[3, 4] == pytest.approx(0.5)
        assert f.coeffs[-3, -4] == pytest.approx(0.5)
        assert f.l2() ** 2 == pytest.approx(0.5)

    def test_zero_mode_must_vanish(self, grid32):
        c = np.zeros((32, 32), complex)
        c[0, 0] = 1.0
        with pytest.raises(ValueError):
            SpectralField(grid32, c)

    def test_coefficients_are_read_only(self, grid32):
        f = random_field(grid32, 0)
        with pytest.raises(ValueError):
            f.coeffs[1, 1] = 0.0

    @given(st.integers(0, 2**32 - 1))
    def test_random_fields_are_real(self, seed):
        g = make_grid(32)
        f = random_field(g, seed)
        assert f.hermitian_defect() < 1e-15
        assert np.max(np.abs(np.fft.ifft2(f.coeffs).imag)) < 1e-15


class TestEnvelope:
    def test_amplitudes_equal_envelope(self, grid32):
        f = field_from_envelope(grid32, lambda k: 1.0 / k, np.random.default_rng(0))
        sel = grid32.nonzero & grid32.dealias_mask & ~grid32.nyquist
        assert np.allclose(np.abs(f.coeffs[sel]), 1.0 / grid32.kmag[sel], rtol=1e-14)
        assert np.all(f.coeffs[~grid32.dealias_mask] == 0)

    def test_same_seed_same_field(self, grid32):
        a = field_from_envelope(grid32, lambda k: k**-1.0, np.random.default_rng(7))
        b = field_from_envelope(grid32, lambda k: k**-1.0, np.random.default_rng(7))
        assert np.array_equal(a.coeffs, b.coeffs)

    def test_negative_envelope_rejected(self, grid32):
        with pytest.raises(ValueError):
            field_from_envelope(grid32, lambda k: -k, np.random.default_rng(0))


class TestProduct:
    def test_matches_lattice_convolution(self):
        g = make_grid(16)
        f, h = random_field(g, 1, cutoff=20), random_field(g, 2, cutoff=20)
        cut = g.dealias_cutoff
        idx = range(-cut, cut + 1)
        ref = np.zeros((16, 16), complex)
        for a1 in idx:
            for a2 in idx:
                acc = 0.0
                for b1 in idx:
                    for b2 in idx:
                        c1, c2 = a1 - b1, a2 - b2
                        if abs(c1) <= cut and abs(c2) <= cut:
                            acc += f.coeffs[b1, b2] * h.coeffs[c1, c2]
                ref[a1, a2] = acc
        ref[0, 0] = 0.0
        assert np.max(np.abs(dealiased_product(f, h).coeffs - ref)) < 1e-15

    def test_physical_product_when_band_limited(self, grid32):
        x = _samples(grid32, lambda x, y: np.cos(x) * np.sin(2 * y))
        z = _samples(grid32, lambda x, y: np.sin(3 * x + y))
        p = dealiased_product(to_spectral(x, grid32), to_spectral(z, grid32))
        xz = x * z
        assert np.max(np.abs(to_physical(p) - (xz - xz.mean()))) < 1e-14

    def test_grid_mismatch(self, grid32, grid64):
        with pytest.raises(ValueError):
            dealiased_product(random_field(grid32, 0), random_field(grid64, 0))


class TestMultipliers:
    def test_fractional_laplacian_on_eigenfunction(self, grid32):
        x = _samples(grid32, lambda x, y: np.cos(3 * x + 4 * y))
        f = to_spectral(x, grid32)
        assert np.allclose(to_physical(fractional_laplacian(f, 0.7)), 5**0.7 * x, atol=1e-13)

    def test_laplacian_on_product_eigenfunction(self, grid64):
        x = _samples(grid64, lambda x, y: np.sin(2 * x) * np.cos(y))
        f = to_spectral(x, grid64)
        lap = to_physical(fractional_laplacian(f, 2.0))
        assert np.allclose(lap, 5.0 * x, atol=1e-12)

    def test_gradient(self, grid32):
        f = to_spectral(_samples(grid32, lambda x, y: np.sin(2 * x + 3 * y)), grid32)
        d1, d2 = gradient(f)
        ref = _samples(grid32, lambda x, y: np.cos(2 * x + 3 * y))
        assert np.allclose(to_physical(d1), 2 * ref, atol=1e-13)
        assert np.allclose(to_physical(d2), 3 * ref, atol=1e-13)

    def test_riesz_velocity_of_plane_wave(self, grid32):
        # theta = cos x1 gives R1 theta = -sin x1, so u = (0, -sin x1)
        f = to_spectral(_samples(grid32, lambda x, y: np.cos(x)), grid32)
        u1, u2 = riesz_velocity(f)
        assert np.max(np.abs(to_physical(u1))) < 1e-15
        assert np.allclose(to_physical(u2), -_samples(grid32, lambda x, y: np.sin(x)), atol=1e-14)

    def test_velocity_divergence_free(self, grid64):
        u1, u2 = riesz_velocity(random_field(grid64, 3))
        div = grid64.k1 * u1.coeffs + grid64.k2 * u2.coeffs
        assert np.max(np.abs(div)) < 1e-15

    def test_semigroup_property(self, grid32):
        f = random_field(grid32, 4)
        a = dissipative_semigroup(dissipative_semigroup(f, 0.8, 0.3), 0.8, 0.5)
        b = dissipative_semigroup(f, 0.8, 0.8)
        assert np.allclose(a.coeffs, b.coeffs, rtol=1e-14, atol=0)

    def test_gevrey_inverse(self, grid32):
        p = GevreyParams.make(0.5, 0.6, 0.8, 0.2)
        f = random_field(grid32, 5)
        back = gevrey_multiplier(gevrey_multiplier(f, p, 2.0, +1), p, 2.0, -1)
        assert np.allclose(back.coeffs, f.coeffs, rtol=1e-13, atol=0)

    def test_gevrey_overflow(self, grid64):
        p = GevreyParams.make(50.0, 0.6, 0.8, 0.2)
        with pytest.raises(GevreyOverflowError):
            gevrey_multiplier(random_field(grid64, 0), p, 10.0, +1)
        gevrey_multiplier(random_field(grid64, 0), p, 10.0, -1)


class TestGevreyParams:
    def test_zeta_derived(self):
        p = GevreyParams.make(1.0, 0.6, 0.8, 0.2)
        assert p.zeta == pytest.approx(0.5)
        assert p.radius(1.0) == pytest.approx(0.6)
        assert p.weight(2.0) == pytest.approx(2.0**0.75)

    @pytest.mark.parametrize(
        "lam, alpha, kappa, beta",
        [(0.0, 0.6, 0.8, 0.2), (1.0, 0.9, 0.8, 0.2), (1.0, 0.6, 1.2, 0.2), (1.0, 0.6, 0.8, 0.45), (1.0, 0.6, 0.8, 0.0)],
    )
    def test_invalid(self, lam, alpha, kappa, beta):
        with pytest.raises(ValueError):
            GevreyParams.make(lam, alpha, kappa, beta)

    def test_inconsistent_zeta(self):
        with pytest.raises(ValueError, match="zeta"):
            GevreyParams(1.0, 0.6, 0.8, 0.2, 0.3)
