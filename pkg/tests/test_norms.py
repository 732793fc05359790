import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_field
from sqglab.norms import (
    FitError,
    NonDecayingSpectrumError,
    NormKind,
    NormReport,
    derivative_decay_table,
    fit_gevrey_radius,
    gevrey_norm,
    log_decay_bound,
    mode_weights,
    shell_statistics,
    path_norm,
    smallest_admissible_order,
    sobolev_norm,
)
from sqglab.spectral import (
    GevreyParams,
    SpectralField,
    dissipative_semigroup,
    field_from_envelope,
    make_grid,
    to_spectral,
)
from sqglab.trajectory import Trajectory

P = GevreyParams.make(0.5, 0.6, 0.8, 0.2)


def _two_modes(grid):
    x, y = grid.physical_coords()
    return to_spectral(np.cos(3 * x) + 2 * np.sin(4 * y), grid)


def _exact_decay(grid, rho, alpha, seed=0):
    return field_from_envelope(grid, lambda k: np.exp(-rho * k**alpha), np.random.default_rng(seed))


class TestSobolev:
    def test_two_mode_closed_form(self, grid32):
        f = _two_modes(grid32)
        for m in (0.0, 0.5, 1.2, -0.5):
            ref = math.sqrt(2 * 0.25 * 3 ** (2 * m) + 2 * 1.0 * 4 ** (2 * m))
            assert sobolev_norm(f, m) == pytest.approx(ref, rel=1e-14)

    def test_inhomogeneous_weight(self, grid32):
        f = _two_modes(grid32)
        ref = math.sqrt(2 * 0.25 * 4.0**2 + 2 * 1.0 * 5.0**2)
        assert sobolev_norm(f, 1.0, homogeneous=False) == pytest.approx(ref, rel=1e-14)

    def test_h1_equals_gradient_energy(self, grid64):
        x, y = grid64.physical_coords()
        s = np.sin(2 * x) * np.cos(3 * y)
        gx, gy = 2 * np.cos(2 * x) * np.cos(3 * y), -3 * np.sin(2 * x) * np.sin(3 * y)
        f = to_spectral(s, grid64)
        assert sobolev_norm(f, 1.0) ** 2 == pytest.approx(np.mean(gx**2 + gy**2), rel=1e-13)

    @given(st.integers(0, 1000), st.floats(-1.0, 3.0), st.floats(0.1, 10.0))
    def test_homogeneity_and_triangle(self, seed, m, c):
        g = make_grid(32)
        f, h = random_field(g, seed), random_field(g, seed + 1)
        assert sobolev_norm(f * c, m) == pytest.approx(c * sobolev_norm(f, m), rel=1e-12)
        assert sobolev_norm(f + h, m) <= sobolev_norm(f, m) + sobolev_norm(h, m) + 1e-14


class TestGevreyNorm:
    def test_closed_form(self, grid32):
        f = _two_modes(grid32)
        s, m = 1.5, 0.7
        w = P.weight(s)
        ref = math.sqrt(2 * 0.25 * 3 ** (2 * m) * math.exp(2 * w * 3**0.6) + 2 * 4 ** (2 * m) * math.exp(2 * w * 4**0.6))
        assert gevrey_norm(f, P, s, m) == pytest.approx(ref, rel=1e-13)

    def test_s_zero_is_sobolev(self, grid32):
        f = random_field(grid32, 0)
        assert gevrey_norm(f, P, 0.0, 1.0) == sobolev_norm(f, 1.0)

    def test_report_requires_params(self):
        with pytest.raises(ValueError):
            NormReport(NormKind.GEVREY, 1.0, 2.0, s=1.0)
        rec = NormReport(NormKind.GEVREY, 1.0, 2.0, s=1.0, params=P).to_record()
        assert rec["kind"] == "Gevrey" and rec["params"]["lam"] == 0.5


class TestPathNorm:
    def test_max_over_samples(self, grid32):
        f = _two_modes(grid32)
        times = [0.0, 0.5, 1.0, 2.0]
        states = [f * math.exp(-t) for t in times]
        traj = Trajectory(times, states)
        m = 2 - P.kappa + P.beta
        ref = max(t ** (P.beta / P.kappa) * gevrey_norm(s, P, t, m) for t, s in zip(times[1:], states[1:]))
        assert path_norm(traj, P) == pytest.approx(ref, rel=1e-14)
        assert path_norm(traj, P, t_max=0.5) == pytest.approx(
            0.5 ** (P.beta / P.kappa) * gevrey_norm(states[1], P, 0.5, m), rel=1e-14
        )

    def test_empty(self):
        with pytest.raises(ValueError):
            path_norm(Trajectory([], []), P)


class TestRadiusFit:
    def test_exact_spectrum_free_alpha(self, grid128):
        fit = fit_gevrey_radius(_exact_decay(grid128, 0.5, 0.7))
        assert fit.rho_hat == pytest.approx(0.5, rel=1e-8)
        assert fit.alpha_hat == pytest.approx(0.7, rel=1e-8)
        assert fit.residual < 1e-10

    def test_exact_spectrum_fixed_alpha(self, grid128):
        fit = fit_gevrey_radius(_exact_decay(grid128, 0.3, 0.6), alpha_fixed=0.6)
        assert fit.rho_hat == pytest.approx(0.3, rel=1e-12)
        assert fit.residual < 1e-12

    def test_gevrey_smoothed_white_field(self, grid128):
        white = field_from_envelope(grid128, lambda k: np.ones_like(k), np.random.default_rng(1))
        from sqglab.spectral import gevrey_multiplier

        smooth = gevrey_multiplier(white, GevreyParams.make(0.3, 0.6, 0.8, 0.2), 1.0, -1)
        fit = fit_gevrey_radius(smooth, alpha_fixed=0.6)
        assert fit.rho_hat == pytest.approx(0.3, rel=1e-12)

    def test_white_spectrum_is_non_decaying(self, grid64):
        white = field_from_envelope(grid64, lambda k: np.ones_like(k), np.random.default_rng(2))
        with pytest.raises(NonDecayingSpectrumError) as err:
            fit_gevrey_radius(white, alpha_fixed=0.6)
        assert abs(err.value.fit.rho_hat) < 1e-10

    def test_too_few_shells(self, grid64):
        with pytest.raises(FitError):
            fit_gevrey_radius(grid64.zeros())
        steep = _exact_decay(grid64, 20.0, 1.0)
        with pytest.raises(FitError):
            fit_gevrey_radius(steep, alpha_fixed=1.0)

    def test_record(self, grid128):
        rec = fit_gevrey_radius(_exact_decay(grid128, 0.5, 0.6), alpha_fixed=0.6).to_record()
        assert set(rec) == {"rho_hat", "alpha_hat", "residual", "band_range", "intercept", "n_shells"}


    def test_mode_weights_ramp(self):
        w = mode_weights(np.log([1e-16, 1e-14, 1e-13, 1e-12, 1.0]), math.log(1e-14), 2.0)
        assert w.tolist() == pytest.approx([0.0, 0.0, 0.5, 1.0, 1.0])

    def test_shells_drop_modes_below_floor(self, grid64):
        f = field_from_envelope(grid64, lambda k: np.exp(-k), np.random.default_rng(0))
        shells = shell_statistics(f, noise_floor=1e-8)
        assert all(np.all(np.exp(s.log_amp) > 1e-8 * np.abs(f.coeffs).max()) for s in shells)
        assert max(s.index for s in shells) < 20

    def test_rate_grows_smoothly_under_dissipation(self, grid128):
        # tail shells fade out gradually, so the fitted rate tracks the semigroup monotonically
        f = field_from_envelope(grid128, lambda k: k**-1.5 * np.exp(-(k**2) / 64), np.random.default_rng(1))
        rates = [fit_gevrey_radius(dissipative_semigroup(f, 0.8, t), alpha_fixed=0.6).rho_hat
                 for t in np.linspace(0.05, 1.0, 40)]
        assert all(b > a for a, b in zip(rates, rates[1:]))


class TestDecayTable:
    def test_smallest_order(self):
        assert smallest_admissible_order(0.8) == 2
        assert smallest_admissible_order(0.5) == 2
        assert smallest_admissible_order(1.0) == 2

    def test_log_bound(self):
        assert log_decay_bound(3, 0.5, 0.6) == pytest.approx(math.log(math.factorial(3) ** (1 / 0.6) / 0.5 ** (3 / 0.6)))

    def test_calibration_row_is_one(self, grid128):
        rows = derivative_decay_table(_exact_decay(grid128, 0.5, 0.6), P, 1.0, 10)
        assert rows[0].n == 2 and rows[0].ratio == pytest.approx(1.0, rel=1e-14)
        assert [r.n for r in rows] == list(range(2, 11))

    def test_per_mode_bound_zero_slack(self, grid128):
        # ||Lambda^n f|| rho^(n/alpha) / (n!)^(1/alpha) <= ||f||_{G(s), H^m} mode by mode
        for seed in range(3):
            f = random_field(grid128, seed)
            for s in (0.5, 1.0, 4.0):
                rho = P.radius(s)
                top = gevrey_norm(f, P, s, 2 - P.kappa)
                for n in range(2, 13):
                    lhs = sobolev_norm(f, n + 2 - P.kappa) * math.exp(-log_decay_bound(n, rho, P.alpha))
                    assert lhs <= top * (1 + 1e-12)

    def test_order_limit(self, grid32):
        with pytest.raises(ValueError):
            derivative_decay_table(random_field(grid32, 0), P, 1.0, 13)
        with pytest.raises(ValueError):
            derivative_decay_table(random_field(grid32, 0), P, 0.0, 5)

    def test_zero_field(self, grid32):
        rows = derivative_decay_table(grid32.zeros(), P, 1.0, 6)
        assert all(r.ratio == 0.0 and r.norm == 0.0 for r in rows)
