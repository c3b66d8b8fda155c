import numpy as np
import pytest

from qjumps import CorrelationKernel, build_grid, make_noise_model, sample_potential
from qjumps.errors import NotPositiveDefiniteError
from qjumps.noise import check_generator_functional, periodized_row, spectral_weights

DT = 0.01


@pytest.fixture(scope="module")
def sampler_grid():
    # ell = 2 is an exact node displacement here (dx = 0.125, lag 16).
    return build_grid(128, -8.0, 8.0)


class TestMakeNoiseModel:
    def test_gaussian_curvature(self, model):
        assert model.a_squared == pytest.approx(0.25, abs=1e-15)
        assert model.g(0.0) == 0.0

    def test_g_by_direct_substitution(self, model):
        assert model.g(0.1) == pytest.approx(1.0 - np.exp(-0.1**2 / 8.0), abs=1e-6)

    def test_tabulated_with_interior_maximum_rejected(self):
        with pytest.raises(NotPositiveDefiniteError):
            CorrelationKernel.tabulated([0.0, 0.5, 1.0], [1.0, 1.3, 0.2])

    def test_tabulated_curvature_from_smallest_lag(self):
        r = np.linspace(0.0, 6.0, 601)
        f = np.exp(-(r**2) / 8.0)
        model = make_noise_model(CorrelationKernel.tabulated(r, f))
        assert model.a_squared == pytest.approx(0.25, rel=1e-3)

    def test_zero_kernel_is_noise_free_limit(self, model_zero):
        assert model_zero.a_squared == 0.0
        assert model_zero.is_zero

    def test_g_nonnegative_and_quadratic_near_zero(self, model):
        r = np.linspace(0.0, 8.0, 2001)
        g = model.g(r)
        assert g.min() >= 0.0
        small = r[(r > 0) & (r <= 0.2)]  # r <= ell/10
        g_small = model.g(small)
        quad = 0.5 * model.a_squared * small**2
        assert np.all(np.abs(g_small - quad) <= 0.01 * quad)


class TestPeriodization:
    def test_wrapped_images_enter(self, model, sampler_grid):
        row = periodized_row(model, sampler_grid)
        # f_per(L/2) picks up two equal images: f(8) + f(-8) to leading order.
        half = sampler_grid.n_points // 2
        expected = 2.0 * np.exp(-(8.0**2) / 8.0) + np.exp(-(24.0**2) / 8.0) * 2.0
        assert row[half] == pytest.approx(expected, rel=1e-12)

    def test_row_is_even_under_wrap(self, model, sampler_grid):
        row = periodized_row(model, sampler_grid)
        assert np.allclose(row[1:], row[:0:-1], rtol=1e-13)


class TestSampler:
    def test_zero_mean_within_four_standard_errors(self, model, sampler_grid):
        rng = np.random.default_rng(11)
        draws = np.stack(
            [sample_potential(model, sampler_grid, DT, rng).values for _ in range(5000)]
        )
        se = draws.std(axis=0, ddof=1) / np.sqrt(draws.shape[0])
        assert np.all(np.abs(draws.mean(axis=0)) <= 4.0 * se)

    def test_variance_matches_kernel(self, model, sampler_grid):
        rng = np.random.default_rng(12)
        draws = np.stack(
            [sample_potential(model, sampler_grid, DT, rng).values for _ in range(5000)]
        )
        v = draws[:, 0] ** 2
        se = v.std(ddof=1) / np.sqrt(len(v))
        expected = periodized_row(model, sampler_grid)[0] / DT  # ~ f(0)/dt = 100
        assert expected == pytest.approx(100.0, rel=1e-6)
        assert abs(v.mean() - expected) <= 4.0 * se

    def test_covariance_at_correlation_length(self, model, sampler_grid):
        rng = np.random.default_rng(13)
        draws = np.stack(
            [sample_potential(model, sampler_grid, DT, rng).values for _ in range(5000)]
        )
        lag = int(round(2.0 / sampler_grid.dx))
        prod = draws[:, 0] * draws[:, lag]
        se = prod.std(ddof=1) / np.sqrt(len(prod))
        expected = periodized_row(model, sampler_grid)[lag] / DT
        assert expected == pytest.approx(np.exp(-0.5) * 100.0, rel=1e-4)
        assert abs(prod.mean() - expected) <= 4.0 * se

    def test_full_covariance_within_five_standard_errors(self, model, sampler_grid):
        rng = np.random.default_rng(14)
        draws = np.stack(
            [sample_potential(model, sampler_grid, DT, rng).values for _ in range(6000)]
        )
        n = sampler_grid.n_points
        row = periodized_row(model, sampler_grid) / DT
        for lag in range(0, n, 7):
            prod = draws[:, 0] * draws[:, lag]
            se = prod.std(ddof=1) / np.sqrt(len(prod))
            assert abs(prod.mean() - row[lag]) <= 5.0 * se

    def test_same_seed_bitwise_identical(self, model, sampler_grid):
        a = sample_potential(model, sampler_grid, DT, np.random.default_rng(99)).values
        b = sample_potential(model, sampler_grid, DT, np.random.default_rng(99)).values
        assert np.array_equal(a, b)

    def test_sharp_cutoff_kernel_rejected(self, sampler_grid):
        # Truncating the gaussian bump at r = ell leaves negative spectral lobes.
        r = np.arange(0.0, 8.0, 0.125)
        f = np.where(r <= 2.0, np.exp(-(r**2) / 8.0), 0.0)
        model = make_noise_model(CorrelationKernel.tabulated(r, f))
        with pytest.raises(NotPositiveDefiniteError):
            spectral_weights(model, sampler_grid, DT)


class TestGeneratorFunctional:
    def test_zero_test_function(self, model, sampler_grid):
        h = np.zeros((1, sampler_grid.n_points))
        check = check_generator_functional(model, sampler_grid, h, DT, 200, np.random.default_rng(0))
        assert check.empirical == 1.0 + 0.0j
        assert check.closed_form == 1.0
        assert check.within_four_se

    def test_spike_closed_form(self, model, sampler_grid):
        # Integrated weight 1 at a single node: exp(-f_per(0) dt / 2).
        h = np.zeros((1, sampler_grid.n_points))
        h[0, 40] = 1.0 / sampler_grid.dx
        check = check_generator_functional(model, sampler_grid, h, DT, 400, np.random.default_rng(1))
        f0 = periodized_row(model, sampler_grid)[0]
        assert check.closed_form == pytest.approx(np.exp(-0.5 * f0 * DT), abs=1e-12)

    def test_smooth_two_step_function(self, model, sampler_grid):
        x = sampler_grid.x
        h = np.stack([0.4 * np.exp(-(x**2) / 8.0), -0.25 * np.exp(-((x - 1.0) ** 2) / 4.5)])
        check = check_generator_functional(model, sampler_grid, h, DT, 5000, np.random.default_rng(2))
        assert check.within_four_se
        assert abs(check.empirical - check.closed_form) <= 4.0 * check.std_error + 1e-12
