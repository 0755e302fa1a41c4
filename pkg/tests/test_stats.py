import math
import random

import numpy as np
import pytest

import oracles
from pcf.errors import (
    DegenerateResponse,
    DegenerateX,
    DimensionMismatch,
    EmptyInput,
    InsufficientData,
    RankDeficient,
    SchemaError,
)
from pcf.stats import (
    Z_99,
    bspline_basis,
    descriptive,
    diagnostics,
    evaluate_basis,
    ols,
    spline_fit,
)


class TestDescriptive:
    def test_hand_computed(self):
        d = descriptive([1.0, 2.0, 3.0])
        assert d.mean == 2.0
        assert d.median == 2.0
        assert d.sample_std == 1.0
        assert d.min == 1.0 and d.max == 3.0
        assert d.ci99[0] < d.mean < d.ci99[1]
        assert d.ci99 == pytest.approx(
            (2.0 - Z_99 / math.sqrt(3), 2.0 + Z_99 / math.sqrt(3))
        )

    def test_even_n_median_midpoint(self):
        assert descriptive([1.0, 2.0, 10.0, 20.0]).median == 6.0

    def test_matches_compensated_oracle(self):
        rng = random.Random(12)
        values = [rng.uniform(-50, 170) for _ in range(10000)]
        d = descriptive(values)
        ref = oracles.fsum_descriptive(values)
        assert d.n == ref["n"]
        assert d.mean == pytest.approx(ref["mean"], rel=1e-12)
        assert d.sample_std == pytest.approx(ref["sample_std"], rel=1e-12)
        assert d.median == pytest.approx(ref["median"], rel=1e-12)
        assert d.min == ref["min"] and d.max == ref["max"]
        half = Z_99 * ref["sample_std"] / math.sqrt(ref["n"])
        assert d.ci99[0] == pytest.approx(ref["mean"] - half, rel=1e-12)
        assert d.ci99[1] == pytest.approx(ref["mean"] + half, rel=1e-12)

    def test_ci_width_scales_inverse_sqrt_n(self):
        rng = np.random.default_rng(7)
        base = rng.normal(10.0, 2.0, size=400000)
        w1 = np.diff(descriptive(base[:100000]).ci99)[0]
        w4 = np.diff(descriptive(base).ci99)[0]
        assert w1 / w4 == pytest.approx(2.0, rel=0.05)

    def test_empty_input(self):
        with pytest.raises(EmptyInput):
            descriptive([])

    def test_single_value(self):
        d = descriptive([5.0])
        assert d.mean == d.median == d.min == d.max == 5.0
        assert d.sample_std == 0.0
        assert d.ci99 == (5.0, 5.0)


class TestOls:
    def test_exact_line(self):
        X = np.array([[1.0, 0.0], [1.0, 1.0], [1.0, 2.0]])
        y = np.array([1.0, 3.0, 5.0])
        fit = ols(X, y)
        assert fit.coefficients == pytest.approx([1.0, 2.0], abs=1e-12)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_response_zero_slope(self):
        x = np.array([0.0, 1.0, 2.0, 3.0])
        y = np.array([1.0, 2.0, 2.0, 1.0])  # symmetric about the x midpoint
        fit = ols(np.column_stack([np.ones(4), x]), y)
        assert fit.coefficients[1] == pytest.approx(0.0, abs=1e-12)
        assert fit.r_squared == pytest.approx(0.0, abs=1e-12)

    def test_constant_response_raises(self):
        x = np.array([0.0, 1.0, 2.0, 3.0])
        with pytest.raises(DegenerateResponse):
            ols(np.column_stack([np.ones(4), x]), np.full(4, 3.0))

    def test_rank_deficient(self):
        x = np.array([1.0, 2.0, 3.0, 4.0])
        X = np.column_stack([np.ones(4), x, 2 * x])
        with pytest.raises(RankDeficient):
            ols(X, x)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            ols(np.ones((3, 2)), np.ones(4))
        with pytest.raises(DimensionMismatch):
            ols(np.ones((2, 3)), np.ones(2))

    def test_matches_closed_form_simple_regression(self):
        rng = random.Random(99)
        for _ in range(200):
            n = rng.randint(5, 40)
            x = [rng.uniform(-10, 10) for _ in range(n)]
            y = [2.0 + 0.7 * xi + rng.gauss(0, 1.5) for xi in x]
            fit = ols(np.column_stack([np.ones(n), x]), np.array(y))
            a, b = oracles.simple_regression(x, y)
            assert fit.coefficients[0] == pytest.approx(a, rel=1e-10, abs=1e-10)
            assert fit.coefficients[1] == pytest.approx(b, rel=1e-10, abs=1e-10)

    def test_residual_orthogonality(self):
        rng = np.random.default_rng(3)
        X = np.column_stack([np.ones(500), rng.normal(size=(500, 3))])
        y = X @ np.array([1.0, 2.0, -0.5, 0.3]) + rng.normal(size=500)
        fit = ols(X, y)
        xte = X.T @ fit.residuals
        scale = np.abs(X).sum(axis=0) * np.abs(fit.residuals).max()
        assert np.all(np.abs(xte) <= 1e-8 * np.maximum(scale, 1.0))

    def test_r_squared_identities(self):
        rng = np.random.default_rng(4)
        x = rng.normal(size=300)
        y = 1.0 + 0.5 * x + rng.normal(size=300)
        X = np.column_stack([np.ones(300), x])
        fit = ols(X, y)
        ssr = float(fit.residuals @ fit.residuals)
        sst = float(np.sum((y - y.mean()) ** 2))
        assert fit.r_squared == pytest.approx(1 - ssr / sst, abs=1e-10)
        yhat = X @ fit.coefficients
        corr = np.corrcoef(yhat, y)[0, 1]
        assert fit.r_squared == pytest.approx(corr ** 2, abs=1e-10)

    def test_p_monotone_in_t(self):
        rng = np.random.default_rng(5)
        x = rng.normal(size=150)
        y = 1.0 + 0.4 * x + rng.normal(size=150)
        fit = ols(np.column_stack([np.ones(150), x]), y)
        ts = np.abs(fit.t_stats)
        order = np.argsort(ts)
        ps = fit.p_values[order]
        assert np.all(np.diff(ps) <= 1e-15)

    def test_information_criteria_relationship(self):
        rng = np.random.default_rng(6)
        x = rng.normal(size=200)
        y = 2.0 + x + rng.normal(size=200)
        fit = ols(np.column_stack([np.ones(200), x]), y)
        p, n = 2, 200
        assert fit.aic == pytest.approx(2 * p - 2 * fit.log_likelihood)
        assert fit.bic == pytest.approx(p * math.log(n) - 2 * fit.log_likelihood)
        assert fit.adj_r_squared <= fit.r_squared
        assert fit.ci95[1][0] < fit.coefficients[1] < fit.ci95[1][1]


class TestDiagnostics:
    def test_symmetric_residuals_zero_skew(self):
        e = np.array([-3.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 3.0])
        d = diagnostics(e)
        assert d.skew == pytest.approx(0.0, abs=1e-12)

    def test_alternating_residuals_match_dw_formula(self):
        n = 64
        e = np.array([1.0 if i % 2 == 0 else -1.0 for i in range(n)])
        d = diagnostics(e)
        # direct evaluation: diffs are +-2 (n-1 of them), sum e^2 = n
        assert d.durbin_watson == pytest.approx(4.0 * (n - 1) / n)
        assert 0.0 <= d.durbin_watson <= 4.0

    def test_large_normal_sample_kurtosis_and_jb(self):
        rng = np.random.default_rng(11)
        e = rng.standard_normal(10 ** 6)
        d = diagnostics(e)
        assert d.kurtosis == pytest.approx(3.0, abs=0.02)
        assert d.jb_p > 0.001
        assert d.jarque_bera >= 0.0

    def test_insufficient_data(self):
        with pytest.raises(InsufficientData):
            diagnostics(np.ones(5))


class TestBsplineBasis:
    def test_partition_of_unity(self):
        rng = np.random.default_rng(21)
        for df in (4, 5, 7):
            x = rng.uniform(0, 30, size=400)
            basis = bspline_basis(x, degree=3, df=df)
            rows = basis.full.sum(axis=1)
            assert np.all(np.abs(rows - 1.0) <= 1e-12)
            assert basis.full.min() >= 0.0 and basis.full.max() <= 1.0
            assert basis.values.shape == (400, df)

    def test_df5_knots_at_third_quantiles(self):
        rng = random.Random(31)
        x = [rng.uniform(2, 40) for _ in range(5000)]
        basis = bspline_basis(np.array(x), degree=3, df=5)
        assert len(basis.knots) == 2
        assert basis.knots[0] == pytest.approx(oracles.quantile_sorted(x, 1 / 3), rel=1e-12)
        assert basis.knots[1] == pytest.approx(oracles.quantile_sorted(x, 2 / 3), rel=1e-12)
        assert basis.boundary == (min(x), max(x))

    def test_rows_match_recursive_oracle(self):
        x = np.array([2.0, 7.5, 13.0, 26.0, 40.0])
        basis = bspline_basis(x, degree=3, df=5)
        knots = (
            [basis.boundary[0]] * 4 + list(basis.knots) + [basis.boundary[1]] * 4
        )
        for i, xi in enumerate(x):
            expect = oracles.de_boor_row(knots, 3, float(xi))
            assert basis.full[i] == pytest.approx(expect, abs=1e-12)

    def test_boundary_min_row(self):
        x = np.array([2.0, 10.0, 40.0])
        basis = bspline_basis(x, degree=3, df=5)
        knots = [2.0] * 4 + list(basis.knots) + [40.0] * 4
        assert basis.full[0] == pytest.approx(oracles.de_boor_row(knots, 3, 2.0), abs=1e-15)
        # at the left boundary only the first basis function is active
        assert basis.full[0][0] == pytest.approx(1.0)
        assert basis.full[-1][-1] == pytest.approx(1.0)

    def test_degenerate_x(self):
        with pytest.raises(DegenerateX):
            bspline_basis(np.full(10, 3.0), degree=3, df=5)

    def test_df_too_small(self):
        with pytest.raises(SchemaError):
            bspline_basis(np.arange(10.0), degree=3, df=3)

    def test_evaluate_basis_consistent(self):
        rng = np.random.default_rng(41)
        x = rng.uniform(0, 10, size=200)
        basis = bspline_basis(x, degree=3, df=5)
        again = evaluate_basis(basis, x)
        assert np.allclose(again, basis.values, atol=1e-14)


class TestSplineFit:
    def test_pure_star_trend(self):
        rng = np.random.default_rng(51)
        star = rng.integers(1, 6, size=2000).astype(float)
        time = rng.uniform(5, 35, size=2000)
        sat = 3.0 + 0.3 * star
        model = spline_fit(time, star, sat, df=5)
        c = model.fit.coefficients
        assert c[0] == pytest.approx(3.0, abs=1e-9)
        assert c[1] == pytest.approx(0.3, abs=1e-9)
        assert np.all(np.abs(c[2:]) < 1e-9)

    def test_recovers_smooth_response_within_noise(self):
        rng = np.random.default_rng(61)
        n = 20000
        star = rng.integers(1, 6, size=n).astype(float)
        time = rng.uniform(2, 40, size=n)
        smooth = 0.002 * (time - 8) ** 2 + 0.08 * time
        noise_std = 0.5
        sat = 2.0 + 0.25 * star + smooth + rng.normal(0, noise_std, size=n)
        model = spline_fit(time, star, sat, df=5)
        pred = model.predict(time, star)
        truth = 2.0 + 0.25 * star + smooth
        rmse = float(np.sqrt(np.mean((pred - truth) ** 2)))
        assert rmse <= noise_std

    def test_coefficient_order_and_names(self):
        rng = np.random.default_rng(71)
        star = rng.integers(1, 6, size=500).astype(float)
        time = rng.uniform(2, 40, size=500)
        sat = 3.0 + 0.3 * star + 0.05 * time + rng.normal(0, 0.3, size=500)
        model = spline_fit(time, star, sat, df=5)
        assert len(model.fit.coefficients) == 7
        assert model.fit.names[0] == "intercept"
        assert model.fit.names[1] == "star_level"
        assert model.fit.names[2].endswith("[0]")
        assert model.fit.names[6].endswith("[4]")
