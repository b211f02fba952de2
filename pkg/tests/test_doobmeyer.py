"""Predictable-part estimation: features, walk-forward fits, diagnostics.

Statistical reference values are cross-checked against direct
re-computations (double loops, full-sample lstsq) rather than against the
functions under test.
"""
from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emmlab import (
    DoobMeyerDiagnostics,
    EstimationError,
    GlobalFutureLeak,
    GlobalSmoothed,
    Local,
    Pairwise,
    PathPanel,
    PriceOnly,
    SimConfig,
    STRUCTURE_ORDER,
    ValidationError,
    cross_asset_average,
    decompose,
    diagnostics,
    expanding_ols,
    feature_matrix,
    features,
    run_diagnostics,
    simulate,
    smoothed_drivers,
    standard_structures,
    structure_label,
)

TOL = 1e-12


def synthetic_panel(y: np.ndarray) -> PathPanel:
    """A panel with prescribed driver paths and flat prices."""
    k, n1 = y.shape
    log_s = np.zeros((k, n1))
    return PathPanel(
        y=y,
        log_s=log_s,
        returns=np.diff(log_s, axis=1),
        config=SimConfig(n_assets=k, n_steps=n1 - 1),
    )


class TestFeatures:
    """Feature construction per information structure."""

    def test_labels(self):
        assert structure_label(PriceOnly()) == "price-only"
        assert structure_label(Local(0)) == "local"
        assert structure_label(Pairwise(0, 1)) == "pairwise"
        assert structure_label(GlobalSmoothed()) == "global-smoothed"
        assert structure_label(GlobalFutureLeak()) == "global-future-leak"

    def test_price_only_on_a_deterministic_ramp(self):
        panel = simulate(SimConfig(nu=0.0, sigma=0.0, mu0=0.07, n_steps=400))
        f = features(panel, PriceOnly(), 0, 5)
        assert np.allclose(f, [1.0, 0.07 * panel.config.dt], rtol=0, atol=TOL)

    def test_row_zero_is_zeroed_for_the_missing_lag(self):
        panel = simulate(SimConfig(n_steps=300))
        x = feature_matrix(panel, GlobalFutureLeak(), 0)
        assert np.all(x[0] == 0.0)
        assert np.all(x[1:, 0] == 1.0)

    def test_lag_column_matches_previous_return(self):
        panel = simulate(SimConfig(n_steps=300))
        x = feature_matrix(panel, PriceOnly(), 1)
        assert np.array_equal(x[1:, 1], panel.returns[1, :-1])

    def test_local_column_is_the_contemporaneous_driver(self):
        panel = simulate(SimConfig(n_steps=300))
        f = features(panel, Local(2), 0, 17)
        assert f[2] == panel.y[2, 17]

    def test_pairwise_columns(self):
        panel = simulate(SimConfig(n_steps=300))
        f = features(panel, Pairwise(1, 2), 0, 40)
        assert f[2] == panel.y[1, 40]
        assert f[3] == panel.y[2, 40]

    def test_future_leak_carries_the_coming_driver_increment(self):
        panel = simulate(SimConfig(n_steps=300))
        t = 33
        f = features(panel, GlobalFutureLeak(), 0, t)
        k = panel.n_assets
        for d in range(k):
            assert f[2 + d] == panel.y[d, t]
            assert f[2 + k + d] == panel.y[d, t + 1] - panel.y[d, t]

    def test_time_below_lag_rejected(self):
        panel = simulate(SimConfig(n_steps=300))
        with pytest.raises(ValidationError, match="below the required lag"):
            features(panel, PriceOnly(), 0, 0)

    def test_time_past_last_return_rejected(self):
        panel = simulate(SimConfig(n_steps=300))
        with pytest.raises(ValidationError, match="no following return"):
            features(panel, PriceOnly(), 0, 300)

    def test_asset_and_driver_indices_checked(self):
        panel = simulate(SimConfig(n_steps=300))
        with pytest.raises(ValidationError, match="asset index"):
            feature_matrix(panel, PriceOnly(), 9)
        with pytest.raises(ValidationError, match="driver index"):
            feature_matrix(panel, Local(9), 0)

    def test_pairwise_needs_distinct_drivers(self):
        with pytest.raises(ValidationError, match="distinct"):
            Pairwise(1, 1)

    @pytest.mark.parametrize("window", [1, 4])
    def test_smoothing_window_must_be_odd_and_at_least_three(self, window):
        with pytest.raises(ValidationError, match="odd"):
            GlobalSmoothed(window)


class TestSmoothedDrivers:
    def test_frozen_window_three_example(self):
        panel = synthetic_panel(np.array([[1.0, 2.0, 4.0, 8.0]]))
        out = smoothed_drivers(panel, 3)
        assert np.allclose(out[0], [1.5, 7 / 3, 14 / 3, 6.0], rtol=0, atol=TOL)

    def test_matches_direct_double_loop(self):
        panel = simulate(SimConfig(n_steps=200))
        window = 21
        half = (window - 1) // 2
        out = smoothed_drivers(panel, window)
        n = panel.y.shape[1]
        for d in range(panel.n_assets):
            for t in range(n):
                lo, hi = max(t - half, 0), min(t + half, n - 1)
                assert abs(out[d, t] - panel.y[d, lo : hi + 1].mean()) < TOL

    def test_constant_driver_is_a_fixed_point(self):
        panel = synthetic_panel(np.full((2, 50), 0.3))
        assert np.allclose(smoothed_drivers(panel, 5), 0.3, rtol=0, atol=TOL)


class TestExpandingOls:
    """Walk-forward fits use strictly past samples."""

    def test_zero_data_gives_zero_fit(self):
        n = 200
        feats = np.column_stack([np.ones(n), np.zeros(n)])
        fit = expanding_ols(np.zeros(n), feats, warmup=30)
        assert np.all(fit.m_hat == 0.0)
        assert np.all(fit.final_coef == 0.0)

    def test_intercept_only_recovers_a_constant_exactly(self):
        n, w, c = 200, 30, 0.5
        fit = expanding_ols(np.full(n, c), np.ones((n, 1)), warmup=w, ridge=0.0)
        assert np.all(fit.m_hat[:w] == 0.0)
        assert np.all(fit.m_hat[w:] == c)

    def test_ar1_coefficient_and_full_sample_agreement(self):
        rng = np.random.default_rng(1)
        e = rng.standard_normal(10_001)
        y = np.zeros(10_001)
        for t in range(10_000):
            y[t + 1] = 0.3 * y[t] + e[t]
        feats = np.column_stack([np.ones(10_000), y[:-1]])
        targets = y[1:]
        fit = expanding_ols(targets, feats, warmup=100, ridge=0.0)
        assert abs(fit.final_coef[1] - 0.3) < 0.05
        # the last fit sees samples u < T-1 and nothing else
        ref = np.linalg.lstsq(feats[:-1], targets[:-1], rcond=None)[0]
        assert np.allclose(fit.final_coef, ref, rtol=0, atol=1e-10)

    def test_duplicate_column_is_singular_without_ridge(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal(200)
        feats = np.column_stack([np.ones(200), x, x])
        targets = rng.standard_normal(200)
        with pytest.raises(EstimationError, match="singular"):
            expanding_ols(targets, feats, warmup=30, ridge=0.0)
        expanding_ols(targets, feats, warmup=30, ridge=100.0)

    def test_ridge_shrinks_early_fits_hardest(self):
        rng = np.random.default_rng(2)
        x = rng.standard_normal(2_000)
        targets = 0.4 * x + 0.1 * rng.standard_normal(2_000)
        feats = np.column_stack([np.ones(2_000), x])
        loose = expanding_ols(targets, feats, warmup=30, ridge=0.0)
        tight = expanding_ols(targets, feats, warmup=30, ridge=650.0)
        early = slice(30, 60)
        assert np.mean(np.abs(tight.m_hat[early])) < np.mean(
            np.abs(loose.m_hat[early])
        )
        # shrinkage fades: final coefficients nearly agree
        assert abs(tight.final_coef[1] - loose.final_coef[1]) < 0.2

    def test_warmup_beyond_sample_returns_zeros(self):
        fit = expanding_ols(np.ones(50), np.ones((50, 1)), warmup=60)
        assert np.all(fit.m_hat == 0.0)
        assert np.all(fit.final_coef == 0.0)

    def test_validation(self):
        feats = np.ones((100, 2))
        with pytest.raises(ValidationError, match="warmup"):
            expanding_ols(np.ones(100), feats, warmup=5)
        with pytest.raises(ValidationError, match="ridge"):
            expanding_ols(np.ones(100), feats, warmup=30, ridge=-1.0)
        with pytest.raises(ValidationError, match="length"):
            expanding_ols(np.ones(99), feats, warmup=30)


class TestDecompose:
    def test_zero_m_hat_returns_everything_to_the_martingale(self):
        r = np.array([0.1, -0.2, 0.3, 0.05])
        mart, a_path = decompose(r, np.zeros(4), warmup=1)
        assert np.array_equal(mart, r)
        assert np.all(a_path == 0.0)

    def test_constant_m_hat_gives_a_linear_predictable_part(self):
        m = np.full(6, 0.5)
        r = np.zeros(6)
        mart, a_path = decompose(r, m, warmup=2)
        assert np.allclose(a_path, [0, 0, 0, 0.5, 1.0, 1.5, 2.0], rtol=0, atol=TOL)
        assert np.all(mart == -0.5)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValidationError, match="length"):
            decompose(np.zeros(5), np.zeros(4), warmup=1)

    @settings(max_examples=40, deadline=None)
    @given(
        data=st.lists(
            st.tuples(
                st.floats(-1, 1, allow_nan=False),
                st.floats(-1, 1, allow_nan=False),
            ),
            min_size=3,
            max_size=30,
        ),
        warmup=st.integers(0, 5),
    )
    def test_identity_and_increments(self, data, warmup):
        r = np.array([a for a, _ in data])
        m = np.array([b for _, b in data])
        mart, a_path = decompose(r, m, warmup)
        assert np.allclose(mart + m, r, rtol=0, atol=TOL)
        assert len(a_path) == len(r) + 1
        assert np.all(a_path[: min(warmup, len(r)) + 1] == 0.0)
        if warmup < len(r):
            assert np.allclose(
                np.diff(a_path)[warmup:], m[warmup:], rtol=0, atol=TOL
            )


class TestDiagnostics:
    def make(self, n=400, seed=3):
        rng = np.random.default_rng(seed)
        return rng.standard_normal(n) * 0.01, rng.standard_normal(n) * 0.001

    def test_zero_m_hat_scores_zero(self):
        r, _ = self.make()
        d = diagnostics(r, np.zeros(len(r)), warmup=250)
        assert (d.mean_abs_m, d.rms_m, d.fraction_qv) == (0.0, 0.0, 0.0)
        assert not d.degenerate_qv

    def test_perfect_foresight_scores_one(self):
        r, _ = self.make()
        d = diagnostics(r, r.copy(), warmup=250)
        assert d.fraction_qv == 1.0

    def test_matches_plain_loop_recomputation(self):
        r, m = self.make()
        w = 250
        d = diagnostics(r, m, warmup=w)
        post_m = [float(v) for v in m[w:]]
        post_r = [float(v) for v in r[w:]]
        n = len(post_m)
        mean_abs = sum(abs(v) for v in post_m) / n
        rms = (sum(v * v for v in post_m) / n) ** 0.5
        fraction = sum(v * v for v in post_m) / sum(v * v for v in post_r)
        assert abs(d.mean_abs_m - mean_abs) < TOL
        assert abs(d.rms_m - rms) < TOL
        assert abs(d.fraction_qv - fraction) < TOL
        acc, expect_a = 0.0, [0.0] * (w + 1)
        for v in post_m:
            acc += v
            expect_a.append(acc)
        assert np.allclose(d.a_path, expect_a, rtol=0, atol=TOL)

    def test_zero_returns_flag_a_degenerate_ratio(self):
        _, m = self.make()
        d = diagnostics(np.zeros(len(m)), m, warmup=250)
        assert d.degenerate_qv
        assert d.fraction_qv == 0.0

    def test_too_few_post_warmup_samples_rejected(self):
        r, m = self.make(n=349)
        with pytest.raises(ValidationError, match="post-warmup"):
            diagnostics(r, m, warmup=250)
        r, m = self.make(n=350)
        diagnostics(r, m, warmup=250)


class TestCrossAssetAverage:
    def row(self, mean_abs, rms, fraction) -> DoobMeyerDiagnostics:
        return DoobMeyerDiagnostics(
            mean_abs_m=mean_abs,
            rms_m=rms,
            fraction_qv=fraction,
            m_path=np.zeros(1),
            a_path=np.zeros(2),
        )

    def test_identical_rows_average_to_themselves(self):
        rows = [self.row(0.3, 0.4, 0.2)] * 3
        avg = cross_asset_average(rows)
        assert np.allclose(
            [avg.mean_abs_m, avg.rms_m, avg.fraction_qv],
            [0.3, 0.4, 0.2],
            rtol=0,
            atol=TOL,
        )

    def test_two_row_midpoint(self):
        avg = cross_asset_average([self.row(0, 0, 0), self.row(2, 2, 1)])
        assert (avg.mean_abs_m, avg.rms_m, avg.fraction_qv) == (1.0, 1.0, 0.5)

    def test_empty_rejected(self):
        with pytest.raises(ValidationError, match="empty"):
            cross_asset_average([])

    def test_three_random_rows(self):
        rng = np.random.default_rng(5)
        vals = rng.random((3, 3))
        avg = cross_asset_average([self.row(*v) for v in vals])
        assert np.allclose(
            [avg.mean_abs_m, avg.rms_m, avg.fraction_qv],
            vals.mean(axis=0),
            rtol=0,
            atol=TOL,
        )


class TestStandardStructures:
    def test_ladder_order_and_cyclic_partner(self):
        ladder = standard_structures(0, 3)
        assert [label for label, _ in ladder] == list(STRUCTURE_ORDER)
        assert ladder[2][1] == Pairwise(0, 1)
        assert standard_structures(2, 3)[2][1] == Pairwise(2, 0)

    def test_single_asset_ladder_skips_pairwise(self):
        labels = [label for label, _ in standard_structures(0, 1)]
        assert labels == [
            "price-only",
            "local",
            "global-smoothed",
            "global-future-leak",
        ]


@pytest.fixture(scope="module")
def run():
    return run_diagnostics(SimConfig())


class TestRunDiagnostics:
    """One full scoring pass on the default market, seed 0."""

    def test_grid_is_complete(self, run):
        assert run.structure_labels == STRUCTURE_ORDER
        assert run.asset_labels == ("S1", "S2", "S3")
        assert len(run.cells) == 15
        assert set(run.averages) == set(STRUCTURE_ORDER)

    def test_fractions_sit_well_below_one(self, run):
        for cell in run.cells.values():
            assert 0.0 <= cell.fraction_qv < 0.1
            assert not cell.degenerate_qv

    def test_leaked_information_outscores_admissible_information(self, run):
        po = run.averages["price-only"].fraction_qv
        gfl = run.averages["global-future-leak"].fraction_qv
        assert po < gfl

    def test_paths_have_full_length(self, run):
        cell = run.cells[("S1", "price-only")]
        assert len(cell.m_path) == run.panel.n_steps
        assert len(cell.a_path) == run.panel.n_steps + 1
