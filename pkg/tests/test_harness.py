import math

import numpy as np
import pytest

from ordinalcps import (
    CalibrationError,
    Dataset,
    PredictionInterval,
    SynthSpec,
    ValidationError,
    apply_predictor,
    avg_set_size,
    calibrate_method,
    check_radial_monotonicity,
    coverage_metric,
    lambda_sweep,
    run_trials,
    split_dataset,
    synth_generate,
    tau_curve,
)
from ordinalcps.harness import DEFAULT_LAMBDA_GRID

from helpers import CANON


class TestSynthGenerate:
    def test_shapes_and_validity(self):
        d = synth_generate(SynthSpec(k=12, n=300, seed=1))
        assert d.n == 300 and d.K == 12

    def test_deterministic(self):
        spec = SynthSpec(k=9, n=150, sigma_range=(0.5, 3.0), miscal_temp=1.3, seed=42)
        a = synth_generate(spec)
        b = synth_generate(spec)
        assert np.array_equal(a.scores, b.scores)
        assert np.array_equal(a.labels, b.labels)

    def test_rows_radially_monotone_at_tight_tolerance(self):
        d = synth_generate(SynthSpec(k=30, n=300, sigma_range=(1.0, 5.0), seed=5))
        assert all(check_radial_monotonicity(d.row(i), 1e-12) for i in range(d.n))

    def test_huge_sigma_approaches_uniform(self):
        d = synth_generate(SynthSpec(k=2, n=50, sigma_range=(1e6, 1e6), seed=3))
        assert np.allclose(d.scores, 0.5, atol=1e-9)

    def test_miscalibration_changes_scores_not_labels(self):
        a = synth_generate(SynthSpec(k=10, n=200, miscal_temp=1.0, seed=11))
        b = synth_generate(SynthSpec(k=10, n=200, miscal_temp=1.5, seed=11))
        assert np.array_equal(a.labels, b.labels)
        assert not np.allclose(a.scores, b.scores)

    def test_calibrated_scores_match_label_frequencies(self):
        # expected count of label k is sum_i p_ik; binomial-style 3-sigma band
        d = synth_generate(SynthSpec(k=10, n=20000, sigma_range=(1.0, 4.0), seed=13))
        for k in range(1, 11):
            pk = d.scores[:, k - 1]
            expected = pk.sum()
            sigma = math.sqrt(float((pk * (1 - pk)).sum()))
            observed = int((d.labels == k).sum())
            assert abs(observed - expected) <= 3 * sigma + 1

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"k": 1, "n": 10},
            {"k": 5, "n": 0},
            {"k": 5, "n": 10, "sigma_range": (0.0, 1.0)},
            {"k": 5, "n": 10, "sigma_range": (2.0, 1.0)},
            {"k": 5, "n": 10, "miscal_temp": 0.0},
        ],
    )
    def test_invalid_specs(self, kwargs):
        with pytest.raises(ValidationError):
            SynthSpec(**kwargs)


class TestSplit:
    def test_even_split(self):
        d = synth_generate(SynthSpec(k=5, n=10, seed=0))
        cal, test = split_dataset(d, seed=1)
        assert (cal.n, test.n) == (5, 5)

    def test_odd_split_floors_calibration(self):
        d = synth_generate(SynthSpec(k=5, n=11, seed=0))
        cal, test = split_dataset(d, seed=1)
        assert (cal.n, test.n) == (5, 6)

    def test_deterministic_and_union_preserved(self):
        d = synth_generate(SynthSpec(k=5, n=40, seed=0))
        a_cal, a_test = split_dataset(d, seed=9)
        b_cal, b_test = split_dataset(d, seed=9)
        assert np.array_equal(a_cal.scores, b_cal.scores)
        merged = np.vstack([a_cal.scores, a_test.scores])
        assert np.array_equal(
            np.sort(merged, axis=0), np.sort(np.asarray(d.scores), axis=0)
        )

    def test_empty_half_rejected(self):
        d = synth_generate(SynthSpec(k=5, n=3, seed=0))
        with pytest.raises(ValidationError):
            split_dataset(d, seed=1, cal_fraction=0.05)


class TestMetrics:
    def test_full_intervals_cover(self):
        ivs = [PredictionInterval(1, 5)] * 4
        assert coverage_metric(ivs, [1, 3, 5, 2]) == 1.0
        assert avg_set_size(ivs) == 5.0

    def test_zero_coverage(self):
        ivs = [PredictionInterval(2, 3)] * 3
        assert coverage_metric(ivs, [1, 5, 4]) == 0.0

    def test_nine_of_ten(self):
        ivs = [PredictionInterval(2, 3)] * 10
        labels = [2] * 9 + [5]
        assert coverage_metric(ivs, labels) == pytest.approx(0.9)

    def test_sizes(self):
        assert avg_set_size([PredictionInterval(1, 1)] * 3) == 1.0
        assert avg_set_size([PredictionInterval(2, 3), PredictionInterval(1, 4)]) == 3.0

    def test_array_input_matches_interval_input(self):
        ivs = [PredictionInterval(2, 3), PredictionInterval(1, 4)]
        arr = (np.array([2, 1]), np.array([3, 4]))
        assert coverage_metric(ivs, [2, 5]) == coverage_metric(arr, [2, 5])
        assert avg_set_size(ivs) == avg_set_size(arr)

    def test_errors(self):
        with pytest.raises(ValidationError):
            coverage_metric([PredictionInterval(1, 2)], [1, 2])
        with pytest.raises(ValidationError):
            avg_set_size([])

    def test_permutation_invariance(self):
        rng = np.random.default_rng(3)
        lowers = rng.integers(1, 4, 30)
        uppers = lowers + rng.integers(0, 3, 30)
        labels = rng.integers(1, 7, 30)
        perm = rng.permutation(30)
        assert coverage_metric((lowers, uppers), labels) == coverage_metric(
            (lowers[perm], uppers[perm]), labels[perm]
        )
        assert avg_set_size((lowers, uppers)) == avg_set_size((lowers[perm], uppers[perm]))


class TestCalibrateMethod:
    def test_min_cps_records_count_at_least_target(self):
        d = synth_generate(SynthSpec(k=20, n=600, seed=19))
        cal, _ = split_dataset(d, seed=2)
        pred = calibrate_method("min-cps", cal, alpha=0.1)
        target = math.ceil(0.9 * (cal.n + 1))
        assert pred.diagnostics["coverage_count"] >= target

    def test_unknown_method(self):
        d = synth_generate(SynthSpec(k=5, n=20, seed=0))
        with pytest.raises(ValidationError):
            calibrate_method("median-cps", d, alpha=0.1)


class TestRunTrials:
    def test_report_layout_and_shared_splits(self):
        d = synth_generate(SynthSpec(k=15, n=400, seed=23))
        report = run_trials(d, ["min-cps", "ordinal-aps"], 0.1, 0.0, n_trials=3, base_seed=7)
        assert len(report.records) == 6
        assert {r.method for r in report.records} == {"min-cps", "ordinal-aps"}
        assert [r.trial_id for r in report.records] == [0, 0, 1, 1, 2, 2]
        assert all(r.seed == 7 + r.trial_id for r in report.records)

    def test_metrics_deterministic_across_reruns(self):
        d = synth_generate(SynthSpec(k=15, n=400, seed=23))
        a = run_trials(d, ["min-cps", "min-rcps"], 0.1, 0.003, n_trials=3, base_seed=7)
        b = run_trials(d, ["min-cps", "min-rcps"], 0.1, 0.003, n_trials=3, base_seed=7)
        for ra, rb in zip(a.records, b.records):
            assert (ra.coverage, ra.avg_set_size) == (rb.coverage, rb.avg_set_size)

    def test_aggregates_use_unbiased_std(self):
        d = synth_generate(SynthSpec(k=10, n=300, seed=29))
        report = run_trials(d, ["min-cps"], 0.1, 0.0, n_trials=4, base_seed=3)
        agg = report.aggregates()[0]
        covs = [r.coverage for r in report.records]
        assert agg.coverage_std == pytest.approx(np.std(covs, ddof=1))
        assert report.metadata["std_divisor"] == "n-1"

    def test_calibration_failure_is_labeled(self):
        scores = np.tile([1.0, 0.0], (40, 1))
        d = Dataset(scores, np.full(40, 2, dtype=np.int64))
        with pytest.raises(CalibrationError, match="trial 0"):
            run_trials(d, ["min-cps"], 0.1, 0.0, n_trials=1, base_seed=0)

    def test_aggregate_coverage_stable_under_pool_permutation(self):
        d = synth_generate(SynthSpec(k=12, n=600, seed=31))
        perm = np.random.default_rng(1).permutation(d.n)
        shuffled = Dataset(d.scores[perm], d.labels[perm])
        a = run_trials(d, ["min-cps"], 0.1, 0.0, n_trials=8, base_seed=11)
        b = run_trials(shuffled, ["min-cps"], 0.1, 0.0, n_trials=8, base_seed=11)
        ca = a.aggregates()[0].coverage_mean
        cb = b.aggregates()[0].coverage_mean
        assert abs(ca - cb) < 0.05  # same pool, different split memberships


class TestTauCurve:
    def test_monotone_series_on_monotone_data(self):
        d = synth_generate(SynthSpec(k=20, n=300, seed=37))
        rows = tau_curve(d, np.linspace(0.005, 1.0, 100))
        fs = [f for _, f in rows]
        assert all(b >= a for a, b in zip(fs, fs[1:]))
        assert fs[-1] == 1.0

    def test_jump_at_critical_score(self):
        d = Dataset(np.tile(CANON, (19, 1)), np.full(19, 2, dtype=np.int64))
        rows = tau_curve(d, [0.3, 0.5])
        assert rows[0][1] == 0.0 and rows[1][1] == 1.0

    def test_unsorted_grid_rejected(self):
        d = synth_generate(SynthSpec(k=5, n=20, seed=0))
        with pytest.raises(ValidationError):
            tau_curve(d, [0.5, 0.3])
        with pytest.raises(ValidationError):
            tau_curve(d, [0.0, 0.5])


class TestLambdaSweep:
    def test_lambda_zero_row_matches_min_cps_bitwise(self):
        d = synth_generate(SynthSpec(k=15, n=400, seed=41))
        rows = lambda_sweep(d, 0.1, [0.0, 0.005], n_trials=3, base_seed=5)
        cps = run_trials(d, ["min-cps"], 0.1, 0.0, n_trials=3, base_seed=5).aggregates()[0]
        lam0 = rows[0]
        assert lam0[0] == 0.0
        assert lam0[1] == cps.coverage_mean
        assert lam0[2] == cps.avg_set_size_mean

    def test_negative_lambda_rejected(self):
        d = synth_generate(SynthSpec(k=5, n=40, seed=0))
        with pytest.raises(ValidationError):
            lambda_sweep(d, 0.1, [-0.001], n_trials=1)

    def test_default_grid_is_the_odd_milli_grid(self):
        assert DEFAULT_LAMBDA_GRID[0] == 0.0
        assert DEFAULT_LAMBDA_GRID[1:] == pytest.approx(
            [0.001 + 0.002 * i for i in range(10)]
        )


def test_apply_predictor_matches_per_method_paths():
    d = synth_generate(SynthSpec(k=10, n=80, seed=43))
    cal, test = split_dataset(d, seed=3)
    for method in ("min-cps", "min-rcps", "ordinal-aps", "naive-cdf"):
        pred = calibrate_method(method, cal, 0.1, lam=0.003)
        lowers, uppers = apply_predictor(pred, test)
        assert lowers.shape == (test.n,) and uppers.shape == (test.n,)
        assert np.all(lowers >= 1) and np.all(uppers <= test.K) and np.all(lowers <= uppers)
