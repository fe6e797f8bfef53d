"""Experiment engine: synthetic data, splits, metrics, multi-trial runs.

The synthetic generator draws, per row, an integer center uniformly over
the labels and a spread sigma, scores labels with a discretized Gaussian
exp(-(k - center)^2 / (2 sigma^2)) (normalized), and samples the label from
those scores. Integer centers make every row exactly mirror-symmetric
around its mode, hence radially monotone by construction, which is the
assumption the nestedness and order-statistic machinery needs. A
miscalibration temperature != 1 then distorts the *emitted* scores
(power 1/temp, renormalized) after labels are drawn: rows stay exchangeable
and radially monotone, but the scores no longer match the label
frequencies, which is exactly the situation conformal calibration is
supposed to survive.

Trials are split-and-evaluate: each trial permutes the pool with its own
seed, calibrates every requested method on the first half, and reports
coverage and the average number of labels per interval on the second half.
All methods within a trial share the identical split. Standard deviations
use the unbiased n-1 divisor (recorded in the report metadata).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .baselines import (
    _aps_predict_row,
    aps_as_predictor,
    naive_cdf_interval,
    naive_cdf_predictor,
    ordinal_aps_calibrate,
)
from .calibrate import (
    METHOD_MIN_CPS,
    METHOD_MIN_RCPS,
    METHOD_NAIVE_CDF,
    METHOD_ORDINAL_APS,
    METHODS,
    CalibratedPredictor,
    SearchOptions,
    calibrate_binary_search,
    empirical_coverage,
    predict_batch,
)
from .core import Dataset
from .errors import CalibrationError, ValidationError


@dataclass(frozen=True)
class SynthSpec:
    """Parameters of the discretized-Gaussian generator."""

    k: int
    n: int
    sigma_range: tuple[float, float] = (1.0, 5.0)
    miscal_temp: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.k < 2:
            raise ValidationError("generator needs K >= 2")
        if self.n < 1:
            raise ValidationError("n must be >= 1")
        lo, hi = self.sigma_range
        if not (0.0 < lo <= hi):
            raise ValidationError("need 0 < sigma_min <= sigma_max")
        if not self.miscal_temp > 0.0:
            raise ValidationError("miscal_temp must be > 0")


def synth_generate(spec: SynthSpec) -> Dataset:
    """Deterministic synthetic dataset for the given spec."""
    rng = np.random.default_rng(spec.seed)
    K = spec.k
    centers = rng.integers(1, K + 1, size=spec.n).astype(np.float64)
    sigmas = rng.uniform(spec.sigma_range[0], spec.sigma_range[1], size=spec.n)
    ks = np.arange(1, K + 1, dtype=np.float64)
    z = (ks[None, :] - centers[:, None]) / sigmas[:, None]
    base = np.exp(-0.5 * z * z)
    base /= base.sum(axis=1, keepdims=True)
    u = rng.random(spec.n)
    cdf = np.cumsum(base, axis=1)
    labels = np.minimum(1 + (cdf < u[:, None]).sum(axis=1), K)
    emitted = base ** (1.0 / spec.miscal_temp)
    emitted /= emitted.sum(axis=1, keepdims=True)
    return Dataset(emitted, labels)


def split_dataset(d: Dataset, seed: int, cal_fraction: float = 0.5) -> tuple[Dataset, Dataset]:
    """Seeded permutation, then a floor(n * cal_fraction) / rest split."""
    if not (0.0 < cal_fraction < 1.0):
        raise ValidationError("cal_fraction must be in (0, 1)")
    n_cal = math.floor(d.n * cal_fraction)
    if n_cal < 1 or d.n - n_cal < 1:
        raise ValidationError(f"split of n={d.n} at {cal_fraction} leaves an empty half")
    perm = np.random.default_rng(seed).permutation(d.n)
    return d.subset(perm[:n_cal]), d.subset(perm[n_cal:])


def _to_bounds(intervals) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(intervals, tuple) and len(intervals) == 2:
        lowers = np.asarray(intervals[0], dtype=np.int64)
        uppers = np.asarray(intervals[1], dtype=np.int64)
    else:
        lowers = np.array([iv.lower for iv in intervals], dtype=np.int64)
        uppers = np.array([iv.upper for iv in intervals], dtype=np.int64)
    if lowers.shape != uppers.shape or lowers.ndim != 1:
        raise ValidationError("interval bounds must be two equal-length vectors")
    if lowers.size < 1:
        raise ValidationError("no intervals given")
    if np.any(lowers > uppers):
        raise ValidationError("found an interval with lower > upper")
    return lowers, uppers


def coverage_metric(intervals, labels) -> float:
    """Fraction of labels inside their interval."""
    lowers, uppers = _to_bounds(intervals)
    y = np.asarray(labels, dtype=np.int64)
    if y.shape != lowers.shape:
        raise ValidationError("labels and intervals differ in length")
    return float(np.mean((lowers <= y) & (y <= uppers)))


def avg_set_size(intervals) -> float:
    """Mean number of labels per interval (u - l + 1)."""
    lowers, uppers = _to_bounds(intervals)
    return float(np.mean(uppers - lowers + 1))


def calibrate_method(
    method: str,
    cal: Dataset,
    alpha: float,
    lam: float = 0.0,
    opts: SearchOptions | None = None,
) -> CalibratedPredictor:
    """Calibrate one named method. lam applies to min-rcps only."""
    if method == METHOD_MIN_CPS:
        return calibrate_binary_search(cal, alpha, 0.0, opts=opts, method=method)
    if method == METHOD_MIN_RCPS:
        return calibrate_binary_search(cal, alpha, lam, opts=opts, method=method)
    if method == METHOD_ORDINAL_APS:
        return aps_as_predictor(ordinal_aps_calibrate(cal, alpha), cal.K)
    if method == METHOD_NAIVE_CDF:
        return naive_cdf_predictor(alpha, cal.K, cal.n)
    raise ValidationError(f"unknown method {method!r} (expected one of {METHODS})")


def apply_predictor(pred: CalibratedPredictor, d: Dataset) -> tuple[np.ndarray, np.ndarray]:
    """Per-row intervals for any method, as (lowers, uppers) arrays."""
    if d.K != pred.K:
        raise ValidationError(f"K mismatch: predictor has {pred.K}, dataset has {d.K}")
    if pred.method in (METHOD_MIN_CPS, METHOD_MIN_RCPS):
        return predict_batch(pred, d)
    if pred.method == METHOD_ORDINAL_APS:
        rows = d.scores.tolist()
        bounds = [_aps_predict_row(row, pred.tau_hat) for row in rows]
    elif pred.method == METHOD_NAIVE_CDF:
        bounds = [
            (iv.lower, iv.upper)
            for iv in (naive_cdf_interval(d.row(i), pred.alpha) for i in range(d.n))
        ]
    else:
        raise ValidationError(f"unknown method {pred.method!r}")
    lowers = np.array([b[0] for b in bounds], dtype=np.int64)
    uppers = np.array([b[1] for b in bounds], dtype=np.int64)
    return lowers, uppers


@dataclass(frozen=True)
class TrialRecord:
    trial_id: int
    seed: int
    method: str
    alpha: float
    lam: float
    coverage: float
    avg_set_size: float
    runtime_ms: float


@dataclass(frozen=True)
class MethodAggregate:
    method: str
    alpha: float
    lam: float
    n_trials: int
    coverage_mean: float
    coverage_std: float
    avg_set_size_mean: float
    avg_set_size_std: float
    runtime_ms_mean: float


@dataclass(frozen=True)
class TrialReport:
    """Per-trial records plus mean/std aggregates per (method, alpha, lam)."""

    records: tuple[TrialRecord, ...]
    metadata: dict = field(default_factory=lambda: {"std_divisor": "n-1"})

    def aggregates(self) -> list[MethodAggregate]:
        groups: dict[tuple, list[TrialRecord]] = {}
        for rec in self.records:
            groups.setdefault((rec.method, rec.alpha, rec.lam), []).append(rec)
        out = []
        for (method, alpha, lam), recs in sorted(groups.items()):
            cov = np.array([r.coverage for r in recs])
            size = np.array([r.avg_set_size for r in recs])
            rt = np.array([r.runtime_ms for r in recs])
            std = (lambda a: float(np.std(a, ddof=1)) if len(recs) >= 2 else 0.0)
            out.append(
                MethodAggregate(
                    method=method,
                    alpha=alpha,
                    lam=lam,
                    n_trials=len(recs),
                    coverage_mean=float(np.mean(cov)),
                    coverage_std=std(cov),
                    avg_set_size_mean=float(np.mean(size)),
                    avg_set_size_std=std(size),
                    runtime_ms_mean=float(np.mean(rt)),
                )
            )
        return out


def run_trials(
    d: Dataset,
    methods,
    alpha: float,
    lam: float = 0.0,
    n_trials: int = 10,
    base_seed: int = 42,
    cal_fraction: float = 0.5,
) -> TrialReport:
    """Split/calibrate/evaluate n_trials times; methods share each split.

    A calibration failure aborts the run with an error naming the trial and
    method rather than skipping silently.
    """
    if n_trials < 1:
        raise ValidationError("n_trials must be >= 1")
    for m in methods:
        if m not in METHODS:
            raise ValidationError(f"unknown method {m!r} (expected one of {METHODS})")
    records = []
    for t in range(n_trials):
        seed = base_seed + t
        cal, test = split_dataset(d, seed, cal_fraction)
        for method in methods:
            lam_used = lam if method == METHOD_MIN_RCPS else 0.0
            t0 = time.perf_counter()
            try:
                pred = calibrate_method(method, cal, alpha, lam_used)
            except CalibrationError as exc:
                raise CalibrationError(
                    f"trial {t} ({method}): calibration failed: {exc}"
                ) from exc
            bounds = apply_predictor(pred, test)
            runtime_ms = (time.perf_counter() - t0) * 1e3
            records.append(
                TrialRecord(
                    trial_id=t,
                    seed=seed,
                    method=method,
                    alpha=alpha,
                    lam=lam_used,
                    coverage=coverage_metric(bounds, test.labels),
                    avg_set_size=avg_set_size(bounds),
                    runtime_ms=runtime_ms,
                )
            )
    return TrialReport(records=tuple(records))


def tau_curve(d: Dataset, taus, lam: float = 0.0) -> list[tuple[float, float]]:
    """Empirical coverage F(tau) along an ascending grid in (0, 1]."""
    taus = [float(t) for t in taus]
    if not taus:
        raise ValidationError("empty tau grid")
    if any(not (0.0 < t <= 1.0) for t in taus):
        raise ValidationError("tau grid must lie in (0, 1]")
    if any(b <= a for a, b in zip(taus, taus[1:])):
        raise ValidationError("tau grid must be strictly ascending")
    return [(t, empirical_coverage(d, t, lam)) for t in taus]


def lambda_sweep(
    d: Dataset,
    alpha: float,
    lambdas,
    n_trials: int = 10,
    base_seed: int = 42,
) -> list[tuple[float, float, float]]:
    """min-rcps trials per lambda: rows of (lambda, mean coverage, mean size)."""
    rows = []
    for lam in lambdas:
        lam = float(lam)
        if lam < 0.0:
            raise ValidationError("lambda values must be >= 0")
        report = run_trials(d, [METHOD_MIN_RCPS], alpha, lam, n_trials, base_seed)
        agg = report.aggregates()[0]
        rows.append((lam, agg.coverage_mean, agg.avg_set_size_mean))
    return rows


# The lambda grid used by the sweep CLI by default.
DEFAULT_LAMBDA_GRID = (0.0, 0.001, 0.003, 0.005, 0.007, 0.009,
                       0.011, 0.013, 0.015, 0.017, 0.019)
