"""Split-conformal calibration of the mass threshold tau.

Both calibration paths target the count form of the coverage constraint on
the calibration set,

    #{i : interval(X_i; tau) contains Y_i} >= ceil((1 - alpha) * (n + 1)),

which is what the exchangeability argument behind the marginal coverage
guarantee consumes (the rank is clamped to n, with a warning, when n is too
small for the requested alpha).

The binary-search path works on any score matrix. It maintains the invariant
that the running upper bound always has a verified coverage count, moving it
only to midpoints whose count passed, and returns that upper bound rather
than the last midpoint -- so the count constraint holds at the returned
threshold unconditionally, monotone coverage or not. Insufficient coverage
raises the lower bound; sufficient coverage lowers the upper bound.

The exact path requires every calibration row to be radially monotone. It
computes each row's critical score, takes the ceil((1-alpha)(n+1))-th
smallest, and nudges it up by 1e-12 to realize the strict "covered iff
tau > score" containment contract as a concrete threshold.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

from . import backend
from .core import (
    DIAGNOSTIC_MONOTONICITY_TOL,
    Dataset,
    PredictionInterval,
    ProbVector,
    first_non_monotone_row,
    monotone_fraction,
)
from .covering import critical_score, min_length_interval_regularized
from .errors import (
    CalibrationError,
    ConservativeCalibrationWarning,
    NotRadiallyMonotoneError,
    ValidationError,
)

METHOD_MIN_CPS = "min-cps"
METHOD_MIN_RCPS = "min-rcps"
METHOD_ORDINAL_APS = "ordinal-aps"
METHOD_NAIVE_CDF = "naive-cdf"
METHODS = (METHOD_MIN_CPS, METHOD_MIN_RCPS, METHOD_ORDINAL_APS, METHOD_NAIVE_CDF)

# Added to the order-statistic score by the exact path; turns the strict
# containment inequality into a threshold while staying far above the
# ~1-ulp noise floor of mass comparisons.
SCORE_NUDGE = 1e-12


@dataclass(frozen=True)
class SearchOptions:
    """Bisection controls: iteration cap, stopping width, bracket."""

    max_iters: int = 60
    tolerance: float = 1e-9
    lower_init: float = 0.0
    upper_init: float = 1.0

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValidationError("max_iters must be >= 1")
        if not self.tolerance > 0.0:
            raise ValidationError("tolerance must be > 0")
        if not (0.0 <= self.lower_init < self.upper_init <= 1.0):
            raise ValidationError("need 0 <= lower_init < upper_init <= 1")


@dataclass(frozen=True)
class CalibratedPredictor:
    """A calibrated method: identifier, threshold, and diagnostics."""

    method: str
    tau_hat: float
    lam: float
    alpha: float
    n_cal: int
    K: int
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValidationError(f"unknown method {self.method!r}")
        if not (0.0 <= self.tau_hat <= 1.0):
            raise ValidationError(f"tau_hat {self.tau_hat!r} outside [0, 1]")
        if not (0.0 < self.alpha < 1.0):
            raise ValidationError(f"alpha {self.alpha!r} outside (0, 1)")
        if self.lam < 0.0:
            raise ValidationError("lambda must be >= 0")
        if self.n_cal < 1 or self.K < 1:
            raise ValidationError("n_cal and K must be >= 1")


def _check_alpha(alpha: float) -> None:
    if not (0.0 < alpha < 1.0):
        raise ValidationError(f"alpha must be in (0, 1), got {alpha!r}")


def _check_lam(lam: float) -> None:
    if lam < 0.0:
        raise ValidationError(f"lambda must be >= 0, got {lam!r}")


def target_count(alpha: float, n: int) -> tuple[int, int]:
    """(raw, clamped) coverage-count target ceil((1-alpha)(n+1))."""
    raw = math.ceil((1.0 - alpha) * (n + 1))
    return raw, min(raw, n)


def coverage_count(d: Dataset, tau: float, lam: float = 0.0) -> int:
    """Calibration-set coverage count at threshold tau."""
    if not (0.0 < tau <= 1.0):
        raise ValidationError(f"tau must be in (0, 1], got {tau!r}")
    _check_lam(lam)
    return backend.coverage_count(d.scores, d.labels, tau, lam)


def empirical_coverage(d: Dataset, tau: float, lam: float = 0.0) -> float:
    """Fraction of rows whose covering interval contains the row label.

    A plain average of per-row indicators, so it is invariant to any
    permutation of the rows.
    """
    return coverage_count(d, tau, lam) / d.n


def calibrate_binary_search(
    d: Dataset,
    alpha: float,
    lam: float = 0.0,
    opts: SearchOptions | None = None,
    method: str | None = None,
) -> CalibratedPredictor:
    """Bisect for the smallest certified threshold; general-purpose path.

    Raises CalibrationError if even the initial upper bound cannot certify
    the (clamped) target count -- e.g. labels sitting on zero-mass tails.
    When n is too small for alpha the search is skipped and the upper bound
    itself is returned, with a warning.
    """
    _check_alpha(alpha)
    _check_lam(lam)
    if opts is None:
        opts = SearchOptions()
    n = d.n
    raw_target, target = target_count(alpha, n)
    if raw_target > n:
        warnings.warn(
            f"coverage target {raw_target} exceeds calibration size {n}; "
            f"returning the trivial threshold {opts.upper_init}",
            ConservativeCalibrationWarning,
        )
    lo = opts.lower_init
    hi = opts.upper_init
    count_hi = backend.coverage_count(d.scores, d.labels, hi, lam)
    if count_hi < target:
        raise CalibrationError(
            f"degenerate calibration set: coverage {count_hi}/{n} at "
            f"tau={hi} is below the target count {target}"
        )
    iters = 0
    if raw_target <= n:
        while (hi - lo) >= opts.tolerance and iters < opts.max_iters:
            mid = 0.5 * (lo + hi)
            cnt = backend.coverage_count(d.scores, d.labels, mid, lam)
            if cnt >= target:
                hi = mid
                count_hi = cnt
            else:
                lo = mid
            iters += 1
    if method is None:
        method = METHOD_MIN_CPS if lam == 0.0 else METHOD_MIN_RCPS
    return CalibratedPredictor(
        method=method,
        tau_hat=hi,
        lam=lam,
        alpha=alpha,
        n_cal=n,
        K=d.K,
        diagnostics={
            "monotone_fraction": monotone_fraction(d, DIAGNOSTIC_MONOTONICITY_TOL),
            "coverage_count": count_hi,
            "target_count": target,
            "search_iters": iters,
        },
    )


def calibrate_exact(
    d: Dataset,
    alpha: float,
    lam: float = 0.0,
    monotonicity_tol: float = 0.0,
    method: str | None = None,
) -> CalibratedPredictor:
    """Order-statistic calibration; requires radially monotone rows.

    The returned threshold is the target-ranked critical score plus 1e-12
    (clamped to 1.0), and the achieved count is re-verified through the
    actual covering before returning.
    """
    _check_alpha(alpha)
    _check_lam(lam)
    bad = first_non_monotone_row(d, monotonicity_tol)
    if bad is not None:
        raise NotRadiallyMonotoneError(bad + 1)
    n = d.n
    scores = sorted(
        critical_score(d.row(i), int(d.labels[i]), lam) for i in range(n)
    )
    raw_target, target = target_count(alpha, n)
    if raw_target > n:
        warnings.warn(
            f"coverage target {raw_target} exceeds calibration size {n}; "
            "clamping to the largest critical score",
            ConservativeCalibrationWarning,
        )
    tau_hat = min(scores[target - 1] + SCORE_NUDGE, 1.0)
    achieved = backend.coverage_count(d.scores, d.labels, tau_hat, lam)
    if achieved < target:
        raise CalibrationError(
            f"exact calibration failed its post-check: coverage {achieved}/{n} "
            f"at tau={tau_hat!r} is below the target count {target}"
        )
    if method is None:
        method = METHOD_MIN_CPS if lam == 0.0 else METHOD_MIN_RCPS
    return CalibratedPredictor(
        method=method,
        tau_hat=tau_hat,
        lam=lam,
        alpha=alpha,
        n_cal=n,
        K=d.K,
        diagnostics={
            "monotone_fraction": monotone_fraction(d, DIAGNOSTIC_MONOTONICITY_TOL),
            "coverage_count": achieved,
            "target_count": target,
            "search_iters": 0,
        },
    )


def predict(pred: CalibratedPredictor, p: ProbVector) -> PredictionInterval:
    """Apply a mass-threshold predictor to one score vector."""
    if pred.method not in (METHOD_MIN_CPS, METHOD_MIN_RCPS):
        raise ValidationError(
            f"predict() needs a mass-threshold predictor, got {pred.method!r}"
        )
    if p.K != pred.K:
        raise ValidationError(f"K mismatch: predictor has {pred.K}, vector has {p.K}")
    return min_length_interval_regularized(p, pred.tau_hat, pred.lam).interval


def predict_batch(pred: CalibratedPredictor, d: Dataset):
    """Intervals for every dataset row as (lowers, uppers) int64 arrays."""
    if pred.method not in (METHOD_MIN_CPS, METHOD_MIN_RCPS):
        raise ValidationError(
            f"predict_batch() needs a mass-threshold predictor, got {pred.method!r}"
        )
    if d.K != pred.K:
        raise ValidationError(f"K mismatch: predictor has {pred.K}, dataset has {d.K}")
    lowers, uppers, _ = backend.batch_min_intervals(d.scores, pred.tau_hat, pred.lam)
    return lowers, uppers
