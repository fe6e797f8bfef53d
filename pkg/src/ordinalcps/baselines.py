"""Reference ordinal conformal baselines: greedy expansion and naive CDF.

The greedy-expansion baseline starts at the top-scoring label and repeatedly
adds the higher-scoring neighbor (ties -> left, the same rule as the
covering module's ring expansion, which makes the two constructions
coincide on radially monotone vectors). Its nonconformity score for a label
is the cumulative mass at which the expansion first reaches that label, and
calibration takes the usual conformal order statistic of those scores.

The naive CDF baseline cuts the prefix-sum curve at alpha/2 and 1 - alpha/2
per instance, with no calibration at all; the strict/non-strict convention
below guarantees interval mass >= 1 - alpha by construction.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .calibrate import METHOD_NAIVE_CDF, METHOD_ORDINAL_APS, CalibratedPredictor
from .core import Dataset, PredictionInterval, ProbVector
from .covering import _expand_once
from .errors import ConservativeCalibrationWarning, ValidationError


@dataclass(frozen=True)
class ApsQuantile:
    """Calibrated cumulative-mass threshold for the greedy baseline."""

    q_hat: float
    alpha: float
    n_cal: int


def _mode_index(probs: list) -> int:
    """1-based first argmax."""
    m = 1
    best = probs[0]
    for k in range(1, len(probs)):
        if probs[k] > best:
            best = probs[k]
            m = k + 1
    return m


def _aps_score_row(probs: list, y: int) -> float:
    """Cumulative mass when the greedy expansion first covers y."""
    K = len(probs)
    lo = hi = _mode_index(probs)
    cum = probs[lo - 1]
    while not (lo <= y <= hi):
        new_lo, new_hi = _expand_once(probs, lo, hi, K)
        cum = cum + (probs[new_lo - 1] if new_lo < lo else probs[new_hi - 1])
        lo, hi = new_lo, new_hi
    return cum


def _aps_predict_row(probs: list, q_hat: float) -> tuple[int, int]:
    """First expansion window whose cumulative mass reaches q_hat.

    Falls back to the full range if rounding leaves even the complete
    expansion a hair short of q_hat.
    """
    K = len(probs)
    lo = hi = _mode_index(probs)
    cum = probs[lo - 1]
    while cum < q_hat and (lo > 1 or hi < K):
        new_lo, new_hi = _expand_once(probs, lo, hi, K)
        cum = cum + (probs[new_lo - 1] if new_lo < lo else probs[new_hi - 1])
        lo, hi = new_lo, new_hi
    return lo, hi


def ordinal_aps_expand(p: ProbVector) -> list[tuple[PredictionInterval, float]]:
    """Full expansion trace: K windows from [mode, mode] out to [1, K].

    Each entry pairs the window with its running cumulative mass; the final
    entry is the full range at (float) total mass.
    """
    probs = p.probs.tolist()
    K = p.K
    lo = hi = _mode_index(probs)
    cum = probs[lo - 1]
    trace = [(PredictionInterval(lo, hi), cum)]
    while lo > 1 or hi < K:
        new_lo, new_hi = _expand_once(probs, lo, hi, K)
        cum = cum + (probs[new_lo - 1] if new_lo < lo else probs[new_hi - 1])
        lo, hi = new_lo, new_hi
        trace.append((PredictionInterval(lo, hi), cum))
    return trace


def ordinal_aps_score(p: ProbVector, y: int) -> float:
    """Cumulative mass of the first trace window containing y."""
    if not (1 <= y <= p.K):
        raise ValidationError(f"label {y} out of range 1..{p.K}")
    return _aps_score_row(p.probs.tolist(), y)


def ordinal_aps_calibrate(d: Dataset, alpha: float) -> ApsQuantile:
    """ceil((n+1)(1-alpha))-th smallest expansion score, clamped to the max."""
    if not (0.0 < alpha < 1.0):
        raise ValidationError(f"alpha must be in (0, 1), got {alpha!r}")
    rows = d.scores.tolist()
    labels = d.labels.tolist()
    scores = sorted(_aps_score_row(rows[i], labels[i]) for i in range(d.n))
    rank = math.ceil((d.n + 1) * (1.0 - alpha))
    if rank > d.n:
        warnings.warn(
            f"quantile rank {rank} exceeds calibration size {d.n}; "
            "clamping to the largest score",
            ConservativeCalibrationWarning,
        )
        rank = d.n
    return ApsQuantile(q_hat=scores[rank - 1], alpha=alpha, n_cal=d.n)


def ordinal_aps_predict(p: ProbVector, q: ApsQuantile) -> PredictionInterval:
    """First expansion window with cumulative mass >= q_hat."""
    lo, hi = _aps_predict_row(p.probs.tolist(), q.q_hat)
    return PredictionInterval(lo, hi)


def aps_as_predictor(q: ApsQuantile, K: int) -> CalibratedPredictor:
    """Wrap a quantile in the common predictor envelope (tau_hat := q_hat)."""
    return CalibratedPredictor(
        method=METHOD_ORDINAL_APS,
        tau_hat=q.q_hat,
        lam=0.0,
        alpha=q.alpha,
        n_cal=q.n_cal,
        K=K,
        diagnostics={},
    )


def naive_cdf_interval(p: ProbVector, alpha: float) -> PredictionInterval:
    """Central interval of the per-instance CDF: (alpha/2, 1 - alpha/2].

    lower is the first label with prefix mass strictly above alpha/2 and
    upper the first with prefix mass at least 1 - alpha/2, so the interval
    holds mass >= 1 - alpha. No calibration is involved.
    """
    if not (0.0 < alpha < 1.0):
        raise ValidationError(f"alpha must be in (0, 1), got {alpha!r}")
    probs = p.probs.tolist()
    K = p.K
    acc = 0.0
    lower = K
    upper = K
    lower_found = False
    for k in range(K):
        acc = acc + probs[k]
        if not lower_found and acc > 0.5 * alpha:
            lower = k + 1
            lower_found = True
        if acc >= 1.0 - 0.5 * alpha:
            upper = k + 1
            break
    return PredictionInterval(lower, upper)


def naive_cdf_predictor(alpha: float, K: int, n_cal: int) -> CalibratedPredictor:
    """Predictor envelope for the uncalibrated baseline.

    tau_hat records the guaranteed interval mass 1 - alpha; prediction uses
    alpha directly.
    """
    return CalibratedPredictor(
        method=METHOD_NAIVE_CDF,
        tau_hat=1.0 - alpha,
        lam=0.0,
        alpha=alpha,
        n_cal=n_cal,
        K=K,
        diagnostics={},
    )
