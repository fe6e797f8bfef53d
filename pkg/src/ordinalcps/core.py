"""Domain types and elementary score-vector operations.

Everything downstream (covering, calibration, baselines) is built on four
value types -- probability vectors over ordered labels, their prefix sums,
contiguous label intervals, and score/label datasets -- plus the
radial-monotonicity check that decides when the order-statistic calibration
shortcut is sound.

Labels are 1-based everywhere on the public surface: a probability vector of
length K scores labels 1..K, and intervals are inclusive [lower, upper].
All types are immutable after construction (backing arrays are made
read-only), so values can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np

from .errors import ValidationError

# Probability vectors must sum to 1 within this tolerance; out-of-tolerance
# inputs are rejected, never renormalized (renormalizing would silently move
# every calibrated threshold).
MASS_TOLERANCE = 1e-6

# Tolerance used when reporting the fraction of monotone rows in
# diagnostics; absorbs float noise without accepting genuinely tied modes.
DIAGNOSTIC_MONOTONICITY_TOL = 1e-9


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def _as_prob_array(values) -> np.ndarray:
    arr = np.ascontiguousarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValidationError(f"probability vector must be 1-D, got shape {arr.shape}")
    if arr.size < 1:
        raise ValidationError("probability vector must have K >= 1 entries")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("probability vector contains non-finite entries")
    if np.any(arr < 0.0):
        raise ValidationError("probability vector contains negative entries")
    total = float(np.sum(arr))
    if abs(total - 1.0) > MASS_TOLERANCE:
        raise ValidationError(
            f"probability mass {total!r} outside tolerance {MASS_TOLERANCE}"
        )
    return arr


@dataclass(frozen=True)
class ProbVector:
    """One model output: K nonnegative scores over labels 1..K summing to 1."""

    probs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "probs", _freeze(_as_prob_array(self.probs)))

    @property
    def K(self) -> int:
        return self.probs.shape[0]


@dataclass(frozen=True)
class PrefixSums:
    """Left-to-right partial sums P with P[0] = 0 and P[K] ~ 1.

    The mass of any interval [l, u] is P[u] - P[l-1]; every covering and
    calibration routine in this package computes interval mass through this
    same expression so that feasibility comparisons agree bit-for-bit.
    """

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _freeze(np.asarray(self.values, dtype=np.float64)))

    @property
    def K(self) -> int:
        return self.values.shape[0] - 1


@dataclass(frozen=True)
class PredictionInterval:
    """Contiguous label range [lower, upper], 1-based inclusive."""

    lower: int
    upper: int

    def __post_init__(self):
        if not (1 <= self.lower <= self.upper):
            raise ValidationError(
                f"invalid interval [{self.lower}, {self.upper}]: need 1 <= lower <= upper"
            )

    @property
    def length(self) -> int:
        """Length u - l (0 for a singleton)."""
        return self.upper - self.lower

    @property
    def size(self) -> int:
        """Number of labels covered, u - l + 1."""
        return self.upper - self.lower + 1

    def contains(self, label: int) -> bool:
        return self.lower <= label <= self.upper


@dataclass(frozen=True)
class Dataset:
    """n probability-vector rows paired with ground-truth ordinal labels."""

    scores: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        scores = np.ascontiguousarray(self.scores, dtype=np.float64)
        labels = np.ascontiguousarray(self.labels, dtype=np.int64)
        if scores.ndim != 2:
            raise ValidationError(f"scores must be a 2-D matrix, got shape {scores.shape}")
        if labels.ndim != 1 or labels.shape[0] != scores.shape[0]:
            raise ValidationError(
                f"labels shape {labels.shape} does not match {scores.shape[0]} score rows"
            )
        n, K = scores.shape
        if n < 1 or K < 1:
            raise ValidationError("dataset must have at least one row and one class")
        if not np.all(np.isfinite(scores)):
            raise ValidationError("scores contain non-finite entries")
        if np.any(scores < 0.0):
            raise ValidationError("scores contain negative entries")
        sums = scores.sum(axis=1)
        bad = np.nonzero(np.abs(sums - 1.0) > MASS_TOLERANCE)[0]
        if bad.size:
            i = int(bad[0])
            raise ValidationError(
                f"row {i + 1}: mass {sums[i]!r} outside tolerance {MASS_TOLERANCE}"
            )
        out_of_range = np.nonzero((labels < 1) | (labels > K))[0]
        if out_of_range.size:
            i = int(out_of_range[0])
            raise ValidationError(f"row {i + 1}: label {labels[i]} out of range 1..{K}")
        object.__setattr__(self, "scores", _freeze(scores))
        object.__setattr__(self, "labels", _freeze(labels))

    @property
    def n(self) -> int:
        return self.scores.shape[0]

    @property
    def K(self) -> int:
        return self.scores.shape[1]

    def row(self, i: int) -> ProbVector:
        return ProbVector(self.scores[i])

    def subset(self, indices: np.ndarray) -> "Dataset":
        return Dataset(self.scores[indices], self.labels[indices])


def argmax_mode(p: ProbVector) -> int:
    """Label of the largest score; ties break to the smallest label.

    The smallest-index rule makes the anchor deterministic on tied softmax
    outputs, which real models do produce.
    """
    return int(np.argmax(p.probs)) + 1


def prefix_sums(p: ProbVector) -> PrefixSums:
    """Prefix-sum array of p, accumulated strictly left to right.

    The accumulation order is pinned so repeated runs (and both scan
    backends) produce bit-identical values.
    """
    out = np.empty(p.K + 1, dtype=np.float64)
    out[0] = 0.0
    acc = 0.0
    probs = p.probs
    for k in range(p.K):
        acc = acc + probs[k]
        out[k + 1] = acc
    return PrefixSums(out)


def interval_mass(ps: PrefixSums, lower: int, upper: int) -> float:
    """Mass of [lower, upper] as the prefix difference P[u] - P[l-1], O(1)."""
    if not (1 <= lower <= upper <= ps.K):
        raise ValidationError(
            f"interval [{lower}, {upper}] out of range for K={ps.K}"
        )
    values = ps.values
    return float(values[upper] - values[lower - 1])


def check_radial_monotonicity(p: ProbVector, tol: float = 0.0) -> bool:
    """True iff p has a unique mode and decays with distance from it.

    Two conditions, both within ``tol``:

    1. no label other than the mode scores within ``tol`` of the maximum;
    2. for any two labels, the one closer to the mode scores at least as
       high (minus ``tol``) as the one farther away.  Labels equidistant
       from the mode must therefore score equal within ``tol``.

    Runs in O(K): condition 2 reduces to comparing, per distance ring, the
    ring minimum against the suffix maximum over all rings at least as far.
    """
    if tol < 0.0:
        raise ValidationError("tol must be >= 0")
    vals = p.probs.tolist()
    K = len(vals)
    if K == 1:
        return True
    m = 0
    best = vals[0]
    for k in range(1, K):
        if vals[k] > best:
            best = vals[k]
            m = k
    for k in range(K):
        if k != m and vals[k] >= best - tol:
            return False
    max_dist = max(m, K - 1 - m)
    lo_at = [0.0] * (max_dist + 1)
    hi_at = [0.0] * (max_dist + 1)
    for d in range(max_dist + 1):
        ring = []
        if m - d >= 0:
            ring.append(vals[m - d])
        if d > 0 and m + d < K:
            ring.append(vals[m + d])
        lo_at[d] = min(ring)
        hi_at[d] = max(ring)
    suffix_hi = hi_at[-1]
    for d in range(max_dist, -1, -1):
        suffix_hi = max(suffix_hi, hi_at[d])
        if lo_at[d] < suffix_hi - tol:
            return False
    return True


def radially_monotone_rows(scores: np.ndarray, tol: float = 0.0) -> np.ndarray:
    """Vectorized per-row radial-monotonicity check on an (n, K) matrix.

    Same semantics as :func:`check_radial_monotonicity`, row by row; used on
    whole datasets where the per-row loop would dominate calibration time.
    """
    if tol < 0.0:
        raise ValidationError("tol must be >= 0")
    n, K = scores.shape
    modes = np.argmax(scores, axis=1)
    mx = scores[np.arange(n), modes]
    unique_ok = (scores >= (mx - tol)[:, None]).sum(axis=1) == 1
    dists = np.arange(K)
    li = modes[:, None] - dists[None, :]
    ri = modes[:, None] + dists[None, :]
    lvalid = li >= 0
    rvalid = ri < K
    lv = np.where(lvalid, np.take_along_axis(scores, np.clip(li, 0, K - 1), axis=1), np.nan)
    rv = np.where(rvalid, np.take_along_axis(scores, np.clip(ri, 0, K - 1), axis=1), np.nan)
    lo_at = np.fmin(lv, rv)
    valid = lvalid | rvalid
    hi_at = np.where(valid, np.fmax(lv, rv), -np.inf)
    suffix_hi = np.maximum.accumulate(hi_at[:, ::-1], axis=1)[:, ::-1]
    ring_ok = np.where(valid, lo_at >= suffix_hi - tol, True).all(axis=1)
    return unique_ok & ring_ok


def monotone_fraction(d: Dataset, tol: float = DIAGNOSTIC_MONOTONICITY_TOL) -> float:
    """Fraction of dataset rows passing the radial-monotonicity check."""
    return float(np.mean(radially_monotone_rows(d.scores, tol)))


def first_non_monotone_row(d: Dataset, tol: float = 0.0) -> int | None:
    """Index (0-based) of the first non-monotone row, or None."""
    for i in range(d.n):
        if not check_radial_monotonicity(d.row(i), tol):
            return i
    return None
