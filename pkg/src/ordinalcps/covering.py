"""Instance-level minimum-length covering over ordered labels.

Given one score vector, find the shortest contiguous label interval that
contains the top-scoring label (the anchor) and holds at least a threshold
tau of probability mass, optionally discounted by a per-length penalty
lam * (u - l). The O(K) two-pointer scan lives in the kernel backends; this
module wraps it in the domain types and adds:

* a brute-force O(K^2) enumeration used as the correctness oracle,
* the greedy ring expansion that realizes the maximal-mass interval of each
  length on radially monotone vectors,
* the per-instance critical score: the threshold at which a given label
  first enters the (nested) interval family, which is what order-statistic
  calibration consumes.

Selection among equal-minimum-length feasible windows is the one with the
largest adjusted mass, ties (within the kernels' TIE_TOL) going to the
smaller upper end. On radially monotone vectors this makes the returned
intervals nested in tau and exactly the greedy-expansion family; a pure
first-found rule would not be nested (e.g. for scores [.1,.2,.4,.2,.1] it
would return [1,3] at tau=0.65 but [2,4] at tau=0.75). Scan and oracle share
the rule, so they are comparable endpoint-for-endpoint.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import backend
from .core import PredictionInterval, ProbVector, argmax_mode
from .errors import ValidationError

TIE_TOL = backend.TIE_TOL


@dataclass(frozen=True)
class CoveringResult:
    """Outcome of one covering search.

    ``feasible`` is False only when no anchored window satisfies the
    (penalized) mass constraint, which can happen for lam > 0; the interval
    is then the conservative fallback [1, K], which always contains the
    true label and so can only make calibration conservative, never
    invalid. ``adjusted_mass`` is mass - lam * length of the returned
    interval either way.
    """

    interval: PredictionInterval
    feasible: bool
    adjusted_mass: float


def _check_tau_lam(tau: float, lam: float) -> None:
    if not (0.0 < tau <= 1.0):
        raise ValidationError(f"tau must be in (0, 1], got {tau!r}")
    if lam < 0.0:
        raise ValidationError(f"lambda must be >= 0, got {lam!r}")


def min_length_interval(p: ProbVector, tau: float) -> CoveringResult:
    """Shortest anchored interval with mass >= tau, in O(K)."""
    return min_length_interval_regularized(p, tau, 0.0)


def min_length_interval_regularized(p: ProbVector, tau: float, lam: float) -> CoveringResult:
    """Shortest anchored interval with mass - lam * length >= tau.

    With lam = 0 this is bit-identical to :func:`min_length_interval` (the
    penalty branch of the scan is unreachable). For lam > 0 the scan is
    exact on radially monotone vectors and on any vector with
    min_k p_k >= lam; elsewhere it can settle on a longer window than the
    brute-force optimum (the oracle quantifies the gap), and can report
    infeasible when a window technically exists.
    """
    _check_tau_lam(tau, lam)
    l, u, feasible, adj = backend.scan_min_interval(p.probs, tau, lam)
    return CoveringResult(PredictionInterval(l, u), feasible, adj)


def brute_force_min_interval(p: ProbVector, tau: float, lam: float = 0.0) -> CoveringResult:
    """O(K^2) enumeration oracle for the covering search.

    Examines every anchored window in ascending (length, upper-end) order
    and applies the same adjusted-mass predicate and tie rule as the scan,
    so for lam = 0 (and on radially monotone vectors for any lam) the two
    must agree on both endpoints.
    """
    _check_tau_lam(tau, lam)
    probs = p.probs.tolist()
    K = len(probs)
    mode = argmax_mode(p)
    prefix = [0.0] * (K + 1)
    acc = 0.0
    for k in range(K):
        acc = acc + probs[k]
        prefix[k + 1] = acc
    for length in range(K):
        best = None
        best_adj = 0.0
        for l in range(max(1, mode - length), min(mode, K - length) + 1):
            u = l + length
            adj = (prefix[u] - prefix[l - 1]) - lam * (u - l)
            if adj >= tau and (best is None or adj > best_adj + TIE_TOL):
                best = (l, u)
                best_adj = adj
        if best is not None:
            return CoveringResult(PredictionInterval(*best), True, best_adj)
    fallback_adj = (prefix[K] - prefix[0]) - lam * (K - 1)
    return CoveringResult(PredictionInterval(1, K), False, fallback_adj)


def _expand_once(probs: list, lo: int, hi: int, K: int) -> tuple[int, int]:
    """Grow [lo, hi] by the higher-scoring neighbor; ties go left."""
    if lo > 1 and (hi == K or probs[lo - 2] >= probs[hi]):
        return lo - 1, hi
    return lo, hi + 1


def greedy_max_mass_interval(p: ProbVector, L: int) -> PredictionInterval:
    """Interval of length exactly L grown ring-by-ring from the mode.

    Each of the L expansion steps adds whichever neighbor of the current
    interval scores higher (ties -> left). On radially monotone vectors the
    result carries the maximal mass among all anchored intervals of length
    L; on other vectors it is merely a deterministic expansion.
    """
    if not (0 <= L <= p.K - 1):
        raise ValidationError(f"L must be in [0, {p.K - 1}], got {L}")
    probs = p.probs.tolist()
    lo = hi = argmax_mode(p)
    for _ in range(L):
        lo, hi = _expand_once(probs, lo, hi, p.K)
    return PredictionInterval(lo, hi)


def critical_score(p: ProbVector, y: int, lam: float = 0.0) -> float:
    """Threshold at which label y enters the covering's interval family.

    For a radially monotone p, the regularized covering's interval contains
    y exactly when tau > critical_score(p, y, lam) (strict): below the
    score, some shorter window excluding y is still feasible; above the
    maximal feasible threshold of every length, the infeasible fallback
    [1, K] covers y anyway.

    The score is the running maximum of the adjusted mass over the greedy
    intervals shorter than y's entry length (0 when y is the mode). The
    running maximum matters only for lam > 0, where adjusted mass need not
    grow with length; at lam = 0 it equals the adjusted mass of the last
    interval before entry. Masses use the same prefix-difference expression
    as the scan so the two sides compare bit-for-bit.
    """
    if not (1 <= y <= p.K):
        raise ValidationError(f"label {y} out of range 1..{p.K}")
    if lam < 0.0:
        raise ValidationError(f"lambda must be >= 0, got {lam!r}")
    probs = p.probs.tolist()
    K = p.K
    prefix = [0.0] * (K + 1)
    acc = 0.0
    for k in range(K):
        acc = acc + probs[k]
        prefix[k + 1] = acc
    lo = hi = argmax_mode(p)
    if lo <= y <= hi:
        return 0.0
    score = (prefix[hi] - prefix[lo - 1]) - lam * (hi - lo)
    while True:
        lo, hi = _expand_once(probs, lo, hi, K)
        if lo <= y <= hi:
            return score
        adj = (prefix[hi] - prefix[lo - 1]) - lam * (hi - lo)
        if adj > score:
            score = adj
