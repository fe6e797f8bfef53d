"""Pure-Python covering-scan kernels.

Reference implementation of the anchored minimum-length covering scan; the
compiled module ``ordinalcps._scan`` mirrors it operation-for-operation so
both backends return bit-identical results. Keep the two in sync: any change
to the float expressions here must be replicated in ``_scan.pyx``.

Scan semantics
--------------
Given scores p over labels 1..K, a threshold tau and a length penalty lam,
find the shortest interval [l, u] with l <= mode <= u whose adjusted mass

    (P[u] - P[l-1]) - lam * (u - l)

is at least tau. The upper end u sweeps from the mode to K; the lower end l
only ever advances. l advances past a feasible window after recording it
(shrinking the window), and, when lam > 0, also past a window whose left
label scores below lam: dropping such a label yields a strictly shorter
window with no smaller adjusted mass, so the skipped window is dominated.
Each pointer moves at most K times, so the scan is O(K).

Among feasible windows of the minimal length the scan keeps the one with
the largest adjusted mass, treating differences within TIE_TOL as ties and
keeping the earlier (smaller-u) window. TIE_TOL absorbs the ~1-ulp noise
prefix-sum differences exhibit on exactly mirrored windows; without it the
selected interval would flip between mirror-image windows depending on
rounding, and the nested-family structure of the returned intervals would
not survive in float arithmetic.

If no window passes (possible only for lam > 0), the full range [1, K] is
returned with a False flag; the caller treats it as a conservative
fallback.
"""

from __future__ import annotations

import numpy as np

# Adjusted-mass differences at or below this are ties (resolved toward the
# smaller upper end). Large enough to absorb prefix-difference rounding,
# orders of magnitude below any genuine mass difference of interest.
TIE_TOL = 1e-12


def _scan_row(p: list, tau: float, lam: float):
    """Core scan on one row (a list of Python floats).

    Returns (l, u, feasible, adjusted_mass, advances) with 1-based bounds.
    """
    K = len(p)
    prefix = [0.0] * (K + 1)
    acc = 0.0
    for k in range(K):
        acc = acc + p[k]
        prefix[k + 1] = acc
    mode = 1
    best_val = p[0]
    for k in range(1, K):
        if p[k] > best_val:
            best_val = p[k]
            mode = k + 1
    best_l = -1
    best_u = -1
    best_len = K + 1
    best_adj = 0.0
    l = 1
    advances = 0
    for u in range(mode, K + 1):
        if u > mode:
            advances += 1
        while l <= mode:
            adj = (prefix[u] - prefix[l - 1]) - lam * (u - l)
            if adj >= tau:
                length = u - l
                if length < best_len or (length == best_len and adj > best_adj + TIE_TOL):
                    best_l = l
                    best_u = u
                    best_len = length
                    best_adj = adj
            elif not (lam > 0.0 and p[l - 1] < lam):
                break
            l += 1
            advances += 1
    if best_l < 0:
        fallback_adj = (prefix[K] - prefix[0]) - lam * (K - 1)
        return 1, K, False, fallback_adj, advances
    return best_l, best_u, True, best_adj, advances


def scan_min_interval(probs: np.ndarray, tau: float, lam: float):
    """Scan one score vector; returns (l, u, feasible, adjusted_mass)."""
    l, u, feasible, adj, _ = _scan_row(probs.tolist(), tau, lam)
    return l, u, feasible, adj


def scan_min_interval_instrumented(probs: np.ndarray, tau: float, lam: float):
    """Like scan_min_interval but also returns the pointer-advance count."""
    return _scan_row(probs.tolist(), tau, lam)


def batch_min_intervals(scores: np.ndarray, tau: float, lam: float):
    """Scan every row of an (n, K) score matrix.

    Returns (lowers, uppers, feasible) as int64/int64/uint8 arrays.
    """
    n = scores.shape[0]
    lowers = np.empty(n, dtype=np.int64)
    uppers = np.empty(n, dtype=np.int64)
    feasible = np.empty(n, dtype=np.uint8)
    rows = scores.tolist()
    for i in range(n):
        l, u, ok, _, _ = _scan_row(rows[i], tau, lam)
        lowers[i] = l
        uppers[i] = u
        feasible[i] = 1 if ok else 0
    return lowers, uppers, feasible


def coverage_count(scores: np.ndarray, labels: np.ndarray, tau: float, lam: float) -> int:
    """Number of rows whose scanned interval contains the row's label."""
    rows = scores.tolist()
    labs = labels.tolist()
    covered = 0
    for i in range(len(rows)):
        l, u, _, _, _ = _scan_row(rows[i], tau, lam)
        if l <= labs[i] <= u:
            covered += 1
    return covered
