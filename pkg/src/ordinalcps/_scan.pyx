# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled covering-scan kernels.

Mirrors ordinalcps._scan_py operation-for-operation; see that module for the
scan semantics and the tie-tolerance rationale. The float expressions must
stay textually identical to the pure kernel (and the extension is compiled
with -ffp-contract=off) so that both backends are bit-identical.
"""

import numpy as np

cdef double TIE_TOL = 1e-12


cdef bint _scan_row(const double* p, Py_ssize_t K, double tau, double lam,
                    double* prefix, Py_ssize_t* out_l, Py_ssize_t* out_u,
                    double* out_adj) noexcept nogil:
    cdef Py_ssize_t k, mode, l, u, length, best_l, best_u, best_len
    cdef double acc, best_val, adj, best_adj
    prefix[0] = 0.0
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
    for u in range(mode, K + 1):
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
    if best_l < 0:
        out_l[0] = 1
        out_u[0] = K
        out_adj[0] = (prefix[K] - prefix[0]) - lam * (K - 1)
        return 0
    out_l[0] = best_l
    out_u[0] = best_u
    out_adj[0] = best_adj
    return 1


def scan_min_interval(const double[::1] probs, double tau, double lam):
    """Scan one score vector; returns (l, u, feasible, adjusted_mass)."""
    cdef Py_ssize_t K = probs.shape[0]
    prefix_arr = np.empty(K + 1, dtype=np.float64)
    cdef double[::1] prefix = prefix_arr
    cdef Py_ssize_t l = 0, u = 0
    cdef double adj = 0.0
    cdef bint ok
    with nogil:
        ok = _scan_row(&probs[0], K, tau, lam, &prefix[0], &l, &u, &adj)
    return int(l), int(u), bool(ok), float(adj)


def batch_min_intervals(const double[:, ::1] scores, double tau, double lam):
    """Scan every row of an (n, K) score matrix.

    Returns (lowers, uppers, feasible) as int64/int64/uint8 arrays.
    """
    cdef Py_ssize_t n = scores.shape[0]
    cdef Py_ssize_t K = scores.shape[1]
    lowers_arr = np.empty(n, dtype=np.int64)
    uppers_arr = np.empty(n, dtype=np.int64)
    feas_arr = np.empty(n, dtype=np.uint8)
    prefix_arr = np.empty(K + 1, dtype=np.float64)
    cdef long long[::1] lowers = lowers_arr
    cdef long long[::1] uppers = uppers_arr
    cdef unsigned char[::1] feas = feas_arr
    cdef double[::1] prefix = prefix_arr
    cdef Py_ssize_t i, l = 0, u = 0
    cdef double adj = 0.0
    with nogil:
        for i in range(n):
            feas[i] = _scan_row(&scores[i, 0], K, tau, lam, &prefix[0], &l, &u, &adj)
            lowers[i] = l
            uppers[i] = u
    return lowers_arr, uppers_arr, feas_arr


def coverage_count(const double[:, ::1] scores, const long long[::1] labels,
                   double tau, double lam):
    """Number of rows whose scanned interval contains the row's label."""
    cdef Py_ssize_t n = scores.shape[0]
    cdef Py_ssize_t K = scores.shape[1]
    prefix_arr = np.empty(K + 1, dtype=np.float64)
    cdef double[::1] prefix = prefix_arr
    cdef Py_ssize_t i, l = 0, u = 0
    cdef double adj = 0.0
    cdef long long covered = 0
    with nogil:
        for i in range(n):
            _scan_row(&scores[i, 0], K, tau, lam, &prefix[0], &l, &u, &adj)
            if l <= labels[i] <= u:
                covered += 1
    return int(covered)
