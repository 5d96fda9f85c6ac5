"""Array-based SC-list decoder core (numba).

Lazy copy-on-write path memory in the style of the classic list-decoder
data structures: per tree layer, a pool of LLR/bit buffers shared between
paths via reference counts, so that the total work stays O(L N log N)
per decode instead of O(L N^2) with eager cloning.

Layer lam runs from 0 (channel, arrays of length N) to m (leaves,
length 1).  Natural bit order: the butterfly pairs element beta with
beta + half, no bit-reversal.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _f_llr(a, b, exact):
    s = 1.0
    if a < 0:
        s = -s
    if b < 0:
        s = -s
    mag = min(abs(a), abs(b))
    if exact:
        return s * mag + np.log1p(np.exp(-abs(a + b))) - np.log1p(np.exp(-abs(a - b)))
    return s * mag


@njit(cache=True)
def scl_run(llr_x, frozen_mask, frozen_vals, L, exact_f):
    """Decode one word; returns (codewords (L,N) uint8, metrics (L,), count)."""
    N = llr_x.shape[0]
    m = 0
    while (1 << m) < N:
        m += 1

    # ---- path / buffer bookkeeping -------------------------------------
    # P[lam, s, :] LLR buffer s at layer lam (only first N>>lam entries used)
    # C[lam, s, :, 0:2] bit buffers (left/right branch)
    P = np.zeros((m + 1, L, N), dtype=np.float64)
    C = np.zeros((m + 1, L, N, 2), dtype=np.uint8)
    path_to_array = np.zeros((m + 1, L), dtype=np.int64)
    ref_count = np.zeros((m + 1, L), dtype=np.int64)
    inactive_arrays = np.zeros((m + 1, L), dtype=np.int64)
    inactive_arrays_top = np.zeros(m + 1, dtype=np.int64)
    active_path = np.zeros(L, dtype=np.uint8)
    inactive_paths = np.zeros(L, dtype=np.int64)
    inactive_paths_top = 0
    pm = np.zeros(L, dtype=np.float64)

    for lam in range(m + 1):
        for s in range(L):
            inactive_arrays[lam, s] = L - 1 - s
        inactive_arrays_top[lam] = L
    for l in range(L):
        inactive_paths[l] = L - 1 - l
    inactive_paths_top = L

    # initial path
    inactive_paths_top -= 1
    l0 = inactive_paths[inactive_paths_top]
    active_path[l0] = 1
    for lam in range(m + 1):
        inactive_arrays_top[lam] -= 1
        s = inactive_arrays[lam, inactive_arrays_top[lam]]
        path_to_array[lam, l0] = s
        ref_count[lam, s] = 1
    P[0, path_to_array[0, l0], :] = llr_x

    # ---- helpers as inline code ----------------------------------------
    # getArrayPointer with copy-on-write; returns buffer index for (lam, l)
    def _noop():
        return 0

    for phi in range(N):
        # ---------------- recursivelyCalcP(m, phi), iteratively ----------
        if phi == 0:
            lam_start = 1
        else:
            tz = 0
            x = phi
            while x & 1 == 0:
                tz += 1
                x >>= 1
            lam_start = m - tz
        for lam in range(lam_start, m + 1):
            node = phi >> (m - lam)
            sz = N >> lam
            is_g = 1 if (node & 1) == 1 else 0
            for l in range(L):
                if active_path[l] == 0:
                    continue
                # COW for write target at layer lam
                s = path_to_array[lam, l]
                if ref_count[lam, s] > 1:
                    ref_count[lam, s] -= 1
                    inactive_arrays_top[lam] -= 1
                    s2 = inactive_arrays[lam, inactive_arrays_top[lam]]
                    P[lam, s2, :sz] = P[lam, s, :sz]
                    C[lam, s2, :sz, :] = C[lam, s, :sz, :]
                    ref_count[lam, s2] = 1
                    path_to_array[lam, l] = s2
                    s = s2
                sp = path_to_array[lam - 1, l]
                if is_g == 1:
                    for beta in range(sz):
                        a = P[lam - 1, sp, beta]
                        b = P[lam - 1, sp, beta + sz]
                        if C[lam, s, beta, 0] == 0:
                            P[lam, s, beta] = a + b
                        else:
                            P[lam, s, beta] = b - a
                else:
                    for beta in range(sz):
                        a = P[lam - 1, sp, beta]
                        b = P[lam - 1, sp, beta + sz]
                        P[lam, s, beta] = _f_llr(a, b, exact_f)

        # ---------------- leaf decisions ---------------------------------
        if frozen_mask[phi] == 1:
            u_val = frozen_vals[phi]
            for l in range(L):
                if active_path[l] == 0:
                    continue
                s = path_to_array[m, l]
                if ref_count[m, s] > 1:
                    ref_count[m, s] -= 1
                    inactive_arrays_top[m] -= 1
                    s2 = inactive_arrays[m, inactive_arrays_top[m]]
                    P[m, s2, :1] = P[m, s, :1]
                    C[m, s2, :1, :] = C[m, s, :1, :]
                    ref_count[m, s2] = 1
                    path_to_array[m, l] = s2
                    s = s2
                llr = P[m, s, 0]
                if (u_val == 0 and llr < 0.0) or (u_val == 1 and llr > 0.0):
                    pm[l] += abs(llr)
                C[m, s, 0, phi & 1] = u_val
        else:
            # candidate metrics for both extensions of every active path
            cand_pm = np.empty(2 * L, dtype=np.float64)
            n_active = 0
            for l in range(L):
                if active_path[l] == 0:
                    cand_pm[2 * l] = np.inf
                    cand_pm[2 * l + 1] = np.inf
                    continue
                n_active += 1
                llr = P[m, path_to_array[m, l], 0]
                pen = abs(llr)
                if llr >= 0.0:
                    cand_pm[2 * l] = pm[l]          # u = 0, agrees
                    cand_pm[2 * l + 1] = pm[l] + pen
                else:
                    cand_pm[2 * l] = pm[l] + pen
                    cand_pm[2 * l + 1] = pm[l]      # u = 1, agrees
            keep_n = min(L, 2 * n_active)
            order = np.argsort(cand_pm)
            keep = np.zeros(2 * L, dtype=np.uint8)
            for i in range(keep_n):
                keep[order[i]] = 1

            # kill paths with no surviving extension
            for l in range(L):
                if active_path[l] == 0:
                    continue
                if keep[2 * l] == 0 and keep[2 * l + 1] == 0:
                    active_path[l] = 0
                    inactive_paths[inactive_paths_top] = l
                    inactive_paths_top += 1
                    for lam in range(m + 1):
                        s = path_to_array[lam, l]
                        ref_count[lam, s] -= 1
                        if ref_count[lam, s] == 0:
                            inactive_arrays[lam, inactive_arrays_top[lam]] = s
                            inactive_arrays_top[lam] += 1

            # extend survivors; clone when both branches survive
            for l in range(L):
                if keep[2 * l] == 0 and keep[2 * l + 1] == 0:
                    continue
                if active_path[l] == 0:
                    continue
                both = keep[2 * l] == 1 and keep[2 * l + 1] == 1
                if both:
                    inactive_paths_top -= 1
                    l2 = inactive_paths[inactive_paths_top]
                    active_path[l2] = 1
                    pm[l2] = cand_pm[2 * l + 1]
                    for lam in range(m + 1):
                        s = path_to_array[lam, l]
                        path_to_array[lam, l2] = s
                        ref_count[lam, s] += 1
                    pm[l] = cand_pm[2 * l]
                    # write u=0 on l, u=1 on l2 (each with COW at layer m)
                    for ll, uu in ((l, 0), (l2, 1)):
                        s = path_to_array[m, ll]
                        if ref_count[m, s] > 1:
                            ref_count[m, s] -= 1
                            inactive_arrays_top[m] -= 1
                            s2 = inactive_arrays[m, inactive_arrays_top[m]]
                            P[m, s2, :1] = P[m, s, :1]
                            C[m, s2, :1, :] = C[m, s, :1, :]
                            ref_count[m, s2] = 1
                            path_to_array[m, ll] = s2
                            s = s2
                        C[m, s, 0, phi & 1] = uu
                else:
                    uu = 0 if keep[2 * l] == 1 else 1
                    pm[l] = cand_pm[2 * l + uu]
                    s = path_to_array[m, l]
                    if ref_count[m, s] > 1:
                        ref_count[m, s] -= 1
                        inactive_arrays_top[m] -= 1
                        s2 = inactive_arrays[m, inactive_arrays_top[m]]
                        P[m, s2, :1] = P[m, s, :1]
                        C[m, s2, :1, :] = C[m, s, :1, :]
                        ref_count[m, s2] = 1
                        path_to_array[m, l] = s2
                        s = s2
                    C[m, s, 0, phi & 1] = uu

        # ---------------- recursivelyUpdateC(m, phi) ----------------------
        if phi & 1 == 1:
            lam = m
            ph = phi
            while ph & 1 == 1 and lam >= 1:
                psi = ph >> 1
                sz = N >> lam
                branch = psi & 1
                for l in range(L):
                    if active_path[l] == 0:
                        continue
                    sc = path_to_array[lam, l]
                    # COW on the write target (layer lam-1)
                    s = path_to_array[lam - 1, l]
                    if ref_count[lam - 1, s] > 1:
                        szp = N >> (lam - 1)
                        ref_count[lam - 1, s] -= 1
                        inactive_arrays_top[lam - 1] -= 1
                        s2 = inactive_arrays[lam - 1, inactive_arrays_top[lam - 1]]
                        P[lam - 1, s2, :szp] = P[lam - 1, s, :szp]
                        C[lam - 1, s2, :szp, :] = C[lam - 1, s, :szp, :]
                        ref_count[lam - 1, s2] = 1
                        path_to_array[lam - 1, l] = s2
                        s = s2
                    for beta in range(sz):
                        left = C[lam, sc, beta, 0]
                        right = C[lam, sc, beta, 1]
                        C[lam - 1, s, beta, branch] = left ^ right
                        C[lam - 1, s, beta + sz, branch] = right
                ph = psi
                lam -= 1

    # ---- collect results -------------------------------------------------
    out_x = np.zeros((L, N), dtype=np.uint8)
    out_pm = np.full(L, np.inf, dtype=np.float64)
    count = 0
    for l in range(L):
        if active_path[l] == 0:
            continue
        s = path_to_array[0, l]
        for beta in range(N):
            out_x[count, beta] = C[0, s, beta, 0]
        out_pm[count] = pm[l]
        count += 1
    return out_x, out_pm, count
