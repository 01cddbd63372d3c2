"""Compiled loops over the four-cell multinomial state space.

States are addressed by ``(n1, n2, n3)``; ``n4 = m - n1 - n2 - n3``. Cell log
probabilities arrive as ``lcs`` with zero-probability cells replaced by 0.0
and flagged false in ``pos``; callers never place counts in such cells.
"""

import math

import numba as nb
import numpy as np


@nb.njit(cache=True, inline="always")
def deviation(n1, n2, n3, m):
    """|T - E| of a state, with E from the state's own plug-in probabilities."""
    u = n1 + n2 + n3
    if u == 0:
        return 0.0
    a = n1 + n2
    b = n1 + n3
    return abs(n1 / u - (a * b) / (m * (a + b) - a * b))


@nb.njit(cache=True, inline="always")
def _log_pmf(n1, n2, n3, m, lcs, lf):
    n4 = m - n1 - n2 - n3
    return (lf[m] - lf[n1] - lf[n2] - lf[n3] - lf[n4]
            + n1 * lcs[0] + n2 * lcs[1] + n3 * lcs[2] + n4 * lcs[3])


@nb.njit(cache=True)
def exact_slices(m, lcs, pos, lf, shift, cutoff):
    """Per-n1 sums of ``exp(logpmf - shift)``.

    Returns two arrays indexed by n1: mass inside the region
    ``deviation >= cutoff`` and total mass.
    """
    region = np.zeros(m + 1)
    total = np.zeros(m + 1)
    n1_hi = m if pos[0] else 0
    for n1 in range(n1_hi + 1):
        r1 = m - n1
        n2_hi = r1 if pos[1] else 0
        s_reg = 0.0
        s_tot = 0.0
        for n2 in range(n2_hi + 1):
            r = r1 - n2
            lo = r if not pos[3] else 0
            hi = r if pos[2] else 0
            for n3 in range(lo, hi + 1):
                w = math.exp(_log_pmf(n1, n2, n3, m, lcs, lf) - shift)
                s_tot += w
                if deviation(n1, n2, n3, m) >= cutoff:
                    s_reg += w
        region[n1] = s_reg
        total[n1] = s_tot
    return region, total


@nb.njit(cache=True)
def _slice_mode(r, pos):
    # argmax over n3 of the (n3, r - n3) binomial split between cells 3 and 4
    if pos[2] and pos[3]:
        return -1
    if pos[2]:
        return r
    return 0


@nb.njit(cache=True)
def _best_n3(n1, n2, m, lcs, pos, lf):
    r = m - n1 - n2
    fixed = _slice_mode(r, pos)
    if fixed >= 0:
        if not pos[2] and not pos[3] and r > 0:
            return 0, -np.inf
        return fixed, _log_pmf(n1, n2, fixed, m, lcs, lf)
    pi3 = math.exp(lcs[2]) / (math.exp(lcs[2]) + math.exp(lcs[3]))
    k = int(math.floor((r + 1) * pi3))
    if k > r:
        k = r
    return k, _log_pmf(n1, n2, k, m, lcs, lf)


@nb.njit(cache=True)
def _best_n2(n1, start, m, lcs, pos, lf):
    """Hill-climb the concave profile max_n3 logpmf(n1, n2, .) over n2."""
    hi = m - n1 if pos[1] else 0
    n2 = min(max(start, 0), hi)
    _, g = _best_n3(n1, n2, m, lcs, pos, lf)
    while n2 < hi:
        _, g2 = _best_n3(n1, n2 + 1, m, lcs, pos, lf)
        if g2 > g:
            n2 += 1
            g = g2
        else:
            break
    while n2 > 0:
        _, g2 = _best_n3(n1, n2 - 1, m, lcs, pos, lf)
        if g2 > g:
            n2 -= 1
            g = g2
        else:
            break
    return n2, g


@nb.njit(cache=True)
def _n3_bound(n1, n2, k, m, lcs, lf, tau, upward):
    """Last n3 on one side of the slice maximiser ``k`` with logpmf >= tau."""
    r = m - n1 - n2
    if upward:
        good, bad = k, r + 1
    else:
        good, bad = k, -1
    # concavity: logpmf is monotone on each side of k, so bisect
    while abs(bad - good) > 1:
        mid = (good + bad) // 2
        if _log_pmf(n1, n2, mid, m, lcs, lf) >= tau:
            good = mid
        else:
            bad = mid
    return good


@nb.njit(cache=True, error_model="numpy")
def level_set_scan(m, lcs, pos, lf, mode1, mode2, tau, lpmax, nbins, cutoff,
                   collect_bin, capacity):
    """Visit every state with ``logpmf >= tau``.

    Each profile (over n3, over n2 given n1, over n1) is concave, so every
    superlevel set is an interval around its maximiser. Masses are binned
    by ``lpmax - logpmf`` with compensated sums; states falling in
    ``collect_bin`` are also returned individually; in that mode states
    that certainly belong to higher bins are skipped and the histograms
    are incomplete.
    """
    scale = nbins / (lpmax - tau)
    tau_in = lpmax - collect_bin / scale + 1e-9
    h_mass = np.zeros(nbins)
    c_mass = np.zeros(nbins)
    h_region = np.zeros(nbins)
    c_region = np.zeros(nbins)
    h_count = np.zeros(nbins, np.int64)
    out_lp = np.empty(capacity)
    out_code = np.empty(capacity, np.int64)
    out_reg = np.empty(capacity, np.bool_)
    n_out = 0
    both34 = pos[2] and pos[3]
    n1_hi = m if pos[0] else 0
    for sweep1 in range(2):
        step1 = 1 if sweep1 == 0 else -1
        n1 = mode1 if sweep1 == 0 else mode1 - 1
        n2_start = mode2
        while 0 <= n1 <= n1_hi:
            b2, g = _best_n2(n1, n2_start, m, lcs, pos, lf)
            if g < tau:
                break
            n2_start = b2
            n2_hi = m - n1 if pos[1] else 0
            for sweep2 in range(2):
                step2 = 1 if sweep2 == 0 else -1
                n2 = b2 if sweep2 == 0 else b2 - 1
                while 0 <= n2 <= n2_hi:
                    k, g2 = _best_n3(n1, n2, m, lcs, pos, lf)
                    if g2 < tau:
                        break
                    lo = k
                    hi = k
                    if both34:
                        hi = _n3_bound(n1, n2, k, m, lcs, lf, tau, True)
                        lo = _n3_bound(n1, n2, k, m, lcs, lf, tau, False)
                    r = m - n1 - n2
                    base = lf[m] - lf[n1] - lf[n2] + n1 * lcs[0] + n2 * lcs[1]
                    ki = n1 + n2
                    # when collecting, skip the interior that lies strictly above the cut bin
                    skip_lo = hi + 1
                    skip_hi = hi
                    if collect_bin >= 0 and both34 and g2 >= tau_in:
                        skip_lo = _n3_bound(n1, n2, k, m, lcs, lf, tau_in, False)
                        skip_hi = _n3_bound(n1, n2, k, m, lcs, lf, tau_in, True)
                    n3 = lo
                    while n3 <= hi:
                        if n3 == skip_lo:
                            n3 = skip_hi + 1
                            continue
                        n4 = r - n3
                        lp = base - lf[n3] - lf[n4] + n3 * lcs[2] + n4 * lcs[3]
                        u = ki + n3
                        if u == 0:
                            dev = 0.0
                        else:
                            kj = n1 + n3
                            dev = abs(n1 / u - (ki * kj) / (m * (ki + kj) - ki * kj))
                        b = int((lpmax - lp) * scale)
                        if b >= nbins:
                            b = nbins - 1
                        elif b < 0:
                            b = 0
                        p = math.exp(lp)
                        y = p - c_mass[b]
                        t = h_mass[b] + y
                        c_mass[b] = (t - h_mass[b]) - y
                        h_mass[b] = t
                        h_count[b] += 1
                        inside = dev >= cutoff
                        if inside:
                            y = p - c_region[b]
                            t = h_region[b] + y
                            c_region[b] = (t - h_region[b]) - y
                            h_region[b] = t
                        if b == collect_bin:
                            if n_out < capacity:
                                out_lp[n_out] = lp
                                out_code[n_out] = (n1 * (m + 1) + n2) * (m + 1) + n3
                                out_reg[n_out] = inside
                            n_out += 1
                        n3 += 1
                    n2 += step2
            n1 += step1
    return h_mass, h_region, h_count, out_lp, out_code, out_reg, n_out
