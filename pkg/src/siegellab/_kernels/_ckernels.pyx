# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot kernels.

Twin of ``_pykernels.py``: same function names, signatures, and results.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport ceil, cos, floor, log, sin, sqrt

cnp.import_array()

BACKEND_NAME = "cython"

cdef double TWO_PI = 6.283185307179586476925287


def build_spf(long limit):
    """Smallest-prime-factor array over [0, limit]; spf[1] = 1."""
    if limit < 1:
        raise ValueError("limit must be >= 1")
    out = np.zeros(limit + 1, dtype=np.int32)
    cdef cnp.int32_t[::1] spf = out
    cdef long i, j
    spf[1] = 1
    i = 2
    while i * i <= limit:
        if spf[i] == 0:
            j = i * i
            while j <= limit:
                if spf[j] == 0:
                    spf[j] = <cnp.int32_t> i
                j += i
        i += 1
    for i in range(2, limit + 1):
        if spf[i] == 0:
            spf[i] = <cnp.int32_t> i
    return out


def primes_from_spf(spf):
    """Ascending array of primes p <= limit (p is prime iff spf[p] == p)."""
    n = len(spf) - 1
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    idx = np.nonzero(spf[2:] == np.arange(2, n + 1, dtype=spf.dtype))[0]
    return idx.astype(np.int64) + 2


cdef inline long _lambda_pp(long c, long e) noexcept:
    if c > 0:
        return e + 1
    if c == 0:
        return 1
    return 1 if e % 2 == 0 else 0


cdef inline long _nu_pp(long c, long e) noexcept:
    if e == 1:
        return -1 - c
    if e == 2:
        return c
    return 0


def multiplicative_tables(const cnp.int32_t[::1] spf, const cnp.int64_t[::1] chi_n):
    """mu, lambda = chi*1, nu = mu*(mu.chi), and von Mangoldt tables."""
    cdef long limit = spf.shape[0] - 1
    mu_o = np.zeros(limit + 1, dtype=np.int64)
    lam_o = np.zeros(limit + 1, dtype=np.int64)
    nu_o = np.zeros(limit + 1, dtype=np.int64)
    big_o = np.zeros(limit + 1, dtype=np.float64)
    cdef cnp.int64_t[::1] mu = mu_o
    cdef cnp.int64_t[::1] lam = lam_o
    cdef cnp.int64_t[::1] nu = nu_o
    cdef double[::1] big = big_o
    # e[n] = p-adic valuation of n at p = spf[n]; root[n] = n / p^e[n]
    cdef cnp.int8_t[::1] e = np.zeros(limit + 1, dtype=np.int8)
    cdef cnp.int64_t[::1] root = np.zeros(limit + 1, dtype=np.int64)
    cdef long n, p, m, r, cnt, c
    if limit >= 1:
        mu[1] = 1
        lam[1] = 1
        nu[1] = 1
        root[1] = 1
    for n in range(2, limit + 1):
        p = spf[n]
        m = n // p
        if spf[m] == p:
            cnt = e[m] + 1
            r = root[m]
        else:
            cnt = 1
            r = m
        e[n] = <cnp.int8_t> cnt
        root[n] = r
        c = chi_n[p]
        mu[n] = -mu[r] if cnt == 1 else 0
        lam[n] = lam[r] * _lambda_pp(c, cnt)
        nu[n] = nu[r] * _nu_pp(c, cnt)
        big[n] = log(<double> p) if r == 1 else 0.0
    return mu_o, lam_o, nu_o, big_o


def sign_class_arrays(const cnp.int32_t[::1] spf, const cnp.int64_t[::1] chi_n):
    """Per-n factors (d1, dm1, d0) split by the sign of chi at each prime."""
    cdef long limit = spf.shape[0] - 1
    d1_o = np.zeros(limit + 1, dtype=np.int64)
    dm1_o = np.zeros(limit + 1, dtype=np.int64)
    d0_o = np.zeros(limit + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] d1 = d1_o
    cdef cnp.int64_t[::1] dm1 = dm1_o
    cdef cnp.int64_t[::1] d0 = d0_o
    cdef cnp.int64_t[::1] root = np.zeros(limit + 1, dtype=np.int64)
    cdef long n, p, m, r, c, pe
    if limit >= 1:
        d1[1] = 1
        dm1[1] = 1
        d0[1] = 1
        root[1] = 1
    for n in range(2, limit + 1):
        p = spf[n]
        m = n // p
        if spf[m] == p:
            r = root[m]
        else:
            r = m
        root[n] = r
        pe = n // r  # the full prime-power part p^e
        c = chi_n[p]
        if c > 0:
            d1[n] = d1[r] * pe
            dm1[n] = dm1[r]
            d0[n] = d0[r]
        elif c < 0:
            d1[n] = d1[r]
            dm1[n] = dm1[r] * pe
            d0[n] = d0[r]
        else:
            d1[n] = d1[r]
            dm1[n] = dm1[r]
            d0[n] = d0[r] * pe
    return d1_o, dm1_o, d0_o


def gpf_table(const cnp.int32_t[::1] spf):
    """Greatest-prime-factor array; gpf[1] = 1."""
    cdef long limit = spf.shape[0] - 1
    out = np.zeros(limit + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] gpf = out
    cdef long p, j
    if limit >= 1:
        gpf[1] = 1
    for p in range(2, limit + 1):
        if spf[p] == p:
            j = p
            while j <= limit:
                gpf[j] = p
                j += p
    return out


def convolve_int(const cnp.int64_t[::1] f, const cnp.int64_t[::1] g):
    """Exact Dirichlet convolution of int64 sequences indexed 1..n."""
    cdef long n = f.shape[0] - 1
    out = np.zeros(n + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] o = out
    cdef long d, k, m
    cdef cnp.int64_t fd
    for d in range(1, n + 1):
        fd = f[d]
        if fd == 0:
            continue
        m = n // d
        for k in range(1, m + 1):
            o[d * k] += fd * g[k]
    return out


def convolve_float(const double[::1] f, const double[::1] g):
    """Dirichlet convolution of float64 sequences indexed 1..n."""
    cdef long n = f.shape[0] - 1
    out = np.zeros(n + 1, dtype=np.float64)
    cdef double[::1] o = out
    cdef long d, k, m
    cdef double fd
    for d in range(1, n + 1):
        fd = f[d]
        if fd == 0.0:
            continue
        m = n // d
        for k in range(1, m + 1):
            o[d * k] += fd * g[k]
    return out


cdef inline long _posmod(long v, long m) noexcept:
    cdef long r = v % m
    return r + m if r < 0 else r


cdef inline double _range_sum(const double[::1] pref, long q, long r, long lo, long hi) noexcept:
    cdef long h, l
    cdef double s
    if hi < lo:
        return 0.0
    h = hi - _posmod(hi - r, q)
    if h < lo:
        return 0.0
    l = lo + _posmod(r - lo, q)
    if l > h:
        return 0.0
    s = pref[h]
    if l - q >= 0:
        s -= pref[l - q]
    return s


cdef inline long _range_count(long q, long r, long lo, long hi) noexcept:
    cdef long h, l
    if hi < lo:
        return 0
    h = hi - _posmod(hi - r, q)
    if h < lo:
        return 0
    l = lo + _posmod(r - lo, q)
    if l > h:
        return 0
    return (h - l) // q + 1


def psi_split_sums(const cnp.int64_t[::1] nu, const double[::1] lamp_pref,
                   const cnp.int64_t[::1] inv_table, long q, long a, long x, long dstar):
    """(sum over d <= dstar, sum over d > dstar) of nu(d) * S(d) where
    S(d) = sum of lambda'(m) over m <= x/d with d*m = a (mod q)."""
    cdef double star = 0.0, low = 0.0, s
    cdef long d, r, iv
    cdef cnp.int64_t nd
    for d in range(1, x + 1):
        nd = nu[d]
        if nd == 0:
            continue
        iv = inv_table[d % q]
        if iv == 0:
            continue
        r = (a * iv) % q
        s = _range_sum(lamp_pref, q, r, 1, x // d)
        if d <= dstar:
            star += nd * s
        else:
            low += nd * s
    return star, low


def window_pair_sum(const cnp.int64_t[::1] wd, const double[::1] mpref,
                    const cnp.int64_t[::1] inv_table, long q, long a, long x, long dlo):
    """sum over pairs (d, m), d > dlo, x/2 <= d*m <= x, d*m = a (mod q)
    of wd[d] * seq[m], with seq given by its per-residue prefix mpref."""
    cdef double acc = 0.0
    cdef long d, r, iv, hi, lo
    cdef cnp.int64_t w
    for d in range(dlo + 1, x + 1):
        w = wd[d]
        if w == 0:
            continue
        iv = inv_table[d % q]
        if iv == 0:
            continue
        r = (a * iv) % q
        hi = x // d
        lo = (x + 2 * d - 1) // (2 * d)
        acc += w * _range_sum(mpref, q, r, lo, hi)
    return acc


def window_pair_count_sum(const cnp.int64_t[::1] wd, const cnp.int64_t[::1] inv_table,
                          long q, long a, long x, long dlo):
    """Same window as window_pair_sum but with unit weight on m."""
    cdef double acc = 0.0
    cdef long d, r, iv, hi, lo
    cdef cnp.int64_t w
    for d in range(dlo + 1, x + 1):
        w = wd[d]
        if w == 0:
            continue
        iv = inv_table[d % q]
        if iv == 0:
            continue
        r = (a * iv) % q
        hi = x // d
        lo = (x + 2 * d - 1) // (2 * d)
        acc += w * _range_count(q, r, lo, hi)
    return acc


def t_sums_accumulate(const cnp.int64_t[::1] lam, const double[::1] lam_pref, const double[::1] biglam,
                      const cnp.int64_t[::1] pps, const cnp.int64_t[::1] inv_table,
                      long q, long a, long x, long dstar, double thr_a, double thr_b):
    """Bucketed triple sums over x/2 <= d*m1*m2 <= x, d > dstar, = a (mod q)."""
    cdef double t1 = 0.0, t2 = 0.0, t3 = 0.0, t4 = 0.0, unc = 0.0, w
    cdef long m2max_i3 = <long> ceil(thr_a) - 1
    cdef long d, lim, m1, P, iv, r, hi, lo, i1hi, lo2, i3hi, lo4, j, npp
    cdef cnp.int64_t ld
    cdef bint d_small
    npp = pps.shape[0]
    for d in range(dstar + 1, x + 1):
        ld = lam[d]
        if ld == 0:
            continue
        lim = x // d
        if lim < 2:
            break
        d_small = d < thr_a
        for j in range(npp):
            m1 = pps[j]
            if m1 > lim:
                break
            P = d * m1
            iv = inv_table[P % q]
            if iv == 0:
                continue
            r = (a * iv) % q
            hi = x // P
            lo = (x + 2 * P - 1) // (2 * P)
            if hi < lo:
                continue
            w = ld * biglam[m1]
            i1hi = dstar if hi > dstar else hi
            if i1hi >= lo:
                t1 += w * _range_sum(lam_pref, q, r, lo, i1hi)
            lo2 = dstar + 1 if lo <= dstar else lo
            if lo2 > hi:
                continue
            if d_small:
                t2 += w * _range_sum(lam_pref, q, r, lo2, hi)
                continue
            i3hi = m2max_i3 if hi > m2max_i3 else hi
            if i3hi >= lo2:
                t3 += w * _range_sum(lam_pref, q, r, lo2, i3hi)
            lo4 = lo2 if lo2 > m2max_i3 else m2max_i3 + 1
            if lo4 > hi:
                continue
            if m1 <= thr_b:
                t4 += w * _range_sum(lam_pref, q, r, lo4, hi)
            else:
                unc += w * _range_sum(lam_pref, q, r, lo4, hi)
    return t1, t2, t3, t4, unc


def je_accumulate(const cnp.int64_t[::1] lam, const cnp.int64_t[::1] ds_arr, const cnp.uint8_t[::1] e1_flag,
                  const cnp.int64_t[::1] inv_table, long q, long a, long x, long dstar,
                  double x0, double j1_hi, double j2_hi):
    """Edge/middle split of sum of lam[d] over pairs in the dyadic window."""
    cdef double edge_d = 0.0, edge_m = 0.0, j1e1 = 0.0, j1e2 = 0.0
    cdef double j2 = 0.0, j3 = 0.0, mid = 0.0, total = 0.0, w
    cdef long m_x0 = <long> floor(x0)
    cdef long d, iv, r, hi, lo, hi_e, lo_m, cnt_all, c_mid, ds
    cdef cnp.int64_t ld
    for d in range(dstar + 1, x + 1):
        ld = lam[d]
        if ld == 0:
            continue
        iv = inv_table[d % q]
        if iv == 0:
            continue
        r = (a * iv) % q
        hi = x // d
        lo = (x + 2 * d - 1) // (2 * d)
        if hi < lo:
            continue
        cnt_all = _range_count(q, r, lo, hi)
        if cnt_all == 0:
            continue
        total += ld * cnt_all
        if d <= x0:
            edge_d += ld * cnt_all
            continue
        hi_e = m_x0 if hi > m_x0 else hi
        if hi_e >= lo:
            edge_m += ld * _range_count(q, r, lo, hi_e)
        lo_m = lo if lo > m_x0 else m_x0 + 1
        if lo_m > hi:
            continue
        c_mid = _range_count(q, r, lo_m, hi)
        if c_mid == 0:
            continue
        w = ld * c_mid
        mid += w
        ds = ds_arr[d]
        if ds < j1_hi:
            if e1_flag[d]:
                j1e1 += w
            else:
                j1e2 += w
        elif ds < j2_hi:
            j2 += w
        else:
            j3 += w
    return edge_d, edge_m, j1e1, j1e2, j2, j3, mid, total


def kloosterman_sum(const cnp.int64_t[::1] primes, long q, long a, const cnp.int64_t[::1] inv_table):
    """(S, n_terms): S = sum of e(a * inv(p) / q) over primes coprime to q."""
    cdef double tw = TWO_PI / q
    cdef double sr = 0.0, si = 0.0, cr = 0.0, ci = 0.0, y, t, ang
    cdef long n = 0, i, k
    for i in range(primes.shape[0]):
        k = inv_table[primes[i] % q]
        if k == 0:
            continue
        ang = tw * ((a * k) % q)
        y = cos(ang) - cr
        t = sr + y
        cr = (t - sr) - y
        sr = t
        y = sin(ang) - ci
        t = si + y
        ci = (t - si) - y
        si = t
        n += 1
    return complex(sr, si), n


def kloosterman_max_over_units(const cnp.int64_t[::1] primes, long q, const cnp.int64_t[::1] inv_table):
    """(best_a, max |S(q, a)|) over units a mod q, via an inverse histogram.

    |S(q, a)| = |S(q, q - a)| (conjugation), so only a <= q/2 is scanned.
    """
    hist_o = np.zeros(q, dtype=np.int64)
    cdef cnp.int64_t[::1] hist = hist_o
    cdef long i, k, a, idx, n_keys = 0
    for i in range(primes.shape[0]):
        k = inv_table[primes[i] % q]
        if k != 0:
            hist[k] += 1
    keys_o = np.nonzero(hist_o)[0].astype(np.int64)
    cdef cnp.int64_t[::1] keys = keys_o
    n_keys = keys.shape[0]
    if n_keys == 0:
        return 1, 0.0
    cos_o = np.cos(2.0 * np.pi * np.arange(q) / q)
    sin_o = np.sin(2.0 * np.pi * np.arange(q) / q)
    cdef double[::1] cos_t = cos_o
    cdef double[::1] sin_t = sin_o
    cdef double best = -1.0, re, im, mag2
    cdef long best_a = 1, j
    cdef cnp.int64_t c
    for a in range(1, q // 2 + 1):
        if inv_table[a] == 0:
            continue
        re = 0.0
        im = 0.0
        for j in range(n_keys):
            k = keys[j]
            c = hist[k]
            idx = (a * k) % q
            re += c * cos_t[idx]
            im += c * sin_t[idx]
        mag2 = re * re + im * im
        if mag2 > best:
            best = mag2
            best_a = a
    return best_a, sqrt(best)
