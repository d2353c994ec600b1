"""Pure-Python/numpy implementations of the hot kernels.

This is the fallback backend used when the compiled extension is not
available.  Every function here has a signature-compatible twin in
``_ckernels.pyx``; the two backends are cross-checked in the test suite
and compared in ``benchmarks/bench_kernels.py``.
"""

import math

import numpy as np

BACKEND_NAME = "python"


def build_spf(limit):
    """Smallest-prime-factor array over [0, limit]; spf[1] = 1."""
    if limit < 1:
        raise ValueError("limit must be >= 1")
    spf = np.zeros(limit + 1, dtype=np.int32)
    spf[1] = 1
    for i in range(2, math.isqrt(limit) + 1):
        if spf[i] == 0:
            seg = spf[i * i :: i]
            seg[seg == 0] = i
    rest = np.nonzero(spf[2:] == 0)[0].astype(np.int64) + 2
    spf[rest] = rest
    return spf


def primes_from_spf(spf):
    """Ascending array of primes p <= limit (p is prime iff spf[p] == p)."""
    n = len(spf) - 1
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    idx = np.nonzero(spf[2:] == np.arange(2, n + 1, dtype=spf.dtype))[0]
    return idx.astype(np.int64) + 2


def _lambda_pp(c, e):
    # 1 + chi(p) + ... + chi(p^e) for chi(p) = c
    if c > 0:
        return e + 1
    if c == 0:
        return 1
    return 1 if e % 2 == 0 else 0


def _nu_pp(c, e):
    # (mu * mu.chi)(p^e): -1-chi(p) at e=1, chi(p) at e=2, 0 beyond
    if e == 1:
        return -1 - c
    if e == 2:
        return c
    return 0


def multiplicative_tables(spf, chi_n):
    """mu, lambda = chi*1, nu = mu*(mu.chi), and von Mangoldt tables.

    lambda and nu are built from the per-prime-power unit values, i.e. the
    Euler-product route, independent of any divisor pass.
    """
    limit = len(spf) - 1
    mu = np.ones(limit + 1, dtype=np.int64)
    lam = np.ones(limit + 1, dtype=np.int64)
    nu = np.ones(limit + 1, dtype=np.int64)
    biglam = np.zeros(limit + 1, dtype=np.float64)
    mu[0] = lam[0] = nu[0] = 0
    for p in primes_from_spf(spf).tolist():
        c = int(chi_n[p])
        logp = math.log(p)
        pe = p
        e = 1
        while pe <= limit:
            biglam[pe] = logp
            idx = np.arange(pe, limit + 1, pe, dtype=np.int64)
            sel = idx[(idx // pe) % p != 0]  # exact p-adic valuation e
            mu[sel] *= -1 if e == 1 else 0
            lam[sel] *= _lambda_pp(c, e)
            nu[sel] *= _nu_pp(c, e)
            pe *= p
            e += 1
    return mu, lam, nu, biglam


def sign_class_arrays(spf, chi_n):
    """Per-n factors (d1, dm1, d0) split by the sign of chi at each prime."""
    limit = len(spf) - 1
    d1 = np.ones(limit + 1, dtype=np.int64)
    dm1 = np.ones(limit + 1, dtype=np.int64)
    d0 = np.ones(limit + 1, dtype=np.int64)
    d1[0] = dm1[0] = d0[0] = 0
    for p in primes_from_spf(spf).tolist():
        c = int(chi_n[p])
        part = d1 if c > 0 else (dm1 if c < 0 else d0)
        pe = p
        while pe <= limit:
            idx = np.arange(pe, limit + 1, pe, dtype=np.int64)
            sel = idx[(idx // pe) % p != 0]
            part[sel] *= pe
            pe *= p
    return d1, dm1, d0


def gpf_table(spf):
    """Greatest-prime-factor array; gpf[1] = 1."""
    limit = len(spf) - 1
    gpf = np.zeros(limit + 1, dtype=np.int64)
    gpf[1] = 1
    for p in primes_from_spf(spf).tolist():
        gpf[p::p] = p
    return gpf


def convolve_int(f, g):
    """Exact Dirichlet convolution of int64 sequences indexed 1..n."""
    n = len(f) - 1
    out = np.zeros(n + 1, dtype=np.int64)
    for d in range(1, n + 1):
        fd = f[d]
        if fd == 0:
            continue
        m = n // d
        out[d::d] += fd * g[1 : m + 1]
    return out


def convolve_float(f, g):
    """Dirichlet convolution of float64 sequences indexed 1..n."""
    n = len(f) - 1
    out = np.zeros(n + 1, dtype=np.float64)
    for d in range(1, n + 1):
        fd = f[d]
        if fd == 0.0:
            continue
        m = n // d
        out[d::d] += fd * g[1 : m + 1]
    return out


def _range_sum(pref, q, r, lo, hi):
    # sum of the underlying sequence over n in [lo, hi], n = r (mod q);
    # pref[n] = seq[n] + pref[n - q] is the per-residue running sum
    if hi < lo:
        return 0.0
    h = hi - (hi - r) % q
    if h < lo:
        return 0.0
    l = lo + (r - lo) % q
    if l > h:
        return 0.0
    s = pref[h]
    if l - q >= 0:
        s -= pref[l - q]
    return s


def _range_count(q, r, lo, hi):
    if hi < lo:
        return 0
    h = hi - (hi - r) % q
    if h < lo:
        return 0
    l = lo + (r - lo) % q
    if l > h:
        return 0
    return (h - l) // q + 1


def psi_split_sums(nu, lamp_pref, inv_table, q, a, x, dstar):
    """(sum over d <= dstar, sum over d > dstar) of nu(d) * S(d) where
    S(d) = sum of lambda'(m) over m <= x/d with d*m = a (mod q)."""
    nul = nu.tolist()
    pref = lamp_pref.tolist()
    inv = inv_table.tolist()
    star = 0.0
    low = 0.0
    for d in range(1, x + 1):
        nd = nul[d]
        if nd == 0:
            continue
        iv = inv[d % q]
        if iv == 0:
            continue
        r = (a * iv) % q
        s = _range_sum(pref, q, r, 1, x // d)
        if d <= dstar:
            star += nd * s
        else:
            low += nd * s
    return star, low


def window_pair_sum(wd, mpref, inv_table, q, a, x, dlo):
    """sum over pairs (d, m), d > dlo, x/2 <= d*m <= x, d*m = a (mod q)
    of wd[d] * seq[m], with seq given by its per-residue prefix mpref."""
    wl = wd.tolist()
    pref = mpref.tolist()
    inv = inv_table.tolist()
    acc = 0.0
    for d in range(dlo + 1, x + 1):
        w = wl[d]
        if w == 0:
            continue
        iv = inv[d % q]
        if iv == 0:
            continue
        r = (a * iv) % q
        hi = x // d
        lo = -(-x // (2 * d))
        acc += w * _range_sum(pref, q, r, lo, hi)
    return acc


def window_pair_count_sum(wd, inv_table, q, a, x, dlo):
    """Same window as window_pair_sum but with unit weight on m."""
    wl = wd.tolist()
    inv = inv_table.tolist()
    acc = 0.0
    for d in range(dlo + 1, x + 1):
        w = wl[d]
        if w == 0:
            continue
        iv = inv[d % q]
        if iv == 0:
            continue
        r = (a * iv) % q
        hi = x // d
        lo = -(-x // (2 * d))
        acc += w * _range_count(q, r, lo, hi)
    return acc


def t_sums_accumulate(lam, lam_pref, biglam, pps, inv_table, q, a, x, dstar, thr_a, thr_b):
    """Bucketed triple sums over x/2 <= d*m1*m2 <= x, d > dstar, = a (mod q).

    Weight is lam[d] * biglam[m1] * lam[m2].  Buckets follow the interval
    classification: m2 <= dstar; else d < thr_a; else m2 < thr_a; else
    m1 <= thr_b; else unclassified.
    """
    lam_l = lam.tolist()
    pref = lam_pref.tolist()
    big = biglam.tolist()
    pp = pps.tolist()
    inv = inv_table.tolist()
    t1 = t2 = t3 = t4 = unc = 0.0
    m2max_i3 = math.ceil(thr_a) - 1
    for d in range(dstar + 1, x + 1):
        ld = lam_l[d]
        if ld == 0:
            continue
        lim = x // d
        if lim < 2:
            break
        d_small = d < thr_a
        for m1 in pp:
            if m1 > lim:
                break
            P = d * m1
            iv = inv[P % q]
            if iv == 0:
                continue
            r = (a * iv) % q
            hi = x // P
            lo = -(-x // (2 * P))
            if hi < lo:
                continue
            w = ld * big[m1]
            i1hi = dstar if hi > dstar else hi
            if i1hi >= lo:
                t1 += w * _range_sum(pref, q, r, lo, i1hi)
            lo2 = dstar + 1 if lo <= dstar else lo
            if lo2 > hi:
                continue
            if d_small:
                t2 += w * _range_sum(pref, q, r, lo2, hi)
                continue
            i3hi = m2max_i3 if hi > m2max_i3 else hi
            if i3hi >= lo2:
                t3 += w * _range_sum(pref, q, r, lo2, i3hi)
            lo4 = lo2 if lo2 > m2max_i3 else m2max_i3 + 1
            if lo4 > hi:
                continue
            if m1 <= thr_b:
                t4 += w * _range_sum(pref, q, r, lo4, hi)
            else:
                unc += w * _range_sum(pref, q, r, lo4, hi)
    return t1, t2, t3, t4, unc


def je_accumulate(lam, ds_arr, e1_flag, inv_table, q, a, x, dstar, x0, j1_hi, j2_hi):
    """Edge/middle split of sum of lam[d] over pairs in the dyadic window.

    Pairs (d, m) with x/2 <= d*m <= x, d > dstar, d*m = a (mod q).  Edge
    buckets take d <= x0, then m <= x0; the remaining middle mass is
    classified by ds_arr[d] against [1, j1_hi), [j1_hi, j2_hi), [j2_hi, oo),
    with the first interval split by e1_flag[d].
    """
    lam_l = lam.tolist()
    ds_l = ds_arr.tolist()
    e1 = e1_flag.tolist()
    inv = inv_table.tolist()
    edge_d = edge_m = j1e1 = j1e2 = j2 = j3 = mid = total = 0.0
    m_x0 = int(math.floor(x0))
    for d in range(dstar + 1, x + 1):
        ld = lam_l[d]
        if ld == 0:
            continue
        iv = inv[d % q]
        if iv == 0:
            continue
        r = (a * iv) % q
        hi = x // d
        lo = -(-x // (2 * d))
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
        ds = ds_l[d]
        if ds < j1_hi:
            if e1[d]:
                j1e1 += w
            else:
                j1e2 += w
        elif ds < j2_hi:
            j2 += w
        else:
            j3 += w
    return edge_d, edge_m, j1e1, j1e2, j2, j3, mid, total


def kloosterman_sum(primes, q, a, inv_table):
    """(S, n_terms): S = sum of e(a * inv(p) / q) over primes coprime to q.

    Compensated (Kahan) accumulation of the real and imaginary parts.
    """
    inv = inv_table.tolist()
    tw = 2.0 * math.pi / q
    sr = si = cr = ci = 0.0
    n = 0
    for p in primes.tolist():
        k = inv[p % q]
        if k == 0:
            continue
        ang = tw * ((a * k) % q)
        y = math.cos(ang) - cr
        t = sr + y
        cr = (t - sr) - y
        sr = t
        y = math.sin(ang) - ci
        t = si + y
        ci = (t - si) - y
        si = t
        n += 1
    return complex(sr, si), n


def kloosterman_max_over_units(primes, q, inv_table):
    """(best_a, max |S(q, a)|) over units a mod q, via an inverse histogram.

    |S(q, a)| = |S(q, q - a)| (conjugation), so only a <= q/2 is scanned.
    """
    res = primes % q
    invs = inv_table[res]
    invs = invs[invs != 0]
    if len(invs) == 0:
        return 1, 0.0
    hist = np.bincount(invs, minlength=q)
    ks = np.nonzero(hist)[0]
    roots = np.exp(2j * np.pi * np.arange(q) / q)
    units = np.nonzero(inv_table)[0]
    units = units[units <= q // 2]
    idx = (units[:, None] * ks[None, :]) % q
    vals = (roots[idx] * hist[ks][None, :]).sum(axis=1)
    mags = np.abs(vals)
    j = int(np.argmax(mags))
    return int(units[j]), float(mags[j])
