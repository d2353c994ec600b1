"""Dirichlet convolution engine and the identity/inequality verifier.

Verifiable identities (names are the CLI identifiers):

* lambda_prime_eq   lambda' = lambda * Lambda
* biglambda_eq      Lambda = nu * lambda'
* nu_bound          |nu(n)| <= lambda(n)
* nu_conv_bound     |Lambda(n)| <= (lambda * lambda')(n)
* sandwich          |Lambda(n)| <= (lambda * Lambda * lambda)(n)
* lambda_pair       lambda(l) lambda(d) <= lambda(l d)^2
* lambda_chain      congruence-restricted chain
                    sum lambda(d)lambda(m) <= sum lambda(dm)^2 <= sum lambda(n)^2 tau(n)
* binary_divisor    equidistribution ratio for tau (report only)
* ternary_divisor   equidistribution ratio for tau3 (report only)
"""

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import _kernels
from .errors import RangeError
from .sieve import build_fun_tables

EQ_TOL = 1e-8

IDENTITY_NAMES = (
    "lambda_prime_eq",
    "biglambda_eq",
    "nu_bound",
    "nu_conv_bound",
    "sandwich",
    "lambda_pair",
    "lambda_chain",
    "binary_divisor",
    "ternary_divisor",
)

# deterministic (q, a) samples for the congruence-restricted checks
SAMPLE_QA = ((7, 3), (97, 5), (143, 12), (4, 3))


@dataclass
class IdentityReport:
    name: str
    limit: int
    max_abs_deviation: float
    worst_n: int
    violations: int

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def dirichlet_convolve(f, g):
    """(f*g)[n] = sum over d | n of f[d] g[n/d], arrays indexed 0..limit.

    Integer inputs convolve exactly in int64; anything else in float64.
    """
    f = np.asarray(f)
    g = np.asarray(g)
    if f.shape != g.shape or f.ndim != 1:
        raise ValueError("sequences must share the same 1-d shape")
    if np.issubdtype(f.dtype, np.integer) and np.issubdtype(g.dtype, np.integer):
        return _kernels.convolve_int(
            np.ascontiguousarray(f, dtype=np.int64),
            np.ascontiguousarray(g, dtype=np.int64),
        )
    return _kernels.convolve_float(
        np.ascontiguousarray(f, dtype=np.float64),
        np.ascontiguousarray(g, dtype=np.float64),
    )


def _eq_report(name, limit, lhs, rhs):
    diff = np.abs(lhs[1:] - rhs[1:])
    tol = EQ_TOL * (1.0 + np.maximum(np.abs(lhs[1:]), np.abs(rhs[1:])))
    worst = int(np.argmax(diff)) + 1
    return IdentityReport(
        name=name,
        limit=limit,
        max_abs_deviation=float(diff.max(initial=0.0)),
        worst_n=worst,
        violations=int(np.count_nonzero(diff > tol)),
    )


def _dominance_report(name, limit, lhs_abs, rhs, slack):
    margin = lhs_abs[1:] - rhs[1:]
    worst = int(np.argmax(margin)) + 1
    return IdentityReport(
        name=name,
        limit=limit,
        max_abs_deviation=float(max(margin.max(initial=0.0), 0.0)),
        worst_n=worst,
        violations=int(np.count_nonzero(margin > slack)),
    )


def _restricted_chain_sums(x, q, a, lam, tau):
    """The three chain sums over dm <= x, dm = a (mod q)."""
    s1 = 0
    s2 = 0
    inv = _kernels.inverse_table(q)
    for d in range(1, x + 1):
        iv = int(inv[d % q])
        if iv == 0:
            continue
        r = (a * iv) % q
        if r == 0:
            r = q
        for m in range(r, x // d + 1, q):
            n = d * m
            s1 += int(lam[d]) * int(lam[m])
            s2 += int(lam[n]) ** 2
    ns = np.arange(a if a >= 1 else q, x + 1, q)
    s3 = int(np.sum(lam[ns] ** 2 * tau[ns]))
    return s1, s2, s3


def verify_identity(name, limit, chi, tables=None):
    """Check one named identity up to `limit`; returns an IdentityReport.

    Equalities use tolerance 1e-8*(1+magnitude); integer inequalities are
    exact; the divisor-equidistribution names are ratio reports that never
    count violations.
    """
    if name not in IDENTITY_NAMES:
        raise RangeError(f"unknown identity {name!r}")
    if tables is None or tables.limit < limit:
        tables = build_fun_tables(limit, chi)
    lam = tables.lambda_[: limit + 1]
    nu = tables.nu[: limit + 1]
    big = tables.biglambda[: limit + 1]
    lamp = tables.lambda_prime[: limit + 1]
    lam_f = lam.astype(np.float64)

    if name == "lambda_prime_eq":
        rhs = _kernels.convolve_float(lam_f, big)
        return _eq_report(name, limit, lamp, rhs)
    if name == "biglambda_eq":
        rhs = _kernels.convolve_float(nu.astype(np.float64), lamp)
        return _eq_report(name, limit, big, rhs)
    if name == "nu_bound":
        return _dominance_report(name, limit, np.abs(nu).astype(np.float64), lam_f, 0.0)
    if name == "nu_conv_bound":
        rhs = _kernels.convolve_float(lam_f, lamp)
        return _dominance_report(name, limit, np.abs(big), rhs, EQ_TOL)
    if name == "sandwich":
        rhs = _kernels.convolve_float(_kernels.convolve_float(lam_f, big), lam_f)
        return _dominance_report(name, limit, np.abs(big), rhs, EQ_TOL)

    if name == "lambda_pair":
        bound = min(300, math.isqrt(limit))
        idx = np.arange(1, bound + 1)
        pair = np.outer(lam[idx], lam[idx]).astype(np.int64)
        sq = lam[np.outer(idx, idx)].astype(np.int64) ** 2
        margin = pair - sq
        viol = int(np.count_nonzero(margin > 0))
        worst_flat = int(np.argmax(margin))
        worst_n = int(idx[worst_flat // bound] * idx[worst_flat % bound])
        return IdentityReport(
            name=name,
            limit=limit,
            max_abs_deviation=float(max(margin.max(initial=0), 0)),
            worst_n=worst_n,
            violations=viol,
        )

    if name == "lambda_chain":
        x = min(limit, 2000)
        viol = 0
        dev = 0.0
        worst_q = SAMPLE_QA[0][0]
        for q, a in SAMPLE_QA:
            s1, s2, s3 = _restricted_chain_sums(x, q, a, lam, tables.tau[: limit + 1])
            if s1 > s2 or s2 > s3:
                viol += 1
            gap = float(max(s1 - s2, s2 - s3))
            if gap > dev:
                dev = gap
                worst_q = q
        return IdentityReport(name, x, max(dev, 0.0), worst_q, viol)

    # binary_divisor / ternary_divisor: ratio report, never asserted
    tab = tables.tau if name == "binary_divisor" else tables.tau3
    tab = tab[: limit + 1]
    dev = 0.0
    worst_q = SAMPLE_QA[0][0]
    ns = np.arange(limit + 1)
    for q, a in SAMPLE_QA:
        phi = int(np.count_nonzero(np.gcd(np.arange(q), q) == 1))
        in_class = int(tab[ns % q == a].sum())
        coprime = int(tab[np.gcd(ns, q) == 1].sum())
        ratio = in_class * phi / coprime if coprime else math.inf
        if abs(ratio - 1.0) > dev:
            dev = abs(ratio - 1.0)
            worst_q = q
    return IdentityReport(name, limit, dev, worst_q, 0)


@dataclass
class LambdaSumRecord:
    head_sum: int
    predicted: float
    normalized_gap: float
    tail_ratio: float

    def to_dict(self):
        return asdict(self)


def lambda_partial_sums(x, dstar, chi, tables=None):
    """Head sum of lambda up to x against x*L(1,chi), and the tail ratio
    of sum_{dstar < d <= x} lambda(d)/d to L(1,chi) log x.  Reported, not
    asserted."""
    if dstar < 1:
        raise RangeError("dstar must be >= 1")
    if x < 1:
        return LambdaSumRecord(0, 0.0, 0.0, 0.0)
    if tables is None or tables.limit < x:
        tables = build_fun_tables(x, chi)
    lam = tables.lambda_
    head = int(lam[1 : x + 1].sum())
    predicted = x * chi.l_one
    d = chi.disc.modulus_D
    gap = abs(head - predicted) / math.sqrt(d * x)
    ds = np.arange(dstar + 1, x + 1)
    tail = float(np.sum(lam[ds] / ds)) if len(ds) else 0.0
    tail_ratio = tail / (chi.l_one * math.log(x)) if x > 1 else 0.0
    return LambdaSumRecord(head, predicted, gap, tail_ratio)
