"""Combinatorial decomposition machinery: the four-way triple split with
its bucket sums, the edge/middle pair split refined by square parts, the
reciprocal-gcd sum, and brute-force smooth counting.

All bucket sums are exact enumerations; the asymptotic bounds they feed
in the literature are out of scope and never asserted here.
"""

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from . import _kernels
from .errors import BudgetExceededError, RangeError

TRIPLE_OP_BUDGET = 100_000_000
CONSERVATION_TOL = 1e-6


@dataclass(frozen=True)
class PartitionParams:
    """Exponent knobs: q = x^theta; alpha tilts interval endpoints; epsilon
    and beta mirror the asymptotic setup.

    The asymptotic regime wants alpha <= epsilon^2 with epsilon < 1/1000;
    at desk scale that pins alpha below anything usable, so alpha up to
    0.05 is accepted with a warning and the strict check is surfaced
    through paper_constraints_ok().
    """

    theta: float
    alpha: float
    epsilon: float = 0.001
    beta: float = 0.5

    def __post_init__(self):
        if not 0 < self.theta < 1:
            raise RangeError("theta must lie in (0, 1)")
        if not 0 < self.alpha <= 0.05:
            raise RangeError("alpha must lie in (0, 0.05]")
        if not 0 < self.epsilon <= 0.001:
            raise RangeError("epsilon must lie in (0, 0.001]")
        if not 0 < self.beta < 1:
            raise RangeError("beta must lie in (0, 1)")
        if self.alpha > self.epsilon ** 2:
            warnings.warn(
                "alpha exceeds epsilon^2: desk-scale relaxation in effect",
                stacklevel=2,
            )

    def paper_constraints_ok(self):
        return self.theta < 16 / 31 - self.epsilon and self.alpha <= self.epsilon ** 2

    def to_dict(self):
        return asdict(self)


@dataclass
class TSumReport:
    t1: float
    t2: float
    t3: float
    t4: float
    unclassified: float
    psi_lower_star_abs: float
    params: PartitionParams
    inequality_holds: bool

    def bucket_total(self):
        return self.t1 + self.t2 + self.t3 + self.t4 + self.unclassified

    def to_dict(self):
        d = asdict(self)
        d["params"] = self.params.to_dict()
        return d


def _triple_budget_guard(x):
    est = x * math.log(max(x, 3)) ** 2 / 2
    if est > TRIPLE_OP_BUDGET:
        raise BudgetExceededError(
            f"triple enumeration for x={x} is ~{est:.2e} operations, over "
            f"the {TRIPLE_OP_BUDGET:.0e} budget"
        )


def t_sums(x, q, a, chi, params, tables):
    """Bucket the triple sum of lambda(d) Lambda(m1) lambda(m2) over
    x/2 <= d m1 m2 <= x, d > D*, product = a (mod q), and compare the
    bucket total against |psi_lower_star| on the same window.

    Buckets: small m2; else small d; else small m2 (wider cut); else small
    m1; anything escaping is reported under `unclassified`.
    """
    if math.gcd(a, q) != 1:
        raise RangeError(f"gcd(a, q) != 1 for a={a}, q={q}")
    if x > tables.limit:
        raise RangeError("x exceeds the table limit")
    _triple_budget_guard(x)
    dstar = tables.disc.dstar
    thr_a = x ** (1 - params.theta - params.alpha)
    thr_b = x ** (2 * params.theta - 1 + 2 * params.alpha)
    inv = _kernels.inverse_table(q)
    a %= q
    lam = tables.lambda_[: x + 1]
    lam_pref = _kernels.progression_prefix(lam, q)
    pps = tables.prime_powers()
    pps = pps[pps <= x]
    t1, t2, t3, t4, unc = _kernels.t_sums_accumulate(
        lam, lam_pref, tables.biglambda[: x + 1], pps, inv, q, a, x, dstar, thr_a, thr_b
    )
    lamp_pref = _kernels.progression_prefix(tables.lambda_prime[: x + 1], q)
    psi_lower = _kernels.window_pair_sum(
        tables.nu[: x + 1], lamp_pref, inv, q, a, x, dstar
    )
    report = TSumReport(
        t1=t1,
        t2=t2,
        t3=t3,
        t4=t4,
        unclassified=unc,
        psi_lower_star_abs=abs(psi_lower),
        params=params,
        inequality_holds=bool(abs(psi_lower) <= t1 + t2 + t3 + t4 + CONSERVATION_TOL),
    )
    return report


def triple_total_pair_route(x, q, a, tables):
    """Independent route to the total triple mass: sum of
    lambda(d) * lambda'(m) over window pairs (lambda' = Lambda * lambda)."""
    inv = _kernels.inverse_table(q)
    lamp_pref = _kernels.progression_prefix(tables.lambda_prime[: x + 1], q)
    return _kernels.window_pair_sum(
        tables.lambda_[: x + 1], lamp_pref, inv, q, a % q, x, tables.disc.dstar
    )


@dataclass
class JESplitReport:
    edge_small_d: float
    edge_small_m: float
    j1_e1: float
    j1_e2: float
    j2: float
    j3: float
    middle_total: float
    window_total: float

    def bucket_total(self):
        return self.j1_e1 + self.j1_e2 + self.j2 + self.j3

    def to_dict(self):
        return asdict(self)


def j_e_split_sums(x, q, a, chi, params, tables):
    """Split sum of lambda(d) over window pairs (d, m) into the two edge
    sums (d, then m, below x/(2 q^(1+alpha))) and middle-range buckets
    classified by the square part d_s of d: d_s < x^alpha split by whether
    the chi=+1 part has a divisor in [D*, x^(1/3)]; then the two larger
    d_s intervals.
    """
    if math.gcd(a, q) != 1:
        raise RangeError(f"gcd(a, q) != 1 for a={a}, q={q}")
    if x > tables.limit:
        raise RangeError("x exceeds the table limit")
    dstar = tables.disc.dstar
    alpha = params.alpha
    x0 = x / (2 * q ** (1 + alpha))
    j1_hi = x ** alpha
    j2_hi = math.sqrt(x) / (math.sqrt(2) * q ** (0.5 + alpha / 2))
    inv = _kernels.inverse_table(q)
    a %= q

    d1 = tables.sign_arrays()[0]
    ds = tables.ds_array()
    t_hi = int(x ** (1 / 3) + 1e-9)
    has_div = np.zeros(x + 1, dtype=bool)
    for t in range(dstar, t_hi + 1):
        has_div[t::t] = True
    e1_flag = has_div[np.minimum(d1[: x + 1], x)].astype(np.uint8)

    edge_d, edge_m, j1e1, j1e2, j2, j3, mid, total = _kernels.je_accumulate(
        tables.lambda_[: x + 1],
        ds[: x + 1],
        e1_flag,
        inv,
        q,
        a,
        x,
        dstar,
        x0,
        j1_hi,
        j2_hi,
    )
    return JESplitReport(
        edge_small_d=edge_d,
        edge_small_m=edge_m,
        j1_e1=j1e1,
        j1_e2=j1e2,
        j2=j2,
        j3=j3,
        middle_total=mid,
        window_total=total,
    )


@dataclass
class ReciprocalGcdRecord:
    sum: float
    bound: float
    ratio: float

    def to_dict(self):
        return asdict(self)


def reciprocal_gcd_sum(q, alpha):
    """Exact sum of 1/r over 1 <= r <= q-1 with gcd(r, q) > q^(1/5-alpha),
    against the bound shape q^(-1/5+3 alpha)."""
    if q < 2:
        raise RangeError("q must be >= 2")
    r = np.arange(1, q, dtype=np.int64)
    g = np.gcd(r, q)
    thr = q ** (0.2 - alpha)
    s = float(np.sum(1.0 / r[g > thr]))
    bound = q ** (-0.2 + 3 * alpha)
    return ReciprocalGcdRecord(sum=s, bound=bound, ratio=s / bound)


def count_smooth(y, z, sieve):
    """Number of z-smooth n <= y (largest prime factor <= z; n = 1 counts)."""
    if y > sieve.limit:
        raise RangeError("y exceeds the sieve limit")
    if y < 1:
        return 0
    if z < 1:
        raise RangeError("z must be positive")
    return int(np.count_nonzero(sieve.gpf()[1 : y + 1] <= z))
