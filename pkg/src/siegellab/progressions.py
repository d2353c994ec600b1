"""Chebyshev functions, progression sums, the main-term comparison, the
two-part convolution split, tilted window sums, and upper-bound ratio
reports of Brun-Titchmarsh type."""

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import _kernels
from .character import Discriminant
from .errors import RangeError

SPLIT_TOL = 1e-6


def euler_phi(q):
    """Euler totient by trial-division factorization."""
    if q < 1:
        raise RangeError("q must be positive")
    phi = 1
    n = q
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            f = p - 1
            while n % p == 0:
                n //= p
                f *= p
            phi *= f
        p += 1
    if n > 1:
        phi *= n - 1
    return phi


@dataclass(frozen=True)
class ProgressionQuery:
    """A progression target: count weights over n <= x with n = a (mod q)."""

    x: int
    q: int
    a: int
    disc: Discriminant = None

    def __post_init__(self):
        if self.x < 1:
            raise RangeError("x must be positive")
        if self.q < 2:
            raise RangeError("q must be >= 2")
        if math.gcd(self.a, self.q) != 1:
            raise RangeError(f"gcd(a, q) != 1 for a={self.a}, q={self.q}")


def psi(x, tables):
    """Chebyshev psi(x) = sum of the von Mangoldt weights up to x."""
    if x > tables.limit:
        raise RangeError("x exceeds the table limit")
    if x < 1:
        return 0.0
    return float(tables.biglambda[1 : x + 1].sum())


def psi_progression(query, tables):
    """psi(x, q, a): exact restricted sum over n = a (mod q)."""
    x, q, a = query.x, query.q, query.a
    if x > tables.limit:
        raise RangeError("x exceeds the table limit")
    first = a % q
    if first == 0:
        first = q
    return float(tables.biglambda[first : x + 1 : q].sum())


def psi_progression_all_residues(x, q, tables):
    """Array of psi(x, q, r) over all residues r = 0..q-1 (units or not);
    the entries partition psi(x)."""
    if x > tables.limit:
        raise RangeError("x exceeds the table limit")
    ns = np.arange(1, x + 1)
    return np.bincount(ns % q, weights=tables.biglambda[1 : x + 1], minlength=q)


@dataclass
class DeviationReport:
    """Comparison of psi(x,q,a) against the character-twisted main term."""

    psi_all: float
    psi_prog: float
    phi_q: int
    chi_term: int
    main_term: float
    normalized_error: float
    comparator: float
    beta: float
    constraint_logd_ok: bool
    constraint_logl_ok: bool

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def main_term_deviation(query, tables, chi, beta=0.5):
    """Report |psi_prog * phi(q) / psi(x) - (1 - chi(a D/(q,D)))| together
    with the comparator L(1,chi) log^(9-8 beta) x.  Never asserted: the
    underlying statement is asymptotic."""
    if not 0 < beta < 1:
        raise RangeError("beta must lie in (0, 1)")
    x, q, a = query.x, query.q, query.a
    d = chi.disc.modulus_D
    psi_all = psi(x, tables)
    if psi_all == 0.0:
        raise RangeError("psi(x) = 0; need x >= 2")
    psi_prog = psi_progression(query, tables)
    phi_q = euler_phi(q)
    # the character argument a*D/(q,D) is an integer; reduce it mod D
    chi_term = chi.chi(a * (d // math.gcd(q, d)))
    main_term = psi_all / phi_q * (1 - chi_term)
    normalized_error = abs(psi_prog * phi_q / psi_all - (1 - chi_term))
    logx = math.log(x)
    comparator = chi.l_one * logx ** (9 - 8 * beta)
    return DeviationReport(
        psi_all=psi_all,
        psi_prog=psi_prog,
        phi_q=phi_q,
        chi_term=chi_term,
        main_term=main_term,
        normalized_error=normalized_error,
        comparator=comparator,
        beta=beta,
        constraint_logd_ok=bool(logx ** (1 - beta) >= math.log(d)),
        constraint_logl_ok=bool(logx ** (beta / 2) >= abs(math.log(chi.l_one))),
    )


@dataclass
class PsiSplitRecord:
    psi_star: float
    psi_lower_star: float

    def to_dict(self):
        return asdict(self)


def psi_star_split(query, tables):
    """Split psi(x,q,a) = sum nu(d) lambda'(m) over dm <= x, dm = a (mod q)
    at d <= D* versus d > D*.  The two parts rebuild psi(x,q,a) exactly."""
    x, q = query.x, query.q
    if x > tables.limit:
        raise RangeError("x exceeds the table limit")
    dstar = tables.disc.dstar
    inv = _kernels.inverse_table(q)
    pref = _kernels.progression_prefix(tables.lambda_prime[: x + 1], q)
    star, low = _kernels.psi_split_sums(
        tables.nu[: x + 1], pref, inv, q, query.a % q, x, dstar
    )
    return PsiSplitRecord(psi_star=star, psi_lower_star=low)


def tilt_exponent(l_one, x):
    """The window tilt -(log L(1,chi) + log log x)/log x; nonnegative
    exactly when L(1,chi) < 1/log x."""
    if x < 3:
        raise RangeError("x must be >= 3")
    return -(math.log(l_one) + math.log(math.log(x))) / math.log(x)


def tilted_progression_sum(f, x, q, a, sigma):
    """sum of f(n) n^(-sigma) over x/2 < n <= x, n = a (mod q).

    sigma = 0 reduces to the plain restricted window sum.
    """
    if x < 1 or x >= len(f):
        raise RangeError("x outside the table range")
    if q < 2:
        raise RangeError("q must be >= 2")
    start = x // 2 + 1
    n0 = start + (a - start) % q
    if n0 > x:
        return 0.0
    ns = np.arange(n0, x + 1, q)
    f = np.asarray(f, dtype=np.float64)
    return float(np.sum(f[ns] * ns.astype(np.float64) ** (-sigma)))


@dataclass
class BtCountRecord:
    count: int
    ratio: float

    def to_dict(self):
        return asdict(self)


def bt_rough_prime_count(x, q, a, chi, sieve):
    """Count primes p <= x with p = a (mod q) and chi(p) = 1 (all primes in
    the progression when chi is None); ratio = count*q/(x*L(1,chi)).

    The bound shape is a conditional Brun-Titchmarsh statement; the ratio
    is reported, never asserted.
    """
    if math.gcd(a, q) != 1:
        raise RangeError(f"gcd(a, q) != 1 for a={a}, q={q}")
    if x > sieve.limit:
        raise RangeError("x exceeds the sieve limit")
    primes = sieve.primes()
    primes = primes[primes <= x]
    mask = primes % q == a % q
    if chi is not None:
        d = chi.disc.modulus_D
        vals = chi.values.astype(np.int64)[primes % d]
        mask &= vals == 1
        count = int(np.count_nonzero(mask))
        ratio = count * q / (x * chi.l_one)
    else:
        count = int(np.count_nonzero(mask))
        ratio = count * q / x
    return BtCountRecord(count=count, ratio=ratio)


@dataclass
class ShiuRatioRecord:
    lhs: float
    rhs: float
    ratio: float

    def to_dict(self):
        return asdict(self)


SHIU_FUNCTIONS = ("lambda", "lambda_sq_tau", "tau_k_power")


def shiu_ratio(f_name, x, y, q, b, tables, k=2, t=1, alpha1=0.25, alpha2=0.25):
    """Exact window sum of a nonnegative multiplicative function over
    x-y < n <= x, n = b (mod q), against the upper-bound shape with
    implicit constant one.

    tau_k_power uses (y/q)(phi(q)/q log x)^(k^t - 1); the other two use
    (y/(q log x)) exp(sum of f(p)/p over p <= x).
    """
    if f_name not in SHIU_FUNCTIONS:
        raise RangeError(f"unknown function {f_name!r}")
    if math.gcd(b, q) != 1:
        raise RangeError(f"gcd(b, q) != 1 for b={b}, q={q}")
    if x > tables.limit:
        raise RangeError("x exceeds the table limit")
    if not q < y ** (1 - alpha1):
        raise RangeError(f"need q < y^(1-alpha1) = {y ** (1 - alpha1):.3f}")
    if not (x ** alpha2 < y <= x):
        raise RangeError(f"need x^alpha2 < y <= x, got y={y}")

    if f_name == "lambda":
        f = tables.lambda_.astype(np.float64)
    elif f_name == "lambda_sq_tau":
        f = (tables.lambda_ ** 2 * tables.tau).astype(np.float64)
    else:
        if k == 2:
            base = tables.tau
        elif k == 3:
            base = tables.tau3
        else:
            raise RangeError("tau_k_power supports k in {2, 3}")
        f = base.astype(np.float64) ** t

    lo = x - y
    n0 = lo + 1 + (b - (lo + 1)) % q
    ns = np.arange(n0, x + 1, q) if n0 <= x else np.zeros(0, dtype=np.int64)
    lhs = float(f[ns].sum()) if len(ns) else 0.0

    logx = math.log(x)
    if f_name == "tau_k_power":
        rhs = (y / q) * (euler_phi(q) / q * logx) ** (k ** t - 1)
    else:
        primes = tables.sieve.primes()
        primes = primes[primes <= x]
        rhs = y / (q * logx) * math.exp(float(np.sum(f[primes] / primes)))
    ratio = lhs / rhs if rhs else math.inf
    return ShiuRatioRecord(lhs=lhs, rhs=rhs, ratio=ratio)
