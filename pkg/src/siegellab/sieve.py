"""Factorization sieve and dense tables of the multiplicative machinery.

Tables built here (all indexed by n over [0, limit]):

* mu            Mobius function
* tau, tau3     divisor-counting functions (1*1 and 1*1*1)
* lambda_       chi*1, from the per-prime-power Euler factors; >= 0
* nu            mu*(mu.chi), by multiplicative extension over prime powers
* biglambda     von Mangoldt, natural-log scale
* lambda_prime  chi*log, by a divisor pass
"""

import os
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .character import Discriminant
from .errors import BudgetExceededError, RangeError

DEFAULT_MEM_BUDGET = 2_000_000_000


def _mem_budget():
    env = os.environ.get("SIEGELLAB_MEM_BUDGET")
    return int(env) if env else DEFAULT_MEM_BUDGET


def _charge(nbytes, what):
    if nbytes > _mem_budget():
        raise BudgetExceededError(
            f"{what} needs ~{nbytes} bytes, over the budget {_mem_budget()} "
            "(set SIEGELLAB_MEM_BUDGET to raise it)"
        )


@dataclass(eq=False)
class SpfSieve:
    """Smallest-prime-factor array over [1, limit]; spf[1] = 1."""

    limit: int
    spf: np.ndarray
    _gpf: np.ndarray = field(default=None, repr=False)
    _primes: np.ndarray = field(default=None, repr=False)

    def primes(self):
        if self._primes is None:
            self._primes = _kernels.primes_from_spf(self.spf)
        return self._primes

    def gpf(self):
        """Greatest-prime-factor array (gpf[1] = 1), built on first use."""
        if self._gpf is None:
            self._gpf = _kernels.gpf_table(self.spf)
        return self._gpf


def build_spf(limit):
    if limit < 2:
        raise RangeError("limit must be >= 2")
    _charge(4 * (limit + 1), "spf sieve")
    spf = _kernels.build_spf(limit)
    spf.flags.writeable = False
    return SpfSieve(limit, spf)


def factorize(n, sieve):
    """[(prime, exponent), ...] with strictly increasing primes."""
    if not 1 <= n <= sieve.limit:
        raise RangeError(f"n={n} outside [1, {sieve.limit}]")
    spf = sieve.spf
    out = []
    while n > 1:
        p = int(spf[n])
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out.append((p, e))
    return out


@dataclass(frozen=True)
class SignClassSplit:
    """n = d1 * dm1 * d0 with prime factors of chi-sign +1, -1, 0."""

    d1: int
    dm1: int
    d0: int


def sign_class_split(n, chi, sieve):
    d1 = dm1 = d0 = 1
    for p, e in factorize(n, sieve):
        c = chi.chi(p)
        if c > 0:
            d1 *= p ** e
        elif c < 0:
            dm1 *= p ** e
        else:
            d0 *= p ** e
    return SignClassSplit(d1, dm1, d0)


@dataclass(eq=False)
class FunTables:
    """Dense per-n tables for a fixed character; immutable after build."""

    limit: int
    disc: Discriminant
    mu: np.ndarray
    tau: np.ndarray
    tau3: np.ndarray
    lambda_: np.ndarray
    nu: np.ndarray
    biglambda: np.ndarray
    lambda_prime: np.ndarray
    sieve: SpfSieve
    chi_n: np.ndarray
    _sign_arrays: tuple = field(default=None, repr=False)
    _ds: np.ndarray = field(default=None, repr=False)
    _prime_powers: np.ndarray = field(default=None, repr=False)

    def sign_arrays(self):
        """(d1, dm1, d0) arrays over [0, limit]."""
        if self._sign_arrays is None:
            self._sign_arrays = _kernels.sign_class_arrays(self.sieve.spf, self.chi_n)
        return self._sign_arrays

    def ds_array(self):
        """ds[n] = sqrt of the chi=-1 part when it is a perfect square, else -1."""
        if self._ds is None:
            dm1 = self.sign_arrays()[1]
            r = np.floor(np.sqrt(dm1.astype(np.float64))).astype(np.int64)
            # float sqrt can land one off for large squares
            r = np.where((r + 1) * (r + 1) <= dm1, r + 1, r)
            self._ds = np.where(r * r == dm1, r, -1)
        return self._ds

    def prime_powers(self):
        """Ascending prime powers <= limit (support of biglambda)."""
        if self._prime_powers is None:
            self._prime_powers = np.nonzero(self.biglambda > 0)[0].astype(np.int64)
        return self._prime_powers


def build_fun_tables(limit, chi, sieve=None):
    """Fill all seven tables for chi up to limit."""
    if limit < 2:
        raise RangeError("limit must be >= 2")
    _charge(76 * (limit + 1), "function tables")
    if sieve is None or sieve.limit < limit:
        sieve = build_spf(limit)
    spf = sieve.spf[: limit + 1] if sieve.limit > limit else sieve.spf
    spf = np.ascontiguousarray(spf)
    chi_n = chi.chi_array(limit)
    mu, lam, nu, biglam = _kernels.multiplicative_tables(spf, chi_n)
    ones = np.ones(limit + 1, dtype=np.int64)
    ones[0] = 0
    tau = _kernels.convolve_int(ones, ones)
    tau3 = _kernels.convolve_int(tau, ones)
    logs = np.zeros(limit + 1, dtype=np.float64)
    logs[1:] = np.log(np.arange(1, limit + 1, dtype=np.float64))
    lambda_prime = _kernels.convolve_float(chi_n.astype(np.float64), logs)
    for arr in (mu, lam, nu, biglam, tau, tau3, lambda_prime, chi_n):
        arr.flags.writeable = False
    base = sieve if sieve.limit == limit else SpfSieve(limit, spf)
    return FunTables(
        limit=limit,
        disc=chi.disc,
        mu=mu,
        tau=tau,
        tau3=tau3,
        lambda_=lam,
        nu=nu,
        biglambda=biglam,
        lambda_prime=lambda_prime,
        sieve=base,
        chi_n=chi_n,
    )
