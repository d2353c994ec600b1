"""Exponential-sum machinery: modular inverses, Kloosterman-type sums over
primes in a dyadic window, the averaged max-over-residues variant, and the
closed-form geometric interval sum."""

import math
import random
from dataclasses import asdict, dataclass

import numpy as np

from . import _kernels
from .errors import BudgetExceededError, NonInvertibleError, RangeError

MAX_AVG_OP_BUDGET = 1_000_000_000


def mod_inverse(a, q):
    """b with a*b = 1 (mod q) and 0 < b < q, by extended gcd."""
    if q < 2:
        raise RangeError("modulus must be >= 2")
    try:
        return pow(a, -1, q)
    except ValueError:
        raise NonInvertibleError(f"{a} is not invertible mod {q}") from None


def _window_primes(x, sieve):
    """Primes in [x/2, x]."""
    if x > sieve.limit:
        raise RangeError("x exceeds the sieve limit")
    primes = sieve.primes()
    lo = np.searchsorted(primes, (x + 1) // 2)
    hi = np.searchsorted(primes, x, side="right")
    return primes[lo:hi]


def in_kloosterman_theorem_range(x, q):
    """Whether x^(3/4) <= q <= x^(4/3), the regime of the cited bounds."""
    return x ** 0.75 <= q <= x ** (4 / 3)


@dataclass
class ExpSumReport:
    x: int
    q: int
    a: int
    s_value: complex
    abs_s: float
    trivial_bound: int
    fs_ratio: float
    in_theorem_range: bool

    def to_dict(self):
        d = asdict(self)
        d["s_value"] = [self.s_value.real, self.s_value.imag]
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        re, im = d["s_value"]
        d["s_value"] = complex(re, im)
        return cls(**d)


def kloosterman_primes(x, q, a, sieve):
    """S(x, q, a) = sum of e(a * inv(p) / q) over primes p in [x/2, x]
    coprime to q; |S| against q^(15/16) is reported, never asserted.

    Accumulation is compensated double precision: the roundoff budget is
    about (window size) * 2^-50, far below the 1e-6 reporting scale.
    """
    if q < 2:
        raise RangeError("q must be >= 2")
    if math.gcd(a, q) != 1:
        raise NonInvertibleError(f"a={a} is not a unit mod q={q}")
    pw = _window_primes(x, sieve)
    s, n_terms = _kernels.kloosterman_sum(pw, q, a % q, _kernels.inverse_table(q))
    return ExpSumReport(
        x=x,
        q=q,
        a=a,
        s_value=s,
        abs_s=abs(s),
        trivial_bound=n_terms,
        fs_ratio=abs(s) / q ** (15 / 16),
        in_theorem_range=in_kloosterman_theorem_range(x, q),
    )


@dataclass
class MaxAvgReport:
    x: int
    big_q: int
    per_q_max: list  # (q, best_a, |S|) triples, q ascending
    total: float
    irving_ratio: float
    in_theorem_range: bool
    sampled_units: int  # 0 = exact maximization over every unit

    def to_dict(self):
        d = asdict(self)
        d["per_q_max"] = [list(t) for t in self.per_q_max]
        return d


def kloosterman_max_avg(x, big_q, sieve, sample_a=None, seed=0):
    """max over units a of |S(x, q, a)| for every q in [Q, 2Q], summed and
    held against Q^(19/10).

    The exact scan costs roughly sum of phi(q) * min(q, primes) operations;
    above the budget an explicit error asks for `sample_a`, which switches
    to a seeded subsample of units per modulus.
    """
    if big_q < 1:
        raise RangeError("Q must be positive")
    pw = _window_primes(x, sieve)
    qs = list(range(max(2, big_q), 2 * big_q + 1))
    est = sum(q * min(q, len(pw)) for q in qs)
    if sample_a is None and est > MAX_AVG_OP_BUDGET:
        raise BudgetExceededError(
            f"exact unit scan is ~{est:.2e} operations; pass sample_a=N "
            "to subsample units per modulus"
        )
    rng = random.Random(seed)
    per_q = []
    total = 0.0
    for q in qs:
        inv = _kernels.inverse_table(q)
        if sample_a is None:
            best_a, best = _kernels.kloosterman_max_over_units(pw, q, inv)
        else:
            units = [u for u in range(1, q) if math.gcd(u, q) == 1]
            chosen = units if len(units) <= sample_a else rng.sample(units, sample_a)
            best_a, best = 1, -1.0
            for u in sorted(chosen):
                s, _ = _kernels.kloosterman_sum(pw, q, u, inv)
                if abs(s) > best:
                    best_a, best = u, abs(s)
        per_q.append((q, best_a, best))
        total += best
    return MaxAvgReport(
        x=x,
        big_q=big_q,
        per_q_max=per_q,
        total=total,
        irving_ratio=total / big_q ** (19 / 10),
        in_theorem_range=in_kloosterman_theorem_range(x, big_q),
        sampled_units=0 if sample_a is None else sample_a,
    )


def _e_q(t, q):
    # exp(2 pi i t / q) with the angle reduced exactly in integers
    ang = 2.0 * math.pi * (t % q) / q
    return complex(math.cos(ang), math.sin(ang))


def geometric_interval_sum(interval, r, q):
    """Closed-form sum of e(m r / q) over integers m in [lo, hi].

    The magnitude never exceeds min(length, 1 / (2 ||r/q||)), where ||.||
    is the distance to the nearest integer; that bound is asserted.
    """
    if q < 2:
        raise RangeError("q must be >= 2")
    lo, hi = interval
    if hi < lo:
        raise RangeError("empty interval")
    length = hi - lo + 1
    if r % q == 0:
        return complex(length, 0.0)
    w_num = _e_q(r * length, q) - 1.0
    w_den = _e_q(r, q) - 1.0
    s = _e_q(r * lo, q) * w_num / w_den
    dist = min(r % q, q - r % q) / q
    assert abs(s) <= min(length, 1.0 / (2.0 * dist)) + 1e-9
    return s
