"""Real primitive Dirichlet characters via Kronecker symbols.

A character is identified by a fundamental discriminant delta and realized
as one period of Kronecker-symbol values, together with a truncated value
of L(1, chi) and a rigorous tail bound.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NonFundamentalDiscriminantError, RangeError


def _squarefree(n):
    if n % 4 == 0:
        return False
    p = 3
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 2
    return True


def is_fundamental_discriminant(delta):
    """True iff delta is a fundamental discriminant other than 1."""
    if delta == 0 or delta == 1:
        return False
    if delta % 4 == 1:
        return _squarefree(abs(delta))
    if delta % 4 == 0:
        m = delta // 4
        return m % 4 in (2, 3) and _squarefree(abs(m))
    return False


def kronecker(delta, n):
    """Kronecker symbol (delta | n) for a fundamental discriminant delta.

    Completely multiplicative in n with period dividing |delta|; zero
    exactly when gcd(n, |delta|) > 1.
    """
    if not is_fundamental_discriminant(delta):
        raise NonFundamentalDiscriminantError(
            f"{delta} is not a fundamental discriminant"
        )
    if n < 0:
        raise RangeError("n must be nonnegative")
    if n == 0:
        return 0
    result = 1
    while n % 2 == 0:
        n //= 2
        if delta % 2 == 0:
            return 0
        if delta % 8 in (3, 5):
            result = -result
    # n is now odd; reduce to a Jacobi symbol (delta mod n | n)
    a = delta % n
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


@dataclass(frozen=True)
class Discriminant:
    """A fundamental discriminant; D = |delta| and dstar = D**2."""

    delta: int

    def __post_init__(self):
        if not is_fundamental_discriminant(self.delta):
            raise NonFundamentalDiscriminantError(
                f"{self.delta} is not a fundamental discriminant"
            )

    @property
    def modulus_D(self):
        return abs(self.delta)

    @property
    def dstar(self):
        return self.modulus_D ** 2


@dataclass(frozen=True, eq=False)
class CharacterTable:
    """One period of chi plus L(1, chi) with its tail bound.

    values[r] = chi(r) for residues r = 0..D-1; immutable after build.
    """

    disc: Discriminant
    values: np.ndarray
    l_one: float
    l_one_error: float

    def chi(self, n):
        """chi(n) in {-1, 0, 1}."""
        return int(self.values[n % self.disc.modulus_D])

    def chi_array(self, limit):
        """chi(n) for n = 0..limit as an int64 array."""
        d = self.disc.modulus_D
        return self.values.astype(np.int64)[np.arange(limit + 1) % d]


def build_character_table(delta, tail_cutoff=100_000):
    """Build the period table and the truncated L(1, chi).

    l_one sums chi(n)/n for n <= tail_cutoff; the dropped tail is bounded
    by D / tail_cutoff (Abel summation; partial sums of chi over any
    interval are below D because full-period sums vanish).
    """
    disc = Discriminant(delta)
    d = disc.modulus_D
    if tail_cutoff < d:
        raise RangeError("tail_cutoff must be at least |delta|")
    values = np.array([kronecker(delta, r) for r in range(d)], dtype=np.int8)
    values.flags.writeable = False
    n = np.arange(1, tail_cutoff + 1)
    l_one = float(np.sum(values[n % d].astype(np.float64) / n))
    return CharacterTable(disc, values, l_one, d / tail_cutoff)


def hunt_small_l_one(max_abs_delta, top_k, tail_cutoff=None):
    """Scan fundamental discriminants |delta| <= max_abs_delta for the
    top_k smallest L(1, chi); returns (delta, l_one, l_one_error) triples
    sorted ascending by l_one."""
    if top_k < 1:
        raise RangeError("top_k must be positive")
    found = []
    for ad in range(2, max_abs_delta + 1):
        for delta in (ad, -ad):
            if not is_fundamental_discriminant(delta):
                continue
            cutoff = tail_cutoff if tail_cutoff is not None else max(10_000, 200 * ad)
            tab = build_character_table(delta, max(cutoff, ad))
            found.append((delta, tab.l_one, tab.l_one_error))
    found.sort(key=lambda t: (t[1], abs(t[0])))
    return found[:top_k]
