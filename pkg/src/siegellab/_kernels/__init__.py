"""Kernel backend selection: compiled extension first, numpy fallback.

Set ``SIEGELLAB_KERNELS=python`` (or ``cython``) to force a backend.
"""

import functools
import os

import numpy as np

from . import _pykernels

_choice = os.environ.get("SIEGELLAB_KERNELS", "auto").lower()

if _choice == "python":
    _impl = _pykernels
elif _choice == "cython":
    from . import _ckernels as _impl
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = _impl.BACKEND_NAME

build_spf = _impl.build_spf
primes_from_spf = _impl.primes_from_spf
multiplicative_tables = _impl.multiplicative_tables
sign_class_arrays = _impl.sign_class_arrays
gpf_table = _impl.gpf_table
convolve_int = _impl.convolve_int
convolve_float = _impl.convolve_float
psi_split_sums = _impl.psi_split_sums
window_pair_sum = _impl.window_pair_sum
window_pair_count_sum = _impl.window_pair_count_sum
t_sums_accumulate = _impl.t_sums_accumulate
je_accumulate = _impl.je_accumulate
kloosterman_sum = _impl.kloosterman_sum
kloosterman_max_over_units = _impl.kloosterman_max_over_units


def progression_prefix(arr, q):
    """Per-residue running sums: pref[n] = arr[n] + pref[n - q].

    A range sum over an arithmetic progression then needs two lookups.
    """
    pref = np.asarray(arr, dtype=np.float64).copy()
    n = len(pref)
    for r in range(min(q, n)):
        np.cumsum(pref[r::q], out=pref[r::q])
    return pref


@functools.lru_cache(maxsize=128)
def inverse_table(q):
    """inv_table[k] = inverse of k mod q, or 0 when gcd(k, q) > 1."""
    if q < 2:
        raise ValueError("modulus must be >= 2")
    table = np.zeros(q, dtype=np.int64)
    for k in range(1, q):
        try:
            table[k] = pow(k, -1, q)
        except ValueError:
            pass
    table.flags.writeable = False
    return table
