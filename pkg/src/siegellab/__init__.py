"""siegellab: exact computation and verification of real-character
convolution identities, prime-progression sums, and Kloosterman-type
sums over primes."""

from ._kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]
