"""Exact-arithmetic toolkit for the Lagrangian Grassmannian of 3-planes in
a symplectic 6-space: twisted cubics through point triples, the abelian
fibration over P^3, the dual quartic hypersurface, Segre threefolds from
conjugate line triples, and the chain-based group law on plane-quartic
marks.
"""

from .fields import QQ, FieldScalar, prime_field
from .rng import derive_seed, spawn

DEFAULT_PRIME = 10007

__version__ = "0.1.0"

__all__ = [
    "QQ",
    "FieldScalar",
    "prime_field",
    "derive_seed",
    "spawn",
    "DEFAULT_PRIME",
    "__version__",
]
