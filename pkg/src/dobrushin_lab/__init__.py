"""Learning under Dobrushin's condition: exact MRF influences, Gibbs coupling,
complexity estimation, sample compression and lemma checks."""

__version__ = "0.1.0"

from . import complexity, gibbs, learn, mrf, verify  # noqa: E402
from .kernels import BACKEND  # noqa: E402

__all__ = ["__version__", "BACKEND", "complexity", "gibbs", "learn", "mrf", "verify"]
