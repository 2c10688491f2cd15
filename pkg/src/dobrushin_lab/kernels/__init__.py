"""Hot sampling loops, compiled when the extension is available.

The backend is chosen once at import. Set ``DOBRUSHIN_LAB_PURE_PYTHON=1``
to force the pure-Python fallback. Both backends expose the same functions;
``load(name)`` returns a specific one for side-by-side comparisons.
"""

from __future__ import annotations

import importlib
import os
from types import ModuleType

from . import _fallback

_NAMES = (
    "tilted_inverse",
    "site_conditional",
    "maximal_coupled_draw",
    "discrete_gibbs_steps",
    "discrete_coupled_runs",
    "theta_chain_steps",
    "toeplitz_fields",
)


def load(name: str) -> ModuleType:
    """Return the ``"compiled"`` or ``"python"`` backend module."""
    if name == "python":
        return _fallback
    if name == "compiled":
        return importlib.import_module("dobrushin_lab.kernels._core")
    raise ValueError(f"unknown kernel backend {name!r}")


def _select() -> tuple[str, ModuleType]:
    if os.environ.get("DOBRUSHIN_LAB_PURE_PYTHON", "") not in ("", "0"):
        return "python", _fallback
    try:
        return "compiled", load("compiled")
    except ImportError:
        return "python", _fallback


BACKEND, _impl = _select()

tilted_inverse = _impl.tilted_inverse
site_conditional = _impl.site_conditional
maximal_coupled_draw = _impl.maximal_coupled_draw
discrete_gibbs_steps = _impl.discrete_gibbs_steps
discrete_coupled_runs = _impl.discrete_coupled_runs
theta_chain_steps = _impl.theta_chain_steps
toeplitz_fields = _impl.toeplitz_fields

__all__ = ["BACKEND", "load", *_NAMES]
