"""Hot kernels: the compiled extension when it was built, numpy otherwise.

Set ``POPRE_PURE_PYTHON=1`` to force the numpy fallback.
"""

import importlib
import os

from . import _fallback

OPTIMAL = _fallback.OPTIMAL
UNBOUNDED = _fallback.UNBOUNDED
ITERATION_LIMIT = _fallback.ITERATION_LIMIT

_core = None
if os.environ.get("POPRE_PURE_PYTHON", "") in ("", "0"):
    try:
        _core = importlib.import_module("._core", __name__)
    except ImportError:
        _core = None

backend = _core if _core is not None else _fallback
BACKEND = "compiled" if _core is not None else "python"

simplex_pivots = backend.simplex_pivots
pivot = backend.pivot
prefix_histograms = backend.prefix_histograms
sample_population = backend.sample_population
random_words = backend.random_words
prefix_masks = _fallback.prefix_masks

__all__ = [
    "BACKEND", "OPTIMAL", "UNBOUNDED", "ITERATION_LIMIT",
    "simplex_pivots", "pivot", "prefix_histograms", "sample_population",
    "random_words", "prefix_masks",
]
