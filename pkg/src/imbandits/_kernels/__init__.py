"""Kernel backend selection.

Set ``IMBANDITS_PURE_PYTHON=1`` to force the pure-Python kernels; otherwise
the compiled extension is used when available.  Both backends consume random
draws identically and return bit-identical results, so results do not depend
on which one is active (only speed does).
"""

import os

from . import _fallback

BACKEND = "python"
_impl = _fallback

if os.environ.get("IMBANDITS_PURE_PYTHON") != "1":
    try:
        from . import _native as _impl  # type: ignore[no-redef]

        BACKEND = "native"
    except ImportError:
        pass

COIN_BLOCK = _fallback.COIN_BLOCK
simulate_cascade = _impl.simulate_cascade
sample_rr_sets = _impl.sample_rr_sets
