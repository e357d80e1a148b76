"""Backend selection for the hot bitset kernels.

The compiled extension is used when importable; setting ``INDTURAN_BACKEND=python``
forces the pure-Python fallback.  Both expose ``pair_count``, ``counts_into``,
``best_t_pair`` and ``max_clique`` with identical semantics.
"""

import os

from . import _pykernels

_requested = os.environ.get("INDTURAN_BACKEND", "auto").lower()

if _requested == "python":
    _backend = _pykernels
else:
    try:
        from . import _ckernels as _backend
    except ImportError:
        if _requested == "cython":
            raise
        _backend = _pykernels

BACKEND = _backend.NAME

pair_count = _backend.pair_count
counts_into = _backend.counts_into
best_t_pair = _backend.best_t_pair
max_clique = _backend.max_clique


def backends():
    """All importable backends, by name."""
    found = {"python": _pykernels}
    try:
        from . import _ckernels

        found["cython"] = _ckernels
    except ImportError:
        pass
    return found
