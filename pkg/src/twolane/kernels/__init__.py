"""Hashing kernels with a compiled fast path.

The compiled extension (`twolane.kernels._fast`) is preferred when it
imported cleanly; `TWOLANE_PURE_KERNELS=1` forces the pure-Python fallback.
Both expose the same functions and produce identical results.

`benchmarks/bench_kernels.py` compares the two backends.
"""

import os

from . import pure

if os.environ.get("TWOLANE_PURE_KERNELS") == "1":
    _impl = pure
else:
    try:
        from . import _fast as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = pure

fnv1a64 = _impl.fnv1a64
trigram_counts = _impl.trigram_counts


def backend_name() -> str:
    """Name of the active kernel backend ("cython" or "pure")."""
    return _impl.BACKEND
