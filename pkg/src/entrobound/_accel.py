"""Backend selection for the compiled kernels.

``ENTROBOUND_BACKEND`` picks the implementation of the hot loops:

* ``numba`` (default when numba imports) -- ``@njit`` kernels, parallel over
  the batch axis.
* ``numpy`` -- pure-numpy fallback, vectorised over the batch axis.

``ENTROBOUND_THREADS`` caps the numba thread pool.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

__all__ = ["BACKEND", "HAVE_NUMBA", "numba_jit", "thread_count"]

HAVE_NUMBA = numba is not None


def _resolve_backend():
    requested = os.environ.get("ENTROBOUND_BACKEND", "").strip().lower()
    if requested in ("", "auto"):
        return "numba" if HAVE_NUMBA else "numpy"
    if requested not in ("numba", "numpy"):
        raise ValueError(
            f"ENTROBOUND_BACKEND must be 'numba' or 'numpy', got {requested!r}")
    if requested == "numba" and not HAVE_NUMBA:
        raise ImportError("ENTROBOUND_BACKEND=numba but numba is not installed")
    return requested


def thread_count():
    """Thread cap from ``ENTROBOUND_THREADS``; ``None`` means library default."""
    raw = os.environ.get("ENTROBOUND_THREADS")
    if raw is None or raw.strip() == "":
        return None
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"ENTROBOUND_THREADS must be a positive integer, got {raw!r}")
    if n < 1:
        raise ValueError(f"ENTROBOUND_THREADS must be a positive integer, got {raw!r}")
    return n


def numba_jit(f=None, **options):
    """``numba.njit`` when numba is present, identity otherwise."""
    if numba is None:
        return f if f is not None else (lambda g: g)
    options.setdefault("cache", True)
    if f is None:
        return lambda g: numba.njit(g, **options)
    return numba.njit(f, **options)


BACKEND = _resolve_backend()

if HAVE_NUMBA:
    # tbb first in numba's default order; the system TBB is often too old and warns
    if "NUMBA_THREADING_LAYER_PRIORITY" not in os.environ:
        numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
    _cap = thread_count()
    if _cap is not None:
        numba.set_num_threads(min(_cap, numba.config.NUMBA_NUM_THREADS))
