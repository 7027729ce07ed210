"""Hot per-pixel kernels.

Two interchangeable implementations exist: numba-compiled loops and
vectorised numpy.  ``DPIS_BACKEND=numpy`` forces the numpy path,
``DPIS_BACKEND=numba`` requires numba, and the default (``auto``) uses numba
when it can be imported.
"""
import os

from . import _numpy

BACKEND_ENV = "DPIS_BACKEND"

_choice = os.environ.get(BACKEND_ENV, "auto").strip().lower()
if _choice not in ("auto", "numba", "numpy"):
    raise ImportError(f"{BACKEND_ENV} must be auto, numba or numpy; got {_choice!r}")

_impl = _numpy
BACKEND = "numpy"
if _choice != "numpy":
    try:
        from . import _numba

        _impl = _numba
        BACKEND = "numba"
    except ImportError:
        if _choice == "numba":
            raise

plan_pixels = _impl.plan_pixels
embed_bits = _impl.embed_bits
extract_bits = _impl.extract_bits
extract_batch = _impl.extract_batch


def available_backends():
    """Map of backend name -> kernel module, for benchmarks and cross-checks."""
    found = {"numpy": _numpy}
    try:
        from . import _numba as nb

        found["numba"] = nb
    except ImportError:
        pass
    return found
