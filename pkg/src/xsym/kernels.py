"""Backend selection for the hot discord-minimisation kernels.

The compiled Cython module is used when it imports; otherwise, or when the
environment variable ``XSYM_PURE_PYTHON`` is set to a non-empty value other
than ``0``, the numpy/scipy fallback is used.
"""
import os

from . import _kernels_fallback as fallback

try:
    from . import _kernels as compiled
except ImportError:  # extension not built
    compiled = None

_force_pure = os.environ.get("XSYM_PURE_PYTHON", "") not in ("", "0")

backend = fallback if (compiled is None or _force_pure) else compiled
BACKEND_NAME = "python" if backend is fallback else "cython"

cq_trace_distance = backend.cq_trace_distance
minimize_cq_distance = backend.minimize_cq_distance


def get_backend(name: str | None = None):
    """Return the kernel module for ``"cython"``/``"python"`` (default: active)."""
    if name is None:
        return backend
    if name == "python":
        return fallback
    if name == "cython":
        if compiled is None:
            raise ImportError("the compiled xsym._kernels extension is not available")
        return compiled
    raise ValueError(f"unknown backend {name!r}")
