"""Hot kernels with two interchangeable backends.

The backend is chosen once at import from ``PREVADIM_BACKEND`` (``numba`` or
``numpy``). ``numba`` is the default when it imports cleanly; the numpy path is
the reference fallback and must stay bit-identical to it.
"""

import os

from . import _np
from .constants import seed_key, mix64_int

try:
    from . import _jit
    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _jit = None
    NUMBA_AVAILABLE = False

_NAMES = ("path_keys", "phi_from_keys", "bit_matrix", "positions", "locate", "phi_at", "mix64")


def get_backend(name=None):
    """Return the kernel module for ``name`` (default: the env-selected one)."""
    if name is None:
        name = os.environ.get("PREVADIM_BACKEND", "numba" if NUMBA_AVAILABLE else "numpy")
    name = name.lower()
    if name == "numpy":
        return _np
    if name == "numba":
        if not NUMBA_AVAILABLE:
            raise RuntimeError("PREVADIM_BACKEND=numba but numba is not importable")
        return _jit
    raise ValueError(f"unknown kernel backend {name!r} (expected 'numba' or 'numpy')")


backend = get_backend()
BACKEND_NAME = "numpy" if backend is _np else "numba"

path_keys = backend.path_keys
phi_from_keys = backend.phi_from_keys
bit_matrix = backend.bit_matrix
positions = backend.positions
locate = backend.locate
phi_at = backend.phi_at
mix64 = backend.mix64

__all__ = list(_NAMES) + ["get_backend", "BACKEND_NAME", "NUMBA_AVAILABLE", "seed_key", "mix64_int"]
