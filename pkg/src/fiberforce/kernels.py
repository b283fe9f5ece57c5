"""Kernel backend selection.

The batched boundary-condition solver exists twice: a compiled Cython
extension and a pure-NumPy fallback implementing the identical algorithm.
The compiled kernel is preferred when importable; set the environment
variable ``FIBERFORCE_KERNEL`` to ``py`` or ``cy`` to force a backend.
"""

import os

from . import _kernels_py

_choice = os.environ.get("FIBERFORCE_KERNEL", "auto")

if _choice == "py":
    _impl = _kernels_py
elif _choice == "cy":
    from . import _kernels_cy as _impl
else:
    try:
        from . import _kernels_cy as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.BACKEND
solve_4x2 = _impl.solve_4x2


def available_backends():
    """Names of importable solver backends."""
    names = ["numpy"]
    try:
        from . import _kernels_cy  # noqa: F401

        names.insert(0, "cython")
    except ImportError:
        pass
    return names
