"""Select the kernel implementation at import time.

The compiled ``_kernels`` extension is used when it imports; otherwise,
or when ``ULTRATANGENT_PURE=1`` is set, the numpy module ``_kernels_py``.
"""
import os

from . import _kernels_py

kernels = _kernels_py
if not os.environ.get("ULTRATANGENT_PURE"):
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]
    except ImportError:
        kernels = _kernels_py

NAME = kernels.NAME


def use(name: str) -> None:
    """Switch backends at runtime ("cython" or "numpy"); used by tests and the benchmark."""
    global kernels, NAME
    if name == "numpy":
        kernels = _kernels_py
    elif name == "cython":
        from . import _kernels

        kernels = _kernels
    else:
        raise ValueError(f"unknown backend {name!r}")
    NAME = kernels.NAME
