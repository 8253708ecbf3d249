"""Simplex kernel selection.

The compiled extension ``_fastlp`` is used when the build produced it; the
numpy kernel ``pylp`` is the always-available fallback. Both export the same
``solve`` contract. Set ``GRIDRISK_PURE_PYTHON=1`` to force the fallback
regardless of what was built.
"""

import os

from . import pylp

_BACKENDS = {"python": pylp}
try:
    from . import _fastlp
    _BACKENDS["compiled"] = _fastlp
except ImportError:
    _fastlp = None

if os.environ.get("GRIDRISK_PURE_PYTHON", "") not in ("", "0"):
    DEFAULT_NAME = "python"
else:
    DEFAULT_NAME = "compiled" if "compiled" in _BACKENDS else "python"

default = _BACKENDS[DEFAULT_NAME]


def available():
    """Names of the kernels importable in this installation."""
    return tuple(sorted(_BACKENDS))


def get(name=None):
    """Kernel module by name; None means the selected default."""
    if name is None:
        return default
    try:
        return _BACKENDS[name]
    except KeyError:
        raise KeyError(f"unknown kernel {name!r}; available: {available()}")
