"""Kernel backend selection.

The compiled extension is used when importable. Setting the environment
variable ``BRICK14_PURE_PYTHON=1`` forces the numpy fallback.
"""
import os

from . import _fallback

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = {"python": _fallback}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled

if os.environ.get("BRICK14_PURE_PYTHON", "").strip() not in ("", "0") or _compiled is None:
    DEFAULT = "python"
else:
    DEFAULT = "compiled"


def get(name=None):
    """Kernel module for ``name`` (``"compiled"``, ``"python"`` or default)."""
    name = name or DEFAULT
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}") from None
