"""Loewner evolution laboratory: python bindings for the C++ core."""

from ._slelab import *  # noqa: F401,F403
from ._slelab import __doc__ as _core_doc

__all__ = [name for name in dir() if not name.startswith("_")]
__doc__ = _core_doc
