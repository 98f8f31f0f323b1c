"""Kernel backend selection.

The compiled module ``palab._ckernels`` is used when it imports; otherwise the
pure-Python twin ``palab._pykernels`` is used. Set ``PALAB_BACKEND=python`` to
force the fallback. Both backends return identical results for identical
inputs, including the random stream they consume.
"""

from __future__ import annotations

import importlib
import os
from types import ModuleType

from . import _pykernels

_compiled: ModuleType | None
try:
    _compiled = importlib.import_module("palab._ckernels")
except ImportError:  # not built
    _compiled = None


def available() -> list[str]:
    names = ["python"]
    if _compiled is not None:
        names.insert(0, "cython")
    return names


def get_backend(name: str | None = None) -> ModuleType:
    """Return the kernel module called ``name`` (``"cython"`` or ``"python"``).

    With ``name=None`` the environment variable ``PALAB_BACKEND`` is consulted,
    then the compiled backend is preferred.
    """
    name = name or os.environ.get("PALAB_BACKEND") or None
    if name is None:
        return _compiled if _compiled is not None else _pykernels
    if name == "python":
        return _pykernels
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernels are not built; run `pip install -e .`")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


backend = get_backend()
