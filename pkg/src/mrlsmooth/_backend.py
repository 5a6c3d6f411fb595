"""Select the compiled core if it is importable, else the numpy fallback.

Set ``MRLSMOOTH_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _core_py

if os.environ.get("MRLSMOOTH_PURE_PYTHON", "").strip() not in ("", "0"):
    core = _core_py
else:
    try:
        from . import _core as core
    except ImportError:  # extension not built
        core = _core_py


def available():
    """Names of the backends that can be imported in this environment."""
    names = ["python"]
    try:
        from . import _core  # noqa: F401

        names.append("cython")
    except ImportError:
        pass
    return names


def get(name=None):
    """Return the active backend module, or the one called ``name``."""
    if name is None:
        return core
    if name == "python":
        return _core_py
    if name == "cython":
        from . import _core

        return _core
    raise ValueError(f"unknown backend {name!r}")


def use(name):
    """Switch the active backend for subsequent estimator calls."""
    global core
    core = get(name)
    return core
