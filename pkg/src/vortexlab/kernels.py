"""Kernel backend selection.

The compiled extension ``vortexlab._kernels`` is used when importable;
otherwise, or when ``VORTEXLAB_PURE_PYTHON=1`` is set, the pure-Python
module provides the same functions.
"""
import os

from . import _kernels_py as python_impl

try:
    from . import _kernels as compiled_impl
except ImportError:  # extension not built
    compiled_impl = None

if compiled_impl is not None and os.environ.get("VORTEXLAB_PURE_PYTHON", "") in ("", "0"):
    _impl = compiled_impl
    BACKEND = "compiled"
else:
    _impl = python_impl
    BACKEND = "python"

END, CROSS, GROW, DECAY, UNDERFLOW = (
    python_impl.END, python_impl.CROSS, python_impl.GROW, python_impl.DECAY,
    python_impl.UNDERFLOW)

shoot = _impl.shoot
solve_tridiagonal = _impl.solve_tridiagonal
midpoint_step = _impl.midpoint_step


def implementations():
    """Available backends as ``{name: module}``."""
    impls = {"python": python_impl}
    if compiled_impl is not None:
        impls["compiled"] = compiled_impl
    return impls
