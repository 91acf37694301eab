"""Kernel backend selection.

The compiled kernels are used when the extension imports; otherwise the
pure-Python twins.  Both produce bit-identical results, so switching is
only a matter of speed.
"""

from . import _purepy

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_active = _ckernels if _ckernels is not None else _purepy

BACKENDS = ("compiled", "python")


def available():
    """Names of the importable backends."""
    return tuple(b for b in BACKENDS if b == "python" or _ckernels is not None)


def use_backend(name):
    """Select ``"compiled"``, ``"python"`` or ``"auto"``; returns the active name."""
    global _active
    if name == "auto":
        _active = _ckernels if _ckernels is not None else _purepy
    elif name == "compiled":
        if _ckernels is None:
            raise RuntimeError("compiled kernels are not available in this installation")
        _active = _ckernels
    elif name == "python":
        _active = _purepy
    else:
        raise ValueError(f"unknown backend {name!r}")
    return _active.NAME


def kernels():
    """The active kernel module."""
    return _active


def get(name):
    """Kernel module by name, regardless of the active selection."""
    if name == "python":
        return _purepy
    if _ckernels is None:
        raise RuntimeError("compiled kernels are not available in this installation")
    return _ckernels
