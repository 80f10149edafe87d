"""Kernel backend selection.

The compiled extension is preferred; the numpy fallback is used when it
is missing. :func:`use_backend` switches explicitly (tests, benchmarks).
"""
from . import _pykernels

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_active = _compiled if _compiled is not None else _pykernels


def available_backends():
    names = ["python"]
    if _compiled is not None:
        names.insert(0, "cython")
    return names


def current_backend():
    return "cython" if _active is _compiled and _compiled is not None else "python"


def use_backend(name):
    """Select ``"cython"`` or ``"python"`` kernels for subsequent calls."""
    global _active
    if name == "python":
        _active = _pykernels
    elif name == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not available")
        _active = _compiled
    else:
        raise ValueError(f"unknown backend {name!r}")


def dilated_convolve(x, taps, dilation):
    return _active.dilated_convolve(x, taps, dilation)


def cbow_epoch(w_in, w_out, tokens, offsets, window, negatives, lr):
    return _active.cbow_epoch(w_in, w_out, tokens, offsets, window, negatives, lr)


def gauss_eliminate(M, Z, tol):
    return _active.gauss_eliminate(M, Z, tol)
