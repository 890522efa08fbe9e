"""Numba switch for the hot kernels.

Set ``CALCTUNE_DISABLE_NUMBA=1`` before import to run every kernel as plain
numpy code. The two paths compute the same values; the flag exists for
debugging, coverage and the benchmark in ``benchmarks/``.
"""
import os

_FALSY = {"", "0", "false", "no", "off"}

DISABLED = os.environ.get("CALCTUNE_DISABLE_NUMBA", "").strip().lower() not in _FALSY

try:
    if DISABLED:
        raise ImportError
    from numba import njit as _numba_njit

    USING_NUMBA = True
except ImportError:
    _numba_njit = None
    USING_NUMBA = False


def njit(*args, **options):
    """``numba.njit`` when available and enabled, identity otherwise."""
    if USING_NUMBA:
        options.setdefault("cache", True)
        return _numba_njit(*args, **options)

    if len(args) == 1 and callable(args[0]) and not options:
        return args[0]

    def decorate(func):
        return func

    return decorate
