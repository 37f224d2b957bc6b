"""Numba acceleration shim.

Hot kernels are written once and compiled with ``numba.njit`` unless the
environment variable ``JUMPWAVE_NO_NUMBA`` is set to a truthy value, in which
case the plain Python definitions run as-is. Grid engines additionally ship a
vectorized numpy path selected by the same flag.
"""
from __future__ import annotations

import os


def numba_disabled() -> bool:
    return os.environ.get("JUMPWAVE_NO_NUMBA", "").strip().lower() in {
        "1", "true", "yes", "on",
    }


if numba_disabled():
    def maybe_njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def wrap(func):
            return func

        return wrap
else:
    from numba import njit as _njit

    def maybe_njit(*args, **kwargs):
        kwargs.setdefault("cache", True)
        if len(args) == 1 and callable(args[0]):
            return _njit(**kwargs)(args[0])

        def wrap(func):
            return _njit(*args, **kwargs)(func)

        return wrap
