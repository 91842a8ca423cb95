"""Bitmask kernels for exhaustive propositional model search.

Interpretations over ``n`` atoms are the integers ``0 .. 2**n - 1``; a
ground clause is a pair of masks ``(body, head)`` and an interpretation
``m`` violates it iff ``m & body == body`` and ``m & head == 0``.

Set ``DISJEX_NO_NUMBA=1`` to force the pure-numpy path.
"""
from __future__ import annotations

import os

import numpy as np

MAX_ATOMS = 26

_DISABLED = os.environ.get("DISJEX_NO_NUMBA", "").strip() not in ("", "0")

try:  # pragma: no cover - exercised via the env flag
    if _DISABLED:
        raise ImportError
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False


def _check(n: int) -> None:
    if n > MAX_ATOMS:
        raise ValueError(f"exhaustive search limited to {MAX_ATOMS} atoms, got {n}")


# ---------------------------------------------------------------- numpy path


def model_flags_numpy(n: int, body: np.ndarray, head: np.ndarray) -> np.ndarray:
    _check(n)
    m = np.arange(1 << n, dtype=np.uint64)
    ok = np.ones(1 << n, dtype=np.bool_)
    for b, h in zip(body.astype(np.uint64), head.astype(np.uint64)):
        ok &= ~(((m & b) == b) & ((m & h) == 0))
    return ok


def minimal_flags_numpy(flags: np.ndarray) -> np.ndarray:
    """Members of ``flags`` with no proper subset also in ``flags``."""
    size = flags.shape[0]
    n = size.bit_length() - 1
    below = flags.copy()  # below[m]: some s ⊆ m is flagged
    for i in range(n):
        v = below.reshape(-1, 2, 1 << i)
        v[:, 1, :] |= v[:, 0, :]
    strict = np.zeros(size, dtype=np.bool_)
    for i in range(n):
        s = strict.reshape(-1, 2, 1 << i)
        b = below.reshape(-1, 2, 1 << i)
        s[:, 1, :] |= b[:, 0, :]
    return flags & ~strict


# ---------------------------------------------------------------- numba path

if HAVE_NUMBA:

    @njit(cache=True)
    def _model_flags_jit(n, body, head):
        size = 1 << n
        ok = np.ones(size, dtype=np.bool_)
        k = body.shape[0]
        for m in range(size):
            mm = np.uint64(m)
            for j in range(k):
                if (mm & body[j]) == body[j] and (mm & head[j]) == 0:
                    ok[m] = False
                    break
        return ok

    @njit(cache=True)
    def _minimal_flags_jit(flags):
        size = flags.shape[0]
        n = 0
        while (1 << n) < size:
            n += 1
        below = flags.copy()
        for i in range(n):
            bit = 1 << i
            for m in range(size):
                if m & bit and below[m ^ bit]:
                    below[m] = True
        out = flags.copy()
        for m in range(size):
            if not flags[m]:
                continue
            for i in range(n):
                bit = 1 << i
                if m & bit and below[m ^ bit]:
                    out[m] = False
                    break
        return out

    def model_flags_numba(n: int, body: np.ndarray, head: np.ndarray) -> np.ndarray:
        _check(n)
        return _model_flags_jit(n, body.astype(np.uint64), head.astype(np.uint64))

    def minimal_flags_numba(flags: np.ndarray) -> np.ndarray:
        return _minimal_flags_jit(flags)

    model_flags = model_flags_numba
    minimal_flags = minimal_flags_numba
else:
    model_flags = model_flags_numpy
    minimal_flags = minimal_flags_numpy


def masks_to_sets(flags: np.ndarray) -> list[int]:
    return [int(m) for m in np.flatnonzero(flags)]
