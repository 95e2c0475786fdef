"""Counter-based random numbers (Philox4x32-10).

Every draw is a pure function of ``(seed, path, step, slot)`` so results do
not depend on how paths are split between threads.  The 128-bit counter is
laid out as

    word 0: step (low 32 bits)
    word 1: step (bits 32..47) | slot << 16
    word 2: path (low 32 bits)
    word 3: path (high 32 bits)

and the 64-bit seed is the key.  One block yields two 53-bit uniforms.
"""

from __future__ import annotations

import math

import numba as nb
import numpy as np

__all__ = [
    "philox4x32",
    "philox4x32_py",
    "split_seed",
    "uniform_pair",
    "normal_pair",
    "uniforms_for",
]

_MASK = np.uint64(0xFFFFFFFF)
_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint64(0x9E3779B9)
_W1 = np.uint64(0xBB67AE85)
_S32 = np.uint64(32)
_TWO_PI = 2.0 * math.pi


@nb.njit(cache=True, inline="always")
def philox4x32(c0, c1, c2, c3, k0, k1):
    """Ten rounds of Philox4x32 on ``uint64`` words holding 32-bit values."""
    for _ in range(10):
        p0 = _M0 * c0
        p1 = _M1 * c2
        n0 = (p1 >> _S32) ^ c1 ^ k0
        n2 = (p0 >> _S32) ^ c3 ^ k1
        c1 = p1 & _MASK
        c3 = p0 & _MASK
        c0 = n0
        c2 = n2
        k0 = (k0 + _W0) & _MASK
        k1 = (k1 + _W1) & _MASK
    return c0, c1, c2, c3


def philox4x32_py(counter, key):
    """Pure-Python reference of :func:`philox4x32` on plain ints."""
    c0, c1, c2, c3 = (int(v) & 0xFFFFFFFF for v in counter)
    k0, k1 = (int(v) & 0xFFFFFFFF for v in key)
    for _ in range(10):
        p0 = 0xD2511F53 * c0
        p1 = 0xCD9E8D57 * c2
        c0, c1, c2, c3 = ((p1 >> 32) ^ c1 ^ k0, p1 & 0xFFFFFFFF,
                          (p0 >> 32) ^ c3 ^ k1, p0 & 0xFFFFFFFF)
        k0 = (k0 + 0x9E3779B9) & 0xFFFFFFFF
        k1 = (k1 + 0xBB67AE85) & 0xFFFFFFFF
    return c0, c1, c2, c3


def split_seed(seed: int):
    """Key words of a 64-bit seed."""
    seed = int(seed)
    if not 0 <= seed < 2 ** 64:
        raise ValueError("seed must be an integer in [0, 2**64)")
    return np.uint64(seed & 0xFFFFFFFF), np.uint64(seed >> 32)


@nb.njit(cache=True, inline="always")
def _u53(a, b):
    # open interval (0, 1)
    hi = a >> np.uint64(5)
    lo = b >> np.uint64(6)
    return (float(hi * np.uint64(67108864) + lo) + 0.5) / 9007199254740992.0


@nb.njit(cache=True, inline="always")
def uniform_pair(step, slot, path, k0, k1):
    """Two uniforms on ``(0, 1)`` for ``(step, slot, path)``."""
    st = np.uint64(step)
    c0 = st & _MASK
    c1 = ((st >> _S32) & np.uint64(0xFFFF)) | (np.uint64(slot) << np.uint64(16))
    pa = np.uint64(path)
    r0, r1, r2, r3 = philox4x32(c0, c1, pa & _MASK, pa >> _S32, k0, k1)
    return _u53(r0, r1), _u53(r2, r3)


@nb.njit(cache=True, inline="always")
def normal_pair(step, slot, path, k0, k1):
    """Two independent standard normals by the Box-Muller transform."""
    u1, u2 = uniform_pair(step, slot, path, k0, k1)
    rad = math.sqrt(-2.0 * math.log(u1))
    ang = _TWO_PI * u2
    return rad * math.cos(ang), rad * math.sin(ang)


@nb.njit(cache=True)
def _uniform_block(n_steps, slot, path, k0, k1):
    out = np.empty((n_steps, 2))
    for i in range(n_steps):
        a, b = uniform_pair(i, slot, path, k0, k1)
        out[i, 0] = a
        out[i, 1] = b
    return out


def uniforms_for(seed: int, path: int, n_steps: int, slot: int = 0) -> np.ndarray:
    """Uniform pairs for steps ``0..n_steps-1`` of one path, shape ``(n_steps, 2)``."""
    k0, k1 = split_seed(seed)
    return _uniform_block(int(n_steps), int(slot), int(path), k0, k1)
