"""Edge indexing and the counter-based edge sampler shared by every kernel.

Primal vertices are integer pairs inside B_N.  A dual vertex is stored as the
lower-left corner (X, Y) of its face, so it sits at (X + 1/2, Y + 1/2).
Directions are numbered 0=E, 1=N, 2=W, 3=S.
"""
from __future__ import annotations

import numpy as np

from ._accel import USE_NUMBA, jit

DX = np.array([1, 0, -1, 0], dtype=np.int64)
DY = np.array([0, 1, 0, -1], dtype=np.int64)

_M64 = (1 << 64) - 1
_GOLD = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_IDX_MUL = 0xD1B54A32D192ED03
_IDX_ADD = 0x632BE59BD9B4E019


def _mix_int(z: int) -> int:
    z = ((z ^ (z >> 30)) * _M1) & _M64
    z = ((z ^ (z >> 27)) * _M2) & _M64
    return z ^ (z >> 31)


def trial_key(seed: int, stream: int) -> int:
    """64-bit key of trial ``stream`` under ``seed``."""
    return _mix_int((int(seed) + _GOLD * (int(stream) + 1)) & _M64)


def threshold(p: float) -> int:
    """Integer cut-off on 53-bit draws: an edge is open iff draw < threshold."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return min(1 << 53, int(np.floor(p * (1 << 53))))


def edge_draws(key: int, idx: np.ndarray) -> np.ndarray:
    """Vectorised 53-bit draws for edge indices ``idx`` (pure numpy)."""
    z = np.uint64(key) ^ (idx.astype(np.uint64) * np.uint64(_IDX_MUL) + np.uint64(_IDX_ADD))
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    z = z ^ (z >> np.uint64(31))
    return z >> np.uint64(11)


def _draw_py(key, idx):
    z = int(key) ^ ((int(idx) * _IDX_MUL + _IDX_ADD) & _M64)
    return _mix_int(z) >> 11


def _draw_nb(key, idx):
    z = key ^ (np.uint64(idx) * np.uint64(_IDX_MUL) + np.uint64(_IDX_ADD))
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    z = z ^ (z >> np.uint64(31))
    return z >> np.uint64(11)


def _key_nb(seed, stream):
    z = seed + np.uint64(_GOLD) * (np.uint64(stream) + np.uint64(1))
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


draw = jit(_draw_nb) if USE_NUMBA else _draw_py
key_of = jit(_key_nb) if USE_NUMBA else trial_key


def kernel_scalar(v: int):
    """Convert a key or threshold to the integer type the kernels expect."""
    return np.uint64(v) if USE_NUMBA else int(v)


@jit
def n_horizontal(N):
    return (2 * N + 1) * (2 * N)


@jit
def hidx(x, y, N):
    return (y + N) * (2 * N) + (x + N)


@jit
def vidx(x, y, N):
    return (2 * N + 1) * (2 * N) + (y + N) * (2 * N + 1) + (x + N)


@jit
def in_box(x, y, N):
    return -N <= x <= N and -N <= y <= N


@jit
def step_edge(x, y, d, N):
    """Index of the primal edge leaving (x, y) in direction d, or -1."""
    if d == 0:
        if x + 1 > N or y < -N or y > N or x < -N:
            return -1
        return hidx(x, y, N)
    if d == 2:
        if x - 1 < -N or y < -N or y > N or x > N:
            return -1
        return hidx(x - 1, y, N)
    if d == 1:
        if y + 1 > N or x < -N or x > N or y < -N:
            return -1
        return vidx(x, y, N)
    if y - 1 < -N or x < -N or x > N or y > N:
        return -1
    return vidx(x, y - 1, N)


@jit
def dual_step_edge(X, Y, d, N):
    """Index of the primal edge crossed by the dual step from face (X, Y), or -1."""
    if d == 0:
        x = X + 1
        if x < -N or x > N or Y < -N or Y + 1 > N:
            return -1
        return vidx(x, Y, N)
    if d == 2:
        if X < -N or X > N or Y < -N or Y + 1 > N:
            return -1
        return vidx(X, Y, N)
    if d == 1:
        y = Y + 1
        if X < -N or X + 1 > N or y < -N or y > N:
            return -1
        return hidx(X, y, N)
    if X < -N or X + 1 > N or Y < -N or Y > N:
        return -1
    return hidx(X, Y, N)


@jit
def is_open(idx, bits, key, thr, lazy):
    """State of edge ``idx``: read from ``bits`` or drawn from ``key``."""
    if lazy:
        return draw(key, idx) < thr
    return bits[idx] != 0
