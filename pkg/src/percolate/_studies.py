"""Per-trial batch kernels for the Monte Carlo studies (edges drawn on demand)."""
from __future__ import annotations

import numpy as np

from ._accel import jit
from ._core import DX, DY, is_open, key_of, step_edge
from ._graph import lowest_crossing, radial_distance, shortest_crossing


@jit
def radial_batch(N, seed, first, count, thr, out):
    bits = np.zeros(1, np.uint8)
    for t in range(count):
        out[t] = radial_distance(N, bits, key_of(seed, first + t), thr, True)


@jit
def crossing_batch(N, seed, first, count, thr, out_s, out_l):
    """S_N and L_N per trial, -1 for both without a crossing."""
    bits = np.zeros(1, np.uint8)
    for t in range(count):
        key = key_of(seed, first + t)
        s = shortest_crossing(N, bits, key, thr, True)
        out_s[t] = s
        if s < 0:
            out_l[t] = -1
        else:
            xs, ys = lowest_crossing(N, bits, key, thr, True)
            out_l[t] = xs.shape[0] - 1


@jit
def _box_bfs(N, bits, key, thr, lazy, lo, hi, src_r, tgt_r, sx, sy, tx, ty, dist, queue):
    """BFS inside the ring lo <= |v| <= hi.

    With src_r >= 0 the sources are the vertices at sup-norm src_r and any
    vertex at sup-norm tgt_r is a target; otherwise (sx, sy) -> (tx, ty).
    Returns the distance to the first target, or -1.  Leaves ``dist`` clean.
    """
    W = 2 * N + 1
    tail = 0
    if src_r >= 0:
        for y in range(-src_r, src_r + 1):
            for x in range(-src_r, src_r + 1):
                if max(abs(x), abs(y)) == src_r:
                    v = (y + N) * W + x + N
                    dist[v] = 0
                    queue[tail] = v
                    tail += 1
    else:
        v = (sy + N) * W + sx + N
        dist[v] = 0
        queue[0] = v
        tail = 1
    head = 0
    found = -1
    while head < tail:
        v = queue[head]
        head += 1
        x = v % W - N
        y = v // W - N
        r = max(abs(x), abs(y))
        if (src_r >= 0 and r == tgt_r) or (src_r < 0 and x == tx and y == ty):
            found = dist[v]
            break
        for d in range(4):
            nx = x + DX[d]
            ny = y + DY[d]
            nr = max(abs(nx), abs(ny))
            if nr < lo or nr > hi:
                continue
            ei = step_edge(x, y, d, N)
            if ei < 0:
                continue
            w = (ny + N) * W + nx + N
            if dist[w] >= 0:
                continue
            if not is_open(ei, bits, key, thr, lazy):
                continue
            dist[w] = dist[v] + 1
            queue[tail] = w
            tail += 1
    for i in range(tail):
        dist[queue[i]] = -1
    return found


@jit
def pt2pt_one(N, d, L, bits, key, thr, lazy, dist, queue):
    """(in-box distance or -1, K or L + 1 when no circuit scale k <= L exists)."""
    x0 = -(d // 2)
    D = _box_bfs(N, bits, key, thr, lazy, 0, N, -1, -1, x0, 0, x0 + d, 0, dist, queue)
    K = L + 1
    for k in range(1, L + 1):
        r0 = (1 << k) * d
        r1 = 2 * r0
        if r1 > N:
            break
        if _box_bfs(N, bits, key, thr, lazy, r0, r1, r0, r1, 0, 0, 0, 0, dist, queue) < 0:
            K = k
            break
    return D, K


@jit
def pt2pt_batch(N, d, L, seed, first, count, thr, out_d, out_k):
    W = 2 * N + 1
    dist = np.full(W * W, -1, np.int64)
    queue = np.empty(W * W, np.int64)
    bits = np.zeros(1, np.uint8)
    for t in range(count):
        D, K = pt2pt_one(N, d, L, bits, key_of(seed, first + t), thr, True, dist, queue)
        out_d[t] = D
        out_k[t] = K
