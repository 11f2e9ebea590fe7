"""Breadth-first and wall-following kernels on the primal and dual grids of B_N.

Every kernel receives the edge source as (bits, key, thr, lazy): either an
explicit bit array or a trial key whose edges are drawn on demand.
Vertex (x, y) of B_N has flat index (y + N)(2N + 1) + (x + N).
"""
from __future__ import annotations

import numpy as np

from ._accel import jit
from ._core import DX, DY, dual_step_edge, is_open, key_of, step_edge

# neighbour order by the EdgeId of the connecting edge: W, E, S, N
EDGE_ORDER = np.array([2, 0, 3, 1], dtype=np.int64)


@jit
def vindex(x, y, N):
    return (y + N) * (2 * N + 1) + (x + N)


@jit
def bfs(N, bits, key, thr, lazy, region, src, tgt):
    """Multi-source BFS over open edges inside ``region``.

    ``src`` lists flat vertex indices in the order they enter the queue.
    Stops at the first dequeued vertex with ``tgt`` set.  Returns
    (dist, parent, hit) where ``hit`` is that vertex or -1.
    """
    W = 2 * N + 1
    nv = W * W
    dist = np.full(nv, -1, np.int64)
    parent = np.full(nv, -1, np.int64)
    queue = np.empty(nv, np.int64)
    head = 0
    tail = 0
    for s in src:
        if region[s] and dist[s] < 0:
            dist[s] = 0
            queue[tail] = s
            tail += 1
    while head < tail:
        v = queue[head]
        head += 1
        if tgt[v]:
            return dist, parent, v
        x = v % W - N
        y = v // W - N
        for k in range(4):
            d = EDGE_ORDER[k]
            ei = step_edge(x, y, d, N)
            if ei < 0:
                continue
            w = vindex(x + DX[d], y + DY[d], N)
            if dist[w] >= 0 or not region[w]:
                continue
            if not is_open(ei, bits, key, thr, lazy):
                continue
            dist[w] = dist[v] + 1
            parent[w] = v
            queue[tail] = w
            tail += 1
    return dist, parent, -1


@jit
def shortest_crossing(N, bits, key, thr, lazy):
    """Length of the shortest open left-right crossing of B_N, or -1."""
    W = 2 * N + 1
    nv = W * W
    dist = np.full(nv, -1, np.int64)
    queue = np.empty(nv, np.int64)
    head = 0
    tail = 0
    for y in range(-N, N + 1):
        s = vindex(-N, y, N)
        dist[s] = 0
        queue[tail] = s
        tail += 1
    while head < tail:
        v = queue[head]
        head += 1
        x = v % W - N
        y = v // W - N
        if x == N:
            return dist[v]
        for d in range(4):
            ei = step_edge(x, y, d, N)
            if ei < 0:
                continue
            w = vindex(x + DX[d], y + DY[d], N)
            if dist[w] >= 0:
                continue
            if not is_open(ei, bits, key, thr, lazy):
                continue
            dist[w] = dist[v] + 1
            queue[tail] = w
            tail += 1
    return -1


@jit
def radial_distance(N, bits, key, thr, lazy):
    """Chemical distance from the origin to the boundary of B_N, or -1."""
    W = 2 * N + 1
    nv = W * W
    dist = np.full(nv, -1, np.int64)
    queue = np.empty(nv, np.int64)
    s = vindex(0, 0, N)
    dist[s] = 0
    queue[0] = s
    head = 0
    tail = 1
    while head < tail:
        v = queue[head]
        head += 1
        x = v % W - N
        y = v // W - N
        if abs(x) == N or abs(y) == N:
            return dist[v]
        for d in range(4):
            ei = step_edge(x, y, d, N)
            if ei < 0:
                continue
            w = vindex(x + DX[d], y + DY[d], N)
            if dist[w] >= 0:
                continue
            if not is_open(ei, bits, key, thr, lazy):
                continue
            dist[w] = dist[v] + 1
            queue[tail] = w
            tail += 1
    return -1


@jit
def _walk_open(x, y, d, N, bits, key, thr, lazy):
    """Whether the lowest-crossing walker may step from (x, y) in direction d.

    Columns x = -N-1 and x = N+1 are virtual open rails glued to the sides.
    """
    if x == -N - 1 or x == N + 1:
        if d == 1:
            return y + 1 <= N
        if d == 3:
            return y - 1 >= -N
        if x == -N - 1:
            return d == 0
        return d == 2
    nx = x + DX[d]
    ny = y + DY[d]
    if nx == -N - 1 or nx == N + 1:
        return True
    ei = step_edge(x, y, d, N)
    if ei < 0:
        return False
    return is_open(ei, bits, key, thr, lazy)


@jit
def lowest_crossing(N, bits, key, thr, lazy):
    """Vertices (xs, ys) of the lowest open crossing, left to right; empty if none.

    Right-hand wall following from the foot of the left rail keeps the
    bottom-attached closed dual cluster on the walker's right.  The final
    excursion from the left rail to the right rail is loop-erased.
    """
    W = 2 * N + 1
    nv = W * W
    limit = 8 * nv + 16 * W
    wx = np.empty(limit + 1, np.int64)
    wy = np.empty(limit + 1, np.int64)
    x = -N - 1
    y = -N
    d = 1
    start = -1
    length = 0
    reached = False
    for _ in range(limit):
        moved = False
        for t in range(4):
            nd = (d + 3 + t) % 4
            if _walk_open(x, y, nd, N, bits, key, thr, lazy):
                x += DX[nd]
                y += DY[nd]
                d = nd
                moved = True
                break
        if not moved:
            break
        if x == N + 1:
            reached = True
            break
        if x == -N - 1:
            start = -1
            length = 0
            continue
        if start < 0:
            start = 0
            length = 0
        wx[length] = x
        wy[length] = y
        length += 1
    if not reached:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    pos = np.full(nv, -1, np.int64)
    sx = np.empty(length, np.int64)
    sy = np.empty(length, np.int64)
    top = 0
    for i in range(length):
        v = vindex(wx[i], wy[i], N)
        if pos[v] >= 0:
            for j in range(pos[v] + 1, top):
                pos[vindex(sx[j], sy[j], N)] = -1
            top = pos[v] + 1
        else:
            pos[v] = top
            sx[top] = wx[i]
            sy[top] = wy[i]
            top += 1
    return sx[:top].copy(), sy[:top].copy()


@jit
def dual_closure(N, bits, key, thr, lazy, seed_faces, inside):
    """Faces reachable from ``seed_faces`` through closed dual edges.

    Faces are indexed by lower-left corner (X, Y), X, Y in [-N-1, N], as
    (Y + N + 1)(2N + 2) + (X + N + 1).  ``inside`` marks faces that may be
    entered.  Returns the membership mask.
    """
    F = 2 * N + 2
    nf = F * F
    mark = np.zeros(nf, np.uint8)
    queue = np.empty(nf, np.int64)
    head = 0
    tail = 0
    for f in seed_faces:
        if inside[f] and mark[f] == 0:
            mark[f] = 1
            queue[tail] = f
            tail += 1
    while head < tail:
        f = queue[head]
        head += 1
        X = f % F - N - 1
        Y = f // F - N - 1
        for d in range(4):
            ei = dual_step_edge(X, Y, d, N)
            if ei < 0:
                continue
            g = (Y + DY[d] + N + 1) * F + (X + DX[d] + N + 1)
            if mark[g] or not inside[g]:
                continue
            if is_open(ei, bits, key, thr, lazy):
                continue
            mark[g] = 1
            queue[tail] = g
            tail += 1
    return mark


@jit
def _dyadic_one(N, kmax, bits, key, thr, lazy, dist, queue):
    W = 2 * N + 1
    target = vindex(1, 0, N)
    s = vindex(0, 0, N)
    for k in range(1, kmax + 1):
        r = 1 << k
        dist[s] = 0
        queue[0] = s
        head = 0
        tail = 1
        found = -1
        while head < tail:
            v = queue[head]
            head += 1
            if v == target:
                found = dist[v]
                break
            x = v % W - N
            y = v // W - N
            for d in range(4):
                nx = x + DX[d]
                ny = y + DY[d]
                if abs(nx) > r or abs(ny) > r:
                    continue
                ei = step_edge(x, y, d, N)
                if ei < 0:
                    continue
                w = vindex(nx, ny, N)
                if dist[w] >= 0:
                    continue
                if not is_open(ei, bits, key, thr, lazy):
                    continue
                dist[w] = dist[v] + 1
                queue[tail] = w
                tail += 1
        for i in range(tail):
            dist[queue[i]] = -1
        if found >= 0:
            return k, found
    return -1, -1


@jit
def dyadic_scale(N, kmax, bits, key, thr, lazy):
    """Least k <= kmax with (0,0) and (1,0) joined inside B_{2^k}, else -1.

    Also returns the chemical distance inside that box (or -1).
    """
    W = 2 * N + 1
    dist = np.full(W * W, -1, np.int64)
    queue = np.empty(W * W, np.int64)
    return _dyadic_one(N, kmax, bits, key, thr, lazy, dist, queue)


@jit
def dyadic_batch(N, kmax, seed, first, count, thr, out_k, out_d):
    """``dyadic_scale`` for trials first .. first+count-1 with drawn edges."""
    W = 2 * N + 1
    dist = np.full(W * W, -1, np.int64)
    queue = np.empty(W * W, np.int64)
    bits = np.zeros(1, np.uint8)
    for t in range(count):
        key = key_of(seed, first + t)
        k, d = _dyadic_one(N, kmax, bits, key, thr, True, dist, queue)
        out_k[t] = k
        out_d[t] = d
