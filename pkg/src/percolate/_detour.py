"""Kernels behind the detour search: region below a crossing, port BFS, dual paths.

Faces use the frame indexing of ``dual_closure``: lower-left corner (X, Y)
with X, Y in [-N-1, N] at (Y + N + 1)(2N + 2) + (X + N + 1).
"""
from __future__ import annotations

import numpy as np

from ._accel import jit
from ._core import DX, DY, dual_step_edge, is_open, step_edge


@jit
def _fidx(X, Y, N):
    return (Y + N + 1) * (2 * N + 2) + (X + N + 1)


@jit
def below_faces(N, xs, ys):
    """Faces on the bottom side of the crossing (xs, ys) extended by horizontal rays."""
    F = 2 * N + 2
    nf = F * F
    blk = np.zeros((nf, 4), np.uint8)
    m = xs.shape[0]
    for i in range(m + 1):
        if i == 0:
            ax, ay, bx, by = xs[0] - 1, ys[0], xs[0], ys[0]
        elif i == m:
            ax, ay, bx, by = xs[m - 1], ys[m - 1], xs[m - 1] + 1, ys[m - 1]
        else:
            ax, ay, bx, by = xs[i - 1], ys[i - 1], xs[i], ys[i]
        if ay == by:
            x = min(ax, bx)
            lo = _fidx(x, ay - 1, N)
            hi = _fidx(x, ay, N)
            blk[lo, 1] = 1
            blk[hi, 3] = 1
        else:
            y = min(ay, by)
            le = _fidx(ax - 1, y, N)
            ri = _fidx(ax, y, N)
            blk[le, 0] = 1
            blk[ri, 2] = 1
    mark = np.zeros(nf, np.uint8)
    queue = np.empty(nf, np.int64)
    tail = 0
    for X in range(-N - 1, N + 1):
        f = _fidx(X, -N - 1, N)
        mark[f] = 1
        queue[tail] = f
        tail += 1
    head = 0
    while head < tail:
        f = queue[head]
        head += 1
        X = f % F - N - 1
        Y = f // F - N - 1
        for d in range(4):
            if blk[f, d]:
                continue
            gx = X + DX[d]
            gy = Y + DY[d]
            if gx < -N - 1 or gx > N or gy < -N - 1 or gy > N:
                continue
            g = _fidx(gx, gy, N)
            if mark[g]:
                continue
            mark[g] = 1
            queue[tail] = g
            tail += 1
    return mark


@jit
def port_bfs(N, bits, region, sources):
    """BFS distances over open edges inside ``region`` from each source vertex (row per source)."""
    W = 2 * N + 1
    nv = W * W
    k = sources.shape[0]
    out = np.full((k, nv), -1, np.int32)
    queue = np.empty(nv, np.int64)
    key = np.uint64(0)
    for s in range(k):
        dist = out[s]
        src = sources[s]
        if not region[src]:
            continue
        dist[src] = 0
        queue[0] = src
        head = 0
        tail = 1
        while head < tail:
            v = queue[head]
            head += 1
            x = v % W - N
            y = v // W - N
            for d in range(4):
                ei = step_edge(x, y, d, N)
                if ei < 0:
                    continue
                w = (y + DY[d] + N) * W + (x + DX[d] + N)
                if dist[w] >= 0 or not region[w]:
                    continue
                if not is_open(ei, bits, key, key, False):
                    continue
                dist[w] = dist[v] + 1
                queue[tail] = w
                tail += 1
    return out


@jit
def dual_path(N, bits, inside, src, tgt):
    """Shortest closed dual path between two faces through ``inside`` faces, or empty."""
    F = 2 * N + 2
    nf = F * F
    parent = np.full(nf, -2, np.int64)
    queue = np.empty(nf, np.int64)
    key = np.uint64(0)
    if not inside[src] or not inside[tgt]:
        return np.empty(0, np.int64)
    parent[src] = -1
    queue[0] = src
    head = 0
    tail = 1
    while head < tail:
        f = queue[head]
        head += 1
        if f == tgt:
            n = 0
            g = f
            while g >= 0:
                n += 1
                g = parent[g]
            out = np.empty(n, np.int64)
            g = f
            for i in range(n - 1, -1, -1):
                out[i] = g
                g = parent[g]
            return out
        X = f % F - N - 1
        Y = f // F - N - 1
        for d in range(4):
            ei = dual_step_edge(X, Y, d, N)
            if ei < 0:
                continue
            g = (Y + DY[d] + N + 1) * F + (X + DX[d] + N + 1)
            if parent[g] != -2 or not inside[g]:
                continue
            if is_open(ei, bits, key, key, False):
                continue
            parent[g] = f
            queue[tail] = g
            tail += 1
    return np.empty(0, np.int64)
