"""Arm-event kernel.

An arm event is decided on one colour at a time.  Colour 0 is the primal
lattice (open edges), colour 1 the dual lattice (closed dual edges, faces
stored by lower-left corner).  All coordinates are local to the centre
vertex b; colour-c nodes span [-m, m] (c = 0) or [-m, m-1] (c = 1).

Twice the distance to b, ``r2``, is 2 max(|x|, |y|) for vertices and
max(|2x+1|, |2y+1|) for faces; targets sit at r2 = 2m (c = 0) or 2m - 1
(c = 1).  Arms start at ports, stop at their first target and never enter
another port.

For each colour the non-port, non-target nodes reachable from the ports
split into pieces (connected components).  Disjoint pieces land on
contiguous arcs of the target ring, so the event reduces to a cyclic word
of pieces, each with a capacity: the number of node-disjoint port-to-target
paths through it, found by augmenting paths.  In strict mode (annulus) the
ports themselves belong to the pieces and carry unit capacity.
"""
from __future__ import annotations

import numpy as np

from ._accel import jit
from ._core import DX, DY, dual_step_edge, is_open, key_of, step_edge

FALLBACK = -1


@jit
def _r2(c, x, y):
    if c == 0:
        return 2 * max(abs(x), abs(y))
    return max(abs(2 * x + 1), abs(2 * y + 1))


@jit
def _inside(c, x, y, m, half, minr2):
    lo = -m
    hi = m if c == 0 else m - 1
    if x < lo or x > hi or y < lo or y > hi:
        return False
    if half and y < 0:
        return False
    return _r2(c, x, y) >= minr2


@jit
def _edge_ok(N, bits, key, thr, lazy, c, bx, by, x, y, d):
    if c == 0:
        ei = step_edge(bx + x, by + y, d, N)
        if ei < 0:
            return False
        return is_open(ei, bits, key, thr, lazy)
    ei = dual_step_edge(bx + x, by + y, d, N)
    if ei < 0:
        return False
    return not is_open(ei, bits, key, thr, lazy)


@jit
def ring_param(X, Y, R):
    """Counter-clockwise position of a doubled landing point on the ring of radius R."""
    if X == R and Y > -R:
        return Y + R
    if Y == R:
        return 2 * R + (R - X)
    if X == -R:
        return 4 * R + (R - Y)
    return 6 * R + (X + R)


@jit
def _site(c, x, y, tx, ty, R):
    # landing of the step (x, y) -> (tx, ty) onto a target
    if c == 0:
        return ring_param(x + tx, y + ty, R)
    return ring_param(2 * tx + 1, 2 * ty + 1, R)


@jit
def _port_site(c, x, y, m, R):
    # zero-length arm at a port lying on the target ring
    if c == 1:
        return ring_param(2 * x + 1, 2 * y + 1, R)
    if abs(x) == m:
        return ring_param(2 * x - (1 if x > 0 else -1), 2 * y, R)
    return ring_param(2 * x, 2 * y - (1 if y > 0 else -1), R)


@jit
def _capacity(nodes, lo_i, hi_i, adj, S, T, W, lo, need, fin, succ, pred, srcu, snku, par, qs):
    """Node-disjoint S -> T paths inside nodes[lo_i:hi_i], capped at ``need``."""
    flow = 0
    while flow < need:
        for i in range(lo_i, hi_i):
            v = nodes[i]
            par[2 * v] = -2
            par[2 * v + 1] = -2
        head = 0
        tail = 0
        for i in range(lo_i, hi_i):
            v = nodes[i]
            if S[v] and not srcu[v]:
                par[2 * v] = -1
                qs[tail] = 2 * v
                tail += 1
        end = -1
        while head < tail and end < 0:
            s = qs[head]
            head += 1
            v = s >> 1
            if s & 1 == 0:
                # v_in: through v, or back along the arc that feeds v
                if not fin[v] and par[2 * v + 1] == -2:
                    par[2 * v + 1] = s
                    qs[tail] = 2 * v + 1
                    tail += 1
                u = pred[v]
                if u >= 0 and par[2 * u + 1] == -2:
                    par[2 * u + 1] = s
                    qs[tail] = 2 * u + 1
                    tail += 1
            else:
                if T[v] and not snku[v]:
                    end = s
                    break
                if fin[v] and par[2 * v] == -2:
                    par[2 * v] = s
                    qs[tail] = 2 * v
                    tail += 1
                x = v % W + lo
                y = v // W + lo
                a = adj[v]
                for d in range(4):
                    if (a >> d) & 1 == 0:
                        continue
                    w = (y + DY[d] - lo) * W + (x + DX[d] - lo)
                    if succ[v] == w:
                        continue
                    if par[2 * w] == -2:
                        par[2 * w] = s
                        qs[tail] = 2 * w
                        tail += 1
        if end < 0:
            break
        snku[end >> 1] = 1
        s = end
        while True:
            p = par[s]
            v = s >> 1
            if p == -1:
                srcu[v] = 1
                break
            u = p >> 1
            if s & 1 == 1 and p & 1 == 0 and u == v:
                fin[v] = 1
            elif s & 1 == 0 and p & 1 == 1 and u == v:
                fin[v] = 0
            elif s & 1 == 0:
                # forward arc u_out -> v_in
                succ[u] = v
                pred[v] = u
            else:
                # cancel the arc v_out -> u_in
                if succ[v] == u:
                    succ[v] = -1
                if pred[u] == v:
                    pred[u] = -1
            s = p
        flow += 1
    return flow


@jit
def _flood(N, bits, key, thr, lazy, c, bx, by, m, half, strict, minr2, tr2, W, lo, R, start,
           pid, isport, comp, adj, S, T, nodes, nnodes, site_t, site_p, nsite):
    """Label the piece containing ``start``; returns (nnodes, nsite)."""
    comp[start] = pid
    nodes[nnodes] = start
    head = nnodes
    nnodes += 1
    while head < nnodes:
        v = nodes[head]
        head += 1
        x = v % W + lo
        y = v // W + lo
        vin = _r2(c, x, y) == minr2
        for d in range(4):
            nx = x + DX[d]
            ny = y + DY[d]
            if not _inside(c, nx, ny, m, half, minr2):
                continue
            u = (ny - lo) * W + (nx - lo)
            if strict:
                if vin and _r2(c, nx, ny) == minr2:
                    continue
            elif isport[u]:
                continue
            if not _edge_ok(N, bits, key, thr, lazy, c, bx, by, x, y, d):
                continue
            if _r2(c, nx, ny) == tr2:
                T[v] = 1
                site_t[nsite] = _site(c, x, y, nx, ny, R)
                site_p[nsite] = pid
                nsite += 1
                continue
            adj[v] |= np.uint8(1 << d)
            if comp[u] < 0:
                comp[u] = pid
                nodes[nnodes] = u
                nnodes += 1
                if isport[u]:
                    S[u] = 1
    return nnodes, nsite


@jit
def _colour_pieces(N, bits, key, thr, lazy, c, bx, by, m, half, strict, minr2, ports, need,
                   R, site_t, site_p, nsite, pc_col, pc_cap, npiece):
    """Append this colour's crossing pieces and landing sites; returns (nsite, npiece)."""
    W = 2 * m + 1 if c == 0 else 2 * m
    lo = -m
    tr2 = 2 * m if c == 0 else 2 * m - 1
    nn = W * W
    isport = np.zeros(nn, np.uint8)
    comp = np.full(nn, -1, np.int64)
    adj = np.zeros(nn, np.uint8)
    S = np.zeros(nn, np.uint8)
    T = np.zeros(nn, np.uint8)
    nodes = np.empty(nn, np.int64)
    starts = np.empty(nn + 1, np.int64)
    pids = np.empty(nn + 1, np.int64)
    for i in range(ports.shape[0]):
        px = ports[i, 0]
        py = ports[i, 1]
        if _inside(c, px, py, m, half, minr2):
            isport[(py - lo) * W + (px - lo)] = 1
    nnodes = 0
    nflood = 0
    for i in range(ports.shape[0]):
        px = ports[i, 0]
        py = ports[i, 1]
        if not _inside(c, px, py, m, half, minr2):
            continue
        pv = (py - lo) * W + (px - lo)
        if _r2(c, px, py) == tr2:
            pc_col[npiece] = c
            pc_cap[npiece] = 1
            site_t[nsite] = _port_site(c, px, py, m, R)
            site_p[nsite] = npiece
            nsite += 1
            npiece += 1
            continue
        for d in range(4):
            if strict:
                # ports are ordinary unit-capacity nodes of their piece
                if d > 0:
                    break
                wv = pv
                S[pv] = 1
            else:
                wx = px + DX[d]
                wy = py + DY[d]
                if not _inside(c, wx, wy, m, half, minr2):
                    continue
                wv = (wy - lo) * W + (wx - lo)
                if isport[wv]:
                    continue
                if not _edge_ok(N, bits, key, thr, lazy, c, bx, by, px, py, d):
                    continue
                if _r2(c, wx, wy) == tr2:
                    pc_col[npiece] = c
                    pc_cap[npiece] = 1
                    site_t[nsite] = _site(c, px, py, wx, wy, R)
                    site_p[nsite] = npiece
                    nsite += 1
                    npiece += 1
                    continue
                S[wv] = 1
            if comp[wv] >= 0:
                continue
            pc_col[npiece] = c
            pc_cap[npiece] = 0
            starts[nflood] = nnodes
            pids[nflood] = npiece
            nsite0 = nsite
            nnodes, nsite = _flood(N, bits, key, thr, lazy, c, bx, by, m, half, strict, minr2, tr2,
                                   W, lo, R, wv, npiece, isport, comp, adj, S, T, nodes, nnodes,
                                   site_t, site_p, nsite)
            if nsite > nsite0:
                npiece += 1
                nflood += 1
            else:
                nnodes = starts[nflood]
    starts[nflood] = nnodes
    if nflood > 0:
        fin = np.zeros(nn, np.uint8)
        succ = np.full(nn, -1, np.int64)
        pred = np.full(nn, -1, np.int64)
        srcu = np.zeros(nn, np.uint8)
        snku = np.zeros(nn, np.uint8)
        par = np.empty(2 * nn, np.int64)
        qs = np.empty(2 * nn, np.int64)
        for f in range(nflood):
            pc_cap[pids[f]] = _capacity(nodes, starts[f], starts[f + 1], adj, S, T, W, lo,
                                        need, fin, succ, pred, srcu, snku, par, qs)
    return nsite, npiece


@jit
def _cyclic_word(site_t, site_p, nsite, npiece):
    """Piece ids in ccw order of their landing arcs, or an empty array if some piece repeats."""
    order = np.argsort(site_t[:nsite], kind="mergesort")
    seq = np.empty(nsite, np.int64)
    L = 0
    for i in range(nsite):
        p = site_p[order[i]]
        if L == 0 or seq[L - 1] != p:
            seq[L] = p
            L += 1
    if L > 1 and seq[L - 1] == seq[0]:
        L -= 1
    seen = np.zeros(npiece, np.uint8)
    for i in range(L):
        if seen[seq[i]]:
            return seq[:0], False
        seen[seq[i]] = 1
    return seq[:L], True


@jit
def word_realizable(seq_col, seq_cap, run_col, run_size):
    """Whether the cyclic runs can be laid on the cyclic piece word in order.

    Each run needs ``run_size`` arms of its colour from a block of
    consecutive pieces; pieces of the other colour inside a block carry no arm.
    """
    L = seq_col.shape[0]
    J = run_col.shape[0]
    if L == 0:
        return False
    if J == 1:
        tot = 0
        for i in range(L):
            if seq_col[i] == run_col[0]:
                tot += seq_cap[i]
        return tot >= run_size[0]
    for rot in range(J):
        for start in range(L):
            i = start
            ok = True
            for jj in range(J):
                j = (rot + jj) % J
                need = run_size[j]
                while need > 0 and i < start + L:
                    k = i % L
                    if seq_col[k] == run_col[j]:
                        need -= seq_cap[k]
                    i += 1
                if need > 0:
                    ok = False
                    break
            if ok:
                return True
    return False


@jit
def arm_event(N, bits, key, thr, lazy, bx, by, m, half, strict, m_in, oports, cports,
              run_col, run_size, need_o, need_c):
    """1 if the arm event holds, 0 if not, FALLBACK if a piece lands on two arcs."""
    R = 2 * m - 1
    cap_sites = 2 * (8 * m + 8) + oports.shape[0] + cports.shape[0] + 8
    site_t = np.empty(cap_sites, np.int64)
    site_p = np.empty(cap_sites, np.int64)
    pmax = 4 * (2 * m + 1) * (2 * m + 1) + 16
    pc_col = np.empty(pmax, np.int64)
    pc_cap = np.empty(pmax, np.int64)
    nsite = 0
    npiece = 0
    minr0 = 2 * m_in if strict else 0
    minr1 = 2 * m_in + 1 if strict else 1
    if need_o > 0:
        nsite, npiece = _colour_pieces(N, bits, key, thr, lazy, 0, bx, by, m, half, strict, minr0,
                                       oports, need_o, R, site_t, site_p, nsite, pc_col, pc_cap, npiece)
        tot = 0
        for i in range(npiece):
            tot += pc_cap[i]
        if tot < need_o:
            return 0
    if need_c > 0:
        n0 = npiece
        nsite, npiece = _colour_pieces(N, bits, key, thr, lazy, 1, bx, by, m, half, strict, minr1,
                                       cports, need_c, R, site_t, site_p, nsite, pc_col, pc_cap, npiece)
        tot = 0
        for i in range(n0, npiece):
            tot += pc_cap[i]
        if tot < need_c:
            return 0
    seq, ok = _cyclic_word(site_t, site_p, nsite, npiece)
    if not ok:
        return FALLBACK
    L = seq.shape[0]
    sc = np.empty(L, np.int64)
    sk = np.empty(L, np.int64)
    for i in range(L):
        sc[i] = pc_col[seq[i]]
        sk[i] = pc_cap[seq[i]]
    return 1 if word_realizable(sc, sk, run_col, run_size) else 0


@jit
def arm_batch(N, seed, first, count, thr, bx, by, m, half, strict, m_in, oports, cports,
              run_col, run_size, need_o, need_c, out):
    """``arm_event`` on trials first .. first+count-1 with lazily drawn edges."""
    bits = np.zeros(1, np.uint8)
    for t in range(count):
        key = key_of(seed, first + t)
        out[t] = arm_event(N, bits, key, thr, True, bx, by, m, half, strict, m_in, oports, cports,
                           run_col, run_size, need_o, need_c)
