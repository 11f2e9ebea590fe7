"""Brute-force reference computations for tiny boxes.

Nothing here shares code with the production kernels beyond the lattice
indexing: paths are enumerated explicitly, so agreement is evidence of
correctness rather than of a shared bug.
"""
from __future__ import annotations

from typing import Iterator, Sequence

import numpy as np

from .lattice import BondConfig, edge_between, edge_index, enumeration_bits, num_edges

Pt = tuple[int, int]

_STEPS = ((1, 0), (0, 1), (-1, 0), (0, -1))


def open_neighbours(config: BondConfig) -> dict[Pt, list[Pt]]:
    """Adjacency lists of the open subgraph of B_n."""
    n = config.n
    adj: dict[Pt, list[Pt]] = {(x, y): [] for x in range(-n, n + 1) for y in range(-n, n + 1)}
    for (x, y), nb in adj.items():
        for dx, dy in _STEPS:
            w = (x + dx, y + dy)
            if w in adj and config.bits[edge_index(edge_between((x, y), w), n)]:
                nb.append(w)
    return adj


def self_avoiding_paths(adj: dict[Pt, list[Pt]], start: Pt, stop) -> Iterator[tuple[Pt, ...]]:
    """Every open self-avoiding path from ``start`` whose last vertex satisfies ``stop``.

    Paths are not cut at the first ``stop`` vertex.
    """
    path = [start]
    seen = {start}

    def rec(v):
        if stop(v):
            yield tuple(path)
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                path.append(w)
                yield from rec(w)
                path.pop()
                seen.discard(w)

    yield from rec(start)


# ---------------------------------------------------------------- crossings

def crossings(config: BondConfig) -> Iterator[tuple[Pt, ...]]:
    """All open self-avoiding paths from the left side to the right side."""
    n = config.n
    adj = open_neighbours(config)
    for y in range(-n, n + 1):
        yield from self_avoiding_paths(adj, (-n, y), lambda v: v[0] == n)


def region_below(n: int, path: tuple[Pt, ...]) -> int:
    """Number of faces below ``path`` extended by horizontal rays off both sides.

    Faces are counted in columns -n-1..n and rows -n..n-1; the row above the
    box is the reference "top".  Smaller is lower.
    """
    blocked = set()
    for a, b in zip(path, path[1:]):
        blocked.add((min(a, b), max(a, b)))
    (x0, y0), (x1, y1) = path[0], path[-1]
    blocked.add(((x0 - 1, y0), (x0, y0)))
    blocked.add(((x1, y1), (x1 + 1, y1)))

    def crossed(f, g):
        (fx, fy), (gx, gy) = f, g
        if fx == gx:  # vertical move crosses a horizontal edge
            y = max(fy, gy)
            return ((fx, y), (fx + 1, y))
        x = max(fx, gx)
        return ((x, fy), (x, fy + 1))

    faces = {(X, Y) for X in range(-n - 1, n + 1) for Y in range(-n, n + 1)}
    top = [(X, n) for X in range(-n - 1, n + 1)]
    seen = set(top)
    stack = list(top)
    while stack:
        f = stack.pop()
        for dx, dy in _STEPS:
            g = (f[0] + dx, f[1] + dy)
            if g in faces and g not in seen and crossed(f, g) not in blocked:
                seen.add(g)
                stack.append(g)
    return len(faces) - len(seen)


def lowest_crossing_oracle(config: BondConfig) -> tuple[Pt, ...] | None:
    """The crossing with the smallest region below it; None without a crossing.

    Raises if the minimum is attained twice, which would contradict uniqueness.
    """
    best, best_area, ties = None, None, 0
    for path in crossings(config):
        a = region_below(config.n, path)
        if best_area is None or a < best_area:
            best, best_area, ties = path, a, 1
        elif a == best_area:
            ties += 1
    if ties > 1:
        raise AssertionError(f"{ties} crossings share the minimal region")
    return best


def crossing_lengths_oracle(config: BondConfig) -> tuple[int, int] | None:
    """(S_n, L_n) by enumeration, or None without a crossing."""
    low = lowest_crossing_oracle(config)
    if low is None:
        return None
    shortest = min(len(p) - 1 for p in crossings(config))
    return shortest, len(low) - 1


# ------------------------------------------------------ n = 1 exact values

def _radial_oracle(config: BondConfig) -> int | None:
    n = config.n
    adj = open_neighbours(config)
    lens = [len(p) - 1 for p in self_avoiding_paths(adj, (0, 0), lambda v: max(abs(v[0]), abs(v[1])) == n)]
    return min(lens) if lens else None


def radial_distance_oracle(config: BondConfig) -> int | None:
    """Least edge count of an open path from 0 to the boundary, by enumeration."""
    return _radial_oracle(config)


def chem_dist_oracle(config: BondConfig, a: Pt, b: Pt) -> int | None:
    adj = open_neighbours(config)
    lens = [len(p) - 1 for p in self_avoiding_paths(adj, a, lambda v: v == b)]
    return min(lens) if lens else None


def n1_table() -> dict[str, np.ndarray]:
    """Per-configuration oracle values for all 4096 configurations of B_1.

    Arrays are indexed by bitmask: ``H`` and ``A`` are 0/1 event indicators,
    ``S`` and ``SB`` the shortest crossing and radial lengths (-1 if absent).
    """
    bits = enumeration_bits(1)
    H = np.zeros(len(bits), np.int64)
    S = np.full(len(bits), -1, np.int64)
    A = np.zeros(len(bits), np.int64)
    SB = np.full(len(bits), -1, np.int64)
    for mask, row in enumerate(bits):
        cfg = BondConfig(1, row)
        lens = [len(p) - 1 for p in crossings(cfg)]
        if lens:
            H[mask], S[mask] = 1, min(lens)
        r = _radial_oracle(cfg)
        if r is not None:
            A[mask], SB[mask] = 1, r
    return {"H": H, "S": S, "A": A, "SB": SB}


def n1_exact(p: float = 0.5) -> dict[str, float]:
    """Exact P(H_1), E[S_1 | H_1], P(A_1), E[S_{B_1} | A_1] at edge density p."""
    t = n1_table()
    ones = enumeration_bits(1).sum(axis=1)
    w = p ** ones * (1 - p) ** (num_edges(1) - ones)
    pH = float(np.sum(w * t["H"]))
    pA = float(np.sum(w * t["A"]))
    return {
        "P_H": pH,
        "E_S_given_H": float(np.sum(w * t["H"] * t["S"]) / pH),
        "P_A": pA,
        "E_SB_given_A": float(np.sum(w * t["A"] * t["SB"]) / pA),
    }


# ------------------------------------------------------------ arm packings

def _r2(c: int, x: int, y: int) -> int:
    if c == 0:
        return 2 * max(abs(x), abs(y))
    return max(abs(2 * x + 1), abs(2 * y + 1))


def _ring_param(X: int, Y: int, R: int) -> int:
    if X == R and Y > -R:
        return Y + R
    if Y == R:
        return 2 * R + (R - X)
    if X == -R:
        return 4 * R + (R - Y)
    return 6 * R + (X + R)


def _arm_edge_state(config: BondConfig, c: int, a: Pt, b: Pt, hb: Pt) -> bool:
    """Whether the colour-c step a -> b (local coordinates) is usable by state."""
    gx, gy = a[0] + hb[0], a[1] + hb[1]
    hx, hy = b[0] + hb[0], b[1] + hb[1]
    if c == 0:
        e = edge_between((gx, gy), (hx, hy))
        return bool(config.bits[edge_index(e, config.n)])
    # dual step between faces with lower-left corners (gx, gy) and (hx, hy)
    if gy == hy:
        x = max(gx, hx)
        e = edge_between((x, gy), (x, gy + 1))
    else:
        y = max(gy, hy)
        e = edge_between((gx, y), (gx + 1, y))
    return not config.bits[edge_index(e, config.n)]


def enumerate_arms(config: BondConfig, hole, c: int) -> list[tuple[int, int, int, int]]:
    """All colour-c arms as (landing, start bit, vertex bits, length), deduplicated.

    Arms are self-avoiding, begin at a port, may pass other ports, avoid the
    hole's own edge (e or e*), and stop at the first target.
    """
    m = hole.m
    hb = (hole.bx, hole.by)
    lo, hi = -m, (m if c == 0 else m - 1)
    W = hi - lo + 1
    tr2 = 2 * m if c == 0 else 2 * m - 1
    minr2 = (2 * hole.m_in + c) if hole.strict else 0
    ports = [tuple(map(int, p)) for p in (hole.oports if c == 0 else hole.cports)]

    def inside(v):
        x, y = v
        if not (lo <= x <= hi and lo <= y <= hi):
            return False
        if hole.half and y < 0:
            return False
        return _r2(c, x, y) >= minr2

    ports = [p for p in ports if inside(p)]
    forbidden = set()
    if not hole.strict and len(ports) == 2 and abs(ports[0][0] - ports[1][0]) + abs(ports[0][1] - ports[1][1]) == 1:
        forbidden.add(frozenset(ports))

    def bit(v):
        return 1 << ((v[1] - lo) * W + (v[0] - lo))

    def usable(a, b):
        if not inside(b):
            return False
        ra, rb = _r2(c, *a), _r2(c, *b)
        if ra == tr2 and rb == tr2:
            return False
        if hole.strict and ra == minr2 and rb == minr2:
            return False
        if frozenset((a, b)) in forbidden:
            return False
        return _arm_edge_state(config, c, a, b, hb)

    R = 2 * m - 1
    arms = set()
    for p in ports:
        if _r2(c, *p) == tr2:
            if c == 1:
                t = _ring_param(2 * p[0] + 1, 2 * p[1] + 1, R)
            elif abs(p[0]) == m:
                t = _ring_param(2 * p[0] - (1 if p[0] > 0 else -1), 2 * p[1], R)
            else:
                t = _ring_param(2 * p[0], 2 * p[1] - (1 if p[1] > 0 else -1), R)
            arms.add((t, bit(p), bit(p), 0))
            continue
        path = [p]
        onpath = {p}

        def rec(v, vbits):
            for dx, dy in _STEPS:
                w = (v[0] + dx, v[1] + dy)
                if w in onpath or not usable(v, w):
                    continue
                if _r2(c, *w) == tr2:
                    if c == 0:
                        t = _ring_param(v[0] + w[0], v[1] + w[1], R)
                    else:
                        t = _ring_param(2 * w[0] + 1, 2 * w[1] + 1, R)
                    arms.add((t, bit(p), vbits | bit(w), len(path)))
                    continue
                onpath.add(w)
                path.append(w)
                rec(w, vbits | bit(w))
                path.pop()
                onpath.discard(w)

        rec(p, bit(p))
    out = []
    for t, s, v, ln in arms:
        if not hole.strict and ln > 0:
            v &= ~s
        out.append((t, s, v, ln))
    return sorted(out)


def arm_packing_oracle(config: BondConfig, hole, colors: Sequence[str]) -> bool:
    """Exhaustive search for arms realising the cyclic colour word ``colors``."""
    cols = [0 if ch == "o" else 1 for ch in colors]
    if hole.m == 0:
        return True
    arms = {c: enumerate_arms(config, hole, c) for c in set(cols)}
    k = len(cols)

    def clash(a, b):
        if hole.strict:
            return a[2] & b[2]
        return (a[2] & b[2]) | (a[1] & b[2]) | (b[1] & a[2])

    chosen: list[list] = [[], []]

    def rec(i, word, tmin):
        if i == k:
            return True
        c = word[i]
        for a in arms[c]:
            if a[0] <= tmin:
                continue
            if any(clash(a, b) for b in chosen[c]):
                continue
            chosen[c].append(a)
            if rec(i + 1, word, a[0]):
                return True
            chosen[c].pop()
        return False

    for r in range(k):
        word = cols[r:] + cols[:r]
        if rec(0, word, -1):
            return True
    return False


# ------------------------------------------------------------------ circuits

def _surrounds(cycle: Sequence[Pt], p: tuple[float, float]) -> bool:
    """Even-odd rule for a lattice polygon and a point off its edges."""
    inside = False
    for (ax, ay), (bx, by) in zip(cycle, cycle[1:] + cycle[:1]):
        if ax == bx and min(ay, by) < p[1] < max(ay, by) and ax > p[0]:
            inside = not inside
    return inside


def open_cycles(config: BondConfig) -> list[tuple[Pt, ...]]:
    """Every simple open cycle of B_n, once each, starting at its least vertex."""
    adj = open_neighbours(config)
    out = []
    for s in sorted(adj):
        path, seen = [s], {s}

        def rec(v):
            for w in adj[v]:
                if w == s and len(path) >= 4 and path[1] < path[-1]:
                    out.append(tuple(path))
                elif w > s and w not in seen:
                    seen.add(w)
                    path.append(w)
                    rec(w)
                    path.pop()
                    seen.discard(w)

        rec(s)
    return out


def circuits_around_origin(config: BondConfig) -> list[tuple[Pt, ...]]:
    return [c for c in open_cycles(config) if (0, 0) not in c and _surrounds(list(c), (0.0, 0.25))]


def interior_faces(cycle: Sequence[Pt]) -> int:
    xs = [v[0] for v in cycle]
    ys = [v[1] for v in cycle]
    return sum(_surrounds(list(cycle), (X + 0.5, Y + 0.5))
               for X in range(min(xs), max(xs)) for Y in range(min(ys), max(ys)))


def max_disjoint_circuits(config: BondConfig) -> int:
    """Largest number of pairwise vertex-disjoint open circuits around 0, by search."""
    cs = [frozenset(c) for c in circuits_around_origin(config)]
    best = 0

    def rec(i, used, k):
        nonlocal best
        best = max(best, k)
        for j in range(i, len(cs)):
            if not (cs[j] & used):
                rec(j + 1, used | cs[j], k + 1)

    rec(0, frozenset(), 0)
    return best


def innermost_circuit_oracle(config: BondConfig) -> frozenset | None:
    """Vertex set of the circuit around 0 enclosing the fewest faces (None if there is none)."""
    cs = circuits_around_origin(config)
    if not cs:
        return None
    areas = sorted((interior_faces(c), i) for i, c in enumerate(cs))
    if len(areas) > 1 and areas[0][0] == areas[1][0]:
        raise AssertionError("two circuits enclose the same minimal area")
    return frozenset(cs[areas[0][1]])


# --------------------------------------------------------- left-most radial path

def radial_paths(config: BondConfig) -> Iterator[tuple[Pt, ...]]:
    """Open self-avoiding paths from 0 that end at their first boundary vertex."""
    n = config.n
    adj = open_neighbours(config)
    on_bnd = lambda v: max(abs(v[0]), abs(v[1])) == n
    for p in self_avoiding_paths(adj, (0, 0), on_bnd):
        if not any(on_bnd(v) for v in p[:-1]):
            yield p


def right_sector(n: int, path: Sequence[Pt], wall: Sequence[Pt]) -> int:
    """Faces of B_n on the right of ``path`` and cut off by the dual path ``wall``.

    ``wall`` lists faces by lower-left corner; its faces do not count.
    """
    steps = {(min(a, b), max(a, b)) for a, b in zip(path, path[1:])}
    wallset = set(wall)
    seeds = []
    for (ax, ay), (bx, by) in zip(path, path[1:]):
        seeds.append({(1, 0): (ax, ay - 1), (-1, 0): (bx, ay), (0, 1): (ax, ay), (0, -1): (ax - 1, by)}[(bx - ax, by - ay)])

    def edge_of(f, g):
        (fx, fy), (gx, gy) = f, g
        if fy == gy:
            x = max(fx, gx)
            return ((x, fy), (x, fy + 1))
        y = max(fy, gy)
        return ((fx, y), (fx + 1, y))

    ok = lambda f: -n <= f[0] < n and -n <= f[1] < n and f not in wallset
    seen = {f for f in seeds if ok(f)}
    stack = list(seen)
    while stack:
        f = stack.pop()
        for dx, dy in _STEPS:
            g = (f[0] + dx, f[1] + dy)
            if ok(g) and g not in seen and edge_of(f, g) not in steps:
                seen.add(g)
                stack.append(g)
    return len(seen)


def leftmost_radial_oracle(config: BondConfig, wall: Sequence[Pt]) -> tuple[Pt, ...]:
    """The radial path with the smallest sector against ``wall``; raises on ties."""
    scored = sorted((right_sector(config.n, p, wall), p) for p in radial_paths(config))
    if not scored:
        raise ValueError("the origin is not connected to the boundary")
    if len(scored) > 1 and scored[0][0] == scored[1][0]:
        raise AssertionError("two radial paths share the minimal sector")
    return scored[0][1]


# -------------------------------------------------------------------- detours

def fixture_7x7() -> dict:
    """Hand-built B_3 configuration with one shielded detour at eps = 1.

    Only the edges of the lowest crossing (which dips two rows down in the
    middle) and of the arc P above it are open.
    """
    from .lattice import all_closed

    low = [(-3, 0), (-2, 0), (-1, 0), (-1, -1), (-1, -2), (0, -2), (1, -2), (1, -1), (1, 0), (2, 0), (3, 0)]
    P = [(-2, 0), (-2, 1), (-1, 1), (0, 1), (1, 1), (2, 1), (2, 0)]
    R = [(-3, 0), (-3, 1), (-2, 1), (-1, 1), (0, 1), (1, 1), (2, 1), (2, 0)]
    cfg = all_closed(3).with_edges(opened=[edge_between(a, b) for p in (low, P) for a, b in zip(p, p[1:])])
    return {"config": cfg, "l_n": low, "P": P, "Q": low[1:-1], "R": R,
            "anchor": edge_between((-1, -1), (-1, 0)), "eps": 1.0}


def _faces_below(n: int, path: Sequence[Pt]) -> set:
    """Faces (frame X, Y in [-n-1, n]) below ``path`` extended by rays."""
    steps = {(min(a, b), max(a, b)) for a, b in zip(path, path[1:])}
    (x0, y0), (x1, y1) = path[0], path[-1]
    steps.add(((x0 - 1, y0), (x0, y0)))
    steps.add(((x1, y1), (x1 + 1, y1)))

    def edge_of(f, g):
        (fx, fy), (gx, gy) = f, g
        if fy == gy:
            x = max(fx, gx)
            return ((x, fy), (x, fy + 1))
        y = max(fy, gy)
        return ((fx, y), (fx + 1, y))

    seen = {(X, -n - 1) for X in range(-n - 1, n + 1)}
    stack = list(seen)
    while stack:
        f = stack.pop()
        for dx, dy in _STEPS:
            g = (f[0] + dx, f[1] + dy)
            if -n - 1 <= g[0] <= n and -n - 1 <= g[1] <= n and g not in seen and edge_of(f, g) not in steps:
                seen.add(g)
                stack.append(g)
    return seen


def detour_oracle(config: BondConfig, low: Sequence[Pt], anchor, eps: float,
                  budget: int) -> tuple[Pt, ...] | None:
    """First P around ``anchor`` under (#P, (y, x) sequence) by exhaustive enumeration.

    P runs from an earlier to a later vertex of ``low``, is open, has its
    interior strictly above ``low`` and strictly inside the box, stays in
    B_budget(anchor), and is shielded by some closed dual path.
    """
    n = config.n
    low = list(low)
    pos = {v: i for i, v in enumerate(low)}
    below = _faces_below(n, low)
    j = next(i for i in range(len(low) - 1) if edge_between(low[i], low[i + 1]) == anchor)
    bx, by = anchor.x, anchor.y
    adj = open_neighbours(config)

    def above(v):
        return v not in pos and max(abs(v[0]), abs(v[1])) < n and (v[0], v[1]) not in below \
            and max(abs(v[0] - bx), abs(v[1] - by)) <= budget

    def flanked(i):
        if i <= 0 or i >= len(low) - 1:
            return False
        return low[i - 1][1] == low[i][1] == low[i + 1][1] and abs(low[i - 1][0] - low[i + 1][0]) == 2

    def shielded(w0, wM):
        F0, F1 = (w0[0] - 1, w0[1]), (wM[0], wM[1])
        ok = lambda f: -n <= f[0] < n and -n <= f[1] < n and f not in below

        def closed(f, g):
            (fx, fy), (gx, gy) = f, g
            if fy == gy:
                x = max(fx, gx)
                e = edge_between((x, fy), (x, fy + 1))
            else:
                y = max(fy, gy)
                e = edge_between((fx, y), (fx + 1, y))
            return not config.bits[edge_index(e, n)]

        G0, G1 = (F0[0], F0[1] + 1), (F1[0], F1[1] + 1)
        if F0 == F1 or not all(ok(f) for f in (F0, F1, G0, G1)) or not closed(F0, G0) or not closed(F1, G1):
            return False
        seen, stack = {G0}, [G0]
        while stack:
            f = stack.pop()
            if f == G1:
                return True
            for dx, dy in _STEPS:
                g = (f[0] + dx, f[1] + dy)
                if ok(g) and g not in (F0, F1) and g not in seen and closed(f, g):
                    seen.add(g)
                    stack.append(g)
        return False

    best = None
    for a in range(0, j + 1):
        w0 = low[a]
        if not flanked(a) or max(abs(w0[0]), abs(w0[1])) >= n:
            continue
        up = (w0[0], w0[1] + 1)
        if up not in adj[w0] or not above(up):
            continue
        for b in range(j + 1, len(low)):
            wM = low[b]
            if not flanked(b) or any(max(abs(v[0]), abs(v[1])) >= n for v in low[a:b + 1]):
                continue
            if max(abs(wM[0] - bx), abs(wM[1] - by)) > budget or max(abs(w0[0] - bx), abs(w0[1] - by)) > budget:
                continue
            top = (wM[0], wM[1] + 1)
            if top not in adj[wM] or not above(top):
                continue
            cap = eps * (b - a)
            if cap < 2 or not shielded(w0, wM):
                continue
            path, seen = [w0, up], {w0, up}

            def rec(v):
                nonlocal best
                if len(path) - 1 + 1 > cap:
                    return
                if v == top:
                    cand = path + [wM]
                    k = (len(cand), [(y, x) for x, y in cand])
                    if best is None or k < best[0]:
                        best = (k, tuple(cand))
                    return
                for w in adj[v]:
                    if w not in seen and above(w):
                        seen.add(w)
                        path.append(w)
                        rec(w)
                        path.pop()
                        seen.discard(w)

            rec(up)
    return None if best is None else best[1]
