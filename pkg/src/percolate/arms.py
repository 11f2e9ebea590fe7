"""Arm events around an edge, a vertex or an annulus, and their Monte Carlo probabilities.

An arm of colour ``o`` is an open primal path; an arm of colour ``c`` is a
closed dual path.  Arms start at the ports of the hole (the endpoints of e
and of e*, or the vertex and its four faces, or the inner ring of an
annulus), end at the first vertex of the target ring and are disjoint
within each colour.  Around an edge or a vertex, arms of one colour may
leave a common port along distinct first steps; across an annulus they are
fully vertex-disjoint.  Their landing points must follow the cyclic colour
word of the ArmSpec, counter-clockwise.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import _arms, _core
from ._accel import USE_NUMBA
from ._parallel import run_chunks
from .lattice import HORIZONTAL, BondConfig, EdgeId, Vertex, sample_config
from .stats import EstimatorResult, proportion

OPEN = "o"
CLOSED = "c"
FULL_PLANE = "full"
UPPER_HALF = "upper"


@dataclass(frozen=True)
class ArmSpec:
    """Cyclic colour word over {'o', 'c'} plus the region the arms must stay in."""

    colors: tuple[str, ...]
    region: str = FULL_PLANE

    def __post_init__(self):
        cols = tuple(self.colors)
        if not cols:
            raise ValueError("an arm spec needs at least one arm")
        if any(c not in (OPEN, CLOSED) for c in cols):
            raise ValueError(f"colours must be 'o' or 'c', got {cols}")
        if self.region not in (FULL_PLANE, UPPER_HALF):
            raise ValueError(f"unknown region {self.region!r}")
        object.__setattr__(self, "colors", cols)

    @classmethod
    def parse(cls, word: str, region: str = FULL_PLANE) -> "ArmSpec":
        return cls(tuple(word.strip().lower()), region)

    @property
    def word(self) -> str:
        return "".join(self.colors)

    def count(self, color: str) -> int:
        return sum(1 for c in self.colors if c == color)

    def runs(self) -> tuple[np.ndarray, np.ndarray]:
        """Maximal cyclic runs as (colour code, length); colour 0 is open."""
        cols = [0 if c == OPEN else 1 for c in self.colors]
        k = len(cols)
        if all(c == cols[0] for c in cols):
            return np.array([cols[0]], np.int64), np.array([k], np.int64)
        s = next(i for i in range(k) if cols[i] != cols[i - 1])
        rc, rs = [], []
        for j in range(k):
            c = cols[(s + j) % k]
            if rc and rc[-1] == c:
                rs[-1] += 1
            else:
                rc.append(c)
                rs.append(1)
        return np.array(rc, np.int64), np.array(rs, np.int64)


PI1 = ArmSpec((OPEN,))
PI3 = ArmSpec((OPEN, OPEN, CLOSED))
PI4 = ArmSpec((OPEN, CLOSED, OPEN, CLOSED))
PI4_MONO = ArmSpec((OPEN, OPEN, OPEN, OPEN))
PI5 = ArmSpec((OPEN, CLOSED, OPEN, CLOSED, OPEN))
PI3_HALF = ArmSpec((OPEN, OPEN, CLOSED), UPPER_HALF)

Center = Union[Vertex, EdgeId, tuple]


@dataclass(frozen=True)
class AnnulusQuery:
    """Arms from the inner radius ``m`` to the outer radius ``n`` around ``center``.

    ``m = 0`` means the hole is the centre itself: a vertex, or an edge with
    its dual.  An EdgeId centre with m >= 1 uses the edge's base vertex.
    """

    m: int
    n: int
    center: Center = Vertex(0, 0)

    def __post_init__(self):
        c = self.center
        if not isinstance(c, (Vertex, EdgeId)):
            c = Vertex(*c)
            object.__setattr__(self, "center", c)
        if self.m < 0 or self.n < 1:
            raise ValueError("radii must satisfy m >= 0 and n >= 1")
        if self.m >= self.n:
            raise ValueError(f"inner radius {self.m} must be below outer radius {self.n}")

    @property
    def base(self) -> Vertex:
        c = self.center
        return c.base if isinstance(c, EdgeId) else c


@dataclass(frozen=True)
class Hole:
    """Ports and target ring of one arm event, in coordinates local to (bx, by)."""

    bx: int
    by: int
    m: int
    half: bool
    strict: bool
    m_in: int
    oports: np.ndarray
    cports: np.ndarray


def _ports_array(pts: Sequence[tuple[int, int]]) -> np.ndarray:
    return np.array(list(pts), dtype=np.int64).reshape(-1, 2)


def edge_hole(e: EdgeId, m: int, half: bool = False) -> Hole:
    hx, hy = e.head
    op = [(0, 0), (hx - e.x, hy - e.y)]
    cp = [(0, -1), (0, 0)] if e.orientation == HORIZONTAL else [(-1, 0), (0, 0)]
    return Hole(e.x, e.y, m, half, False, 0, _ports_array(op), _ports_array(cp))


def vertex_hole(v: Sequence[int], m: int, half: bool = False) -> Hole:
    op = [(0, 0)]
    cp = [(0, 0), (-1, 0), (-1, -1), (0, -1)]
    return Hole(int(v[0]), int(v[1]), m, half, False, 0, _ports_array(op), _ports_array(cp))


def annulus_hole(q: AnnulusQuery, half: bool = False) -> Hole:
    if q.m == 0:
        if isinstance(q.center, EdgeId):
            return edge_hole(q.center, q.n, half)
        return vertex_hole(q.center, q.n, half)
    k = q.m
    op = [(x, y) for y in range(-k, k + 1) for x in range(-k, k + 1) if max(abs(x), abs(y)) == k]
    cp = [(x, y) for y in range(-k - 1, k + 1) for x in range(-k - 1, k + 1)
          if max(abs(2 * x + 1), abs(2 * y + 1)) == 2 * k + 1]
    b = q.base
    return Hole(b.x, b.y, q.n, half, True, k, _ports_array(op), _ports_array(cp))


def _check_box(h: Hole, n: int):
    if max(abs(h.bx), abs(h.by)) + h.m > n:
        raise ValueError(f"B_{h.m}({h.bx},{h.by}) does not fit inside B_{n}")


def _decide(N, bits, key, thr, lazy, h: Hole, spec: ArmSpec) -> bool:
    rc, rs = spec.runs()
    r = _arms.arm_event(N, bits, key, thr, lazy, h.bx, h.by, h.m, h.half, h.strict, h.m_in,
                        h.oports, h.cports, rc, rs, spec.count(OPEN), spec.count(CLOSED))
    if r == _arms.FALLBACK:
        return _split_pieces_event(N, bits, key, thr, lazy, h, spec)
    return bool(r)


def _split_pieces_event(N, bits, key, thr, lazy, h: Hole, spec: ArmSpec) -> bool:
    """Slow path for annuli where one piece lands on several arcs.

    Each arc of a piece becomes its own sink; an assignment of arm counts to
    arcs is feasible when one flow per piece meets all of its arc demands.
    """
    if not h.strict:
        raise RuntimeError("a piece around an edge or vertex landed on two separate arcs")
    m, R = h.m, 2 * h.m - 1
    pieces = []  # (colour, adjacency, ports, sites [(t, node, target)])
    for c, need in ((0, spec.count(OPEN)), (1, spec.count(CLOSED))):
        if need == 0:
            continue
        lo, hi = -m, (m if c == 0 else m - 1)
        tr2, minr2 = (2 * m if c == 0 else 2 * m - 1), 2 * h.m_in + c
        ports = [tuple(int(v) for v in q) for q in (h.oports if c == 0 else h.cports)]

        def inside(v, lo=lo, hi=hi, minr2=minr2, c=c):
            return (lo <= v[0] <= hi and lo <= v[1] <= hi and not (h.half and v[1] < 0)
                    and int(_arms._r2(c, v[0], v[1])) >= minr2)

        def step_ok(v, d, c=c, minr2=minr2, tr2=tr2, inside=inside):
            w = (v[0] + int(_core.DX[d]), v[1] + int(_core.DY[d]))
            if not inside(w):
                return None
            if int(_arms._r2(c, *v)) == minr2 and int(_arms._r2(c, *w)) == minr2:
                return None
            if not _arms._edge_ok(N, bits, key, thr, lazy, c, h.bx, h.by, v[0], v[1], d):
                return None
            return w

        seen = set()
        for p0 in ports:
            if not inside(p0) or p0 in seen:
                continue
            if int(_arms._r2(c, *p0)) == tr2:
                t0 = int(_arms._port_site(c, p0[0], p0[1], m, R))
                pieces.append((c, {p0: []}, [p0], [(t0, p0, p0)]))
                continue
            adj, sites, stack = {}, [], [p0]
            seen.add(p0)
            while stack:
                v = stack.pop()
                adj[v] = []
                for d in range(4):
                    w = step_ok(v, d)
                    if w is None:
                        continue
                    if int(_arms._r2(c, *w)) == tr2:
                        sites.append((int(_arms._site(c, v[0], v[1], w[0], w[1], R)), v, w))
                        continue
                    adj[v].append(w)
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            if sites:
                pieces.append((c, adj, [q for q in ports if q in adj], sites))
    allsites = sorted((t, i, v, w) for i, pc in enumerate(pieces) for (t, v, w) in pc[3])
    blocks = []  # (piece, [(node, target)])
    for t, i, v, w in allsites:
        if blocks and blocks[-1][0] == i:
            blocks[-1][1].append((v, w))
        else:
            blocks.append((i, [(v, w)]))
    if len(blocks) > 1 and blocks[-1][0] == blocks[0][0]:
        i, tail = blocks.pop()
        blocks[0] = (i, tail + blocks[0][1])
    if not blocks:
        return False
    rc, rs = spec.runs()
    L, J = len(blocks), len(rc)
    memo = {}

    def feasible(assign):
        for i in {blocks[b][0] for b, k in assign if k}:
            demand = tuple((b, k) for b, k in assign if k and blocks[b][0] == i)
            if (i, demand) not in memo:
                memo[(i, demand)] = _piece_flow(pieces[i], [(blocks[b][1], k) for b, k in demand])
            if not memo[(i, demand)]:
                return False
        return True

    def rec(pos, end, j, rem, assign):
        if j == J:
            return feasible(assign)
        if pos == end:
            return False
        b = pos % L
        col = pieces[blocks[b][0]][0]
        if col == rc[j]:
            for k in range(min(rem, spec.count(OPEN if col == 0 else CLOSED)), 0, -1):
                assign.append((b, k))
                ok = rec(pos + 1, end, j + 1, rs[(j + 1) % J] if j + 1 < J else 0, assign) if k == rem \
                    else rec(pos + 1, end, j, rem - k, assign)
                assign.pop()
                if ok:
                    return True
        return rec(pos + 1, end, j, rem, assign)

    rc0, rs0 = rc, rs
    for rot in range(J):
        rc, rs = np.roll(rc0, -rot), np.roll(rs0, -rot)
        for start in range(L):
            if rec(start, start + L, 0, int(rs[0]), []):
                return True
    return False


def _piece_flow(piece, demands) -> bool:
    """Whether node-disjoint port-to-target paths meet every (sites, k) demand."""
    _, adj, ports, _ = piece
    cap: dict = {}

    def arc(a, b, k=1):
        cap[(a, b)] = cap.get((a, b), 0) + k
        cap.setdefault((b, a), 0)

    for v, nbrs in adj.items():
        arc(("i", v), ("o", v))
        for w in nbrs:
            arc(("o", v), ("i", w))
    for q in ports:
        arc("src", ("i", q))
    total = 0
    for b, (sites, k) in enumerate(demands):
        total += k
        for v, w in sites:
            arc(("o", v), ("t", w))
            arc(("t", w), ("T", w))
            arc(("T", w), ("blk", b))
        arc(("blk", b), "snk", k)
    out: dict = {}
    for (a, b) in cap:
        out.setdefault(a, []).append(b)
    flow = 0
    while flow < total:
        par = {"src": None}
        queue = ["src"]
        for a in queue:
            if a == "snk":
                break
            for b in out.get(a, ()):
                if b not in par and cap[(a, b)] > 0:
                    par[b] = a
                    queue.append(b)
        if "snk" not in par:
            return False
        b = "snk"
        while par[b] is not None:
            a = par[b]
            cap[(a, b)] -= 1
            cap[(b, a)] += 1
            b = a
        flow += 1
    return True


def _config_args(config: BondConfig):
    z = _core.kernel_scalar(0)
    return config.n, config.bits, z, z, False


def hole_event(config: BondConfig, h: Hole, spec: ArmSpec) -> bool:
    _check_box(h, config.n)
    N, bits, key, thr, lazy = _config_args(config)
    return _decide(N, bits, key, thr, lazy, h, spec)


def edge_arm_event(config: BondConfig, e: EdgeId, radius: int, spec: ArmSpec) -> bool:
    """Arms from e and e* to the boundary of B_radius(base of e)."""
    if radius < 0:
        raise ValueError("radius must be non-negative")
    if radius == 0:
        return True
    h = edge_hole(e, radius, spec.region == UPPER_HALF)
    return hole_event(config, h, spec)


def annulus_arm_event(config: BondConfig, q: AnnulusQuery, spec: ArmSpec) -> bool:
    """Arms crossing B_n(center) minus B_m(center) (or from the centre itself when m = 0)."""
    return hole_event(config, annulus_hole(q, spec.region == UPPER_HALF), spec)


def event_batch(h: Hole, spec: ArmSpec, seed: int, first: int, count: int, p: float = 0.5) -> np.ndarray:
    """Indicators of the event on trials first .. first+count-1 (edges drawn on demand)."""
    rc, rs = spec.runs()
    N = max(abs(h.bx), abs(h.by)) + h.m
    out = np.empty(count, np.int64)
    _arms.arm_batch(N, _core.kernel_scalar(seed), first, count, _core.kernel_scalar(_core.threshold(p)),
                    h.bx, h.by, h.m, h.half, h.strict, h.m_in, h.oports, h.cports, rc, rs,
                    spec.count(OPEN), spec.count(CLOSED), out)
    # rare split-piece trials: redo them on the explicit configuration (same draws)
    for i in np.flatnonzero(out == _arms.FALLBACK):
        out[i] = hole_event(sample_config(N, p, seed, first + int(i)), h, spec)
    return out


def estimate_pi(spec: ArmSpec, q: AnnulusQuery, trials: int, seed: int, p: float = 0.5,
                threads: int = 1, stream0: int = 0) -> EstimatorResult:
    """Monte Carlo probability of the arm event; trial i uses stream stream0 + i."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    h = annulus_hole(q, spec.region == UPPER_HALF)
    hits = run_chunks(lambda a, b: int(event_batch(h, spec, seed, stream0 + a, b - a, p).sum()),
                      trials, threads)
    return proportion(trials, sum(hits), seed)


__all__ = [
    "AnnulusQuery", "ArmSpec", "Hole", "PI1", "PI3", "PI3_HALF", "PI4", "PI4_MONO", "PI5",
    "annulus_arm_event", "annulus_hole", "edge_arm_event", "edge_hole", "estimate_pi",
    "event_batch", "hole_event", "vertex_hole", "USE_NUMBA",
]
