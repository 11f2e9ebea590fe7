"""Shielded detours around the lowest crossing and the shortcut crossing built from them.

A detour P leaves the lowest crossing l_n upward at w_0, returns downward at
w_M, and is shielded from above by a closed dual path R.  Splicing a
vertex-disjoint family of detours into l_n gives an open crossing sigma_n
that is never longer than l_n.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _detour
from .geometry import DUAL, LatticePath, _dual_edge
from .lattice import BondConfig, EdgeId, edge_between, edge_in_box, edge_index

ALPHA3 = 0.3

Pt = tuple[int, int]


@dataclass(frozen=True)
class ShieldedDetour:
    P: LatticePath
    Q: LatticePath
    R: LatticePath
    anchor: EdgeId

    @property
    def w0(self) -> Pt:
        return self.P.vertices[0]

    @property
    def wM(self) -> Pt:
        return self.P.vertices[-1]


@dataclass(frozen=True)
class DetourReport:
    """Outcome of checking the five detour conditions; ``failed`` lists violated ones."""

    failed: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return not self.failed

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class DetourPlan:
    detours: tuple[ShieldedDetour, ...]
    Pi: tuple[ShieldedDetour, ...]
    sigma: LatticePath

    @property
    def detoured_edges(self) -> int:
        return sum(len(d.Q) for d in self.Pi)


def default_budget(eps: float) -> int:
    return 2 * math.ceil(1 / eps) * 16


def lambda_radius(n: int, alpha3: float = ALPHA3) -> float:
    """Half-width of Lambda_n = B_{n - n^{alpha3/2}}."""
    return n - n ** (alpha3 / 2)


class _Crossing:
    """Per-(config, l_n) data: positions on l_n and the region below it."""

    def __init__(self, config: BondConfig, l_n: LatticePath):
        self.config = config
        self.n = n = config.n
        self.l = list(l_n.vertices)
        if len(self.l) < 2 or self.l[0][0] != -n or self.l[-1][0] != n:
            raise ValueError("l_n is not a left-right crossing")
        self.pos = {v: i for i, v in enumerate(self.l)}
        xs = np.array([v[0] for v in self.l], np.int64)
        ys = np.array([v[1] for v in self.l], np.int64)
        self.below = _detour.below_faces(n, xs, ys)
        self.edges = set(l_n.edges)
        F = 2 * n + 2
        X = np.arange(F * F) % F - n - 1
        Y = np.arange(F * F) // F - n - 1
        inbox = (X >= -n) & (X <= n - 1) & (Y >= -n) & (Y <= n - 1)
        self.allowed = (inbox & (self.below == 0)).astype(np.uint8)

    def fidx(self, f: Pt) -> int:
        n = self.n
        return (f[1] + n + 1) * (2 * n + 2) + (f[0] + n + 1)

    def face_of(self, i: int) -> Pt:
        F = 2 * self.n + 2
        return (int(i % F) - self.n - 1, int(i // F) - self.n - 1)

    def in_B(self, v: Pt) -> bool:
        """Whether vertex v lies in the open region below l_n."""
        return v not in self.pos and bool(self.below[self.fidx(v)])

    def open(self, a: Pt, b: Pt) -> bool:
        e = edge_between(a, b)
        return edge_in_box(e, self.n) and bool(self.config.bits[edge_index(e, self.n)])

    def closed_dual(self, f: Pt, g: Pt) -> bool:
        e = _dual_edge(f, g)
        return edge_in_box(e, self.n) and not self.config.bits[edge_index(e, self.n)]

    def flanked(self, i: int) -> bool:
        """l_n runs horizontally through its i-th vertex."""
        if i <= 0 or i >= len(self.l) - 1:
            return False
        (ax, ay), (x, y), (bx, by) = self.l[i - 1], self.l[i], self.l[i + 1]
        return ay == y == by and {ax, bx} == {x - 1, x + 1}

    def segment(self, a: int, b: int) -> list[Pt]:
        return self.l[a:b + 1] if a <= b else self.l[b:a + 1][::-1]


def _in_box(v: Sequence[int], n: int) -> bool:
    return max(abs(v[0]), abs(v[1])) <= n


def _strictly_inside(v: Sequence[int], n: int) -> bool:
    return max(abs(v[0]), abs(v[1])) < n


def _verify(cx: _Crossing, cand: ShieldedDetour, eps: float) -> DetourReport:
    n = cx.n
    P = list(cand.P.vertices)
    Q = list(cand.Q.vertices)
    R = list(cand.R.vertices)
    if cand.P.lattice == DUAL or cand.Q.lattice == DUAL or cand.R.lattice != DUAL:
        raise ValueError("P and Q must be primal paths and R a dual path")
    for v in P + Q:
        if not _in_box(v, n):
            raise ValueError(f"vertex {v} lies outside B_{n}")
    for f in R:
        if not (-n - 1 <= f[0] <= n and -n - 1 <= f[1] <= n):
            raise ValueError(f"dual vertex {f} lies outside the dual box")
    failed = []
    M = len(P) - 1
    w0, wM = P[0], P[-1]

    # 1: interior of P avoids the closed region below l_n (l_n included)
    if any(w in cx.pos or cx.in_B(w) for w in P[1:-1]):
        failed.append(1)

    # 2: horizontal flanks on l_n and vertical first and last steps
    flanks = [((w0[0] - 1, w0[1]), w0), (w0, (w0[0] + 1, w0[1])),
              ((wM[0] - 1, wM[1]), wM), (wM, (wM[0] + 1, wM[1]))]
    ok2 = M >= 2 and all(_in_box(a, n) and _in_box(b, n) and edge_between(a, b) in cx.edges for a, b in flanks)
    ok2 = ok2 and P[1] == (w0[0], w0[1] + 1) and P[M - 1] == (wM[0], wM[1] + 1)
    if not ok2:
        failed.append(2)

    # 3: Q is the l_n segment from w0 to wM through the anchor; Q + P is an open circuit strictly inside
    ok3 = w0 in cx.pos and wM in cx.pos and w0 != wM
    if ok3:
        a, b = cx.pos[w0], cx.pos[wM]
        seg = cx.segment(a, b)
        lo, hi = min(a, b), max(a, b)
        anchor_in = any(edge_between(cx.l[j], cx.l[j + 1]) == cand.anchor for j in range(lo, hi))
        ok3 = anchor_in and Q == seg
    if ok3:
        body = set(Q)
        ok3 = (len(set(P)) == len(P) and not body.intersection(P[1:-1]) and len(P) + len(Q) >= 6
               and all(_strictly_inside(v, n) for v in P + Q)
               and all(cx.open(u, v) for u, v in zip(P, P[1:])))
    if not ok3:
        failed.append(3)

    # 4: closed dual shield above, vertical at both ends
    ok4 = len(R) >= 3 and R[0] == (w0[0] - 1, w0[1]) and R[-1] == (wM[0], wM[1])
    ok4 = ok4 and len(set(R)) == len(R)
    if ok4:
        ok4 = R[1][0] == R[0][0] and R[-2][0] == R[-1][0]
    if ok4:
        ok4 = all(cx.allowed[cx.fidx(f)] for f in R) and all(cx.closed_dual(f, g) for f, g in zip(R, R[1:]))
    if not ok4:
        failed.append(4)

    # 5: short detour
    if not len(P) - 1 <= eps * (len(Q) - 1):
        failed.append(5)
    return DetourReport(tuple(failed))


def verify_shielded_detour(config: BondConfig, l_n: LatticePath, cand: ShieldedDetour,
                           eps: float) -> DetourReport:
    """Check the five shielded-detour conditions; the report names the ones that fail.

    P must be open: condition 3 asks for an open circuit Q + P, all of
    whose vertices lie strictly inside the box.
    """
    return _verify(_Crossing(config, l_n), cand, eps)


class _Search:
    """Canonical detours for every anchor of one crossing.

    A candidate is fixed by its endpoints w0 = l[a], wM = l[b] (a < b); its P
    is the shortest open path over vertices strictly above l_n, lexicographically
    least under (y, x).  Candidates are ranked by (#P, vertex sequence).
    """

    def __init__(self, config: BondConfig, l_n: LatticePath, eps: float, budget: int | None,
                 alpha3: float):
        if eps <= 0:
            raise ValueError("eps must be positive")
        self.cx = cx = _Crossing(config, l_n)
        self.eps = eps
        self.budget = default_budget(eps) if budget is None else int(budget)
        n = self.n = cx.n
        W = 2 * n + 1
        lam = lambda_radius(n, alpha3)
        l = cx.l
        m = len(l)
        self.anchors = [j for j in range(m - 1)
                        if max(abs(l[j][0]), abs(l[j][1]), abs(l[j + 1][0]), abs(l[j + 1][1])) <= lam]
        self.anchor_set = set(self.anchors)
        self.edge_at = {edge_between(l[j], l[j + 1]): j for j in range(m - 1)}

        U = np.zeros(W * W, np.uint8)
        for y in range(-n + 1, n):
            for x in range(-n + 1, n):
                if not cx.in_B((x, y)) and (x, y) not in cx.pos:
                    U[(y + n) * W + x + n] = 1
        self.U = U
        ports = [i for i in range(m) if cx.flanked(i) and _strictly_inside(l[i], n)
                 and U[(l[i][1] + 1 + n) * W + l[i][0] + n]
                 and cx.open(l[i], (l[i][0], l[i][1] + 1))]
        self.ports = ports
        ups = np.array([(l[i][1] + 1 + n) * W + l[i][0] + n for i in ports], np.int64)
        self.dist = _detour.port_bfs(n, config.bits, U, ups) if len(ports) else np.zeros((0, W * W), np.int32)
        bnd = np.array([0] + [int(not _strictly_inside(v, n)) for v in l]).cumsum()

        k = len(ports)
        cands = []
        if k:
            D = self.dist[:, ups]
            pa = np.array(ports)
            for ib in range(k):
                col = D[:ib, ib]
                for ia in np.flatnonzero(col >= 0):
                    a, b = int(pa[ia]), int(pa[ib])
                    lp = int(col[ia]) + 2
                    if lp > eps * (b - a) or bnd[b + 1] - bnd[a] > 0:
                        continue
                    cands.append((lp, l[a][1], l[a][0], a, b, int(ib)))
        cands.sort()
        self.cands = cands
        self._R: dict[tuple[int, int], list[Pt] | None] = {}
        self._P: dict[tuple[int, int], list[Pt]] = {}

    # -- pieces of a candidate

    def path(self, a: int, b: int, ib: int) -> list[Pt]:
        key = (a, b)
        if key in self._P:
            return self._P[key]
        n, cx, U = self.n, self.cx, self.U
        W = 2 * n + 1
        dist = self.dist[ib]
        v = (cx.l[a][0], cx.l[a][1] + 1)
        out = [cx.l[a], v]
        t = int(dist[(v[1] + n) * W + v[0] + n])
        while t > 0:
            nxt = None
            for dx, dy in ((0, -1), (-1, 0), (1, 0), (0, 1)):  # (y, x) order
                w = (v[0] + dx, v[1] + dy)
                if not _in_box(w, n):
                    continue
                j = (w[1] + n) * W + w[0] + n
                if U[j] and dist[j] == t - 1 and cx.open(v, w):
                    nxt = w
                    break
            v = nxt
            out.append(v)
            t -= 1
        out.append(cx.l[b])
        self._P[key] = out
        return out

    def shield(self, a: int, b: int) -> list[Pt] | None:
        key = (a, b)
        if key in self._R:
            return self._R[key]
        cx = self.cx
        w0, wM = cx.l[a], cx.l[b]
        F0, F1 = (w0[0] - 1, w0[1]), (wM[0], wM[1])
        G0, G1 = (F0[0], F0[1] + 1), (F1[0], F1[1] + 1)
        res = None
        ok = all(-self.n <= c <= self.n - 1 for f in (F0, F1, G0, G1) for c in f)
        if ok and F0 != F1 and all(cx.allowed[cx.fidx(f)] for f in (F0, F1, G0, G1)) \
                and cx.closed_dual(F0, G0) and cx.closed_dual(F1, G1):
            inside = cx.allowed.copy()
            inside[cx.fidx(F0)] = 0
            inside[cx.fidx(F1)] = 0
            mid = _detour.dual_path(self.n, cx.config.bits, inside, cx.fidx(G0), cx.fidx(G1))
            if len(mid):
                res = [F0] + [cx.face_of(int(i)) for i in mid] + [F1]
        self._R[key] = res
        return res

    def within_budget(self, P: list[Pt], j: int) -> bool:
        e = edge_between(self.cx.l[j], self.cx.l[j + 1])
        bx, by = e.x, e.y
        return all(max(abs(x - bx), abs(y - by)) <= self.budget for x, y in P)

    def detour(self, a: int, b: int, ib: int, j: int) -> ShieldedDetour:
        cx = self.cx
        return ShieldedDetour(LatticePath(tuple(self.path(a, b, ib))), LatticePath(tuple(cx.l[a:b + 1])),
                              LatticePath(tuple(self.shield(a, b)), DUAL),
                              edge_between(cx.l[j], cx.l[j + 1]))

    # -- sweep

    def _groups(self):
        """Candidates in canonical order: equal (#P, w0) groups are sorted by the full path."""
        c = self.cands
        i = 0
        while i < len(c):
            j = i
            while j < len(c) and c[j][:4] == c[i][:4]:
                j += 1
            grp = c[i:j]
            if len(grp) > 1:
                grp = sorted(grp, key=lambda t: [(y, x) for x, y in self.path(t[3], t[4], t[5])])
            yield from grp
            i = j

    def run(self, only: int | None = None) -> dict[int, tuple[int, int, int]]:
        todo = sorted(self.anchors) if only is None else [only]
        out: dict[int, tuple[int, int, int]] = {}
        for lp, _, _, a, b, ib in self._groups():
            if not todo:
                break
            lo = bisect.bisect_left(todo, a)
            hi = bisect.bisect_left(todo, b)
            if lo == hi:
                continue
            if self.shield(a, b) is None:
                continue
            P = self.path(a, b, ib)
            hit = [j for j in todo[lo:hi] if self.within_budget(P, j)]
            for j in hit:
                out[j] = (a, b, ib)
                todo.remove(j)
        return out


def find_detour(config: BondConfig, l_n: LatticePath, e: EdgeId, eps: float,
                budget: int | None = None, alpha3: float = ALPHA3) -> ShieldedDetour | None:
    """pi(e): the first shielded detour around e in canonical order, or None within the budget."""
    s = _Search(config, l_n, eps, budget, alpha3)
    j = s.edge_at.get(e)
    if j is None or j not in s.anchor_set:
        raise ValueError(f"{e} is not an edge of l_n inside Lambda_n")
    hit = s.run(only=j).get(j)
    if hit is None:
        return None
    return s.detour(*hit, j)


def find_all_detours(config: BondConfig, l_n: LatticePath, eps: float, budget: int | None = None,
                     alpha3: float = ALPHA3) -> dict[EdgeId, ShieldedDetour]:
    """pi(e) for every anchor e on l_n inside Lambda_n that has one."""
    s = _Search(config, l_n, eps, budget, alpha3)
    return {edge_between(s.cx.l[j], s.cx.l[j + 1]): s.detour(a, b, ib, j)
            for j, (a, b, ib) in sorted(s.run().items())}


def build_shortcut(config: BondConfig, l_n: LatticePath, detours: Sequence[ShieldedDetour],
                   eps: float | None = None) -> DetourPlan:
    """Select Pi greedily by decreasing #Q and splice it into l_n.

    Detours sharing a P count once, under their least anchor.  With ``eps``
    given every detour is re-verified first.  A detour longer than its
    detoured segment (possible only for eps > 1) is rejected.
    """
    cx = _Crossing(config, l_n)
    for d in detours:
        if len(d.P) > len(d.Q):
            raise ValueError(f"detour around {d.anchor} is longer than the segment it replaces")
    if eps is not None:
        for d in detours:
            rep = _verify(cx, d, eps)
            if not rep:
                raise ValueError(f"detour around {d.anchor} fails conditions {rep.failed}")
    uniq: dict[tuple, ShieldedDetour] = {}
    for d in sorted(detours, key=lambda d: d.anchor):
        uniq.setdefault(d.P.vertices, d)
    distinct = tuple(uniq.values())
    spans = []
    for d in distinct:
        if d.w0 not in cx.pos or d.wM not in cx.pos:
            raise ValueError("detour endpoints are not on l_n")
        a, b = cx.pos[d.w0], cx.pos[d.wM]
        P = list(d.P.vertices)
        if a > b:
            a, b, P = b, a, P[::-1]
        spans.append((a, b, P, d))
    order = sorted(spans, key=lambda s: (-(s[1] - s[0]), s[3].anchor))
    chosen = []
    for s in order:
        if all(s[1] < c[0] or c[1] < s[0] for c in chosen):
            chosen.append(s)
    chosen.sort(key=lambda s: s[0])
    seq: list[Pt] = []
    i = 0
    for a, b, P, _ in chosen:
        seq.extend(cx.l[i:a])
        seq.extend(P[:-1])
        i = b
    seq.extend(cx.l[i:])
    sigma = LatticePath(tuple(seq))
    n = config.n
    expect = len(l_n) - sum(b - a for a, b, _, _ in chosen) + sum(len(P) - 1 for _, _, P, _ in chosen)
    if not (seq[0][0] == -n and seq[-1][0] == n and len(sigma) == expect <= len(l_n)
            and all(cx.open(u, v) for u, v in zip(seq, seq[1:]))):
        raise AssertionError("spliced detours do not form a shorter open crossing")
    return DetourPlan(distinct, tuple(s[3] for s in chosen), sigma)


__all__ = ["ALPHA3", "DetourPlan", "DetourReport", "ShieldedDetour", "build_shortcut",
           "default_budget", "find_all_detours", "find_detour", "lambda_radius",
           "verify_shielded_detour"]
