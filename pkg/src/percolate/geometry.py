"""Canonical geometric objects of a configuration.

Faces of the box are addressed by their lower-left corner (X, Y); the dual
vertex of face (X, Y) is (X + 1/2, Y + 1/2).  Faces with X or Y equal to
-n-1 or n lie outside B_n and stand for the exterior of the dual box.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _core, _graph
from .lattice import BondConfig, EdgeId, Vertex, edge_between, edge_in_box, edge_index

PRIMAL = "primal"
DUAL = "dual"

Pt = tuple[int, int]
_STEPS = ((1, 0), (0, 1), (-1, 0), (0, -1))  # E, N, W, S


class PreconditionError(ValueError):
    """The configuration lies outside the event an operation requires."""


@dataclass(frozen=True)
class LatticePath:
    """Vertex sequence on the primal lattice, or on the dual lattice by face corner.

    ``edges`` lists the primal EdgeId of each step (for dual steps, the edge crossed).
    """

    vertices: tuple[Pt, ...]
    lattice: str = PRIMAL
    edges: tuple[EdgeId, ...] = field(init=False)

    def __post_init__(self):
        vs = tuple((int(x), int(y)) for x, y in self.vertices)
        object.__setattr__(self, "vertices", vs)
        for a, b in zip(vs, vs[1:]):
            if abs(a[0] - b[0]) + abs(a[1] - b[1]) != 1:
                raise ValueError(f"{a} and {b} are not neighbours")
        step = _dual_edge if self.lattice == DUAL else edge_between
        object.__setattr__(self, "edges", tuple(step(a, b) for a, b in zip(vs, vs[1:])))

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def self_avoiding(self) -> bool:
        return len(set(self.vertices)) == len(self.vertices)

    def points(self) -> list[tuple[float, float]]:
        """Coordinates in the plane (dual vertices sit at half-integers)."""
        off = 0.5 if self.lattice == DUAL else 0.0
        return [(x + off, y + off) for x, y in self.vertices]

    def to_json(self) -> str:
        return json.dumps({"lattice": self.lattice, "path": [list(p) for p in self.points()]})


def _dual_edge(f: Pt, g: Pt) -> EdgeId:
    """Primal edge crossed by the dual step between faces f and g."""
    (fx, fy), (gx, gy) = f, g
    if fy == gy:
        x = max(fx, gx)
        return edge_between((x, fy), (x, fy + 1))
    y = max(fy, gy)
    return edge_between((fx, y), (fx + 1, y))


@dataclass(frozen=True)
class Circuit(LatticePath):
    """Closed primal path (first vertex repeated at the end)."""

    def __post_init__(self):
        super().__post_init__()
        if len(self.vertices) < 5 or self.vertices[0] != self.vertices[-1]:
            raise ValueError("a circuit must be closed and have at least 4 edges")

    @property
    def self_avoiding(self) -> bool:
        body = self.vertices[:-1]
        return len(set(body)) == len(body)

    def contains(self, v: Sequence[float]) -> bool:
        """Strict interior test by ray casting to the right at height v.y + 1/4."""
        px, py = float(v[0]), float(v[1]) + 0.25
        inside = False
        for e in self.edges:
            if e.orientation == 1 and e.x > px and e.y < py < e.y + 1:
                inside = not inside
        return inside

    @property
    def winding(self) -> bool:
        """Whether the circuit surrounds the origin."""
        return (0, 0) not in self.vertices[:-1] and self.contains((0, 0))


@dataclass(frozen=True)
class CircuitDecomposition:
    circuits: tuple[Circuit, ...]
    connectors: tuple[LatticePath, ...]

    @property
    def K(self) -> int:
        return len(self.circuits)


# ------------------------------------------------------------ connectivity

def _flat(n: int, v: Sequence[int]) -> int:
    x, y = int(v[0]), int(v[1])
    if max(abs(x), abs(y)) > n:
        raise ValueError(f"vertex {(x, y)} is outside B_{n}")
    return (y + n) * (2 * n + 1) + (x + n)


def _mask(n: int, vs: Iterable[Sequence[int]] | None) -> np.ndarray:
    W = 2 * n + 1
    if vs is None:
        return np.ones(W * W, np.uint8)
    m = np.zeros(W * W, np.uint8)
    for v in vs:
        m[_flat(n, v)] = 1
    return m


def _bits_args(config: BondConfig):
    z = _core.kernel_scalar(0)
    return config.bits, z, z, False


def box_vertices(n: int, center: Sequence[int] = (0, 0), radius: int | None = None) -> list[Pt]:
    r = n if radius is None else radius
    cx, cy = center
    return [(x, y) for y in range(cy - r, cy + r + 1) for x in range(cx - r, cx + r + 1)
            if max(abs(x), abs(y)) <= n]


def boundary_vertices(n: int) -> list[Pt]:
    return [(x, y) for y in range(-n, n + 1) for x in range(-n, n + 1) if max(abs(x), abs(y)) == n]


def _search(config, A, B, region):
    A, B = list(A), list(B)
    if not A or not B:
        raise ValueError("both vertex sets must be non-empty")
    n = config.n
    reg = _mask(n, region)
    src = np.array([_flat(n, a) for a in A], np.int64)
    tgt = _mask(n, B)
    bits, key, thr, lazy = _bits_args(config)
    return _graph.bfs(n, bits, key, thr, lazy, reg, src, tgt)


def connected(config: BondConfig, A: Iterable[Sequence[int]], B: Iterable[Sequence[int]],
              region: Iterable[Sequence[int]] | None = None) -> bool:
    """Whether an open path inside ``region`` (default: the box) joins A to B."""
    return _search(config, A, B, region)[2] >= 0


def _unflat(n: int, i: int) -> Pt:
    W = 2 * n + 1
    return (int(i % W) - n, int(i // W) - n)


def geodesic(config: BondConfig, A, B, region=None) -> LatticePath | None:
    """Shortest open path from A to B inside ``region``; ties follow EdgeId order."""
    dist, parent, hit = _search(config, A, B, region)
    if hit < 0:
        return None
    out = [int(hit)]
    while parent[out[-1]] >= 0:
        out.append(int(parent[out[-1]]))
    return LatticePath(tuple(_unflat(config.n, i) for i in reversed(out)))


# --------------------------------------------------------- lowest crossing

def lowest_crossing(config: BondConfig) -> LatticePath | None:
    """The open left-right crossing with minimal region below it, or None without H_n.

    Right-hand wall following from the foot of the left side keeps the
    closed dual cluster of the bottom side on the right; the final
    excursion from the left side to the right side is loop-erased.
    """
    bits, key, thr, lazy = _bits_args(config)
    xs, ys = _graph.lowest_crossing(config.n, bits, key, thr, lazy)
    if len(xs) == 0:
        return None
    return LatticePath(tuple(zip(xs.tolist(), ys.tolist())))


# ---------------------------------------------------------------- circuits

def _face_index(n: int, f: Pt) -> int:
    return (f[1] + n + 1) * (2 * n + 2) + (f[0] + n + 1)


def _face_of(n: int, i: int) -> Pt:
    F = 2 * n + 2
    return (int(i % F) - n - 1, int(i // F) - n - 1)


def _exterior(n: int, f: Pt) -> bool:
    return f[0] in (-n - 1, n) or f[1] in (-n - 1, n)


def _faces_at(v: Pt) -> list[Pt]:
    """The four faces around vertex v, counter-clockwise from the north-east one."""
    x, y = v
    return [(x, y), (x - 1, y), (x - 1, y - 1), (x, y - 1)]


def _closed_closure(config: BondConfig, seeds: Iterable[Pt]) -> np.ndarray:
    n = config.n
    F = 2 * n + 2
    inside = np.ones(F * F, np.uint8)
    idx = np.array(sorted({_face_index(n, f) for f in seeds}), np.int64)
    bits, key, thr, lazy = _bits_args(config)
    return _graph.dual_closure(n, bits, key, thr, lazy, idx, inside)


def _fill(n: int, mark: np.ndarray) -> np.ndarray:
    """``mark`` plus every face it encloses (faces the exterior cannot reach)."""
    F = 2 * n + 2
    reach = np.zeros(F * F, np.uint8)
    stack = [i for i in range(F * F) if _exterior(n, _face_of(n, i)) and not mark[i]]
    for i in stack:
        reach[i] = 1
    while stack:
        i = stack.pop()
        X, Y = _face_of(n, i)
        for dx, dy in _STEPS:
            g = (X + dx, Y + dy)
            if -n - 1 <= g[0] <= n and -n - 1 <= g[1] <= n:
                j = _face_index(n, g)
                if not reach[j] and not mark[j]:
                    reach[j] = 1
                    stack.append(j)
    return (1 - reach).astype(np.uint8)


def _boundary_circuit(n: int, fill: np.ndarray) -> Circuit:
    """Counter-clockwise boundary of a simply connected union of faces."""
    def inn(f):
        return bool(fill[_face_index(n, f)])

    # directed boundary edges with the filled face on the left
    nxt: dict[Pt, Pt] = {}
    for i in np.flatnonzero(fill):
        X, Y = _face_of(n, int(i))
        if not inn((X, Y - 1)):
            nxt[(X, Y)] = (X + 1, Y)
        if not inn((X + 1, Y)):
            nxt[(X + 1, Y)] = (X + 1, Y + 1)
        if not inn((X, Y + 1)):
            nxt[(X + 1, Y + 1)] = (X, Y + 1)
        if not inn((X - 1, Y)):
            nxt[(X, Y + 1)] = (X, Y)
    start = min(nxt, key=lambda v: (v[1], v[0]))
    cyc = [start]
    v = nxt[start]
    while v != start:
        cyc.append(v)
        v = nxt[v]
        if len(cyc) > len(nxt):
            raise AssertionError("face union boundary is not a single circuit")
    if len(cyc) != len(nxt):
        raise AssertionError("face union boundary is not a single circuit")
    cyc.append(start)
    return Circuit(tuple(cyc))


def _peel(config: BondConfig) -> list[Circuit]:
    n = config.n
    seeds = set(_faces_at((0, 0)))
    out = []
    while True:
        mark = _closed_closure(config, seeds)
        if any(mark[i] and _exterior(n, _face_of(n, int(i))) for i in np.flatnonzero(mark)):
            return out
        fill = _fill(n, mark)
        c = _boundary_circuit(n, fill)
        out.append(c)
        seeds = {_face_of(n, int(i)) for i in np.flatnonzero(fill)}
        for v in c.vertices[:-1]:
            seeds.update(_faces_at(v))


def open_circuits_around_origin(config: BondConfig) -> list[Circuit]:
    """The peeled circuits C_1, C_2, ... (pairwise vertex-disjoint, innermost first)."""
    return _peel(config)


def innermost_circuits(config: BondConfig) -> CircuitDecomposition:
    """Circuits C_1..C_K around 0 with connectors 0 -> C_1 -> ... -> C_K -> boundary.

    Needs 0 connected to the boundary.  With no circuit the single connector
    is the left-most radial path.
    """
    n = config.n
    bnd = boundary_vertices(n)
    if not connected(config, [(0, 0)], bnd):
        raise PreconditionError("the origin is not connected to the boundary")
    circuits = _peel(config)
    if not circuits:
        return CircuitDecomposition((), (leftmost_radial_path(config),))
    conns = []
    inner: list[Pt] = [(0, 0)]
    prev = None
    for c in circuits + [None]:
        if c is None:
            region = [v for v in box_vertices(n) if v in set(prev.vertices) or not prev.contains(v)]
            target = bnd
        else:
            cv = set(c.vertices)
            region = [v for v in box_vertices(n)
                      if (v in cv or c.contains(v)) and (prev is None or v in set(prev.vertices) or not prev.contains(v))]
            target = list(cv)
        path = geodesic(config, inner, target, region)
        if path is None:
            raise AssertionError("consecutive circuits are not joined by an open path")
        conns.append(path)
        if c is not None:
            inner, prev = list(c.vertices[:-1]), c
    return CircuitDecomposition(tuple(circuits), tuple(conns))


# ----------------------------------------------------- left-most radial path

def _closed_step(config: BondConfig, f: Pt, g: Pt) -> bool:
    e = _dual_edge(f, g)
    return edge_in_box(e, config.n) and not config.bits[edge_index(e, config.n)]


def _open_step(config: BondConfig, v: Pt, w: Pt) -> bool:
    e = edge_between(v, w)
    return edge_in_box(e, config.n) and bool(config.bits[edge_index(e, config.n)])


def _loop_erase(walk: list[Pt]) -> list[Pt]:
    out: list[Pt] = []
    pos: dict[Pt, int] = {}
    for v in walk:
        if v in pos:
            k = pos[v]
            for u in out[k + 1:]:
                del pos[u]
            del out[k + 1:]
        else:
            pos[v] = len(out)
            out.append(v)
    return out


def _start_face(config: BondConfig) -> Pt | None:
    """Face at 0 whose closed dual cluster reaches the exterior.

    Faces are ranked by the smallest EdgeId among closed dual edges leaving
    them; an isolated face (no closed dual edge) cannot start a closed path.
    """
    n = config.n
    best = None
    for f in _faces_at((0, 0)):
        mark = _closed_closure(config, [f])
        if not any(mark[i] and _exterior(n, _face_of(n, int(i))) for i in np.flatnonzero(mark)):
            continue
        es = [_dual_edge(f, (f[0] + dx, f[1] + dy)) for dx, dy in _STEPS
              if _closed_step(config, f, (f[0] + dx, f[1] + dy))]
        if es and (best is None or min(es) < best[0]):
            best = (min(es), f)
    return None if best is None else best[1]


def canonical_closed_path(config: BondConfig) -> LatticePath:
    """Closed dual path 𝔠 from a face at 0 to the exterior (faces by lower-left corner).

    Left-hand wall following on the dual lattice from the start face, with
    open edges as walls and the origin on the left, loop-erased at the first
    exterior face.  Needs A_n: otherwise the walk circles the finite open
    cluster of 0.
    """
    n = config.n
    if not connected(config, [(0, 0)], boundary_vertices(n)):
        raise PreconditionError("the origin is not connected to the boundary")
    d0 = _start_face(config)
    if d0 is None:
        raise PreconditionError("an open circuit surrounds the origin")
    # heading so that vertex 0 sits on the walker's left, first try is a left turn
    corner = (-d0[0], -d0[1])  # 0 relative to the face's lower-left corner, in {0,1}^2
    d = {(0, 0): 1, (1, 0): 2, (1, 1): 3, (0, 1): 0}[corner]
    f = d0
    walk = [f]
    limit = 4 * (2 * n + 2) ** 2 + 8
    for _ in range(limit):
        for t in range(4):
            nd = (d + 1 - t) % 4
            g = (f[0] + _STEPS[nd][0], f[1] + _STEPS[nd][1])
            if _closed_step(config, f, g):
                f, d = g, nd
                break
        else:
            raise AssertionError("dual walker is stuck")
        walk.append(f)
        if _exterior(n, f):
            return LatticePath(tuple(_loop_erase(walk)), DUAL)
    raise AssertionError("dual walker did not reach the exterior")


def leftmost_radial_path(config: BondConfig) -> LatticePath:
    """σ̃_n: the open path 0 -> boundary hugging the canonical closed path 𝔠.

    Right-hand wall following from 0 with the start face of 𝔠 on the right,
    loop-erased at the first boundary vertex.  Needs A_n and no open circuit
    around 0.
    """
    n = config.n
    if not connected(config, [(0, 0)], boundary_vertices(n)):
        raise PreconditionError("the origin is not connected to the boundary")
    d0 = _start_face(config)
    if d0 is None:
        raise PreconditionError("an open circuit surrounds the origin")
    # first edge counter-clockwise after face d0 around 0, entered as a right turn
    first = {(0, 0): 1, (-1, 0): 2, (-1, -1): 3, (0, -1): 0}[d0]
    d = (first + 1) % 4
    v = (0, 0)
    walk = [v]
    limit = 4 * (2 * n + 1) ** 2 + 8
    for _ in range(limit):
        for t in range(4):
            nd = (d + 3 + t) % 4
            w = (v[0] + _STEPS[nd][0], v[1] + _STEPS[nd][1])
            if _open_step(config, v, w):
                v, d = w, nd
                break
        else:
            raise AssertionError("primal walker is stuck")
        walk.append(v)
        if max(abs(v[0]), abs(v[1])) == n:
            return LatticePath(tuple(_loop_erase(walk)))
    raise AssertionError("primal walker did not reach the boundary")


def sector_faces(n: int, gamma: LatticePath, frak_c: LatticePath) -> set[Pt]:
    """Faces strictly between gamma (on its right) and the dual path ``frak_c``.

    The crosscut gamma + (0 to the first face of frak_c) + frak_c splits the
    box; this is the part on the right of gamma, excluding faces of frak_c.
    """
    blocked = {(min(a, b), max(a, b)) for a, b in zip(gamma.vertices, gamma.vertices[1:])}
    wall = set(frak_c.vertices)
    seeds = []
    for a, b in zip(gamma.vertices, gamma.vertices[1:]):
        dx, dy = b[0] - a[0], b[1] - a[1]
        # face on the right of the step a -> b
        if dx == 1:
            seeds.append((a[0], a[1] - 1))
        elif dx == -1:
            seeds.append((b[0], a[1]))
        elif dy == 1:
            seeds.append((a[0], a[1]))
        else:
            seeds.append((a[0] - 1, b[1]))

    def crossing(f, g):
        e = _dual_edge(f, g)
        return (e.base, e.head)

    out = set()
    stack = [f for f in seeds if f not in wall and not _exterior(n, f)]
    out.update(stack)
    while stack:
        f = stack.pop()
        for dx, dy in _STEPS:
            g = (f[0] + dx, f[1] + dy)
            if g in out or g in wall or _exterior(n, g):
                continue
            if crossing(f, g) in blocked:
                continue
            out.add(g)
            stack.append(g)
    return out


def geometry_json(config: BondConfig) -> dict:
    """Lowest crossing and circuit decomposition as JSON-ready data."""
    out: dict = {"n": config.n}
    low = lowest_crossing(config)
    out["lowest_crossing"] = None if low is None else json.loads(low.to_json())
    if connected(config, [(0, 0)], boundary_vertices(config.n)):
        dec = innermost_circuits(config)
        out["circuits"] = [json.loads(c.to_json()) for c in dec.circuits]
        out["connectors"] = [json.loads(p.to_json()) for p in dec.connectors]
    return out


__all__ = [
    "Circuit", "CircuitDecomposition", "DUAL", "LatticePath", "PRIMAL", "PreconditionError",
    "Vertex", "boundary_vertices", "box_vertices", "canonical_closed_path", "connected",
    "geodesic", "geometry_json", "innermost_circuits", "leftmost_radial_path", "lowest_crossing",
    "open_circuits_around_origin", "sector_faces",
]
