"""Bond configurations on the box B_n(0), their dual view, sampling and enumeration."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from . import _core

HORIZONTAL = 0
VERTICAL = 1

MAX_ENUM_EDGES = 24


class Vertex(NamedTuple):
    x: int
    y: int


class EdgeId(NamedTuple):
    """Edge from ``base`` to base+e1 (horizontal) or base+e2 (vertical).

    Tuple order (orientation, y, x) is the total order used for tie-breaks.
    """

    orientation: int
    y: int
    x: int

    @property
    def base(self) -> Vertex:
        return Vertex(self.x, self.y)

    @property
    def head(self) -> Vertex:
        if self.orientation == HORIZONTAL:
            return Vertex(self.x + 1, self.y)
        return Vertex(self.x, self.y + 1)

    def endpoints(self) -> tuple[Vertex, Vertex]:
        return self.base, self.head

    def dual_endpoints(self) -> tuple[tuple[float, float], tuple[float, float]]:
        """Centres of the two faces separated by this edge."""
        if self.orientation == HORIZONTAL:
            return (self.x + 0.5, self.y - 0.5), (self.x + 0.5, self.y + 0.5)
        return (self.x - 0.5, self.y + 0.5), (self.x + 0.5, self.y + 0.5)


def edge(orientation: int, x: int, y: int) -> EdgeId:
    return EdgeId(orientation, y, x)


def edge_between(a: Sequence[int], b: Sequence[int]) -> EdgeId:
    """EdgeId joining two lattice neighbours, in either order."""
    (ax, ay), (bx, by) = a, b
    if ay == by and abs(ax - bx) == 1:
        return EdgeId(HORIZONTAL, ay, min(ax, bx))
    if ax == bx and abs(ay - by) == 1:
        return EdgeId(VERTICAL, min(ay, by), ax)
    raise ValueError(f"{a} and {b} are not lattice neighbours")


def num_edges(n: int) -> int:
    """Edge count of B_n: 2 (2n+1) 2n."""
    return 2 * (2 * n + 1) * (2 * n)


def edge_in_box(e: EdgeId, n: int) -> bool:
    hx, hy = e.head
    return -n <= e.x <= n and -n <= e.y <= n and -n <= hx <= n and -n <= hy <= n


def edge_index(e: EdgeId, n: int) -> int:
    if not edge_in_box(e, n):
        raise IndexError(f"edge {e} is not inside B_{n}")
    if e.orientation == HORIZONTAL:
        return int(_core.hidx(e.x, e.y, n))
    return int(_core.vidx(e.x, e.y, n))


def edge_from_index(i: int, n: int) -> EdgeId:
    nh = (2 * n + 1) * (2 * n)
    if not 0 <= i < 2 * nh:
        raise IndexError(f"edge index {i} out of range for B_{n}")
    if i < nh:
        y, x = divmod(i, 2 * n)
        return EdgeId(HORIZONTAL, y - n, x - n)
    y, x = divmod(i - nh, 2 * n + 1)
    return EdgeId(VERTICAL, y - n, x - n)


def all_edges(n: int) -> list[EdgeId]:
    return [edge_from_index(i, n) for i in range(num_edges(n))]


@dataclass(frozen=True, eq=False)
class BondConfig:
    """Open/closed state of every edge of B_n; dual edges share the state."""

    n: int
    bits: np.ndarray = field(repr=False)
    p: float = 0.5
    seed: int = 0
    stream: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("box radius must be at least 1")
        b = np.ascontiguousarray(self.bits, dtype=np.uint8).copy()
        if b.shape != (num_edges(self.n),):
            raise ValueError(f"expected {num_edges(self.n)} bits, got shape {b.shape}")
        if b.size and b.max() > 1:
            raise ValueError("bits must be 0 or 1")
        b.setflags(write=False)
        object.__setattr__(self, "bits", b)

    def __eq__(self, other) -> bool:
        return isinstance(other, BondConfig) and self.n == other.n and bool(np.array_equal(self.bits, other.bits))

    def __hash__(self) -> int:
        return hash((self.n, self.bits.tobytes()))

    def is_open(self, e: EdgeId) -> bool:
        return bool(self.bits[edge_index(e, self.n)])

    def with_edges(self, opened: Iterable[EdgeId] = (), closed: Iterable[EdgeId] = ()) -> "BondConfig":
        """Copy with some edges forced open or closed."""
        b = self.bits.copy()
        for e in opened:
            b[edge_index(e, self.n)] = 1
        for e in closed:
            b[edge_index(e, self.n)] = 0
        return BondConfig(self.n, b, self.p, self.seed, self.stream)

    @property
    def mask(self) -> int:
        """Bitmask with edge index i as bit i."""
        return int("".join("1" if b else "0" for b in self.bits[::-1]), 2)

    def to_dict(self) -> dict:
        return {
            "n": int(self.n),
            "p": float(self.p),
            "seed": int(self.seed),
            "stream": int(self.stream),
            "bits": np.packbits(self.bits, bitorder="big").tobytes().hex(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "BondConfig":
        n = int(d["n"])
        raw = np.frombuffer(bytes.fromhex(d["bits"]), dtype=np.uint8)
        bits = np.unpackbits(raw, bitorder="big")
        m = num_edges(n)
        if bits.size < m or bits[m:].any() or bits.size - m >= 8:
            raise ValueError("bit string does not match the box size")
        return cls(n, bits[:m], float(d.get("p", 0.5)), int(d.get("seed", 0)), int(d.get("stream", 0)))

    @classmethod
    def from_json(cls, s: str) -> "BondConfig":
        return cls.from_dict(json.loads(s))


def all_open(n: int) -> BondConfig:
    return BondConfig(n, np.ones(num_edges(n), np.uint8), p=1.0)


def all_closed(n: int) -> BondConfig:
    return BondConfig(n, np.zeros(num_edges(n), np.uint8), p=0.0)


def sample_bits(n: int, p: float, seed: int, stream: int) -> np.ndarray:
    thr = _core.threshold(p)
    key = _core.trial_key(seed, stream)
    idx = np.arange(num_edges(n), dtype=np.uint64)
    return (_core.edge_draws(key, idx) < np.uint64(thr)).astype(np.uint8)


def sample_config(n: int, p: float = 0.5, seed: int = 0, stream: int = 0) -> BondConfig:
    """Each edge open independently with probability p, keyed on (seed, stream, edge index)."""
    if n < 1:
        raise ValueError("box radius must be at least 1")
    return BondConfig(n, sample_bits(n, p, seed, stream), p, int(seed), int(stream))


def enumerate_configs(
    n: int, edges: Sequence[EdgeId] | None = None, base: BondConfig | None = None
) -> Iterator[BondConfig]:
    """All configurations in increasing bitmask order.

    With ``edges`` given, only those edges vary (bit i is the i-th smallest
    EdgeId) and the rest are copied from ``base`` (all closed by default).
    """
    if edges is None:
        if n != 1:
            raise ValueError("full enumeration is limited to n = 1; pass an edge subset")
        edges = all_edges(1)
    edges = sorted(set(edges))
    if len(edges) > MAX_ENUM_EDGES:
        raise ValueError(f"at most {MAX_ENUM_EDGES} edges may vary, got {len(edges)}")
    idx = np.array([edge_index(e, n) for e in edges], dtype=np.int64)
    start = np.zeros(num_edges(n), np.uint8) if base is None else base.bits.copy()
    if base is not None and base.n != n:
        raise ValueError("base config has a different box radius")
    k = len(edges)
    for mask in range(1 << k):
        b = start.copy()
        b[idx] = (mask >> np.arange(k)) & 1
        yield BondConfig(n, b, p=0.5)


def enumeration_bits(n: int = 1) -> np.ndarray:
    """Array view of ``enumerate_configs(n)``: row r holds the bits of mask r."""
    if n != 1:
        raise ValueError("full enumeration is limited to n = 1")
    m = num_edges(1)
    masks = np.arange(1 << m, dtype=np.int64)[:, None]
    return ((masks >> np.arange(m)) & 1).astype(np.uint8)


def edge_state(config: BondConfig, e: EdgeId) -> str:
    return "open" if config.is_open(e) else "closed"


def dual_state(config: BondConfig, e: EdgeId) -> str:
    """State of the dual edge e*: closed-dual exactly when e is closed."""
    return "open-dual" if config.is_open(e) else "closed-dual"
