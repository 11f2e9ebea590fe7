"""Chemical distances, crossing lengths and the dyadic connection scale."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from . import _core, _graph
from .geometry import LatticePath, boundary_vertices, geodesic, lowest_crossing
from .lattice import BondConfig


@dataclass(frozen=True)
class DistanceResult:
    """Edge count of a geodesic and the geodesic itself, both None when disconnected."""

    value: int | None
    witness: LatticePath | None

    def __post_init__(self):
        if (self.value is None) != (self.witness is None):
            raise ValueError("value and witness must be present together")

    @property
    def connected(self) -> bool:
        return self.value is not None


@dataclass(frozen=True)
class DyadicScale:
    """Least k with 0 and e1 joined inside B_{2^k}; ``k`` is None when censored at kmax."""

    k: int | None
    kmax: int
    distance: int | None = None

    @property
    def censored(self) -> bool:
        return self.k is None


def _args(config: BondConfig):
    z = _core.kernel_scalar(0)
    return config.bits, z, z, False


def chem_dist(config: BondConfig, A: Iterable[Sequence[int]], B: Iterable[Sequence[int]],
              region: Iterable[Sequence[int]] | None = None) -> DistanceResult:
    """Least number of edges of an open path from A to B inside ``region`` (default: the box).

    Ties between geodesics are broken by BFS discovery in EdgeId order.
    """
    path = geodesic(config, A, B, region)
    if path is None:
        return DistanceResult(None, None)
    return DistanceResult(len(path), path)


def crossing_lengths(config: BondConfig) -> tuple[int, int] | None:
    """(S_n, L_n): shortest and lowest left-right crossing lengths, or None without H_n."""
    s = int(_graph.shortest_crossing(config.n, *_args(config)))
    if s < 0:
        return None
    low = lowest_crossing(config)
    L = len(low)
    if s > L:
        raise AssertionError(f"shortest crossing {s} exceeds lowest crossing {L}")
    return s, L


def radial_distance(config: BondConfig) -> int | None:
    """S_{B_n(0)}: chemical distance from the origin to the boundary, or None without A_n."""
    d = int(_graph.radial_distance(config.n, *_args(config)))
    return None if d < 0 else d


def radial_geodesic(config: BondConfig) -> DistanceResult:
    return chem_dist(config, [(0, 0)], boundary_vertices(config.n))


def dyadic_scale(config: BondConfig, kmax: int | None = None) -> DyadicScale:
    """D_{e1} on a configuration of B_{2^kmax}.

    Boxes B_2, B_4, ... are searched in turn; the in-box distance at the
    first success is kept as ``distance``.
    """
    n = config.n
    if kmax is None:
        kmax = n.bit_length() - 1
    if kmax < 1:
        raise ValueError("kmax must be at least 1")
    if (1 << kmax) > n:
        raise ValueError(f"B_{1 << kmax} does not fit in B_{n}")
    k, d = _graph.dyadic_scale(n, kmax, *_args(config))
    if k < 0:
        return DyadicScale(None, kmax)
    return DyadicScale(int(k), kmax, int(d))


__all__ = ["DistanceResult", "DyadicScale", "chem_dist", "crossing_lengths", "dyadic_scale",
           "radial_distance", "radial_geodesic"]
