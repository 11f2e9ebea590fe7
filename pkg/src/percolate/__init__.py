"""Critical bond percolation on Z^2: lowest crossings, innermost circuits,
arm events, shielded detours and chemical-distance Monte Carlo studies."""
from ._accel import BACKEND
from .lattice import BondConfig, EdgeId, Vertex, sample_config

__version__ = "0.1.0"

__all__ = ["BACKEND", "BondConfig", "EdgeId", "Vertex", "sample_config", "__version__"]
