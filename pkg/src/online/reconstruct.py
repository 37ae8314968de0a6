"""Full-grid reconstruction of a reduced state."""

from __future__ import annotations

import numpy as np

from src.core.grid import Grid, GridFn
from src.offline.bundle import OfflineBundle
from src.online.state import ReducedState


def reconstruct(state: ReducedState, bundle: OfflineBundle, grid: Grid | None = None) -> GridFn:
    """û(x) = Σ β_n ζ_n(T̂⁻¹(x)) at every node, with exact polyline inversion."""
    target = grid or bundle.grid
    t_hat = state.transport_map(bundle)
    y = np.asarray(t_hat.invert(target.nodes))
    profile = state.beta @ bundle.local.values
    return GridFn(target, np.interp(y, bundle.grid.nodes, profile))
