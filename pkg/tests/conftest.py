"""Shared fixtures: a hand-built bundle small enough to check by hand.

Grid (0, 1) with 11 nodes; ζ₁ = 1, ζ₂ = x; modes v₁ = Id, v₂ = 1 (a pure shift);
EIM points x₃ = 0.3 and x₇ = 0.7, both used as Q points.
"""

from __future__ import annotations

import numpy as np
import pytest

from src.core.grid import Grid
from src.fullmodel.problems import InitialCondition, ProblemKind
from src.offline.bundle import BundleMeta, OfflineBundle, build_bundle
from src.offline.local_basis import LocalBasis
from src.offline.modes import TransportBasis


@pytest.fixture()
def toy_bundle() -> OfflineBundle:
    grid = Grid(0.0, 1.0, 11)
    local = LocalBasis(grid, np.vstack([np.ones(11), grid.nodes]), np.array([2.0, 1.0]))
    transport = TransportBasis(
        breakpoints=np.array([0.0, 1.0]),
        ordinates=np.array([[0.0, 1.0], [1.0, 1.0]]),
        left_slopes=np.array([1.0, 0.0]),
        right_slopes=np.array([1.0, 0.0]),
        eigenvalues=np.array([1.0]),
    )
    meta = BundleMeta(
        case="advection",
        problem_kind=ProblemKind.LINEAR_ADVECTION,
        lam=0.5,
        full_substeps=1,
        u0=InitialCondition("cosine_hump", 0.5, 0.4),
    )
    return build_bundle(
        meta,
        transport,
        local,
        eim_indices=np.array([3, 7]),
        beta0=np.array([0.3, 0.7]),
        q_indices=np.array([0, 1]),
    )
