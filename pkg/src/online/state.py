"""Reduced state, stop reasons and initialization."""

from __future__ import annotations

from dataclasses import dataclass
try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):  # type: ignore[no-redef]
        __str__ = str.__str__
        __format__ = str.__format__

import numpy as np

from src.core.grid import GridFn
from src.core.polyline import Polyline
from src.offline.bundle import OfflineBundle
from src.offline.local_basis import project


@dataclass(frozen=True)
class ReducedState:
    """Coefficients at step k: û = Σ β_n T̂♭ζ_n with T̂ = Σ α_m v_m.

    ``particles[i] = T̂(x_i)``. T̂ itself is composed only on demand.
    """

    step: int
    time: float
    alpha: np.ndarray
    beta: np.ndarray
    particles: np.ndarray

    def transport_map(self, bundle: OfflineBundle) -> Polyline:
        return bundle.transport.compose(self.alpha)


class StopReason(StrEnum):
    PARTICLE_COLLISION = "particle_collision"
    ORDERING_VIOLATION = "ordering_violation"
    SMALL_GRADIENT = "small_gradient"
    NON_MONOTONE_MAP = "non_monotone_map"


@dataclass(frozen=True)
class Stopped:
    """A run ended early; ``state`` is the last accepted state."""

    reason: StopReason
    state: ReducedState
    detail: str = ""


@dataclass(frozen=True)
class StepSettings:
    grad_floor_factor: float = 1e-8
    gap_floor_factor: float = 0.1
    fallback_factor: float = 1.0
    literal_s2: bool = False


def initialize(bundle: OfflineBundle, u0: GridFn) -> ReducedState:
    """α = e₁, β_n = (u₀, ζ_n)/(ζ_n, ζ_n), particles = X."""
    if u0.grid != bundle.grid:
        raise ValueError(f"u0 lives on {u0.grid}, the bundle on {bundle.grid}")
    alpha = np.zeros(bundle.n_modes)
    alpha[0] = 1.0
    return ReducedState(0, 0.0, alpha, project(bundle.local, u0), bundle.eim_points.copy())
