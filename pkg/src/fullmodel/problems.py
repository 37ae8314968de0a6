"""Problem definitions: flux, source and initial data per equation."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field
try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):  # type: ignore[no-redef]
        __str__ = str.__str__
        __format__ = str.__format__
from typing import Literal, Protocol

import numpy as np


class ProblemKind(StrEnum):
    COLOR = "color"
    REACTIVE_BURGERS = "reactive_burgers"
    LINEAR_ADVECTION = "linear_advection"


MU_DIMENSION: dict[ProblemKind, int] = {
    ProblemKind.COLOR: 3,
    ProblemKind.REACTIVE_BURGERS: 2,
    ProblemKind.LINEAR_ADVECTION: 1,
}


@dataclass(frozen=True)
class InitialCondition:
    """Analytic initial data u₀.

    ``cosine_hump``: ½ + ½cos(2π(x − center)/width) on |x − center| ≤ width/2, else 0.
    ``sine_slope``: 1 to the left, ½ − ½sin(π(x − center)/width) across the
    transition zone, 0 to the right.
    """

    shape: Literal["cosine_hump", "sine_slope"]
    center: float
    width: float

    def __post_init__(self) -> None:
        if self.width <= 0:
            raise ValueError(f"initial condition width must be positive, got {self.width}")

    def __call__(self, x: np.ndarray) -> np.ndarray:
        xs = np.asarray(x, dtype=np.float64)
        r = xs - self.center
        half = 0.5 * self.width
        inside = np.abs(r) <= half
        if self.shape == "cosine_hump":
            return np.where(inside, 0.5 + 0.5 * np.cos(2.0 * np.pi * r / self.width), 0.0)
        ramp = 0.5 - 0.5 * np.sin(np.pi * r / self.width)
        return np.where(r < -half, 1.0, np.where(inside, ramp, 0.0))


class Physics(Protocol):
    """Flux f(u, x), its u-derivative, the source ψ(u, x) and the Godunov flux."""

    def flux(self, u: np.ndarray, x: np.ndarray) -> np.ndarray: ...

    def dflux_du(self, u: np.ndarray, x: np.ndarray) -> np.ndarray: ...

    def source(self, u: np.ndarray, x: np.ndarray) -> np.ndarray: ...

    def godunov_flux(
        self, u_left: np.ndarray, u_right: np.ndarray, x: np.ndarray
    ) -> np.ndarray: ...

    def max_speed(self, u: np.ndarray, x: np.ndarray) -> float: ...


@dataclass(frozen=True)
class ColorEquation:
    """u_t + (c u)_x = c′ u with c(x) = 1.5 + µ₁ sin(µ₂x) + 0.1 cos(µ₃x)."""

    mu1: float
    mu2: float
    mu3: float

    def speed(self, x: np.ndarray) -> np.ndarray:
        return 1.5 + self.mu1 * np.sin(self.mu2 * x) + 0.1 * np.cos(self.mu3 * x)

    def dspeed_dx(self, x: np.ndarray) -> np.ndarray:
        return self.mu1 * self.mu2 * np.cos(self.mu2 * x) - 0.1 * self.mu3 * np.sin(self.mu3 * x)

    def flux(self, u: np.ndarray, x: np.ndarray) -> np.ndarray:
        return self.speed(x) * u

    def dflux_du(self, u: np.ndarray, x: np.ndarray) -> np.ndarray:
        return np.broadcast_to(self.speed(x), np.shape(u)).astype(np.float64)

    def source(self, u: np.ndarray, x: np.ndarray) -> np.ndarray:
        return self.dspeed_dx(x) * u

    def godunov_flux(self, u_left: np.ndarray, u_right: np.ndarray, x: np.ndarray) -> np.ndarray:
        c = self.speed(x)
        return np.where(c >= 0, c * u_left, c * u_right)

    def max_speed(self, u: np.ndarray, x: np.ndarray) -> float:
        return float(np.max(np.abs(self.speed(x))))


@dataclass(frozen=True)
class ReactiveBurgers:
    """u_t + (u²/2)_x = µ₁ u (1 − u)(u − µ₂)."""

    mu1: float
    mu2: float

    def flux(self, u: np.ndarray, x: np.ndarray) -> np.ndarray:
        return 0.5 * np.asarray(u) ** 2

    def dflux_du(self, u: np.ndarray, x: np.ndarray) -> np.ndarray:
        return np.asarray(u, dtype=np.float64)

    def source(self, u: np.ndarray, x: np.ndarray) -> np.ndarray:
        return self.mu1 * u * (1.0 - u) * (u - self.mu2)

    def godunov_flux(self, u_left: np.ndarray, u_right: np.ndarray, x: np.ndarray) -> np.ndarray:
        # convex flux with its minimum at u = 0
        return np.maximum(
            self.flux(np.maximum(u_left, 0.0), x), self.flux(np.minimum(u_right, 0.0), x)
        )

    def max_speed(self, u: np.ndarray, x: np.ndarray) -> float:
        return float(np.max(np.abs(u)))


@dataclass(frozen=True)
class LinearAdvection:
    """u_t + c u_x = 0 with constant c = µ₁."""

    c: float

    def flux(self, u: np.ndarray, x: np.ndarray) -> np.ndarray:
        return self.c * np.asarray(u, dtype=np.float64)

    def dflux_du(self, u: np.ndarray, x: np.ndarray) -> np.ndarray:
        return np.full(np.shape(u), self.c)

    def source(self, u: np.ndarray, x: np.ndarray) -> np.ndarray:
        return np.zeros(np.shape(u))

    def godunov_flux(self, u_left: np.ndarray, u_right: np.ndarray, x: np.ndarray) -> np.ndarray:
        return self.c * (u_left if self.c >= 0 else u_right)

    def max_speed(self, u: np.ndarray, x: np.ndarray) -> float:
        return abs(self.c)


PhysicsFactory = Callable[[tuple[float, ...]], Physics]


@dataclass
class PhysicsRegistry:
    factories: dict[ProblemKind, PhysicsFactory] = field(default_factory=dict)

    def register(self, kind: ProblemKind, factory: PhysicsFactory) -> None:
        self.factories[kind] = factory

    def create(self, kind: ProblemKind, mu: tuple[float, ...]) -> Physics:
        if kind not in self.factories:
            raise KeyError(f"Unknown problem kind: {kind}")
        return self.factories[kind](mu)


def default_registry() -> PhysicsRegistry:
    reg = PhysicsRegistry()
    reg.register(ProblemKind.COLOR, lambda mu: ColorEquation(*mu))
    reg.register(ProblemKind.REACTIVE_BURGERS, lambda mu: ReactiveBurgers(*mu))
    reg.register(ProblemKind.LINEAR_ADVECTION, lambda mu: LinearAdvection(*mu))
    return reg


_REGISTRY = default_registry()


@dataclass(frozen=True)
class ProblemSpec:
    kind: ProblemKind
    mu: tuple[float, ...]
    domain: tuple[float, float]
    t_final: float
    u0: InitialCondition
    lam: float

    def __post_init__(self) -> None:
        if self.lam <= 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        if self.t_final <= 0:
            raise ValueError(f"t_final must be positive, got {self.t_final}")
        if not self.domain[0] < self.domain[1]:
            raise ValueError(f"empty domain {self.domain}")
        want = MU_DIMENSION[self.kind]
        if len(self.mu) != want:
            raise ValueError(f"{self.kind} takes {want} parameters, got {len(self.mu)}")

    @property
    def physics(self) -> Physics:
        return _REGISTRY.create(self.kind, tuple(float(m) for m in self.mu))


def godunov_flux(
    spec: ProblemSpec,
    u_left: float | np.ndarray,
    u_right: float | np.ndarray,
    x: float | np.ndarray,
) -> np.ndarray:
    return spec.physics.godunov_flux(
        np.asarray(u_left, dtype=np.float64),
        np.asarray(u_right, dtype=np.float64),
        np.asarray(x, dtype=np.float64),
    )
