"""Experiment cases: problem family, parameter box, sampling times and horizon rule."""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field
try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):  # type: ignore[no-redef]
        __str__ = str.__str__
        __format__ = str.__format__

import numpy as np

from src.fullmodel.problems import InitialCondition, ProblemKind, ProblemSpec

TimeRule = Callable[[tuple[float, ...]], np.ndarray]
StepRule = Callable[[tuple[float, ...], float], int | None]


class CaseName(StrEnum):
    COLOR = "color"
    BURGERS_SLOW = "burgers_slow"
    BURGERS_FAST = "burgers_fast"
    ADVECTION = "advection"


@dataclass(frozen=True)
class CaseDefinition:
    """A parametrized problem family.

    ``n_steps(mu, dt)`` gives the default online horizon K (None: run to t_final).
    """

    name: CaseName
    kind: ProblemKind
    domain: tuple[float, float]
    mu_box: tuple[tuple[float, float], ...]
    u0: InitialCondition
    t_final: float
    local_times: TimeRule
    global_times: TimeRule
    n_steps: StepRule

    def problem(self, mu: tuple[float, ...], lam: float) -> ProblemSpec:
        return ProblemSpec(self.kind, tuple(mu), self.domain, self.t_final, self.u0, lam)

    def horizon(self, mu: tuple[float, ...], dt: float, k_override: int | None = None) -> int:
        """min(K, ⌊t_final/Δt⌋), K from the override or the case rule."""
        cap = int(math.floor(self.t_final / dt * (1.0 + 1e-12)))
        k = k_override if k_override is not None else self.n_steps(mu, dt)
        return cap if k is None else min(k, cap)


def _times(values: list[float]) -> TimeRule:
    arr = np.array(values)
    return lambda mu: arr


def _fixed_steps(k: int) -> StepRule:
    return lambda mu, dt: k


def _burgers_fast_steps(mu: tuple[float, ...], dt: float) -> int:
    return int(math.floor((1.0 / dt) * (10.0 / mu[0])))


@dataclass
class CaseRegistry:
    cases: dict[CaseName, CaseDefinition] = field(default_factory=dict)

    def register(self, case: CaseDefinition) -> None:
        self.cases[case.name] = case

    def get(self, name: str) -> CaseDefinition:
        try:
            return self.cases[CaseName(name)]
        except (ValueError, KeyError):
            raise KeyError(f"Unknown case: {name}") from None


def default_registry() -> CaseRegistry:
    reg = CaseRegistry()
    reg.register(
        CaseDefinition(
            name=CaseName.COLOR,
            kind=ProblemKind.COLOR,
            domain=(0.0, 2.0),
            mu_box=((0.25, 0.5), (2 * math.pi, 6 * math.pi), (math.pi, 1.1 * math.pi)),
            u0=InitialCondition("cosine_hump", 0.25, 0.4),
            t_final=1.2,
            local_times=_times([0.02 * i for i in range(5)]),
            global_times=_times([0.1 * i for i in range(1, 11)]),
            n_steps=_fixed_steps(2400),
        )
    )
    burgers_u0 = InitialCondition("sine_slope", 0.0, 4.0)
    burgers_box = ((50.0, 60.0), (0.1, 0.9))
    reg.register(
        CaseDefinition(
            name=CaseName.BURGERS_SLOW,
            kind=ProblemKind.REACTIVE_BURGERS,
            domain=(-5.0, 5.0),
            mu_box=burgers_box,
            u0=burgers_u0,
            t_final=1.0,
            local_times=lambda mu: np.array([0.1 * i / mu[0] for i in range(5)]),
            global_times=lambda mu: np.array([(0.5 + 1.95 * i) / mu[0] for i in range(10)]),
            n_steps=_fixed_steps(200),
        )
    )
    reg.register(
        CaseDefinition(
            name=CaseName.BURGERS_FAST,
            kind=ProblemKind.REACTIVE_BURGERS,
            domain=(-5.0, 5.0),
            mu_box=((100.0, 150.0), (0.1, 0.9)),
            u0=burgers_u0,
            t_final=1.0,
            local_times=lambda mu: np.array([0.01 * i / mu[0] for i in range(5)]),
            global_times=lambda mu: np.array([(0.05 + 5.55 * i) / mu[0] for i in range(10)]),
            n_steps=_burgers_fast_steps,
        )
    )
    reg.register(
        CaseDefinition(
            name=CaseName.ADVECTION,
            kind=ProblemKind.LINEAR_ADVECTION,
            domain=(0.0, 5.0),
            mu_box=((0.75, 1.25),),
            u0=InitialCondition("cosine_hump", 1.0, 1.0),
            t_final=2.0,
            local_times=_times([0.1 * i for i in range(5)]),
            global_times=_times([0.5 * i for i in range(1, 5)]),
            n_steps=lambda mu, dt: None,
        )
    )
    return reg


CASES = default_registry()
