"""Parameter sampling and snapshot collection."""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):  # type: ignore[no-redef]
        __str__ = str.__str__
        __format__ = str.__format__

import numpy as np

from src.core.grid import Grid, GridFn
from src.fullmodel.godunov import derivative_snapshots, solve_full
from src.fullmodel.problems import ProblemSpec

RNG_NAME = "numpy.PCG64"

TimeRule = Callable[[tuple[float, ...]], np.ndarray]


class SnapshotType(StrEnum):
    U = "u"
    DU = "du"
    DFLUX = "dflux"
    PSI = "psi"


def sample_parameters(
    box: Sequence[tuple[float, float]], count: int, seed: int
) -> list[tuple[float, ...]]:
    """``count`` uniform draws from the box, reproducible from ``seed``."""
    if count < 1:
        raise ValueError(f"need at least one parameter sample, got {count}")
    lo = np.array([b[0] for b in box], dtype=np.float64)
    hi = np.array([b[1] for b in box], dtype=np.float64)
    rng = np.random.default_rng(seed)
    draws = rng.uniform(lo, hi, size=(count, len(box)))
    return [tuple(float(v) for v in row) for row in draws]


@dataclass(frozen=True)
class SamplingPlan:
    mu_samples: list[tuple[float, ...]]
    local_times: TimeRule
    global_times: TimeRule
    weights: dict[SnapshotType, float] = field(
        default_factory=lambda: {t: 1.0 for t in SnapshotType}
    )
    substeps: int = 1


@dataclass(frozen=True)
class SnapshotKey:
    mu_index: int
    mu: tuple[float, ...]
    t: float


@dataclass
class SnapshotSets:
    """Local snapshots (four types per entry) and global u snapshots.

    ``global_[0]`` is the reference snapshot: first parameter, t = 0.
    """

    local: dict[SnapshotType, list[GridFn]]
    local_keys: list[SnapshotKey]
    global_: list[GridFn]
    global_keys: list[SnapshotKey]

    def local_matrix(self) -> np.ndarray:
        """Columns are local snapshots grouped by type."""
        cols = [f.values for t in SnapshotType for f in self.local[t]]
        return np.column_stack(cols)

    @property
    def n_local(self) -> int:
        return sum(len(v) for v in self.local.values())


def collect_snapshots(
    make_spec: Callable[[tuple[float, ...]], ProblemSpec],
    grid: Grid,
    plan: SamplingPlan,
    on_solve: Callable[[int, int], None] | None = None,
) -> SnapshotSets:
    """One full-model run per parameter sample, sampled at local ∪ global times."""
    local: dict[SnapshotType, list[GridFn]] = {t: [] for t in SnapshotType}
    local_keys: list[SnapshotKey] = []
    global_: list[GridFn] = []
    global_keys: list[SnapshotKey] = []

    for idx, mu in enumerate(plan.mu_samples):
        spec = make_spec(mu)
        t_local = np.asarray(plan.local_times(mu), dtype=np.float64)
        t_global = np.union1d(t_local, np.asarray(plan.global_times(mu), dtype=np.float64))
        sol = solve_full(spec, grid, t_global, substeps=plan.substeps)
        is_local = np.isin(t_global, t_local)
        for t_act, u, loc in zip(sol.times, sol.snapshots, is_local, strict=True):
            key = SnapshotKey(idx, mu, float(t_act))
            global_.append(u)
            global_keys.append(key)
            if not loc:
                continue
            du, dflux, psi = derivative_snapshots(u, spec)
            for kind, f in zip(SnapshotType, (u, du, dflux, psi), strict=True):
                w = plan.weights.get(kind, 1.0)
                local[kind].append(f if w == 1.0 else GridFn(grid, w * f.values))
            local_keys.append(key)
        if on_solve is not None:
            on_solve(idx + 1, len(plan.mu_samples))

    return SnapshotSets(local, local_keys, global_, global_keys)
