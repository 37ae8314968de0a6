"""Experiment configuration: YAML file validated into ``ExperimentConfig``."""

from __future__ import annotations

try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):  # type: ignore[no-redef]
        __str__ = str.__str__
        __format__ = str.__format__
from pathlib import Path
from typing import Any

import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.experiments.cases import CaseName
from src.offline.sampling import SnapshotType, sample_parameters

# ---------------------------------------------------------------------------
# Sub-models
# ---------------------------------------------------------------------------


class SignaturePolicy(StrEnum):
    ABORT = "abort"
    DROP = "drop"


class RandomDraw(BaseModel):
    """``count`` uniform draws from the case's parameter box."""

    model_config = ConfigDict(extra="forbid")

    count: int = Field(..., ge=1, description="Number of test parameters")
    seed: int = Field(..., description="Seed of the numpy.PCG64 generator")


# ---------------------------------------------------------------------------
# ExperimentConfig
# ---------------------------------------------------------------------------


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    case: CaseName = Field(..., description="Problem family")
    n_delta: int = Field(default=2048, ge=3, description="Full-model grid nodes N_δ")
    lam: float = Field(default=0.5, gt=0, alias="lambda", description="Δt/Δx")
    full_substeps: int = Field(
        default=1, ge=1, description="Full-model steps per reduced step (CFL headroom)"
    )
    n_train_mu: int = Field(default=25, ge=1, description="Training parameter samples")
    seed: int = Field(default=0, description="Seed for training parameter draws")
    N: int = Field(default=12, ge=2, description="Local basis size")
    M: int = Field(default=4, ge=1, description="Transport modes, identity included")
    K: int | None = Field(
        default=None, ge=0, description="Online steps; null uses the case rule"
    )
    test_mu: list[list[float]] | RandomDraw = Field(
        default_factory=lambda: RandomDraw(count=10, seed=1),
        description="Explicit test parameters or a random draw",
    )
    output_dir: Path = Field(default=Path("artifacts/run"), description="Output directory")
    every_steps: int = Field(default=100, ge=1, description="Error sampling stride")
    flat_tol: float = Field(
        default=1e-12, ge=0, description="Flat-increment tolerance relative to max|u|"
    )
    snapshot_weights: dict[SnapshotType, float] = Field(
        default_factory=lambda: {t: 1.0 for t in SnapshotType},
        description="Weights of the local snapshot types",
    )
    signature_policy: SignaturePolicy = Field(
        default=SignaturePolicy.ABORT,
        description="abort, or drop global snapshots whose signature differs",
    )
    literal_s2: bool = Field(default=False, description="Scale the α increment by Δt")
    grad_floor_factor: float = Field(default=1e-8, gt=0)
    gap_floor_factor: float = Field(default=0.1, gt=0)
    workers: int = Field(default=1, ge=1, description="Parallel online runs")
    n_list: list[int] = Field(default_factory=list, description="Sweep: local basis sizes")
    m_list: list[int] = Field(default_factory=list, description="Sweep: transport mode counts")
    n_delta_list: list[int] = Field(
        default_factory=lambda: [2**p for p in range(9, 15)],
        description="Timing: grid sizes",
    )
    timing_steps: int = Field(default=50, ge=1, description="Timing: steps measured per size")
    timing_train_mu: int = Field(default=5, ge=1, description="Timing: training samples")
    save_snapshots: bool = Field(default=False, description="Write snapshot files")

    @field_validator("snapshot_weights")
    @classmethod
    def validate_weights(cls, v: dict[SnapshotType, float]) -> dict[SnapshotType, float]:
        for kind, w in v.items():
            if w < 0:
                raise ValueError(f"weight of {kind} must be non-negative, got {w}")
        return {t: float(v.get(t, 1.0)) for t in SnapshotType}

    @field_validator("n_list", "m_list", "n_delta_list")
    @classmethod
    def validate_positive(cls, v: list[int]) -> list[int]:
        if any(n < 1 for n in v):
            raise ValueError(f"list entries must be positive, got {v}")
        return v

    @model_validator(mode="after")
    def validate_sizes(self) -> ExperimentConfig:
        if self.N <= self.M:
            raise ValueError(f"N must exceed M, got N={self.N}, M={self.M}")
        if self.N > self.n_delta:
            raise ValueError(f"N={self.N} exceeds the grid size {self.n_delta}")
        return self

    def test_parameters(self, box: tuple[tuple[float, float], ...]) -> list[tuple[float, ...]]:
        if isinstance(self.test_mu, RandomDraw):
            return sample_parameters(box, self.test_mu.count, self.test_mu.seed)
        for mu in self.test_mu:
            if len(mu) != len(box):
                raise ValueError(f"test parameter {mu} has {len(mu)} entries, box has {len(box)}")
        return [tuple(float(m) for m in mu) for mu in self.test_mu]

    def sweep_pairs(self) -> list[tuple[int, int]]:
        """All (N, M) with N > M from the sweep lists; (N, M) alone if they are empty."""
        ns = self.n_list or [self.N]
        ms = self.m_list or [self.M]
        return [(n, m) for n in ns for m in ms if n > m]

    def to_yaml(self) -> str:
        data = self.model_dump(mode="json", by_alias=True)
        return yaml.safe_dump(data, sort_keys=False)


def load_config(path: Path, overrides: dict[str, Any] | None = None) -> ExperimentConfig:
    raw = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
    if overrides:
        raw.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig.model_validate(raw)


def default_config_yaml(case: CaseName = CaseName.COLOR) -> str:
    return ExperimentConfig(case=case).to_yaml()
