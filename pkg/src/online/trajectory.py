"""Per-run trajectory dumps: ``# key = value`` header lines, then one CSV row per step."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from src.core.errors import SchemaMismatch
from src.online.state import ReducedState


@dataclass(frozen=True)
class TrajectoryHeader:
    mu: tuple[float, ...]
    n_basis: int
    n_modes: int
    lam: float
    n_steps: int
    stop_reason: str


def _columns(n_modes: int, n_basis: int) -> list[str]:
    return (
        ["k", "t"]
        + [f"alpha_{m + 1}" for m in range(n_modes)]
        + [f"beta_{n + 1}" for n in range(n_basis)]
        + [f"particle_{i + 1}" for i in range(n_basis)]
    )


def write_trajectory(path: Path, header: TrajectoryHeader, states: Sequence[ReducedState]) -> None:
    columns = _columns(header.n_modes, header.n_basis)
    rows = [np.concatenate(([s.step, s.time], s.alpha, s.beta, s.particles)) for s in states]
    data = np.array(rows) if rows else np.empty((0, len(columns)))
    frame = pd.DataFrame(data, columns=columns)
    frame["k"] = frame["k"].astype(np.int64)
    lines = [
        f"# mu = {' '.join(f'{m:.17g}' for m in header.mu)}",
        f"# N = {header.n_basis}",
        f"# M = {header.n_modes}",
        f"# lambda = {header.lam:.17g}",
        f"# K = {header.n_steps}",
        f"# stop_reason = {header.stop_reason}",
    ]
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        f.write("\n".join(lines) + "\n")
        frame.to_csv(f, index=False, float_format="%.17g")


def read_trajectory(path: Path) -> tuple[TrajectoryHeader, list[ReducedState]]:
    meta: dict[str, str] = {}
    with path.open(encoding="utf-8") as f:
        for line in f:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].partition("=")
            meta[key.strip()] = value.strip()
    try:
        header = TrajectoryHeader(
            mu=tuple(float(v) for v in meta["mu"].split()),
            n_basis=int(meta["N"]),
            n_modes=int(meta["M"]),
            lam=float(meta["lambda"]),
            n_steps=int(meta["K"]),
            stop_reason=meta["stop_reason"],
        )
    except KeyError as exc:
        raise SchemaMismatch(f"{path} is missing trajectory header field {exc}") from exc

    frame = pd.read_csv(path, comment="#")
    m, n = header.n_modes, header.n_basis
    states = [
        ReducedState(
            step=int(row["k"]),
            time=float(row["t"]),
            alpha=row[[f"alpha_{i + 1}" for i in range(m)]].to_numpy(dtype=np.float64),
            beta=row[[f"beta_{i + 1}" for i in range(n)]].to_numpy(dtype=np.float64),
            particles=row[[f"particle_{i + 1}" for i in range(n)]].to_numpy(dtype=np.float64),
        )
        for _, row in frame.iterrows()
    ]
    return header, states
