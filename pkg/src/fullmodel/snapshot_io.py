"""Plain-text snapshot files: ``snapshots/<case>/<mu-hash>/<t>.dat``."""

from __future__ import annotations

import hashlib
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from src.core.errors import SchemaMismatch
from src.core.grid import Grid, GridFn

_COLUMNS = "x_left x_right n_nodes t mu..."


@dataclass(frozen=True)
class SnapshotRecord:
    u: GridFn
    t: float
    mu: tuple[float, ...]


def mu_hash(mu: Sequence[float]) -> str:
    key = " ".join(f"{float(m):.17g}" for m in mu)
    return hashlib.sha1(key.encode("utf-8")).hexdigest()[:12]


def snapshot_path(root: Path, case: str, mu: Sequence[float], t: float) -> Path:
    return root / "snapshots" / case / mu_hash(mu) / f"{t:.9f}.dat"


def write_snapshot(path: Path, u: GridFn, t: float, mu: Sequence[float]) -> None:
    g = u.grid
    meta = [f"{g.x_left:.17g}", f"{g.x_right:.17g}", str(g.n_nodes), f"{t:.17g}"]
    meta += [f"{float(m):.17g}" for m in mu]
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, u.values, fmt="%.17g", header=f"{_COLUMNS}\n{' '.join(meta)}", comments="# ")


def read_snapshot(path: Path) -> SnapshotRecord:
    with path.open(encoding="utf-8") as f:
        columns = f.readline().lstrip("#").strip()
        meta = f.readline().lstrip("#").split()
    if columns != _COLUMNS or len(meta) < 4:
        raise SchemaMismatch(f"{path} is not a snapshot file")
    grid = Grid(float(meta[0]), float(meta[1]), int(meta[2]))
    values = np.loadtxt(path, comments="#", ndmin=1)
    return SnapshotRecord(GridFn(grid, values), float(meta[3]), tuple(float(m) for m in meta[4:]))
