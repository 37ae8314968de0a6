"""OfflineBundle: everything the online stage reads, and its file format.

File layout: 8-byte magic, little-endian u64 header length, a JSON header
validated by ``BundleHeader``, zero padding to an 8-byte boundary, then the raw
little-endian arrays at the offsets the header lists.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from src.core.errors import BundleIOError, SchemaMismatch
from src.core.grid import Grid
from src.fullmodel.problems import InitialCondition, ProblemKind
from src.offline.eim import select_q
from src.offline.local_basis import LocalBasis
from src.offline.modes import TransportBasis

MAGIC = b"MATSBNDL"
SCHEMA_VERSION = 1
_NATIVE = {"<f8": np.float64, "<i8": np.int64}


# ---------------------------------------------------------------------------
# In-memory bundle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BundleMeta:
    case: str
    problem_kind: ProblemKind
    lam: float
    full_substeps: int
    u0: InitialCondition


@dataclass(frozen=True)
class BundleTables:
    """Point values and one-sided derivatives at the EIM points X.

    Row/column conventions: ``Z[i, n] = ζ_n(x_i)``, ``V_at_X[m, i] = v_m(x_i)``,
    ``Vq[m, j] = v_m(x_{q_j})``. ``monitor_slopes[m, k]`` is the slope of v_m on
    monitored segment k (the last two columns are the extension slopes).
    """

    Z: np.ndarray
    zeta_dx_left: np.ndarray
    zeta_dx_right: np.ndarray
    V_at_X: np.ndarray
    Vq: np.ndarray
    Vdx_left: np.ndarray
    Vdx_right: np.ndarray
    monitor_slopes: np.ndarray


@dataclass(frozen=True)
class OfflineBundle:
    meta: BundleMeta
    transport: TransportBasis
    local: LocalBasis
    eim_indices: np.ndarray
    q_indices: np.ndarray
    beta0: np.ndarray
    tables: BundleTables

    @property
    def grid(self) -> Grid:
        return self.local.grid

    @property
    def eim_points(self) -> np.ndarray:
        return self.grid.nodes[self.eim_indices]

    @property
    def n_basis(self) -> int:
        return self.local.size

    @property
    def n_modes(self) -> int:
        return self.transport.n_modes

    def z_condition_number(self) -> float:
        return float(np.linalg.cond(self.tables.Z))

    def truncate(self, n_basis: int, n_modes: int) -> OfflineBundle:
        """The bundle for (N, M) ≤ the current sizes; greedy prefixes are reused."""
        if n_basis > self.n_basis or n_modes > self.n_modes:
            raise ValueError(
                f"cannot grow ({self.n_basis}, {self.n_modes}) to ({n_basis}, {n_modes})"
            )
        return build_bundle(
            self.meta,
            self.transport.truncate(n_modes),
            self.local.truncate(n_basis),
            self.eim_indices[:n_basis],
            self.beta0[:n_basis],
        )


def _node_slopes(values: np.ndarray, spacing: float, idx: np.ndarray) -> tuple[np.ndarray, ...]:
    slopes = np.diff(values, axis=1) / spacing
    n_seg = slopes.shape[1]
    left = np.where(idx > 0, slopes[:, np.clip(idx - 1, 0, n_seg - 1)], 0.0)
    right = np.where(idx < n_seg, slopes[:, np.clip(idx, 0, n_seg - 1)], 0.0)
    return left, right


def monitor_segments(transport: TransportBasis) -> np.ndarray:
    """Per non-identity mode, the segment where |v′_m| is largest."""
    seg = np.diff(transport.ordinates, axis=1) / np.diff(transport.breakpoints)
    picks = [int(np.argmax(np.abs(seg[m]))) for m in range(1, transport.n_modes)]
    return np.array(picks, dtype=np.int64)


def build_bundle(
    meta: BundleMeta,
    transport: TransportBasis,
    local: LocalBasis,
    eim_indices: np.ndarray,
    beta0: np.ndarray,
    q_indices: np.ndarray | None = None,
) -> OfflineBundle:
    """Materialize all online tables; Q defaults to the greedy steepest-slope choice."""
    idx = np.asarray(eim_indices, dtype=np.int64)
    if idx.shape != (local.size,):
        raise ValueError(f"{idx.shape[0]} EIM points for {local.size} basis functions")
    x = local.grid.nodes[idx]

    z = np.ascontiguousarray(local.values[:, idx].T)
    zl, zr = _node_slopes(local.values, local.grid.spacing, idx)
    modes = transport.modes
    v_at_x = np.vstack([m(x) for m in modes])
    vdl = np.vstack([m.derivative(x, "left") for m in modes])
    vdr = np.vstack([m.derivative(x, "right") for m in modes])

    seg = np.diff(transport.ordinates, axis=1) / np.diff(transport.breakpoints)
    mon = seg[:, monitor_segments(transport)]
    monitor = np.column_stack((mon, transport.left_slopes, transport.right_slopes))

    q = (
        select_q(zl.T, zr.T, beta0, transport.n_modes)
        if q_indices is None
        else np.asarray(q_indices, dtype=np.int64)
    )
    tables = BundleTables(
        Z=z,
        zeta_dx_left=np.ascontiguousarray(zl.T),
        zeta_dx_right=np.ascontiguousarray(zr.T),
        V_at_X=v_at_x,
        Vq=np.ascontiguousarray(v_at_x[:, q]),
        Vdx_left=vdl,
        Vdx_right=vdr,
        monitor_slopes=monitor,
    )
    beta = np.asarray(beta0, dtype=np.float64)
    return OfflineBundle(meta, transport, local, idx, q, beta, tables)


# ---------------------------------------------------------------------------
# On-disk header
# ---------------------------------------------------------------------------


class ArraySlot(BaseModel):
    name: str
    dtype: Literal["<f8", "<i8"]
    shape: list[int] = Field(..., description="Array shape, C order")
    offset: int = Field(..., ge=0, description="Byte offset from the start of the data block")


class GridHeader(BaseModel):
    x_left: float
    x_right: float
    n_nodes: int = Field(..., ge=2)


class InitialConditionHeader(BaseModel):
    shape: Literal["cosine_hump", "sine_slope"]
    center: float
    width: float = Field(..., gt=0)


class BundleHeader(BaseModel):
    schema_version: int = Field(..., description="Bumped on any layout change")
    byte_order: Literal["little"] = "little"
    float_format: Literal["<f8"] = "<f8"
    case: str
    problem_kind: ProblemKind
    lam: float = Field(..., gt=0, description="Δt/Δx of the reduced model")
    full_substeps: int = Field(..., ge=1)
    u0: InitialConditionHeader
    grid: GridHeader
    arrays: list[ArraySlot]

    @field_validator("schema_version")
    @classmethod
    def validate_version(cls, v: int) -> int:
        if v != SCHEMA_VERSION:
            raise ValueError(f"bundle schema {v}, this build reads {SCHEMA_VERSION}")
        return v

    @model_validator(mode="after")
    def validate_slots(self) -> BundleHeader:
        names = [a.name for a in self.arrays]
        if len(set(names)) != len(names):
            raise ValueError("duplicate array names in bundle header")
        return self


# ---------------------------------------------------------------------------
# Save / load
# ---------------------------------------------------------------------------


def _bundle_arrays(b: OfflineBundle) -> dict[str, np.ndarray]:
    arrays = {
        "mode_breakpoints": b.transport.breakpoints,
        "mode_ordinates": b.transport.ordinates,
        "mode_left_slopes": b.transport.left_slopes,
        "mode_right_slopes": b.transport.right_slopes,
        "mode_eigenvalues": b.transport.eigenvalues,
        "zeta": b.local.values,
        "singular_values": b.local.singular_values,
        "eim_indices": b.eim_indices,
        "q_indices": b.q_indices,
        "beta0": b.beta0,
    }
    for f in fields(BundleTables):
        arrays[f"table_{f.name}"] = getattr(b.tables, f.name)
    return arrays


def save_bundle(bundle: OfflineBundle, path: Path) -> None:
    slots: list[ArraySlot] = []
    chunks: list[bytes] = []
    offset = 0
    for name, arr in _bundle_arrays(bundle).items():
        dtype = "<i8" if np.issubdtype(arr.dtype, np.integer) else "<f8"
        data = np.ascontiguousarray(arr, dtype=dtype).tobytes()
        slots.append(ArraySlot(name=name, dtype=dtype, shape=list(arr.shape), offset=offset))
        chunks.append(data)
        offset += len(data)

    m = bundle.meta
    g = bundle.grid
    header = BundleHeader(
        schema_version=SCHEMA_VERSION,
        case=m.case,
        problem_kind=m.problem_kind,
        lam=m.lam,
        full_substeps=m.full_substeps,
        u0=InitialConditionHeader(shape=m.u0.shape, center=m.u0.center, width=m.u0.width),
        grid=GridHeader(x_left=g.x_left, x_right=g.x_right, n_nodes=g.n_nodes),
        arrays=slots,
    )
    text = header.model_dump_json().encode("utf-8")
    pad = b"\0" * (-(len(MAGIC) + 8 + len(text)) % 8)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("wb") as f:
            f.write(MAGIC)
            f.write(struct.pack("<Q", len(text)))
            f.write(text)
            f.write(pad)
            for chunk in chunks:
                f.write(chunk)
    except OSError as exc:
        raise BundleIOError(f"cannot write bundle {path}: {exc}") from exc


def load_bundle(path: Path) -> OfflineBundle:
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise BundleIOError(f"cannot read bundle {path}: {exc}") from exc
    if raw[: len(MAGIC)] != MAGIC:
        raise SchemaMismatch(f"{path} is not a bundle file")
    (n_header,) = struct.unpack("<Q", raw[len(MAGIC) : len(MAGIC) + 8])
    start = len(MAGIC) + 8
    try:
        header = BundleHeader.model_validate_json(raw[start : start + n_header])
    except ValidationError as exc:
        raise SchemaMismatch(f"invalid bundle header in {path}: {exc}") from exc
    data_start = start + n_header + (-(start + n_header) % 8)

    arrays: dict[str, np.ndarray] = {}
    for slot in header.arrays:
        count = int(np.prod(slot.shape)) if slot.shape else 1
        begin = data_start + slot.offset
        end = begin + count * 8
        if end > len(raw):
            raise SchemaMismatch(f"array {slot.name} runs past the end of {path}")
        arr = np.frombuffer(raw, dtype=slot.dtype, count=count, offset=begin)
        arrays[slot.name] = arr.reshape(slot.shape).astype(_NATIVE[slot.dtype])

    grid = Grid(header.grid.x_left, header.grid.x_right, header.grid.n_nodes)
    u0 = InitialCondition(header.u0.shape, header.u0.center, header.u0.width)
    meta = BundleMeta(header.case, header.problem_kind, header.lam, header.full_substeps, u0)
    transport = TransportBasis(
        arrays["mode_breakpoints"],
        arrays["mode_ordinates"],
        arrays["mode_left_slopes"],
        arrays["mode_right_slopes"],
        arrays["mode_eigenvalues"],
    )
    local = LocalBasis(grid, arrays["zeta"], arrays["singular_values"])
    tables = BundleTables(**{f.name: arrays[f"table_{f.name}"] for f in fields(BundleTables)})
    return OfflineBundle(
        meta, transport, local, arrays["eim_indices"], arrays["q_indices"], arrays["beta0"], tables
    )
