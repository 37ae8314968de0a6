"""Monotone decomposition of piecewise-linear functions and the signature check."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from src.core.errors import EmptyFunction
from src.core.grid import GridFn
from src.core.polyline import Polyline

DEFAULT_REL_TOL = 1e-12


@dataclass(frozen=True)
class MonotonePiece:
    gamma: float
    sigma: Polyline
    support: tuple[float, float]
    sign: int


@dataclass(frozen=True)
class Signature:
    base_point: float
    signs: tuple[int, ...]

    @property
    def n_pieces(self) -> int:
        return len(self.signs)


@dataclass(frozen=True)
class MonotoneDecomposition:
    """u(x) = base_value + Σ γ_j σ_j(x) with σ_j rising from 0 to 1 on its support."""

    base_point: float
    base_value: float
    pieces: tuple[MonotonePiece, ...]

    @property
    def signature(self) -> Signature:
        return Signature(self.base_point, tuple(p.sign for p in self.pieces))

    def __call__(self, x: np.ndarray) -> np.ndarray:
        xs = np.asarray(x, dtype=np.float64)
        out = np.full(xs.shape, self.base_value)
        for p in self.pieces:
            if p.gamma != 0.0:
                out = out + p.gamma * p.sigma(xs)
        return out


def increment_signs(values: np.ndarray, tol: float) -> np.ndarray:
    inc = np.diff(values)
    signs = np.sign(inc).astype(np.int64)
    signs[np.abs(inc) <= tol] = 0
    return signs


def sign_runs(signs: np.ndarray) -> list[tuple[int, int, int]]:
    """Maximal runs (start, stop, sign) of equal entries; ``stop`` is exclusive."""
    if signs.size == 0:
        return []
    cuts = np.flatnonzero(np.diff(signs)) + 1
    starts = np.concatenate(([0], cuts))
    stops = np.concatenate((cuts, [signs.size]))
    return [(int(a), int(b), int(signs[a])) for a, b in zip(starts, stops, strict=True)]


def monotone_decompose(
    u: GridFn,
    flat_tol: float | None = None,
    rel_tol: float = DEFAULT_REL_TOL,
) -> MonotoneDecomposition:
    """Minimal decomposition built from maximal runs of equal increment sign.

    Increments with |Δb| ≤ tol count as flat, where tol is ``flat_tol`` if given and
    ``rel_tol · max|u|`` otherwise.
    """
    b = u.values
    if b.size < 2:
        raise EmptyFunction("monotone decomposition needs at least two nodes")
    if flat_tol is not None and flat_tol < 0:
        raise ValueError(f"flat_tol must be non-negative, got {flat_tol}")
    tol = flat_tol if flat_tol is not None else rel_tol * float(np.max(np.abs(b)))
    x = u.grid.nodes

    pieces: list[MonotonePiece] = []
    for start, stop, sign in sign_runs(increment_signs(b, tol)):
        # run of increments start..stop-1 spans nodes start..stop
        xs = x[start : stop + 1]
        support = (float(xs[0]), float(xs[-1]))
        if sign == 0:
            ramp = Polyline([support[0], support[1]], [0.0, 1.0], 0.0, 0.0)
            pieces.append(MonotonePiece(0.0, ramp, support, 0))
            continue
        gamma = float(b[stop] - b[start])
        profile = (b[start : stop + 1] - b[start]) / gamma
        profile[0] = 0.0
        profile[-1] = 1.0
        pieces.append(MonotonePiece(gamma, Polyline(xs, profile, 0.0, 0.0), support, sign))

    return MonotoneDecomposition(float(x[0]), float(b[0]), tuple(pieces))


@dataclass(frozen=True)
class SignatureCheck:
    holds: bool
    reference: Signature
    violations: list[tuple[int, Signature]] = field(default_factory=list)


def check_signature_condition(
    snapshots: Sequence[GridFn],
    flat_tol: float | None = None,
    rel_tol: float = DEFAULT_REL_TOL,
) -> SignatureCheck:
    if not snapshots:
        raise ValueError("signature check needs at least one snapshot")
    sigs = [monotone_decompose(s, flat_tol, rel_tol).signature for s in snapshots]
    ref = sigs[0]
    violations = [(i, s) for i, s in enumerate(sigs) if s != ref]
    return SignatureCheck(not violations, ref, violations)
