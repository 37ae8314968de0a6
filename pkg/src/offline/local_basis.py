"""Local POD basis by the method of snapshots."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cholesky, eigh, solve_triangular

from src.core.errors import RankDeficient
from src.core.grid import Grid, GridFn
from src.core.quadrature import grid_gram, mass_apply

RANK_TOL = 1e-12


@dataclass(frozen=True)
class LocalBasis:
    """Orthonormal ζ_1..ζ_N as rows of ``values`` (N × N_δ)."""

    grid: Grid
    values: np.ndarray
    singular_values: np.ndarray

    @property
    def size(self) -> int:
        return int(self.values.shape[0])

    @property
    def basis(self) -> list[GridFn]:
        return [GridFn(self.grid, row) for row in self.values]

    def truncate(self, size: int) -> LocalBasis:
        return LocalBasis(self.grid, self.values[:size], self.singular_values)


def local_basis(grid: Grid, snapshots: np.ndarray, size: int) -> LocalBasis:
    """First ``size`` left singular vectors of the snapshot matrix (N_δ × L columns).

    Orthonormal in the exact L² inner product of piecewise-linear functions.
    """
    if snapshots.ndim != 2 or snapshots.shape[0] != grid.n_nodes:
        raise ValueError(f"snapshot matrix must be {grid.n_nodes} x L, got {snapshots.shape}")
    if not 1 <= size <= min(snapshots.shape):
        raise RankDeficient(f"basis size {size} exceeds snapshot matrix shape {snapshots.shape}")

    gram = grid_gram(snapshots, grid.spacing)
    w, vecs = eigh(gram)
    order = np.argsort(w)[::-1]
    w = np.maximum(w[order], 0.0)
    vecs = vecs[:, order]
    trace = float(np.trace(gram))
    if w[size - 1] <= RANK_TOL * trace:
        raise RankDeficient(
            f"local basis function {size} has energy {w[size - 1]:.3e} "
            f"below {RANK_TOL:g} x trace {trace:.3e}"
        )

    modes = (snapshots @ vecs[:, :size]) / np.sqrt(w[:size])
    # sign convention: largest-magnitude nodal value positive
    peaks = modes[np.argmax(np.abs(modes), axis=0), np.arange(size)]
    modes = modes * np.where(peaks < 0, -1.0, 1.0)
    rows = modes.T
    # lower-triangular re-orthonormalization keeps nested spans
    gram_z = rows @ mass_apply(modes, grid.spacing)
    chol = cholesky(0.5 * (gram_z + gram_z.T), lower=True)
    rows = solve_triangular(chol, rows, lower=True)
    return LocalBasis(grid, np.ascontiguousarray(rows), np.sqrt(w))


def project(basis: LocalBasis, u: GridFn) -> np.ndarray:
    """Coefficients (u, ζ_n) / (ζ_n, ζ_n)."""
    weighted = mass_apply(u.values, basis.grid.spacing)
    num = basis.values @ weighted
    den = np.einsum("ij,ij->i", basis.values, mass_apply(basis.values.T, basis.grid.spacing).T)
    return num / den
