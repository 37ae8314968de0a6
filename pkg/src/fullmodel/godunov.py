"""First-order Godunov finite-volume solver with source splitting."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from src.core.errors import CflViolation
from src.core.grid import Grid, GridFn
from src.fullmodel.problems import Physics, ProblemSpec

# CFL slack for round-off in lambda * max speed
_CFL_TOL = 1e-12


@dataclass(frozen=True)
class FullState:
    """Cell averages on the N_δ − 1 intervals between grid nodes."""

    grid: Grid
    cell_values: np.ndarray
    time: float
    step: int

    def __post_init__(self) -> None:
        if self.cell_values.shape != (self.grid.n_nodes - 1,):
            raise ValueError(
                f"expected {self.grid.n_nodes - 1} cell values, got {self.cell_values.shape}"
            )


@dataclass(frozen=True)
class FullSolution:
    times: np.ndarray
    snapshots: list[GridFn]


def initial_state(spec: ProblemSpec, grid: Grid) -> FullState:
    return FullState(grid, spec.u0(grid.cell_centers), 0.0, 0)


def step_full(
    spec: ProblemSpec,
    state: FullState,
    lam: float | None = None,
    physics: Physics | None = None,
) -> FullState:
    """One conservative flux sweep followed by a forward-Euler source step.

    ``lam`` overrides ``spec.lam`` (used for sub-stepping).
    """
    phys = physics if physics is not None else spec.physics
    ratio = spec.lam if lam is None else lam
    grid = state.grid
    nodes = grid.nodes
    u = state.cell_values

    speed = phys.max_speed(u, nodes)
    if ratio * speed > 1.0 + _CFL_TOL:
        raise CflViolation(speed, ratio)

    # inflow pinned to u0(x_left), outflow by zero-order extrapolation
    inflow = float(spec.u0(np.array([grid.x_left]))[0])
    padded = np.concatenate(([inflow], u, [u[-1]]))
    fluxes = phys.godunov_flux(padded[:-1], padded[1:], nodes)

    dt = ratio * grid.spacing
    u_new = u - ratio * (fluxes[1:] - fluxes[:-1])
    u_new = u_new + dt * phys.source(u_new, grid.cell_centers)
    return FullState(grid, u_new, state.time + dt, state.step + 1)


def nodal_reconstruction(state: FullState) -> GridFn:
    """Continuous piecewise-linear function from cell averages."""
    u = state.cell_values
    nodal = np.empty(state.grid.n_nodes)
    nodal[1:-1] = 0.5 * (u[:-1] + u[1:])
    nodal[0] = u[0]
    nodal[-1] = u[-1]
    return GridFn(state.grid, nodal)


def solve_full(
    spec: ProblemSpec,
    grid: Grid,
    sample_times: Sequence[float] | np.ndarray,
    substeps: int = 1,
) -> FullSolution:
    """Time-step from t = 0 and reconstruct at the step nearest each sample time.

    The full model advances with ratio ``spec.lam / substeps``.
    """
    times = np.asarray(sample_times, dtype=np.float64)
    if times.ndim != 1:
        raise ValueError("sample_times must be a vector")
    if np.any(np.diff(times) < 0):
        raise ValueError("sample_times must be sorted")
    if times.size and (times[0] < 0 or times[-1] > spec.t_final * (1 + 1e-12)):
        raise ValueError(f"sample_times must lie in [0, {spec.t_final}]")
    if substeps < 1:
        raise ValueError(f"substeps must be >= 1, got {substeps}")

    ratio = spec.lam / substeps
    dt = ratio * grid.spacing
    targets = np.rint(times / dt).astype(np.int64)

    phys = spec.physics
    state = initial_state(spec, grid)
    out_times: list[float] = []
    snapshots: list[GridFn] = []
    for target in targets:
        while state.step < target:
            state = step_full(spec, state, lam=ratio, physics=phys)
        out_times.append(state.step * dt)
        snapshots.append(nodal_reconstruction(state))
    return FullSolution(np.array(out_times), snapshots)


def derivative_snapshots(u: GridFn, spec: ProblemSpec) -> tuple[GridFn, GridFn, GridFn]:
    """Nodal ∂ₓu, ∂ₓf(u, x) and ψ(u, x)."""
    phys = spec.physics
    grid = u.grid
    x = grid.nodes
    du = np.gradient(u.values, grid.spacing)
    dflux = np.gradient(phys.flux(u.values, x), grid.spacing)
    psi = phys.source(u.values, x)
    return GridFn(grid, du), GridFn(grid, dflux), GridFn(grid, psi)


def total_variation(values: np.ndarray) -> float:
    return float(np.sum(np.abs(np.diff(values))))
