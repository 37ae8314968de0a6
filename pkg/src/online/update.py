"""One reduced time step: flux/source evolution, transport update, change of basis.

Every operation here touches only the bundle's N × N and M × N tables, so the
cost of a step does not depend on the full-model grid size. The exact inverse
of T̂ is composed only when a particle jumps farther than one grid cell.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from src.core.errors import NotMonotone, SingularSystem, SmallGradient
from src.fullmodel.problems import Physics
from src.offline.bundle import OfflineBundle
from src.online.state import ReducedState, StepSettings, Stopped, StopReason

LuFactors = tuple[np.ndarray, np.ndarray]


def _factor(matrix: np.ndarray, name: str) -> LuFactors:
    with warnings.catch_warnings():
        warnings.simplefilter("error", LinAlgWarning)
        try:
            lu, piv = lu_factor(matrix)
        except (LinAlgWarning, ValueError) as exc:
            raise SingularSystem(f"{name} is singular or ill-conditioned") from exc
    if np.any(np.diag(lu) == 0.0):
        raise SingularSystem(f"{name} is singular")
    return lu, piv


@dataclass(frozen=True)
class OnlineOperators:
    """Factored systems and cached table views for one bundle."""

    bundle: OfflineBundle
    z_lu: LuFactors
    vq_lu: LuFactors
    order: np.ndarray
    zeta_dx_scale: float
    at_first: np.ndarray
    at_last: np.ndarray

    @classmethod
    def from_bundle(cls, bundle: OfflineBundle) -> OnlineOperators:
        t = bundle.tables
        idx = bundle.eim_indices
        return cls(
            bundle=bundle,
            z_lu=_factor(t.Z, "Z"),
            vq_lu=_factor(t.Vq.T, "Vq"),
            order=np.argsort(bundle.eim_points, kind="stable"),
            zeta_dx_scale=float(max(np.abs(t.zeta_dx_left).max(), np.abs(t.zeta_dx_right).max())),
            at_first=idx == 0,
            at_last=idx == bundle.grid.n_nodes - 1,
        )

    @property
    def spacing(self) -> float:
        return self.bundle.grid.spacing

    @property
    def dt(self) -> float:
        return self.bundle.meta.lam * self.spacing

    def map_slopes(self, alpha: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """T̂′(x_i⁻), T̂′(x_i⁺)."""
        t = self.bundle.tables
        return alpha @ t.Vdx_left, alpha @ t.Vdx_right

    def values_at(self, beta: np.ndarray) -> np.ndarray:
        """Σ β_n ζ_n(x_i), i.e. û at the particles."""
        return self.bundle.tables.Z @ beta

    def solve_z(self, rhs: np.ndarray) -> np.ndarray:
        return lu_solve(self.z_lu, rhs)


def flux_coefficients(state: ReducedState, ops: OnlineOperators, physics: Physics) -> np.ndarray:
    """θ with Zθ = −(f_r − f_l): upwind flux difference at each particle."""
    t = ops.bundle.tables
    dx = ops.spacing
    slope_left, _ = ops.map_slopes(state.alpha)
    u_right = ops.values_at(state.beta)
    u_left = u_right - (t.zeta_dx_left @ state.beta) / slope_left * dx
    f_right = physics.flux(u_right, state.particles)
    f_left = physics.flux(u_left, state.particles - dx)
    return ops.solve_z(-(f_right - f_left))


def source_coefficients(
    beta_star: np.ndarray, state: ReducedState, ops: OnlineOperators, physics: Physics
) -> np.ndarray:
    """ω with Zω = ψ(u_*(x_i), x_i)."""
    u_star = ops.values_at(beta_star)
    return ops.solve_z(physics.source(u_star, state.particles))


def evolve_pde(state: ReducedState, ops: OnlineOperators, physics: Physics) -> np.ndarray:
    """β̄ = β + λθ + Δt ω, with ω taken after the flux update."""
    lam = ops.bundle.meta.lam
    beta_star = state.beta + lam * flux_coefficients(state, ops, physics)
    return beta_star + ops.dt * source_coefficients(beta_star, state, ops, physics)


def update_transport(
    state: ReducedState,
    beta_bar: np.ndarray,
    ops: OnlineOperators,
    settings: StepSettings,
) -> np.ndarray:
    """α^{k+1} from the particle displacements −(ū − û)/∂ₓû at the Q points."""
    b = ops.bundle
    t = b.tables
    q = b.q_indices
    num = t.Z[q] @ (beta_bar - state.beta)

    slope_left, slope_right = ops.map_slopes(state.alpha)
    d_left = (t.zeta_dx_left[q] @ state.beta) / slope_left[q]
    d_right = (t.zeta_dx_right[q] @ state.beta) / slope_right[q]
    den = 0.5 * (d_left + d_right)
    den = np.where(ops.at_first[q], d_right, den)
    den = np.where(ops.at_last[q], d_left, den)

    floor = settings.grad_floor_factor * float(np.max(np.abs(state.beta))) * ops.zeta_dx_scale
    moving = num != 0.0
    flat = moving & (np.abs(den) <= floor)
    if flat.any():
        j = int(np.flatnonzero(flat)[0])
        raise SmallGradient(
            f"|du/dx| = {abs(den[j]):.3e} at q-point {int(q[j])} is below floor {floor:.3e}"
        )

    disp = np.zeros_like(num)
    disp[moving] = -num[moving] / den[moving]
    dalpha = lu_solve(ops.vq_lu, disp)
    if settings.literal_s2:
        dalpha = dalpha * ops.dt
    return state.alpha + dalpha


def change_of_basis(
    state: ReducedState,
    beta_bar: np.ndarray,
    alpha_next: np.ndarray,
    ops: OnlineOperators,
    settings: StepSettings,
) -> tuple[np.ndarray, np.ndarray]:
    """β^{k+1} interpolating ū = Σ β̄_n T̂_k♭ζ_n at the new particles.

    Returns ``(beta_next, particles_next)``.
    """
    b = ops.bundle
    t = b.tables
    particles_next = alpha_next @ t.V_at_X
    shift = particles_next - state.particles

    slope_left, slope_right = ops.map_slopes(state.alpha)
    forward = shift > 0
    s = shift / np.where(forward, slope_right, slope_left)
    dz = np.where(forward, t.zeta_dx_right @ beta_bar, t.zeta_dx_left @ beta_bar)
    values = ops.values_at(beta_bar) + dz * s

    far = np.abs(s) >= settings.fallback_factor * ops.spacing
    if far.any():
        t_old = state.transport_map(b)
        y = np.asarray(t_old.invert(particles_next[far]))
        profile = beta_bar @ b.local.values
        values[far] = np.interp(y, b.grid.nodes, profile)

    return ops.solve_z(values), particles_next


def check_state(
    state: ReducedState, ops: OnlineOperators, settings: StepSettings
) -> tuple[StopReason, str] | None:
    slope_left, slope_right = ops.map_slopes(state.alpha)
    monitor = state.alpha @ ops.bundle.tables.monitor_slopes
    min_slope = float(min(slope_left.min(), slope_right.min(), monitor.min(initial=np.inf)))
    if min_slope <= 0.0:
        return StopReason.NON_MONOTONE_MAP, f"min T' = {min_slope:.3e}"

    ordered = state.particles[ops.order]
    gaps = np.diff(ordered)
    if gaps.size and gaps.min() <= 0.0:
        return StopReason.ORDERING_VIOLATION, f"particles crossed (gap {gaps.min():.3e})"
    floor = settings.gap_floor_factor * ops.spacing
    if gaps.size and gaps.min() < floor:
        return StopReason.PARTICLE_COLLISION, f"gap {gaps.min():.3e} below {floor:.3e}"
    return None


def step(
    state: ReducedState,
    ops: OnlineOperators,
    physics: Physics,
    settings: StepSettings | None = None,
) -> ReducedState | Stopped:
    """Flux and source update, transport update, change of basis, then stop checks."""
    cfg = settings or StepSettings()
    beta_bar = evolve_pde(state, ops, physics)
    try:
        alpha_next = update_transport(state, beta_bar, ops, cfg)
    except SmallGradient as exc:
        return Stopped(StopReason.SMALL_GRADIENT, state, str(exc))
    try:
        beta_next, particles_next = change_of_basis(state, beta_bar, alpha_next, ops, cfg)
    except NotMonotone as exc:
        return Stopped(StopReason.NON_MONOTONE_MAP, state, str(exc))

    k = state.step + 1
    new = ReducedState(k, k * ops.dt, alpha_next, beta_next, particles_next)
    verdict = check_state(new, ops, cfg)
    if verdict is not None:
        return Stopped(verdict[0], state, verdict[1])
    return new
