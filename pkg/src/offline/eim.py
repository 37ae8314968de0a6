"""Greedy empirical interpolation points and the Q-subset for the transport update."""

from __future__ import annotations

import warnings

import numpy as np
from scipy.linalg import LinAlgError, LinAlgWarning, solve

from src.core.errors import AssumptionViolated, DegenerateBasis
from src.offline.local_basis import LocalBasis


def greedy_eim(values: np.ndarray) -> np.ndarray:
    """Greedy EIM over candidate points.

    ``values[p, n]`` is basis function n at candidate p. Returns one candidate index
    per basis function, in selection order.
    """
    n_cand, n_basis = values.shape
    if n_basis < 1:
        raise DegenerateBasis("empty basis")
    if n_basis > n_cand:
        raise DegenerateBasis(f"{n_basis} basis functions but only {n_cand} candidates")

    first = int(np.argmax(np.abs(values[:, 0])))
    if values[first, 0] == 0.0:
        raise DegenerateBasis("first basis function vanishes at every candidate")
    nodes = [first]
    for i in range(1, n_basis):
        system = values[nodes, :i]
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("error", LinAlgWarning)
                coef = solve(system, values[nodes, i])
        except (LinAlgError, LinAlgWarning) as exc:
            raise DegenerateBasis(f"interpolation system singular at step {i + 1}") from exc
        residual = values[:, i] - values[:, :i] @ coef
        nxt = int(np.argmax(np.abs(residual)))
        if residual[nxt] == 0.0 or nxt in nodes:
            raise DegenerateBasis(f"basis function {i + 1} is interpolated exactly")
        nodes.append(nxt)
    return np.array(nodes, dtype=np.int64)


def eim_points(basis: LocalBasis) -> tuple[np.ndarray, np.ndarray]:
    """Node indices and positions X of the greedy EIM points of ζ_1..ζ_N."""
    idx = greedy_eim(basis.values.T)
    return idx, basis.grid.nodes[idx]


def select_q(
    zeta_dx_left: np.ndarray,
    zeta_dx_right: np.ndarray,
    beta0: np.ndarray,
    n_modes: int,
) -> np.ndarray:
    """The ``n_modes`` points of X where |∂ₓû₀| is largest, lowest index on ties.

    ∂ₓû₀(x_i) averages the one-sided slopes. Returned indices are ascending.
    """
    n_points = zeta_dx_left.shape[0]
    if n_points <= n_modes:
        raise AssumptionViolated(f"need N > M, got N = {n_points}, M = {n_modes}")
    slope = 0.5 * (zeta_dx_left + zeta_dx_right) @ beta0
    order = np.argsort(-np.abs(slope), kind="stable")
    return np.sort(order[:n_modes])
