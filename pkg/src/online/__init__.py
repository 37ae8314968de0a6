from src.online.reconstruct import reconstruct
from src.online.state import ReducedState, StepSettings, Stopped, StopReason, initialize
from src.online.trajectory import TrajectoryHeader, read_trajectory, write_trajectory
from src.online.update import (
    OnlineOperators,
    change_of_basis,
    evolve_pde,
    flux_coefficients,
    source_coefficients,
    step,
    update_transport,
)

__all__ = [
    "OnlineOperators",
    "ReducedState",
    "StepSettings",
    "StopReason",
    "Stopped",
    "TrajectoryHeader",
    "change_of_basis",
    "evolve_pde",
    "flux_coefficients",
    "initialize",
    "read_trajectory",
    "reconstruct",
    "source_coefficients",
    "step",
    "update_transport",
    "write_trajectory",
]
