from src.fullmodel.godunov import (
    FullSolution,
    FullState,
    derivative_snapshots,
    initial_state,
    nodal_reconstruction,
    solve_full,
    step_full,
)
from src.fullmodel.problems import (
    InitialCondition,
    ProblemKind,
    ProblemSpec,
    default_registry,
    godunov_flux,
)

__all__ = [
    "FullSolution",
    "FullState",
    "InitialCondition",
    "ProblemKind",
    "ProblemSpec",
    "default_registry",
    "derivative_snapshots",
    "godunov_flux",
    "initial_state",
    "nodal_reconstruction",
    "solve_full",
    "step_full",
]
