"""Online evaluation: reduced runs over test parameters against fresh full-model references."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path

from src.core.errors import NotMonotone, SchemaMismatch
from src.core.grid import GridFn
from src.core.quadrature import l1_relative_error
from src.experiments.cases import CASES, CaseDefinition
from src.experiments.config import ExperimentConfig
from src.experiments.offline_run import initial_snapshot
from src.experiments.report import write_error_report
from src.fullmodel.godunov import solve_full
from src.obs.logging import MetricsLogger
from src.obs.metrics import mean_summary
from src.obs.progress import Progress, print_banner
from src.offline.bundle import OfflineBundle
from src.online.reconstruct import reconstruct
from src.online.state import ReducedState, StepSettings, Stopped, StopReason, initialize
from src.online.trajectory import TrajectoryHeader, write_trajectory
from src.online.update import OnlineOperators, step


@dataclass(frozen=True)
class ErrorSample:
    step: int
    time: float
    error: float


@dataclass
class RunResult:
    """One reduced run. A run that stopped early is discarded from averages."""

    mu_index: int
    mu: tuple[float, ...]
    n_steps: int
    completed_steps: int
    stop_reason: StopReason | None = None
    detail: str = ""
    samples: list[ErrorSample] = field(default_factory=list)

    @property
    def completed(self) -> bool:
        return self.stop_reason is None

    @property
    def mean_error(self) -> float:
        return mean_summary("l1_rel_error", [s.error for s in self.samples]).value


@dataclass
class ErrorReport:
    case: str
    n_basis: int
    n_modes: int
    runs: list[RunResult]

    @property
    def completed_runs(self) -> list[RunResult]:
        return [r for r in self.runs if r.completed]

    @property
    def discarded_runs(self) -> list[RunResult]:
        return [r for r in self.runs if not r.completed]

    @property
    def mean_error(self) -> float:
        """Average of the per-run time averages, completed runs only."""
        return mean_summary("l1_rel_error", [r.mean_error for r in self.completed_runs]).value


def sample_steps(n_steps: int, every: int) -> list[int]:
    return list(range(0, n_steps + 1, every))


def step_settings(config: ExperimentConfig) -> StepSettings:
    return StepSettings(
        grad_floor_factor=config.grad_floor_factor,
        gap_floor_factor=config.gap_floor_factor,
        literal_s2=config.literal_s2,
    )


def evaluate_parameter(
    bundle: OfflineBundle,
    ops: OnlineOperators,
    case: CaseDefinition,
    mu_index: int,
    mu: tuple[float, ...],
    n_steps: int,
    every: int,
    settings: StepSettings,
    trajectory_dir: Path | None = None,
) -> RunResult:
    """Run K reduced steps, then compare the sampled states with the full model."""
    grid = bundle.grid
    spec = case.problem(mu, bundle.meta.lam)
    physics = spec.physics
    wanted = set(sample_steps(n_steps, every))

    state = initialize(bundle, initial_snapshot(case, grid, mu, bundle.meta.lam))
    states: list[ReducedState] = [state]
    recon: dict[int, GridFn] = {0: reconstruct(state, bundle)}
    stop: Stopped | None = None
    for _ in range(n_steps):
        nxt = step(state, ops, physics, settings)
        if isinstance(nxt, Stopped):
            stop = nxt
            break
        if nxt.step in wanted:
            # the step checks T̂' only at the particles; reconstruction needs all of T̂
            try:
                recon[nxt.step] = reconstruct(nxt, bundle)
            except NotMonotone as exc:
                stop = Stopped(StopReason.NON_MONOTONE_MAP, state, str(exc))
                break
        state = nxt
        states.append(state)

    steps = sorted(recon)
    reference = solve_full(
        spec, grid, [k * ops.dt for k in steps], substeps=bundle.meta.full_substeps
    )
    samples = [
        ErrorSample(k, k * ops.dt, l1_relative_error(recon[k], ref))
        for k, ref in zip(steps, reference.snapshots, strict=True)
    ]

    result = RunResult(
        mu_index=mu_index,
        mu=mu,
        n_steps=n_steps,
        completed_steps=state.step,
        stop_reason=stop.reason if stop else None,
        detail=stop.detail if stop else "",
        samples=samples,
    )
    if trajectory_dir is not None:
        header = TrajectoryHeader(
            mu=mu,
            n_basis=bundle.n_basis,
            n_modes=bundle.n_modes,
            lam=bundle.meta.lam,
            n_steps=n_steps,
            stop_reason=stop.reason.value if stop else "completed",
        )
        write_trajectory(trajectory_dir / f"mu_{mu_index:03d}.csv", header, states)
    return result


def evaluate_bundle(
    config: ExperimentConfig,
    bundle: OfflineBundle,
    trajectory_dir: Path | None = None,
    logger: MetricsLogger | None = None,
    label: str = "Test",
) -> ErrorReport:
    """All test parameters for one bundle; runs go to a thread pool of ``workers``."""
    if bundle.meta.case != config.case.value:
        raise SchemaMismatch(
            f"bundle was trained for case {bundle.meta.case!r}, config is {config.case.value!r}"
        )
    case = CASES.get(config.case)
    ops = OnlineOperators.from_bundle(bundle)
    settings = step_settings(config)
    test_mu = config.test_parameters(case.mu_box)
    progress = Progress(label, len(test_mu))

    results: dict[int, RunResult] = {}
    with ThreadPoolExecutor(max_workers=config.workers) as executor:
        futures = {
            executor.submit(
                evaluate_parameter,
                bundle,
                ops,
                case,
                i,
                mu,
                case.horizon(mu, ops.dt, config.K),
                config.every_steps,
                settings,
                trajectory_dir,
            ): i
            for i, mu in enumerate(test_mu)
        }
        for future in as_completed(futures):
            run = future.result()
            results[run.mu_index] = run
            status = run.stop_reason.value if run.stop_reason else "completed"
            progress.update(
                len(results),
                f"mu#{run.mu_index} {status} k={run.completed_steps}/{run.n_steps} "
                f"err={run.mean_error:.3e}",
            )
            if logger is not None:
                logger.log_metrics(
                    run.mu_index,
                    {
                        "online/n_basis": bundle.n_basis,
                        "online/n_modes": bundle.n_modes,
                        "online/l1_rel_error": run.mean_error,
                        "online/completed_steps": run.completed_steps,
                        "online/stop_reason": status,
                    },
                )

    return ErrorReport(
        config.case.value,
        bundle.n_basis,
        bundle.n_modes,
        [results[i] for i in sorted(results)],
    )


def run_online(config: ExperimentConfig, bundle: OfflineBundle) -> ErrorReport:
    """Evaluate, write ``errors.csv``/``runs.csv`` and trajectories, print a summary."""
    out = config.output_dir
    with MetricsLogger(out) as logger:
        report = evaluate_bundle(config, bundle, out / "trajectories", logger)
    write_error_report(report, out, config)

    worst = max((r.mean_error for r in report.completed_runs), default=float("nan"))
    print_banner(
        f"Online evaluation complete: {config.case.value}",
        [
            f"(N, M) = ({report.n_basis}, {report.n_modes}) | test parameters: {len(report.runs)}",
            f"Completed: {len(report.completed_runs)} | discarded: {len(report.discarded_runs)}",
            f"Mean L1 relative error: {report.mean_error:.3e} | worst run: {worst:.3e}",
            f"Reports: {out / 'errors.csv'}, {out / 'runs.csv'}",
        ],
    )
    return report

