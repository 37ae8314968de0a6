"""Per-step wall time of the full and reduced models across grid sizes."""

from __future__ import annotations

import time
from collections.abc import Sequence

import numpy as np
import pandas as pd

from src.experiments.cases import CASES
from src.experiments.config import ExperimentConfig
from src.experiments.offline_run import case_grid, initial_snapshot, train_offline
from src.experiments.online_run import step_settings
from src.experiments.report import provenance, write_table
from src.fullmodel.godunov import initial_state, step_full
from src.obs.logging import MetricsLogger
from src.obs.progress import Progress, print_banner
from src.offline.bundle import OfflineBundle
from src.online.state import Stopped, initialize
from src.online.update import OnlineOperators, step


def median_full_step(config: ExperimentConfig, mu: tuple[float, ...], n_delta: int) -> float:
    case = CASES.get(config.case)
    spec = case.problem(mu, config.lam)
    physics = spec.physics
    ratio = config.lam / config.full_substeps
    state = initial_state(spec, case_grid(case, n_delta))
    durations = []
    for _ in range(config.timing_steps):
        start = time.perf_counter()
        state = step_full(spec, state, lam=ratio, physics=physics)
        durations.append(time.perf_counter() - start)
    return float(np.median(durations))


def median_reduced_step(
    config: ExperimentConfig, bundle: OfflineBundle, mu: tuple[float, ...]
) -> float:
    """Median over ``timing_steps`` steps; a stopped run restarts from the initial state."""
    case = CASES.get(config.case)
    physics = case.problem(mu, config.lam).physics
    ops = OnlineOperators.from_bundle(bundle)
    settings = step_settings(config)
    start_state = initialize(bundle, initial_snapshot(case, bundle.grid, mu, config.lam))
    state = start_state
    durations = []
    for _ in range(config.timing_steps):
        start = time.perf_counter()
        nxt = step(state, ops, physics, settings)
        durations.append(time.perf_counter() - start)
        state = start_state if isinstance(nxt, Stopped) else nxt
    return float(np.median(durations))


def loglog_slope(sizes: Sequence[int], seconds: Sequence[float]) -> float:
    slope, _ = np.polyfit(np.log(np.asarray(sizes, float)), np.log(np.asarray(seconds)), 1)
    return float(slope)


def runtime_scaling(
    config: ExperimentConfig, n_delta_list: Sequence[int] | None = None
) -> pd.DataFrame:
    """Columns ``n_delta``, ``full_step_s``, ``reduced_step_s`` at fixed (N, M)."""
    sizes = list(n_delta_list or config.n_delta_list)
    case = CASES.get(config.case)
    mu = config.test_parameters(case.mu_box)[0]
    progress = Progress("Timing", len(sizes))
    rows = []
    out = config.output_dir
    with MetricsLogger(out) as logger:
        for i, n_delta in enumerate(sizes, start=1):
            bundle = train_offline(
                config, n_delta=n_delta, n_train_mu=config.timing_train_mu, verbose=False
            ).bundle
            full_s = median_full_step(config, mu, n_delta)
            reduced_s = median_reduced_step(config, bundle, mu)
            rows.append({"n_delta": n_delta, "full_step_s": full_s, "reduced_step_s": reduced_s})
            logger.log_metrics(
                n_delta, {"timing/full_step_s": full_s, "timing/reduced_step_s": reduced_s}
            )
            progress.update(i, f"N_delta={n_delta} full={full_s:.3e}s reduced={reduced_s:.3e}s")

    frame = pd.DataFrame(rows)
    head = [
        *provenance(config),
        f"N={config.N} M={config.M} timing_steps={config.timing_steps}",
        "units: seconds per step (median)",
    ]
    write_table(out / "timing.csv", frame, head)

    lines = [f"Sizes: {sizes[0]} .. {sizes[-1]} | (N, M) = ({config.N}, {config.M})"]
    if len(sizes) > 1:
        spread = frame["reduced_step_s"].max() / frame["reduced_step_s"].min()
        lines.append(f"Full model log-log slope: {loglog_slope(sizes, frame['full_step_s']):.2f}")
        lines.append(f"Reduced model max/min per-step time: {spread:.2f}")
    lines.append(f"Table: {out / 'timing.csv'}")
    print_banner(f"Timing complete: {config.case.value}", lines)
    return frame
