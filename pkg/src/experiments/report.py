"""CSV emission for error reports, sweep matrices and timing tables."""

from __future__ import annotations

from collections.abc import Sequence
from pathlib import Path
from typing import TYPE_CHECKING

import pandas as pd

from src.offline.sampling import RNG_NAME

if TYPE_CHECKING:
    from src.experiments.config import ExperimentConfig
    from src.experiments.online_run import ErrorReport

FLOAT_FORMAT = "%.12e"


def write_table(path: Path, frame: pd.DataFrame, comments: Sequence[str] = ()) -> None:
    """``# key=value`` comment lines, then the CSV with a column-name header row."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        for line in comments:
            f.write(f"# {line}\n")
        frame.to_csv(f, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def read_table(path: Path) -> pd.DataFrame:
    return pd.read_csv(path, comment="#")


def provenance(config: ExperimentConfig) -> list[str]:
    test = config.test_mu
    test_seed = getattr(test, "seed", "explicit")
    return [
        f"case={config.case.value} n_delta={config.n_delta} lambda={config.lam:.17g} "
        f"full_substeps={config.full_substeps}",
        f"rng={RNG_NAME} seed={config.seed} n_train_mu={config.n_train_mu} test_seed={test_seed}",
    ]


def _mu_columns(mu: tuple[float, ...]) -> dict[str, float]:
    return {f"mu_{i + 1}": m for i, m in enumerate(mu)}


def error_frame(report: ErrorReport) -> pd.DataFrame:
    """One row per sampled step of every run."""
    rows = [
        {
            "mu_index": run.mu_index,
            **_mu_columns(run.mu),
            "step": s.step,
            "t": s.time,
            "l1_rel_error": s.error,
        }
        for run in report.runs
        for s in run.samples
    ]
    return pd.DataFrame(rows)


def run_frame(report: ErrorReport) -> pd.DataFrame:
    """One row per run; ``discarded`` runs carry their error but are left out of averages."""
    rows = [
        {
            "mu_index": run.mu_index,
            **_mu_columns(run.mu),
            "n_steps": run.n_steps,
            "completed_steps": run.completed_steps,
            "stop_reason": run.stop_reason.value if run.stop_reason else "completed",
            "discarded": not run.completed,
            "mean_l1_rel_error": run.mean_error,
        }
        for run in report.runs
    ]
    return pd.DataFrame(rows)


def write_error_report(report: ErrorReport, out: Path, config: ExperimentConfig) -> None:
    head = [
        *provenance(config),
        f"N={report.n_basis} M={report.n_modes} every_steps={config.every_steps}",
        "units: t in model time units, l1_rel_error dimensionless",
    ]
    write_table(out / "errors.csv", error_frame(report), head)
    write_table(
        out / "runs.csv",
        run_frame(report),
        [*head, f"mean_l1_rel_error over completed runs = {report.mean_error:.12e}"],
    )
