"""(N, M) sweeps: one offline training at the largest sizes, truncated per cell."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import pandas as pd

from src.core.errors import MatsError
from src.experiments.config import ExperimentConfig
from src.experiments.offline_run import train_offline
from src.experiments.online_run import ErrorReport, evaluate_bundle
from src.experiments.report import provenance, write_table
from src.obs.logging import MetricsLogger
from src.obs.progress import print_banner


@dataclass
class SweepCell:
    n_basis: int
    n_modes: int
    report: ErrorReport | None
    error: str = ""

    @property
    def mean_error(self) -> float:
        return self.report.mean_error if self.report else float("nan")

    @property
    def n_discarded(self) -> int:
        return len(self.report.discarded_runs) if self.report else 0


def sweep_frame(cells: Sequence[SweepCell]) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {
                "N": c.n_basis,
                "M": c.n_modes,
                "mean_l1_rel_error": c.mean_error,
                "completed": len(c.report.completed_runs) if c.report else 0,
                "discarded": c.n_discarded,
                "failed": c.error,
            }
            for c in cells
        ]
    )


def sweep_matrix(cells: Sequence[SweepCell]) -> pd.DataFrame:
    """Rows N, columns M, averaged error; empty where the pair was not run."""
    frame = sweep_frame(cells).pivot(index="N", columns="M", values="mean_l1_rel_error")
    frame.columns = [f"M={m}" for m in frame.columns]
    return frame.reset_index()


def sweep_nm(
    config: ExperimentConfig,
    n_list: Sequence[int] | None = None,
    m_list: Sequence[int] | None = None,
) -> list[SweepCell]:
    if n_list is not None or m_list is not None:
        config = config.model_copy(
            update={"n_list": list(n_list or []), "m_list": list(m_list or [])}
        )
    pairs = config.sweep_pairs()
    if not pairs:
        raise ValueError(f"no (N, M) pair with N > M in {config.n_list} x {config.m_list}")
    n_max = max(n for n, _ in pairs)
    m_max = max(m for _, m in pairs)

    out = config.output_dir
    cells: list[SweepCell] = []
    with MetricsLogger(out) as logger:
        full = train_offline(config, n_basis=n_max, n_modes=m_max, logger=logger).bundle
        for i, (n, m) in enumerate(pairs, start=1):
            try:
                bundle = full.truncate(n, m)
                label = f"Cell {i}/{len(pairs)} N={n} M={m}"
                report = evaluate_bundle(config, bundle, label=label)
            except MatsError as exc:
                cells.append(SweepCell(n, m, None, f"{type(exc).__name__}: {exc}"))
                continue
            cells.append(SweepCell(n, m, report))
            logger.log_metrics(
                i,
                {
                    "sweep/N": n,
                    "sweep/M": m,
                    "sweep/l1_rel_error": report.mean_error,
                    "sweep/discarded": len(report.discarded_runs),
                },
            )

    head = [*provenance(config), "units: mean_l1_rel_error dimensionless"]
    write_table(out / "sweep.csv", sweep_frame(cells), head)
    write_table(out / "sweep_matrix.csv", sweep_matrix(cells), head)

    best = min(cells, key=lambda c: c.mean_error if np.isfinite(c.mean_error) else np.inf)
    print_banner(
        f"Sweep complete: {config.case.value}",
        [
            f"Cells: {len(cells)} | failed: {sum(1 for c in cells if c.report is None)}",
            f"Best: (N, M) = ({best.n_basis}, {best.n_modes}) error={best.mean_error:.3e}",
            f"Matrix: {out / 'sweep_matrix.csv'}",
        ],
    )
    return cells
