"""Run logging: JSON lines plus TensorBoard scalars."""

from __future__ import annotations

import json
import time
from pathlib import Path
from types import TracebackType
from typing import Any

import numpy as np
from torch.utils.tensorboard import SummaryWriter


def _plain(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    return value


class MetricsLogger:
    """Appends ``{"step", "wall_time", "elapsed_s", **metrics}`` to ``logs.jsonl``.

    Numeric values are mirrored to TensorBoard under ``<run_dir>/tensorboard``.
    """

    def __init__(self, run_dir: Path) -> None:
        self.run_dir = run_dir
        self.run_dir.mkdir(parents=True, exist_ok=True)
        self.log_path = run_dir / "logs.jsonl"
        self.tb_dir = run_dir / "tensorboard"
        self.tb = SummaryWriter(str(self.tb_dir))
        self._start_time = time.time()

    def log_metrics(self, step: int, metrics: dict[str, Any]) -> None:
        now = time.time()
        plain = {k: _plain(v) for k, v in metrics.items()}
        line = {"step": step, "wall_time": now, "elapsed_s": now - self._start_time, **plain}
        with self.log_path.open("a", encoding="utf-8") as f:
            f.write(json.dumps(line) + "\n")
        for k, v in plain.items():
            if isinstance(v, (int, float)) and not isinstance(v, bool) and np.isfinite(v):
                self.tb.add_scalar(k, v, step)

    def close(self) -> None:
        self.tb.flush()
        self.tb.close()

    def __enter__(self) -> MetricsLogger:
        return self

    def __exit__(
        self,
        exc_type: type[BaseException] | None,
        exc: BaseException | None,
        tb: TracebackType | None,
    ) -> None:
        self.close()
