from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from src.obs.logging import MetricsLogger
from src.obs.metrics import mean_summary
from src.obs.progress import Progress, format_elapsed, format_eta, print_banner


def test_metrics_logger_writes_json_lines(tmp_path: Path) -> None:
    with MetricsLogger(tmp_path) as logger:
        logger.log_metrics(0, {"offline/n_delta": 201, "offline/dropped": [1, 2]})
        logger.log_metrics(3, {"online/l1_rel_error": np.float64(0.25), "online/stop": "ok"})
    lines = (tmp_path / "logs.jsonl").read_text(encoding="utf-8").splitlines()
    first, second = (json.loads(line) for line in lines)
    assert first["step"] == 0
    assert first["offline/dropped"] == [1, 2]
    assert second["online/l1_rel_error"] == 0.25
    assert second["elapsed_s"] >= 0.0
    assert (tmp_path / "tensorboard").is_dir()


def test_time_formatting() -> None:
    assert format_elapsed(75) == "1:15"
    assert format_elapsed(3725) == "1:02:05"
    assert format_eta(42) == "42s"
    assert format_eta(125) == "2:05"
    assert format_eta(3725) == "1:02:05"


def test_progress_and_banner_output(capsys: pytest.CaptureFixture[str]) -> None:
    Progress("Test", 4).update(1, "mu=(1)")
    print_banner("Done", ["a", "b"])
    out = capsys.readouterr().out
    assert out.startswith("[Test 1/4] mu=(1)")
    assert "═" * 56 in out
    assert "  a\n" in out


def test_mean_summary_skips_non_finite() -> None:
    s = mean_summary("err", [1.0, float("nan"), 3.0])
    assert s.value == 2.0
    assert s.count == 2
    assert np.isnan(mean_summary("err", []).value)
