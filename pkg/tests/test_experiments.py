from __future__ import annotations

from pathlib import Path
from typing import Any

import numpy as np
import pytest
import yaml
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from src.core.errors import SchemaMismatch, SignatureViolation
from src.core.grid import Grid, GridFn
from src.core.quadrature import l1_relative_error
from src.experiments.cases import CASES, CaseName
from src.experiments.cli import main
from src.experiments.config import ExperimentConfig, RandomDraw, default_config_yaml, load_config
from src.experiments.offline_run import (
    BUNDLE_NAME,
    initial_snapshot,
    run_offline,
    train_offline,
)
from src.experiments.online_run import (
    evaluate_bundle,
    evaluate_parameter,
    run_online,
    step_settings,
)
from src.experiments.report import read_table
from src.experiments.sweep import sweep_nm
from src.experiments.timing import loglog_slope, runtime_scaling
from src.fullmodel.godunov import solve_full
from src.offline.bundle import load_bundle
from src.offline.local_basis import project
from src.offline.sampling import sample_parameters
from src.online.update import OnlineOperators
from src.transport.decompose import Signature, SignatureCheck, check_signature_condition

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"


def _small(tmp_path: Path, **overrides: Any) -> dict[str, Any]:
    raw: dict[str, Any] = {
        "case": "advection",
        "n_delta": 201,
        "lambda": 0.8,
        "n_train_mu": 3,
        "seed": 0,
        "N": 4,
        "M": 2,
        "K": 40,
        "every_steps": 10,
        "signature_policy": "drop",
        "flat_tol": 1e-12,
        "test_mu": [[1.0], [0.9]],
        "output_dir": str(tmp_path / "run"),
    }
    raw.update(overrides)
    return raw


def _config(tmp_path: Path, **overrides: Any) -> ExperimentConfig:
    return ExperimentConfig.model_validate(_small(tmp_path, **overrides))


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


def test_shipped_configs_validate() -> None:
    for path in sorted(CONFIG_DIR.glob("*.yaml")):
        config = load_config(path)
        assert config.N > config.M
        assert config.output_dir.parts[0] == "artifacts"


def test_config_rejects_bad_sizes(tmp_path: Path) -> None:
    with pytest.raises(ValidationError):
        _config(tmp_path, N=2, M=2)
    with pytest.raises(ValidationError):
        _config(tmp_path, N=300)
    with pytest.raises(ValidationError):
        _config(tmp_path, unknown_key=1)
    with pytest.raises(ValidationError):
        _config(tmp_path, snapshot_weights={"du": -1.0})


def test_config_lambda_alias_and_overrides(tmp_path: Path) -> None:
    path = tmp_path / "c.yaml"
    path.write_text(yaml.safe_dump(_small(tmp_path)), encoding="utf-8")
    config = load_config(path, {"workers": 3, "output_dir": None})
    assert config.lam == 0.8
    assert config.workers == 3
    assert config.snapshot_weights["psi"] == 1.0
    assert "lambda: 0.8" in config.to_yaml()


def test_default_config_yaml_round_trips() -> None:
    text = default_config_yaml(CaseName.BURGERS_FAST)
    config = ExperimentConfig.model_validate(yaml.safe_load(text))
    assert config.case is CaseName.BURGERS_FAST
    assert config.test_mu == RandomDraw(count=10, seed=1)


def test_sweep_pairs_skip_invalid_combinations(tmp_path: Path) -> None:
    config = _config(tmp_path, n_list=[2, 4], m_list=[1, 2, 3])
    assert config.sweep_pairs() == [(2, 1), (4, 1), (4, 2), (4, 3)]
    assert _config(tmp_path).sweep_pairs() == [(4, 2)]


def test_test_parameters_random_and_explicit(tmp_path: Path) -> None:
    box = CASES.get("advection").mu_box
    assert _config(tmp_path).test_parameters(box) == [(1.0,), (0.9,)]
    drawn = _config(tmp_path, test_mu={"count": 4, "seed": 7}).test_parameters(box)
    assert len(drawn) == 4
    assert all(0.75 <= mu[0] <= 1.25 for mu in drawn)
    with pytest.raises(ValueError):
        _config(tmp_path, test_mu=[[1.0, 2.0]]).test_parameters(box)


# ---------------------------------------------------------------------------
# Cases
# ---------------------------------------------------------------------------


def test_case_horizons() -> None:
    fast = CASES.get("burgers_fast")
    assert fast.horizon((125.0, 0.5), 0.01) == 8
    # 1.2 / (1/2047) = 2456 steps of full-model reference, so K = 2400 runs uncapped
    assert CASES.get("color").horizon((0.3, 10.0, 3.2), 0.5 * 2 / 2047) == 2400
    assert CASES.get("color").horizon((0.3, 10.0, 3.2), 0.5 * 2 / 2047, k_override=3000) == 2456
    assert CASES.get("color").horizon((0.3, 10.0, 3.2), 1e-4, k_override=50) == 50
    assert CASES.get("advection").horizon((1.0,), 0.02) == 100
    with pytest.raises(KeyError):
        CASES.get("wave")


# ---------------------------------------------------------------------------
# Offline and online stages
# ---------------------------------------------------------------------------


def test_offline_then_online(tmp_path: Path) -> None:
    config = _config(tmp_path)
    bundle = run_offline(config)
    out = config.output_dir
    assert (out / BUNDLE_NAME).exists()
    assert (out / "logs.jsonl").exists()
    assert bundle.n_basis == 4
    assert bundle.n_modes == 2
    assert np.all(np.diff(bundle.q_indices) > 0)

    report = run_online(config, load_bundle(out / BUNDLE_NAME))
    assert [r.mu for r in report.runs] == [(1.0,), (0.9,)]
    for run in report.runs:
        assert run.samples[0].step == 0
        assert all(s.step % 10 == 0 for s in run.samples)
        assert all(np.isfinite(s.error) for s in run.samples)
        assert (out / "trajectories" / f"mu_{run.mu_index:03d}.csv").exists()

    errors = read_table(out / "errors.csv")
    assert list(errors.columns) == ["mu_index", "mu_1", "step", "t", "l1_rel_error"]
    runs = read_table(out / "runs.csv")
    assert len(runs) == 2
    assert set(runs["stop_reason"]) <= {
        "completed",
        "particle_collision",
        "ordering_violation",
        "small_gradient",
        "non_monotone_map",
    }
    head = (out / "errors.csv").read_text(encoding="utf-8").splitlines()[0]
    assert head.startswith("# case=advection")


SIGNATURE_BREAK = SignatureCheck(
    holds=False,
    reference=Signature(0.0, (0, 1, -1, 0)),
    violations=[(2, Signature(0.0, (0, 1, 0, -1, 0)))],
)


def test_signature_abort_policy_names_the_snapshot(
    tmp_path: Path, monkeypatch: pytest.MonkeyPatch
) -> None:
    monkeypatch.setattr(
        "src.experiments.offline_run.check_signature_condition", lambda *a, **k: SIGNATURE_BREAK
    )
    with pytest.raises(SignatureViolation, match=r"first at mu=\("):
        train_offline(_config(tmp_path, signature_policy="abort"), verbose=False)


def test_signature_drop_policy_skips_the_snapshot(
    tmp_path: Path, monkeypatch: pytest.MonkeyPatch
) -> None:
    monkeypatch.setattr(
        "src.experiments.offline_run.check_signature_condition", lambda *a, **k: SIGNATURE_BREAK
    )
    result = train_offline(_config(tmp_path), verbose=False)
    assert result.dropped == [2]
    assert result.bundle.n_modes == 2


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_color_snapshots_share_one_signature(seed: int) -> None:
    case = CASES.get("color")
    mu = sample_parameters(case.mu_box, 1, seed)[0]
    # up to t = 0.8 the hump and its upwind tail stay clear of the outflow boundary
    times = np.concatenate((case.local_times(mu), case.global_times(mu)[:8]))
    sol = solve_full(case.problem(mu, 0.5), Grid(0.0, 2.0, 2048), times, substeps=2)
    check = check_signature_condition(sol.snapshots, rel_tol=1e-9)
    assert check.holds, check.violations
    assert check.reference.signs == (0, 1, -1, 0)


def test_initial_step_error_is_the_projection_error(tmp_path: Path) -> None:
    config = _config(tmp_path)
    bundle = train_offline(config, verbose=False).bundle
    case = CASES.get(config.case)
    mu = (0.9,)
    run = evaluate_parameter(
        bundle,
        OnlineOperators.from_bundle(bundle),
        case,
        0,
        mu,
        n_steps=0,
        every=10,
        settings=step_settings(config),
    )
    u0 = initial_snapshot(case, bundle.grid, mu, config.lam)
    projected = GridFn(bundle.grid, project(bundle.local, u0) @ bundle.local.values)
    assert run.completed
    assert [s.step for s in run.samples] == [0]
    assert run.samples[0].error == pytest.approx(l1_relative_error(projected, u0), rel=1e-9)


def test_evaluate_bundle_rejects_other_case(tmp_path: Path) -> None:
    bundle = train_offline(_config(tmp_path), verbose=False).bundle
    other = _config(tmp_path, case="color", n_delta=201, test_mu={"count": 1, "seed": 0})
    with pytest.raises(SchemaMismatch):
        evaluate_bundle(other, bundle)


def test_parallel_evaluation_matches_serial(tmp_path: Path) -> None:
    config = _config(tmp_path, test_mu={"count": 4, "seed": 3})
    bundle = train_offline(config, verbose=False).bundle
    serial = evaluate_bundle(config, bundle)
    parallel = evaluate_bundle(config.model_copy(update={"workers": 3}), bundle)
    assert [r.mu_index for r in parallel.runs] == [0, 1, 2, 3]
    for a, b in zip(serial.runs, parallel.runs, strict=True):
        assert [s.error for s in a.samples] == [s.error for s in b.samples]


def test_sweep_single_cell(tmp_path: Path) -> None:
    cells = sweep_nm(_config(tmp_path), n_list=[3, 4], m_list=[2])
    assert [(c.n_basis, c.n_modes) for c in cells] == [(3, 2), (4, 2)]
    matrix = read_table(tmp_path / "run" / "sweep_matrix.csv")
    assert list(matrix.columns) == ["N", "M=2"]
    assert list(matrix["N"]) == [3, 4]


def test_runtime_scaling_table(tmp_path: Path) -> None:
    config = _config(tmp_path, timing_steps=3, timing_train_mu=2)
    frame = runtime_scaling(config, [101, 201])
    assert list(frame.columns) == ["n_delta", "full_step_s", "reduced_step_s"]
    assert list(frame["n_delta"]) == [101, 201]
    assert (frame[["full_step_s", "reduced_step_s"]] > 0).all().all()
    assert (tmp_path / "run" / "timing.csv").exists()


def test_loglog_slope_of_power_law() -> None:
    sizes = [512, 1024, 2048]
    assert loglog_slope(sizes, [2e-6 * n for n in sizes]) == pytest.approx(1.0)


# ---------------------------------------------------------------------------
# Command line
# ---------------------------------------------------------------------------


def _run_cli(tmp_path: Path, name: str) -> tuple[bytes, str]:
    cfg = tmp_path / "advection.yaml"
    cfg.write_text(yaml.safe_dump(_small(tmp_path)), encoding="utf-8")
    out = tmp_path / name
    assert main(["offline", "--config", str(cfg), "--output-dir", str(out)]) == 0
    bundle = out / BUNDLE_NAME
    args = ["online", "--config", str(cfg), "--output-dir", str(out), "--bundle", str(bundle)]
    assert main(args) == 0
    return bundle.read_bytes(), (out / "errors.csv").read_text(encoding="utf-8")


def test_cli_runs_are_deterministic(tmp_path: Path) -> None:
    assert _run_cli(tmp_path, "first") == _run_cli(tmp_path, "second")


def test_cli_reconstruct_writes_snapshots(tmp_path: Path) -> None:
    _run_cli(tmp_path, "run")
    out = tmp_path / "run"
    traj = out / "trajectories" / "mu_000.csv"
    rc = main(
        [
            "reconstruct",
            "--bundle",
            str(out / BUNDLE_NAME),
            "--trajectory",
            str(traj),
            "--out",
            str(tmp_path / "recon"),
            "--every",
            "20",
        ]
    )
    assert rc == 0
    assert list((tmp_path / "recon" / "snapshots" / "advection").rglob("*.dat"))


def test_cli_exit_codes(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    bad = tmp_path / "bad.yaml"
    bad.write_text(yaml.safe_dump(_small(tmp_path, N=2, M=2)), encoding="utf-8")
    assert main(["offline", "--config", str(bad)]) == 2
    assert main(["offline", "--config", str(tmp_path / "missing.yaml")]) == 1
    good = tmp_path / "good.yaml"
    good.write_text(yaml.safe_dump(_small(tmp_path)), encoding="utf-8")
    missing = str(tmp_path / "none.mats")
    assert main(["online", "--config", str(good), "--bundle", missing]) == 1
    assert main(["config", "--defaults", "--case", "burgers_slow"]) == 0
    assert "case: burgers_slow" in capsys.readouterr().out


# ---------------------------------------------------------------------------
# Desk-scale reproductions
# ---------------------------------------------------------------------------


@pytest.mark.slow
def test_color_reproduction(tmp_path: Path) -> None:
    config = load_config(CONFIG_DIR / "color.yaml", {"output_dir": str(tmp_path)})
    result = train_offline(config)
    reference = result.signature.reference.signs
    assert reference == (0, 1, -1, 0)
    for i, sig in result.signature.violations:
        # a hump reaching the outflow boundary only loses its trailing flat piece
        assert sig.signs == reference[:-1]
        assert result.snapshots.global_keys[i].t > 0.75

    report = run_online(config, result.bundle)
    assert len(report.completed_runs) == len(report.runs)
    assert all(run.n_steps == run.completed_steps == 2400 for run in report.runs)
    for run in report.runs:
        assert 1e-4 <= run.mean_error <= 3e-2


@pytest.mark.slow
def test_burgers_fast_reproduction(tmp_path: Path) -> None:
    config = load_config(CONFIG_DIR / "burgers_fast.yaml", {"output_dir": str(tmp_path)})
    cells = sweep_nm(config, n_list=[4, 5, 6], m_list=[3, 4, 5])
    near_diagonal = [c for c in cells if c.n_basis == c.n_modes + 1 and c.report is not None]
    good = [
        c
        for c in near_diagonal
        if c.report is not None
        and sum(1 for r in c.report.completed_runs if r.mean_error <= 1e-2) >= 5
    ]
    assert good
