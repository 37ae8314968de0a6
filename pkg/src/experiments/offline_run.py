"""Offline stage: snapshots, signature check, DIP maps, modes, POD, EIM, bundle."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from src.core.errors import SignatureViolation
from src.core.grid import Grid, GridFn
from src.experiments.cases import CASES, CaseDefinition
from src.experiments.config import ExperimentConfig, SignaturePolicy
from src.fullmodel.godunov import initial_state, nodal_reconstruction
from src.fullmodel.snapshot_io import snapshot_path, write_snapshot
from src.obs.logging import MetricsLogger
from src.obs.progress import Progress, print_banner
from src.offline.bundle import BundleMeta, OfflineBundle, build_bundle, save_bundle
from src.offline.eim import eim_points
from src.offline.local_basis import local_basis, project
from src.offline.modes import transport_modes
from src.offline.sampling import SamplingPlan, SnapshotSets, collect_snapshots, sample_parameters
from src.transport.decompose import SignatureCheck, check_signature_condition, monotone_decompose
from src.transport.dip import build_dip_map

BUNDLE_NAME = "bundle.mats"


@dataclass
class OfflineResult:
    bundle: OfflineBundle
    snapshots: SnapshotSets
    signature: SignatureCheck
    dropped: list[int] = field(default_factory=list)


def case_grid(case: CaseDefinition, n_delta: int) -> Grid:
    return Grid(case.domain[0], case.domain[1], n_delta)


def initial_snapshot(case: CaseDefinition, grid: Grid, mu: tuple[float, ...], lam: float) -> GridFn:
    """The full model's nodal state at t = 0."""
    return nodal_reconstruction(initial_state(case.problem(mu, lam), grid))


def train_offline(
    config: ExperimentConfig,
    n_basis: int | None = None,
    n_modes: int | None = None,
    n_delta: int | None = None,
    n_train_mu: int | None = None,
    logger: MetricsLogger | None = None,
    verbose: bool = True,
) -> OfflineResult:
    """Build a bundle in memory; sizes default to the config's (N, M, N_δ)."""
    case = CASES.get(config.case)
    grid = case_grid(case, n_delta or config.n_delta)
    n_basis = n_basis or config.N
    n_modes = n_modes or config.M

    mu_train = sample_parameters(case.mu_box, n_train_mu or config.n_train_mu, config.seed)
    plan = SamplingPlan(
        mu_samples=mu_train,
        local_times=case.local_times,
        global_times=case.global_times,
        weights=dict(config.snapshot_weights),
        substeps=config.full_substeps,
    )
    progress = Progress("Full model", len(mu_train))

    def on_solve(done: int, total: int) -> None:
        if verbose:
            mu = ", ".join(f"{m:.4g}" for m in mu_train[done - 1])
            progress.update(done, f"mu=({mu})")

    sets = collect_snapshots(lambda mu: case.problem(mu, config.lam), grid, plan, on_solve)

    check = check_signature_condition(sets.global_, rel_tol=config.flat_tol)
    dropped = [i for i, _ in check.violations]
    if dropped and config.signature_policy is SignaturePolicy.ABORT:
        i, sig = check.violations[0]
        key = sets.global_keys[i]
        raise SignatureViolation(
            f"{len(dropped)} of {len(sets.global_)} global snapshots break the signature "
            f"{check.reference.signs}; first at mu={key.mu}, t={key.t:.6g} with {sig.signs}"
        )
    skip = set(dropped)
    kept = [i for i in range(len(sets.global_)) if i not in skip]

    decomps = [monotone_decompose(sets.global_[i], rel_tol=config.flat_tol) for i in kept]
    ref = decomps[0]
    dip_maps = [build_dip_map(ref, d, kept[0], i) for i, d in zip(kept, decomps, strict=True)]
    transport = transport_modes(dip_maps, n_modes, case.domain)

    local = local_basis(grid, sets.local_matrix(), n_basis)
    eim_idx, _ = eim_points(local)
    beta0 = project(local, initial_snapshot(case, grid, mu_train[0], config.lam))
    meta = BundleMeta(
        case=case.name.value,
        problem_kind=case.kind,
        lam=config.lam,
        full_substeps=config.full_substeps,
        u0=case.u0,
    )
    bundle = build_bundle(meta, transport, local, eim_idx, beta0)

    if logger is not None:
        metrics: dict[str, object] = {
            "offline/n_delta": grid.n_nodes,
            "offline/n_local": sets.n_local,
            "offline/n_global": len(sets.global_),
            "offline/n_dropped": len(dropped),
            "offline/dropped": dropped,
            "offline/signature": list(check.reference.signs),
            "offline/z_condition": bundle.z_condition_number(),
            "offline/transport_eigenvalues": transport.eigenvalues[: n_modes + 4],
            "offline/local_singular_values": local.singular_values[: n_basis + 4],
        }
        for m, ev in enumerate(transport.eigenvalues[: n_modes - 1]):
            metrics[f"offline/transport_eigenvalue_{m + 2}"] = float(ev)
        logger.log_metrics(0, metrics)

    return OfflineResult(bundle, sets, check, dropped)


def save_snapshots(result: OfflineResult, root: Path, case: str) -> int:
    for u, key in zip(result.snapshots.global_, result.snapshots.global_keys, strict=True):
        write_snapshot(snapshot_path(root, case, key.mu, key.t), u, key.t, key.mu)
    return len(result.snapshots.global_)


def run_offline(config: ExperimentConfig) -> OfflineBundle:
    """Train, save ``<output_dir>/bundle.mats`` and print a summary."""
    out = config.output_dir
    with MetricsLogger(out) as logger:
        result = train_offline(config, logger=logger)
    bundle = result.bundle
    path = out / BUNDLE_NAME
    save_bundle(bundle, path)
    if config.save_snapshots:
        save_snapshots(result, out, config.case.value)

    print_banner(
        f"Offline training complete: {config.case.value}",
        [
            f"Grid: N_delta={bundle.grid.n_nodes} | (N, M) = ({bundle.n_basis}, {bundle.n_modes})",
            f"Snapshots: local={result.snapshots.n_local} | "
            f"global={len(result.snapshots.global_)} | dropped={len(result.dropped)}",
            f"cond(Z) = {bundle.z_condition_number():.3e}",
            f"Bundle: {path}",
        ],
    )
    return bundle
