from src.offline.bundle import (
    BundleMeta,
    BundleTables,
    OfflineBundle,
    build_bundle,
    load_bundle,
    save_bundle,
)
from src.offline.eim import eim_points, greedy_eim, select_q
from src.offline.local_basis import LocalBasis, local_basis, project
from src.offline.modes import TransportBasis, perturbation_gram, transport_modes
from src.offline.sampling import (
    SamplingPlan,
    SnapshotSets,
    SnapshotType,
    collect_snapshots,
    sample_parameters,
)

__all__ = [
    "BundleMeta",
    "BundleTables",
    "LocalBasis",
    "OfflineBundle",
    "SamplingPlan",
    "SnapshotSets",
    "SnapshotType",
    "TransportBasis",
    "build_bundle",
    "collect_snapshots",
    "eim_points",
    "greedy_eim",
    "load_bundle",
    "local_basis",
    "perturbation_gram",
    "project",
    "sample_parameters",
    "save_bundle",
    "select_q",
    "transport_modes",
]
