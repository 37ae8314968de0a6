"""DIP transport maps built from per-piece monotone rearrangements."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from src.core.errors import NonMonotoneResult, PieceMismatch, SignatureMismatch
from src.core.polyline import Polyline
from src.transport.decompose import MonotoneDecomposition

_RANGE_TOL = 1e-12


@dataclass(frozen=True)
class DipMap:
    map: Polyline
    source_index: int
    target_index: int


def _profile_on_support(sigma: Polyline, support: tuple[float, float]) -> Polyline:
    a, b = support
    if not b > a:
        raise PieceMismatch(f"piece support [{a}, {b}] has zero width")
    prof = sigma.restrict(a, b)
    lo, hi = prof.ordinates[0], prof.ordinates[-1]
    if abs(lo) > _RANGE_TOL or abs(hi - 1.0) > _RANGE_TOL:
        raise PieceMismatch(f"profile range [{lo:.6g}, {hi:.6g}] is not [0, 1]")
    if np.any(np.diff(prof.ordinates) < 0):
        raise PieceMismatch("profile is not non-decreasing on its support")
    return prof


def rearrangement(
    sigma_ref: Polyline,
    sigma_target: Polyline,
    support_ref: tuple[float, float] | None = None,
    support_target: tuple[float, float] | None = None,
) -> Polyline:
    """x ↦ σ_target⁻¹(σ_ref(x)) on the reference support.

    Both profiles are piecewise linear, so the composition is piecewise linear with
    breakpoints at the preimages of the merged ordinate levels.
    """
    sup_r = support_ref or (float(sigma_ref.breakpoints[0]), float(sigma_ref.breakpoints[-1]))
    sup_t = support_target or (
        float(sigma_target.breakpoints[0]),
        float(sigma_target.breakpoints[-1]),
    )
    ref = _profile_on_support(sigma_ref, sup_r)
    tgt = _profile_on_support(sigma_target, sup_t)

    levels = merge_levels(np.union1d(ref.ordinates, tgt.ordinates))
    xs = np.asarray(ref.generalized_inverse(levels))
    ys = np.asarray(tgt.generalized_inverse(levels))
    xs[0], xs[-1] = sup_r
    ys[0], ys[-1] = sup_t
    # flat stretches collapse several levels onto one point
    inner = (np.diff(xs[:-1]) > 0) & (np.diff(ys[:-1]) > 0)
    keep = np.concatenate(([True], inner, [True]))
    return Polyline(xs[keep], ys[keep])


def merge_levels(levels: np.ndarray, tol: float = _RANGE_TOL) -> np.ndarray:
    """Interior levels closer than ``tol`` to their predecessor dropped; 0 and 1 pinned."""
    inner = levels[(levels > tol) & (levels < 1.0 - tol)]
    if inner.size:
        inner = inner[np.concatenate(([True], np.diff(inner) > tol))]
    return np.concatenate(([0.0], inner, [1.0]))


def build_dip_map(
    ref: MonotoneDecomposition,
    target: MonotoneDecomposition,
    source_index: int = 0,
    target_index: int = 0,
) -> DipMap:
    """Concatenate per-piece rearrangements into one increasing map of ℝ.

    Gaps between piece images are bridged linearly; outside the domain the map
    continues with its boundary segment slopes.
    """
    if ref.signature != target.signature:
        raise SignatureMismatch(
            f"signatures differ: {ref.signature.signs} vs {target.signature.signs}"
        )

    xs_all: list[np.ndarray] = []
    ys_all: list[np.ndarray] = []
    last_x = -np.inf
    for p_ref, p_tgt in zip(ref.pieces, target.pieces, strict=True):
        r = rearrangement(p_ref.sigma, p_tgt.sigma, p_ref.support, p_tgt.support)
        xs, ys = r.breakpoints, r.ordinates
        if xs[0] < last_x:
            raise PieceMismatch("piece supports overlap")
        if xs[0] == last_x:
            xs, ys = xs[1:], ys[1:]
        xs_all.append(xs)
        ys_all.append(ys)
        last_x = float(r.breakpoints[-1])

    xb = np.concatenate(xs_all)
    yb = np.concatenate(ys_all)
    if not np.all(np.diff(yb) > 0):
        k = int(np.argmin(np.diff(yb)))
        raise NonMonotoneResult(f"DIP map not increasing near x = {xb[k]:.6g}")
    return DipMap(Polyline(xb, yb), source_index, target_index)
