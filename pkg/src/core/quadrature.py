"""Exact integrals of piecewise-linear functions."""

from __future__ import annotations

import numpy as np

from src.core.grid import GridFn
from src.core.polyline import PiecewiseLinear, merged_breakpoints


def _partition(funcs: list[PiecewiseLinear], domain: tuple[float, float]) -> np.ndarray:
    a, b = domain
    xb = merged_breakpoints(funcs)
    return np.concatenate(([a], xb[(xb > a) & (xb < b)], [b]))


def segment_product_integral(h: np.ndarray, fa: np.ndarray, fb: np.ndarray,
                             ga: np.ndarray, gb: np.ndarray) -> float:
    # integrand is quadratic on each segment; Simpson is exact
    return float(np.sum(h * (2.0 * fa * ga + fa * gb + fb * ga + 2.0 * fb * gb)) / 6.0)


def inner_product(f: PiecewiseLinear, g: PiecewiseLinear, domain: tuple[float, float]) -> float:
    """∫_domain f g dx, computed exactly on the merged breakpoint partition."""
    xs = _partition([f, g], domain)
    fv = f(xs)
    gv = g(xs)
    return segment_product_integral(np.diff(xs), fv[:-1], fv[1:], gv[:-1], gv[1:])


def l1_norm(f: PiecewiseLinear, domain: tuple[float, float]) -> float:
    xs = _partition([f], domain)
    return _abs_integral(np.diff(xs), f(xs))


def _abs_integral(h: np.ndarray, v: np.ndarray) -> float:
    a = v[:-1]
    b = v[1:]
    same = a * b >= 0
    total = np.sum(h[same] * (np.abs(a[same]) + np.abs(b[same]))) / 2.0
    # a zero crossing inside the segment splits it into two triangles
    a_c, b_c, h_c = a[~same], b[~same], h[~same]
    total += np.sum(h_c * (a_c**2 + b_c**2) / (np.abs(a_c) + np.abs(b_c))) / 2.0
    return float(total)


def l1_relative_error(approx: GridFn, reference: GridFn) -> float:
    """‖approx − reference‖_L¹ / ‖reference‖_L¹ on the shared grid."""
    h = np.full(reference.grid.n_nodes - 1, reference.grid.spacing)
    num = _abs_integral(h, approx.values - reference.values)
    den = _abs_integral(h, reference.values)
    return num / den if den > 0 else num


def mass_apply(values: np.ndarray, spacing: float) -> np.ndarray:
    """Apply the P1 mass matrix of a uniform grid to the columns of ``values``."""
    v = np.asarray(values, dtype=np.float64)
    out = 4.0 * v
    out[0] = 2.0 * v[0]
    out[-1] = 2.0 * v[-1]
    out[1:] += v[:-1]
    out[:-1] += v[1:]
    return out * (spacing / 6.0)


def grid_gram(values: np.ndarray, spacing: float) -> np.ndarray:
    """Gram matrix of the columns of ``values`` under the exact L² inner product."""
    g = values.T @ mass_apply(values, spacing)
    return 0.5 * (g + g.T)
