"""Continuous piecewise-linear maps of the real line.

A Polyline is linear between its breakpoints and continues linearly with
``left_slope`` / ``right_slope`` outside them. Transport maps, monotone
profiles and transport modes are all Polylines.
"""

from __future__ import annotations

from collections.abc import Sequence
from functools import reduce
from typing import Protocol, overload

import numpy as np

from src.core.errors import DimensionMismatch, NotMonotone
from src.core.grid import GridFn, Side


class PiecewiseLinear(Protocol):
    @property
    def breakpoints(self) -> np.ndarray: ...

    def __call__(self, x: np.ndarray) -> np.ndarray: ...


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class Polyline:
    __slots__ = ("breakpoints", "ordinates", "left_slope", "right_slope")

    def __init__(
        self,
        breakpoints: Sequence[float] | np.ndarray,
        ordinates: Sequence[float] | np.ndarray,
        left_slope: float | None = None,
        right_slope: float | None = None,
    ) -> None:
        xb = np.array(breakpoints, dtype=np.float64)
        yb = np.array(ordinates, dtype=np.float64)
        if xb.ndim != 1 or xb.shape != yb.shape:
            raise DimensionMismatch(
                f"breakpoints {xb.shape} and ordinates {yb.shape} must be matching vectors"
            )
        if len(xb) < 2:
            raise ValueError("a Polyline needs at least two breakpoints")
        if not np.all(np.diff(xb) > 0):
            raise ValueError("Polyline breakpoints must be strictly increasing")
        seg = np.diff(yb) / np.diff(xb)
        self.breakpoints = _frozen(xb)
        self.ordinates = _frozen(yb)
        self.left_slope = float(seg[0] if left_slope is None else left_slope)
        self.right_slope = float(seg[-1] if right_slope is None else right_slope)

    @classmethod
    def identity(cls, domain: tuple[float, float]) -> Polyline:
        a, b = domain
        return cls([a, b], [a, b], 1.0, 1.0)

    @classmethod
    def constant(cls, value: float, domain: tuple[float, float]) -> Polyline:
        a, b = domain
        return cls([a, b], [value, value], 0.0, 0.0)

    @classmethod
    def from_gridfn(cls, f: GridFn) -> Polyline:
        return cls(f.grid.nodes, f.values, 0.0, 0.0)

    @property
    def segment_slopes(self) -> np.ndarray:
        return np.diff(self.ordinates) / np.diff(self.breakpoints)

    @property
    def is_monotone(self) -> bool:
        return bool(
            np.all(np.diff(self.ordinates) > 0) and self.left_slope > 0 and self.right_slope > 0
        )

    @property
    def min_slope(self) -> float:
        return float(min(self.segment_slopes.min(), self.left_slope, self.right_slope))

    @overload
    def __call__(self, x: float) -> float: ...

    @overload
    def __call__(self, x: np.ndarray) -> np.ndarray: ...

    def __call__(self, x: float | np.ndarray) -> float | np.ndarray:
        xb, yb = self.breakpoints, self.ordinates
        xs = np.asarray(x, dtype=np.float64)
        out = np.interp(xs, xb, yb)
        below = xs < xb[0]
        above = xs > xb[-1]
        if np.ndim(out) == 0:
            if below:
                return float(yb[0] + self.left_slope * (xs - xb[0]))
            if above:
                return float(yb[-1] + self.right_slope * (xs - xb[-1]))
            return float(out)
        out[below] = yb[0] + self.left_slope * (xs[below] - xb[0])
        out[above] = yb[-1] + self.right_slope * (xs[above] - xb[-1])
        return out

    def derivative(self, x: float | np.ndarray, side: Side) -> np.ndarray:
        xs = np.atleast_1d(np.asarray(x, dtype=np.float64))
        seg_side = "right" if side == "right" else "left"
        seg = np.searchsorted(self.breakpoints, xs, side=seg_side) - 1
        slopes = self.segment_slopes
        out = np.empty_like(xs)
        lo = seg < 0
        hi = seg >= len(slopes)
        mid = ~(lo | hi)
        out[lo] = self.left_slope
        out[hi] = self.right_slope
        out[mid] = slopes[seg[mid]]
        return out

    def _preimage(self, y: float | np.ndarray) -> float | np.ndarray:
        # Flat preimages resolve to their midpoint.
        xb, yb = self.breakpoints, self.ordinates
        ys = np.atleast_1d(np.asarray(y, dtype=np.float64))
        out = np.empty_like(ys)
        below = ys < yb[0]
        above = ys > yb[-1]
        if below.any():
            if self.left_slope <= 0:
                raise NotMonotone(f"value {ys[below].min():.6g} lies below a flat left extension")
            out[below] = xb[0] + (ys[below] - yb[0]) / self.left_slope
        if above.any():
            if self.right_slope <= 0:
                raise NotMonotone(f"value {ys[above].max():.6g} lies above a flat right extension")
            out[above] = xb[-1] + (ys[above] - yb[-1]) / self.right_slope
        inside = ~(below | above)
        yi = ys[inside]
        first = np.searchsorted(yb, yi, side="left")
        last = np.searchsorted(yb, yi, side="right") - 1
        exact = first <= last
        res = np.empty_like(yi)
        res[exact] = 0.5 * (xb[first[exact]] + xb[last[exact]])
        k = last[~exact]
        t = (yi[~exact] - yb[k]) / (yb[k + 1] - yb[k])
        res[~exact] = xb[k] + t * (xb[k + 1] - xb[k])
        out[inside] = res
        return float(out[0]) if np.ndim(y) == 0 else out

    def invert(self, y: float | np.ndarray) -> float | np.ndarray:
        if not self.is_monotone:
            raise NotMonotone(
                f"cannot invert a non-monotone polyline (min slope {self.min_slope:.3g})"
            )
        return self._preimage(y)

    def generalized_inverse(self, y: float | np.ndarray) -> float | np.ndarray:
        """Inverse of a non-decreasing polyline; flat levels map to the midpoint."""
        if not np.all(np.diff(self.ordinates) >= 0):
            raise NotMonotone("generalized inverse needs non-decreasing ordinates")
        return self._preimage(y)

    def restrict(self, a: float, b: float) -> Polyline:
        """The same map on [a, b], extended linearly by its end segments."""
        xb = self.breakpoints
        inner = xb[(xb > a) & (xb < b)]
        xs = np.concatenate(([a], inner, [b]))
        return Polyline(xs, self(xs))

    def __repr__(self) -> str:
        return (
            f"Polyline(p={len(self.breakpoints)}, "
            f"[{self.breakpoints[0]:.4g}, {self.breakpoints[-1]:.4g}], "
            f"monotone={self.is_monotone})"
        )


def merged_breakpoints(funcs: Sequence[PiecewiseLinear]) -> np.ndarray:
    return reduce(np.union1d, (np.asarray(f.breakpoints) for f in funcs))


def evaluate(f: Polyline | GridFn, x: float | np.ndarray) -> float | np.ndarray:
    return f(x)


def invert(t: Polyline, y: float | np.ndarray) -> float | np.ndarray:
    return t.invert(y)


def pullback(t: Polyline, xi: GridFn, x: float | np.ndarray) -> float | np.ndarray:
    """(T♭ξ)(x) = ξ(T⁻¹(x)), with ξ extended by its boundary values."""
    return xi(t.invert(x))


def compose_linear_combo(
    modes: Sequence[Polyline], alpha: Sequence[float] | np.ndarray
) -> Polyline:
    """The polyline Σ α_m v_m on the union of the mode breakpoints."""
    coeffs = np.asarray(alpha, dtype=np.float64)
    if not modes or coeffs.shape != (len(modes),):
        raise DimensionMismatch(
            f"{len(modes)} modes against coefficient vector of shape {coeffs.shape}"
        )
    xb = merged_breakpoints(modes)
    yb = np.zeros_like(xb)
    left = 0.0
    right = 0.0
    for a, mode in zip(coeffs, modes, strict=True):
        yb += a * mode(xb)
        left += a * mode.left_slope
        right += a * mode.right_slope
    return Polyline(xb, yb, left, right)
