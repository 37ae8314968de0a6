"""Uniform grids and continuous piecewise-linear functions on them."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from typing import Literal, overload

import numpy as np

from src.core.errors import DimensionMismatch

Side = Literal["left", "right"]


@dataclass(frozen=True)
class Grid:
    x_left: float
    x_right: float
    n_nodes: int

    def __post_init__(self) -> None:
        if not self.x_left < self.x_right:
            raise ValueError(f"Grid needs x_left < x_right, got {self.x_left}, {self.x_right}")
        if self.n_nodes < 2:
            raise ValueError(f"Grid needs at least 2 nodes, got {self.n_nodes}")

    @property
    def spacing(self) -> float:
        return (self.x_right - self.x_left) / (self.n_nodes - 1)

    @property
    def nodes(self) -> np.ndarray:
        # linspace pins the last node to x_right exactly
        return np.linspace(self.x_left, self.x_right, self.n_nodes)

    @property
    def cell_centers(self) -> np.ndarray:
        x = self.nodes
        return 0.5 * (x[:-1] + x[1:])

    @property
    def domain(self) -> tuple[float, float]:
        return (self.x_left, self.x_right)

    def node(self, i: int) -> float:
        return float(self.nodes[i])

    def nearest_node(self, x: float) -> int:
        i = int(round((x - self.x_left) / self.spacing))
        return min(max(i, 0), self.n_nodes - 1)


class GridFn:
    """Nodal coefficients b_n of a continuous piecewise-linear function.

    Outside the grid the function is extended by its boundary values.
    """

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid, values: np.ndarray) -> None:
        vals = np.array(values, dtype=np.float64)
        if vals.shape != (grid.n_nodes,):
            raise DimensionMismatch(
                f"GridFn expects {grid.n_nodes} nodal values, got shape {vals.shape}"
            )
        vals.setflags(write=False)
        self.grid = grid
        self.values = vals

    @classmethod
    def from_function(cls, grid: Grid, func: Callable[[np.ndarray], np.ndarray]) -> GridFn:
        return cls(grid, np.asarray(func(grid.nodes), dtype=np.float64))

    @property
    def breakpoints(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.values) / self.grid.spacing

    @overload
    def __call__(self, x: float) -> float: ...

    @overload
    def __call__(self, x: np.ndarray) -> np.ndarray: ...

    def __call__(self, x: float | np.ndarray) -> float | np.ndarray:
        out = np.interp(x, self.grid.nodes, self.values)
        return float(out) if np.ndim(out) == 0 else out

    def derivative(self, x: float | np.ndarray, side: Side) -> np.ndarray:
        """One-sided derivative; zero where the constant extension applies."""
        nodes = self.grid.nodes
        xs = np.atleast_1d(np.asarray(x, dtype=np.float64))
        if side == "right":
            seg = np.searchsorted(nodes, xs, side="right") - 1
        else:
            seg = np.searchsorted(nodes, xs, side="left") - 1
        slopes = self.slopes
        inside = (seg >= 0) & (seg < len(slopes))
        out = np.zeros_like(xs)
        out[inside] = slopes[seg[inside]]
        return out

    def __repr__(self) -> str:
        return f"GridFn(grid={self.grid!r}, max|b|={np.max(np.abs(self.values)):.4g})"
