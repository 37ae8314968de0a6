from src.core.grid import Grid, GridFn, Side
from src.core.polyline import (
    Polyline,
    compose_linear_combo,
    evaluate,
    invert,
    merged_breakpoints,
    pullback,
)
from src.core.quadrature import grid_gram, inner_product, l1_norm, l1_relative_error

__all__ = [
    "Grid",
    "GridFn",
    "Polyline",
    "Side",
    "compose_linear_combo",
    "evaluate",
    "grid_gram",
    "inner_product",
    "invert",
    "l1_norm",
    "l1_relative_error",
    "merged_breakpoints",
    "pullback",
]
