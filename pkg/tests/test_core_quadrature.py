from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.core.grid import Grid, GridFn
from src.core.polyline import Polyline
from src.core.quadrature import (
    grid_gram,
    inner_product,
    l1_norm,
    l1_relative_error,
    mass_apply,
)


def test_inner_product_exact_on_merged_partition() -> None:
    ident = Polyline.identity((0.0, 1.0))
    assert inner_product(ident, ident, (0.0, 1.0)) == pytest.approx(1.0 / 3.0, abs=1e-15)
    hat = Polyline([0.0, 0.5, 1.0], [0.0, 1.0, 0.0])
    one = Polyline.constant(1.0, (0.0, 1.0))
    assert inner_product(hat, one, (0.0, 1.0)) == pytest.approx(0.5, abs=1e-15)


def test_inner_product_uses_extensions_outside_breakpoints() -> None:
    ident = Polyline.identity((0.0, 1.0))
    # ∫_{-1}^{2} x² dx = 3
    assert inner_product(ident, ident, (-1.0, 2.0)) == pytest.approx(3.0, abs=1e-14)


def test_l1_norm_with_sign_change() -> None:
    f = Polyline([0.0, 1.0], [-0.5, 0.5])
    assert l1_norm(f, (0.0, 1.0)) == pytest.approx(0.25, abs=1e-15)


def test_l1_relative_error_metric() -> None:
    grid = Grid(0.0, 1.0, 33)
    u = GridFn.from_function(grid, lambda x: np.sin(np.pi * x))
    assert l1_relative_error(u, u) == 0.0
    assert l1_relative_error(GridFn(grid, 2 * u.values), u) == pytest.approx(1.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_l1_relative_error_matches_polyline_norm(seed: int) -> None:
    rng = np.random.default_rng(seed)
    grid = Grid(-1.0, 2.0, 17)
    u = GridFn(grid, rng.normal(size=grid.n_nodes))
    v = GridFn(grid, rng.normal(size=grid.n_nodes))
    diff = Polyline(grid.nodes, v.values - u.values)
    expected = l1_norm(diff, grid.domain) / l1_norm(Polyline.from_gridfn(u), grid.domain)
    assert l1_relative_error(v, u) == pytest.approx(expected, rel=1e-12)
    assert l1_relative_error(v, u) >= 0.0


def test_grid_gram_is_exact_l2() -> None:
    grid = Grid(0.0, 1.0, 11)
    cols = np.column_stack((np.ones(grid.n_nodes), grid.nodes))
    gram = grid_gram(cols, grid.spacing)
    np.testing.assert_allclose(gram, [[1.0, 0.5], [0.5, 1.0 / 3.0]], atol=1e-14)


def test_mass_apply_matches_inner_product() -> None:
    rng = np.random.default_rng(4)
    grid = Grid(0.0, 2.0, 9)
    a = rng.normal(size=grid.n_nodes)
    b = rng.normal(size=grid.n_nodes)
    fa = Polyline(grid.nodes, a)
    fb = Polyline(grid.nodes, b)
    assert a @ mass_apply(b, grid.spacing) == pytest.approx(
        inner_product(fa, fb, grid.domain), rel=1e-12
    )
