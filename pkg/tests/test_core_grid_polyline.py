from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.core.errors import DimensionMismatch, NotMonotone
from src.core.grid import Grid, GridFn, Side
from src.core.polyline import Polyline, compose_linear_combo, evaluate, invert, pullback


def _increasing_map(seed: int, domain: tuple[float, float] = (0.0, 1.0)) -> Polyline:
    rng = np.random.default_rng(seed)
    a, b = domain
    xs = np.sort(np.concatenate(([a, b], rng.uniform(a, b, size=6))))
    ys = a + np.cumsum(np.concatenate(([0.0], rng.uniform(0.2, 2.0, size=xs.size - 1))))
    return Polyline(xs, ys, rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0))


def test_grid_nodes_and_cells() -> None:
    g = Grid(0.0, 2.0, 5)
    assert g.spacing == 0.5
    np.testing.assert_allclose(g.nodes, [0.0, 0.5, 1.0, 1.5, 2.0])
    np.testing.assert_allclose(g.cell_centers, [0.25, 0.75, 1.25, 1.75])
    assert g.nearest_node(1.2) == 2
    assert g.nearest_node(-3.0) == 0


def test_grid_rejects_empty_domain() -> None:
    with pytest.raises(ValueError):
        Grid(1.0, 1.0, 10)


def test_gridfn_constant_extension_and_derivative() -> None:
    f = GridFn(Grid(0.0, 1.0, 3), np.array([0.0, 1.0, 3.0]))
    assert f(0.25) == pytest.approx(0.5)
    assert f(-5.0) == 0.0
    assert f(7.0) == 3.0
    np.testing.assert_allclose(f.derivative(np.array([0.5]), "left"), [2.0])
    np.testing.assert_allclose(f.derivative(np.array([0.5]), "right"), [4.0])
    np.testing.assert_allclose(f.derivative(np.array([-1.0, 2.0]), "right"), [0.0, 0.0])


def test_gridfn_shape_mismatch() -> None:
    with pytest.raises(DimensionMismatch):
        GridFn(Grid(0.0, 1.0, 4), np.zeros(3))


def test_polyline_linear_extension() -> None:
    p = Polyline([0.0, 1.0], [1.0, 3.0], left_slope=0.5, right_slope=4.0)
    assert p(-2.0) == pytest.approx(0.0)
    assert p(2.0) == pytest.approx(7.0)
    assert evaluate(p, 0.5) == pytest.approx(2.0)
    np.testing.assert_allclose(p.derivative(np.array([0.0, 1.0]), "left"), [0.5, 2.0])
    np.testing.assert_allclose(p.derivative(np.array([0.0, 1.0]), "right"), [2.0, 4.0])


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_invert_round_trip(seed: int) -> None:
    t = _increasing_map(seed)
    x = np.linspace(-1.0, 2.0, 41)
    np.testing.assert_allclose(invert(t, t(x)), x, atol=1e-12)


def test_invert_rejects_non_monotone() -> None:
    t = Polyline([0.0, 1.0, 2.0], [0.0, 1.0, 0.5])
    with pytest.raises(NotMonotone):
        t.invert(0.7)


def test_generalized_inverse_resolves_flats_to_midpoint() -> None:
    p = Polyline([0.0, 1.0, 3.0, 4.0], [0.0, 0.5, 0.5, 1.0], 0.0, 0.0)
    assert p.generalized_inverse(0.5) == pytest.approx(2.0)
    assert p.generalized_inverse(0.25) == pytest.approx(0.5)


def test_restrict_keeps_values() -> None:
    t = _increasing_map(3)
    r = t.restrict(0.2, 0.7)
    x = np.linspace(0.2, 0.7, 11)
    np.testing.assert_allclose(r(x), t(x), atol=1e-14)
    assert r.breakpoints[0] == 0.2
    assert r.breakpoints[-1] == 0.7


def test_compose_linear_combo_matches_pointwise_sum() -> None:
    modes = [Polyline.identity((0.0, 1.0)), _increasing_map(1), _increasing_map(2)]
    alpha = np.array([1.0, 0.3, -0.2])
    combo = compose_linear_combo(modes, alpha)
    x = np.linspace(-0.5, 1.5, 37)
    expected = sum(a * m(x) for a, m in zip(alpha, modes, strict=True))
    np.testing.assert_allclose(combo(x), expected, atol=1e-12)


def test_compose_linear_combo_dimension_mismatch() -> None:
    with pytest.raises(DimensionMismatch):
        compose_linear_combo([Polyline.identity((0.0, 1.0))], [1.0, 2.0])


def test_pullback_of_shift() -> None:
    grid = Grid(0.0, 1.0, 11)
    xi = GridFn.from_function(grid, lambda x: x**2)
    shift = Polyline([0.0, 1.0], [0.1, 1.1])
    x = np.array([0.3, 0.6])
    np.testing.assert_allclose(pullback(shift, xi, x), xi(x - 0.1), atol=1e-14)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_pullback_chain_rule(seed: int) -> None:
    rng = np.random.default_rng(seed)
    grid = Grid(0.0, 1.0, 21)
    zeta = GridFn(grid, rng.normal(size=grid.n_nodes))
    t = _increasing_map(seed)
    xs = np.union1d(grid.nodes, t.breakpoints[(t.breakpoints > 0) & (t.breakpoints < 1)])
    pushed = Polyline(t(xs), zeta(xs), 0.0, 0.0)
    x = grid.nodes[1:-1]
    scale = float(np.max(np.abs(zeta.slopes)))
    sides: tuple[Side, Side] = ("left", "right")
    for side in sides:
        lhs = pushed.derivative(t(x), side) * t.derivative(x, side)
        np.testing.assert_allclose(lhs, zeta.derivative(x, side), rtol=1e-11, atol=1e-12 * scale)
