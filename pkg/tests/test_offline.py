from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.core.errors import AssumptionViolated, DegenerateBasis, RankDeficient, SchemaMismatch
from src.core.grid import Grid, GridFn
from src.core.polyline import Polyline, pullback
from src.core.quadrature import grid_gram, inner_product
from src.offline.bundle import OfflineBundle, load_bundle, save_bundle
from src.offline.eim import greedy_eim, select_q
from src.offline.local_basis import local_basis, project
from src.offline.modes import transport_modes
from src.offline.sampling import sample_parameters
from src.transport.dip import DipMap


def test_sample_parameters_is_reproducible() -> None:
    box = [(0.0, 1.0), (10.0, 20.0)]
    a = sample_parameters(box, 8, seed=3)
    b = sample_parameters(box, 8, seed=3)
    assert a == b
    assert a != sample_parameters(box, 8, seed=4)
    for mu in a:
        assert 0.0 <= mu[0] <= 1.0
        assert 10.0 <= mu[1] <= 20.0
    with pytest.raises(ValueError):
        sample_parameters(box, 0, seed=3)


def _monomials(grid: Grid, degree: int) -> np.ndarray:
    return np.column_stack([grid.nodes**k for k in range(degree + 1)])


def test_local_basis_is_orthonormal_and_nested() -> None:
    grid = Grid(0.0, 1.0, 101)
    basis = local_basis(grid, _monomials(grid, 4), 3)
    np.testing.assert_allclose(grid_gram(basis.values.T, grid.spacing), np.eye(3), atol=1e-10)
    assert np.all(np.diff(basis.singular_values) <= 0)
    smaller = local_basis(grid, _monomials(grid, 4), 2)
    np.testing.assert_allclose(smaller.values, basis.values[:2], atol=1e-9)


def test_projection_recovers_span_members() -> None:
    grid = Grid(0.0, 1.0, 101)
    basis = local_basis(grid, _monomials(grid, 2), 3)
    u = GridFn(grid, 1.0 - 2.0 * grid.nodes + 0.5 * grid.nodes**2)
    coef = project(basis, u)
    np.testing.assert_allclose(coef @ basis.values, u.values, atol=1e-9)


def test_local_basis_rank_checks() -> None:
    grid = Grid(0.0, 1.0, 21)
    twin = np.column_stack([grid.nodes, 2.0 * grid.nodes])
    with pytest.raises(RankDeficient):
        local_basis(grid, twin, 2)
    with pytest.raises(RankDeficient):
        local_basis(grid, twin, 3)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), n_snapshots=st.integers(3, 9))
def test_local_basis_projection_error_is_tail_energy(seed: int, n_snapshots: int) -> None:
    rng = np.random.default_rng(seed)
    grid = Grid(0.0, 1.0, 41)
    snapshots = rng.normal(size=(41, n_snapshots))
    size = int(rng.integers(1, n_snapshots))
    basis = local_basis(grid, snapshots, size)

    residuals = np.column_stack(
        [s - project(basis, GridFn(grid, s)) @ basis.values for s in snapshots.T]
    )
    energy = np.diag(grid_gram(residuals, grid.spacing))
    tail = float(np.sum(basis.singular_values[size:] ** 2))
    trace = float(np.sum(basis.singular_values**2))
    assert energy.sum() == pytest.approx(tail, rel=1e-8, abs=1e-10 * trace)
    assert np.all(np.sqrt(energy) <= np.sqrt(tail) * (1 + 1e-8) + 1e-10)


def _trapezoid(left: float) -> Polyline:
    return Polyline(
        [0.0, left, left + 0.1, left + 0.3, left + 0.4, 1.0],
        [0.0, 0.0, 1.0, 1.0, 0.0, 0.0],
        0.0,
        0.0,
    )


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), n_maps=st.integers(2, 6))
def test_transport_modes_of_rank_one_bump_family(seed: int, n_maps: int) -> None:
    rng = np.random.default_rng(seed)
    bump = _trapezoid(rng.uniform(0.1, 0.5))
    xs = bump.breakpoints
    # bump slopes are ±10, so amplitudes below 0.1 keep every map increasing
    amplitudes = rng.uniform(0.01, 0.09, size=n_maps)
    maps = [DipMap(Polyline.identity((0.0, 1.0)), 0, 0)] + [
        DipMap(Polyline(xs, xs + s * bump.ordinates, 1.0, 1.0), 0, i + 1)
        for i, s in enumerate(amplitudes)
    ]
    basis = transport_modes(maps, 2, (0.0, 1.0))

    identity, mode = basis.modes
    np.testing.assert_allclose(identity.ordinates, identity.breakpoints)
    assert np.all(basis.eigenvalues[1:] <= 1e-10 * basis.eigenvalues[0])
    norm = np.sqrt(inner_product(bump, bump, (0.0, 1.0)))
    x = np.linspace(-0.5, 1.5, 201)
    np.testing.assert_allclose(mode(x), bump(x) / norm, atol=1e-10)
    assert inner_product(mode, mode, (0.0, 1.0)) == pytest.approx(1.0)
    with pytest.raises(RankDeficient):
        transport_modes(maps, 3, (0.0, 1.0))


def test_greedy_eim_picks_residual_maxima() -> None:
    values = np.array(
        [
            [1.0, 0.0, 0.2],
            [3.0, 1.0, 0.0],
            [0.5, 2.0, 1.0],
            [0.0, 0.0, 4.0],
        ]
    )
    np.testing.assert_array_equal(greedy_eim(values), [1, 2, 3])


def test_greedy_eim_degenerate_inputs() -> None:
    with pytest.raises(DegenerateBasis):
        greedy_eim(np.zeros((4, 1)))
    with pytest.raises(DegenerateBasis):
        greedy_eim(np.ones((2, 3)))
    repeated = np.column_stack([np.arange(4.0), 2.0 * np.arange(4.0)])
    with pytest.raises(DegenerateBasis):
        greedy_eim(repeated)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_eim_points_of_transported_basis_are_transported_points(seed: int) -> None:
    rng = np.random.default_rng(seed)
    grid = Grid(0.0, 1.0, 64)
    zeta = [GridFn(grid, rng.normal(size=64)) for _ in range(4)]

    knots = np.sort(rng.uniform(0.1, 0.9, size=3))
    t = Polyline(
        np.concatenate(([0.0], knots, [1.0])),
        np.cumsum(np.concatenate(([0.0], rng.uniform(0.2, 2.0, size=4)))),
    )
    images = t(grid.nodes)
    # between consecutive images every transported residual is monotone
    extra = rng.uniform(images[0], images[-1], size=200)
    candidates = np.sort(np.concatenate((images, extra)))
    transported = np.column_stack([pullback(t, z, candidates) for z in zeta])

    picked = candidates[greedy_eim(transported)]
    expected = images[greedy_eim(np.column_stack([z.values for z in zeta]))]
    np.testing.assert_allclose(picked, expected, rtol=0, atol=1e-12)


def test_select_q_takes_steepest_points() -> None:
    zl = np.array([[1.0], [-5.0], [3.0], [0.5]])
    zr = np.array([[1.0], [-5.0], [2.0], [0.5]])
    np.testing.assert_array_equal(select_q(zl, zr, np.array([1.0]), 2), [1, 2])
    with pytest.raises(AssumptionViolated):
        select_q(zl[:2], zr[:2], np.array([1.0]), 2)


def test_bundle_tables(toy_bundle: OfflineBundle) -> None:
    t = toy_bundle.tables
    np.testing.assert_allclose(toy_bundle.eim_points, [0.3, 0.7])
    np.testing.assert_allclose(t.Z, [[1.0, 0.3], [1.0, 0.7]])
    np.testing.assert_allclose(t.zeta_dx_left, [[0.0, 1.0], [0.0, 1.0]], atol=1e-12)
    np.testing.assert_allclose(t.V_at_X, [[0.3, 0.7], [1.0, 1.0]])
    np.testing.assert_allclose(t.Vdx_right, [[1.0, 1.0], [0.0, 0.0]])
    np.testing.assert_allclose(t.monitor_slopes, [[1.0, 1.0, 1.0], [0.0, 0.0, 0.0]])
    assert toy_bundle.z_condition_number() > 1.0


def test_bundle_round_trip_and_byte_identical_saves(
    toy_bundle: OfflineBundle, tmp_path: Path
) -> None:
    first = tmp_path / "a.mats"
    second = tmp_path / "b.mats"
    save_bundle(toy_bundle, first)
    save_bundle(load_bundle(first), second)
    assert first.read_bytes() == second.read_bytes()

    loaded = load_bundle(first)
    assert loaded.meta == toy_bundle.meta
    assert loaded.grid == toy_bundle.grid
    np.testing.assert_array_equal(loaded.eim_indices, toy_bundle.eim_indices)
    np.testing.assert_array_equal(loaded.tables.Vq, toy_bundle.tables.Vq)
    np.testing.assert_array_equal(loaded.local.values, toy_bundle.local.values)


def test_load_bundle_rejects_foreign_files(tmp_path: Path) -> None:
    path = tmp_path / "not_a_bundle.mats"
    path.write_bytes(b"PK\x03\x04" + b"\0" * 32)
    with pytest.raises(SchemaMismatch):
        load_bundle(path)


def test_truncate_reuses_prefixes(toy_bundle: OfflineBundle) -> None:
    small = toy_bundle.truncate(2, 1)
    assert small.n_modes == 1
    assert small.n_basis == 2
    np.testing.assert_array_equal(small.eim_indices, toy_bundle.eim_indices)
    with pytest.raises(ValueError):
        toy_bundle.truncate(3, 1)
