import math

import numpy as np
import pytest

from conelab.exceptions import InvalidInputError, InvalidParameterError
from conelab.services.sets import (
    SET_FAMILIES,
    DiskSet,
    FlatSet,
    HalfSpaceCapSet,
    MinusSlantedSet,
    SlabSet,
    SquareSet,
    TripleBallSet,
    linear_maximize,
    make_set,
    set_contains,
    set_project,
)
from conelab.services.cones import SlantedCone
from conelab.services.solvers import SolverConfig, grid_argmin, projected_gradient_max


def _family(name, N=6):
    return make_set(name, None if name in ("disk2d", "square2d") else N)


def test_flat_membership():
    K = FlatSet(3)
    assert set_contains(K, [-0.25, 0.5, 0.5])
    assert not set_contains(K, [-0.25, 0.6, 0.0])
    assert not set_contains(K, [-0.9, 0.9, 0.0])


def test_flat_projection_matches_grid_oracle():
    K = FlatSet(3)
    z = np.array([0.1, 0.3, 0.0])
    y, dist = set_project(K, z)
    assert K.contains(y, 1e-12)

    def objective(mesh):
        points = np.column_stack([mesh, np.zeros(len(mesh))])
        values = np.linalg.norm(points - z, axis=1)
        return np.where(K.batch_contains(points, 0.0), values, np.inf)

    _, grid_value = grid_argmin(objective, [-0.3, -0.1], [0.1, 0.5], step=0.01, levels=3)
    assert dist <= grid_value + 1e-9
    assert dist >= grid_value - 1e-3
    assert dist == pytest.approx(0.1682, abs=1e-3)


def test_flat_linear_max_agrees_with_projected_gradient():
    K = FlatSet(3)
    f = np.array([1.0, 1.0, 0.5])
    x, value = linear_maximize(K, f)
    assert K.contains(x, 1e-9)
    _, pg_value = projected_gradient_max(f, K.project_coords, np.zeros(3), SolverConfig(tol=1e-11))
    assert value == pytest.approx(pg_value, abs=1e-6)


@pytest.mark.parametrize("seed", [1, 2, 3])
@pytest.mark.parametrize("name", SET_FAMILIES)
def test_linear_max_dominates_samples(name, seed):
    K = _family(name)
    rng = np.random.default_rng(10 + seed)
    samples = K.sample(10000, seed=seed)
    for f in rng.standard_normal((5, K.dim)):
        x, value = K.linear_maximize(f)
        assert K.contains(x, 1e-8)
        assert np.max(samples @ f) <= value + 1e-8


def test_slab_linear_max_on_last_axis():
    x, value = linear_maximize(SlabSet(4), [0.0, 0.0, 0.0, 1.0])
    assert value == pytest.approx(1.6)
    assert np.allclose(x.coords, [-0.4, 0.0, 0.0, 1.6])


def test_minus_slanted_linear_max():
    K = MinusSlantedSet(4)
    x, value = K.linear_maximize([1.0, 0.0, 0.0, 0.0])
    assert value == 0.0 and not np.any(x.coords)
    x, value = K.linear_maximize([-1.0, 0.0, 0.0, 0.0])
    assert value == pytest.approx(1.0)


def test_triple_ball_linear_max_on_first_axis():
    x, value = TripleBallSet(8).linear_maximize(np.eye(8)[0])
    assert value == pytest.approx(2.0 / 3.0, abs=1e-8)


def test_calibration_sets():
    x, value = DiskSet().linear_maximize([1.0, 1.0])
    assert np.allclose(x.coords, [1.0 / math.sqrt(2.0)] * 2)
    assert SquareSet().linear_maximize([1.0, 1.0])[1] == 0.0
    assert SquareSet().radius_bound() == pytest.approx(math.sqrt(2.0))

    cap = HalfSpaceCapSet()
    assert cap.linear_maximize([1.0, 1.0])[1] == pytest.approx(0.0)
    x, value = cap.linear_maximize([1.0, 0.0])
    assert value == pytest.approx(1.0 / math.sqrt(2.0))
    assert np.allclose(x.coords, [1.0 / math.sqrt(2.0), -1.0 / math.sqrt(2.0)])


@pytest.mark.parametrize("K", [DiskSet(), FlatSet(4), MinusSlantedSet(4), HalfSpaceCapSet(3)])
def test_projection_variational_inequality(K):
    rng = np.random.default_rng(2)
    members = K.sample(200, seed=9)
    for z in 2.0 * rng.standard_normal((20, K.dim)):
        y = K.project_coords(z)
        assert K.contains(y, 1e-8)
        assert np.max((members - y) @ (z - y)) <= 1e-6


@pytest.mark.parametrize("K", [SlabSet(5), TripleBallSet(5)])
def test_projection_is_nearest_among_samples(K):
    rng = np.random.default_rng(3)
    members = K.sample(500, seed=4)
    for z in 2.0 * rng.standard_normal((10, K.dim)):
        y = K.project_coords(z)
        assert K.contains(y, 1e-8)
        assert np.linalg.norm(z - y) <= np.min(np.linalg.norm(members - z, axis=1)) + 1e-6


@pytest.mark.parametrize("name", SET_FAMILIES)
def test_samplers_are_deterministic_members(name):
    K = make_set(name, None if name in ("disk2d", "square2d") else 6)
    a, b = K.sample(100, seed=3), K.sample(100, seed=3)
    assert np.array_equal(a, b)
    assert K.batch_contains(a, 1e-9).all()


def test_normals():
    assert np.allclose(DiskSet().normal_at([1.0, 0.0]), [1.0, 0.0])
    assert np.allclose(FlatSet(4).normal_at(np.zeros(4)), np.eye(4)[0])
    assert np.allclose(SquareSet().normal_at([0.0, 0.0]), [1.0 / math.sqrt(2.0)] * 2)
    assert not np.any(DiskSet().normal_at([0.1, 0.2]))


def test_make_set_errors():
    with pytest.raises(InvalidParameterError):
        make_set("kcube", 4)
    with pytest.raises(InvalidParameterError):
        make_set("kflat")
    with pytest.raises(InvalidParameterError):
        make_set("disk2d", 3)
    with pytest.raises(InvalidInputError):
        FlatSet(3).linear_maximize(np.zeros(3))


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_minus_slanted_meets_slanted_cone_only_at_origin(seed):
    K, S = MinusSlantedSet(8), SlantedCone(8)
    assert K.contains(np.zeros(8)) and S.contains(np.zeros(8))
    for z in K.sample(10000, seed=seed):
        if S.contains(z, 0.0):
            assert not np.any(z)


@pytest.mark.parametrize("seed", [1, 2, 3])
@pytest.mark.parametrize("name", SET_FAMILIES)
def test_midpoints_of_members_are_members(name, seed):
    K = _family(name)
    points = K.sample(400, seed=seed)
    midpoints = 0.5 * (points[:200] + points[200:])
    assert K.batch_contains(midpoints, 1e-9).all()


@pytest.mark.parametrize("seed", [1, 2, 3])
@pytest.mark.parametrize("name", SET_FAMILIES)
def test_projection_fixes_members(name, seed):
    K = _family(name)
    for z in K.sample(40, seed=seed):
        y, dist = set_project(K, z)
        assert dist <= 1e-6
        assert np.allclose(y.coords, z, atol=1e-6)
        again, _ = set_project(K, y)
        assert np.allclose(again.coords, y.coords, atol=1e-6)
