import math
from unittest.mock import Mock

import numpy as np
import pytest

from conelab.exceptions import InvalidInputError, InvalidParameterError, SolverFailureError
from conelab.services.sets import DiskSet, FlatSet, HalfSpaceCapSet, MinusSlantedSet, SquareSet
from conelab.services.solvers import (
    SolverConfig,
    bisect_monotone,
    dykstra_project,
    grid_argmin,
    project_l1_ball,
    project_simplex,
    projected_gradient_max,
    ray_length,
    separate_point,
)


def _box(z):
    return np.clip(z, 0.0, 1.0)


def _halfplane(z):
    excess = z.sum() - 1.0
    return z - max(excess, 0.0) / z.size * np.ones_like(z)


def _unit_disk(z):
    length = np.linalg.norm(z)
    return z if length <= 1.0 else z / length


def test_bisect_finds_sqrt_two():
    root = bisect_monotone(lambda t: t * t - 2.0, 0.0, 2.0, SolverConfig(tol=1e-12))
    assert root == pytest.approx(math.sqrt(2.0), abs=1e-11)


def test_bisect_rejects_bad_bracket():
    with pytest.raises(InvalidInputError):
        bisect_monotone(lambda t: t - 5.0, 0.0, 2.0)
    with pytest.raises(InvalidInputError):
        bisect_monotone(lambda t: t, 1.0, 0.0)


def test_ray_length_in_disk():
    contains = lambda p: np.linalg.norm(p) <= 1.0
    t = ray_length(contains, np.array([0.5, 0.0]), np.array([1.0, 0.0]), 10.0)
    assert t == pytest.approx(0.5, abs=1e-8)
    assert ray_length(contains, np.zeros(2), np.array([0.0, 1.0]), 0.5) == 0.5


def test_simplex_and_l1_projections():
    assert np.allclose(project_simplex(np.array([1.0, 1.0])), [0.5, 0.5])
    assert np.allclose(project_simplex(np.array([2.0, 0.0, -1.0])), [1.0, 0.0, 0.0])
    assert np.allclose(project_l1_ball(np.array([0.2, -0.3])), [0.2, -0.3])
    p = project_l1_ball(np.array([3.0, -1.0]))
    assert np.allclose(p, [1.0, 0.0])


def test_dykstra_intersection():
    x = dykstra_project(np.array([2.0, 2.0]), [_box, _halfplane], SolverConfig(tol=1e-12))
    assert np.allclose(x, [0.5, 0.5], atol=1e-9)


def test_dykstra_failure_keeps_best_iterate():
    with pytest.raises(SolverFailureError) as excinfo:
        dykstra_project(np.array([2.0, 2.0]), [_box, _halfplane], max_iter=1)
    assert excinfo.value.best_iterate is not None
    assert excinfo.value.iterations == 1


def test_projected_gradient_on_disk():
    x, value = projected_gradient_max([3.0, 4.0], _unit_disk, [0.0, 0.0])
    assert value == pytest.approx(5.0, abs=1e-8)
    assert np.allclose(x, [0.6, 0.8], atol=1e-8)
    with pytest.raises(InvalidInputError):
        projected_gradient_max([0.0, 0.0], _unit_disk, [0.0, 0.0])


def test_separate_point():
    f = separate_point(DiskSet(), [2.0, 0.0])
    assert np.allclose(f.coords, [1.0, 0.0])
    assert np.allclose(separate_point(_unit_disk, [0.0, -3.0]).coords, [0.0, -1.0])
    with pytest.raises(InvalidInputError):
        separate_point(DiskSet(), [0.1, 0.1])


def test_grid_argmin_refines():
    objective = lambda mesh: np.sum((mesh - [0.123, -0.456]) ** 2, axis=1)
    point, value = grid_argmin(objective, [-1.0, -1.0], [1.0, 1.0], step=0.01, levels=2)
    assert np.allclose(point, [0.123, -0.456], atol=1e-3)
    assert value < 1e-6
    with pytest.raises(InvalidInputError):
        grid_argmin(objective, [0.0] * 4, [1.0] * 4)


def test_solver_config_validation():
    with pytest.raises(InvalidParameterError):
        SolverConfig(tol=0.0)
    with pytest.raises(InvalidParameterError):
        SolverConfig(max_iter=0)
    with pytest.raises(InvalidParameterError):
        SolverConfig(multistarts=0)


def test_solver_config_rng_is_seeded():
    a = SolverConfig(seed=4).rng(1).random(3)
    b = SolverConfig(seed=4).rng(1).random(3)
    c = SolverConfig(seed=4).rng(2).random(3)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_from_env_reads_seed(monkeypatch):
    monkeypatch.setenv("CONELAB_SEED", "17")
    assert SolverConfig.from_env().seed == 17
    assert SolverConfig.from_env(tol=1e-6).tol == 1e-6


def test_bisect_stays_within_halving_budget():
    g = Mock(side_effect=lambda t: t - 1.3)
    bisect_monotone(g, 0.0, 2.0, SolverConfig(tol=1e-9))
    # two bracket checks plus one call per halving
    assert g.call_count <= math.ceil(math.log2(2.0 / 1e-9)) + 2

    capped = Mock(side_effect=lambda t: t - 1.3)
    bisect_monotone(capped, 0.0, 2.0, SolverConfig(tol=1e-9, max_iter=5))
    assert capped.call_count == 7


@pytest.mark.parametrize("K,f", [
    (DiskSet(), [3.0, 4.0]),
    (SquareSet(), [1.0, -2.0]),
    (HalfSpaceCapSet(3), [1.0, -0.5, 0.2]),
])
def test_projected_gradient_never_decreases_objective(K, f):
    iterates = []

    def recording(z):
        y = K.project_coords(z)
        iterates.append(y)
        return y

    projected_gradient_max(f, recording, np.zeros(K.dim), SolverConfig(tol=1e-10), step=0.1)
    values = [float(np.dot(f, y)) for y in iterates]
    assert len(values) > 2
    assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("seed", [1, 2, 3])
@pytest.mark.parametrize("K,z", [
    (MinusSlantedSet(8), np.eye(8)[0]),
    (DiskSet(), np.array([1.5, -0.5])),
    (FlatSet(4), np.array([0.5, 0.5, 0.0, 0.0])),
])
def test_separating_functional_holds_on_samples(seed, K, z):
    f = separate_point(K, z).coords
    samples = K.sample(10000, seed=seed)
    projected = K.project_coords(z)
    assert np.max(samples @ f) <= float(f @ projected) + 1e-9
    assert float(f @ projected) < float(f @ z)
