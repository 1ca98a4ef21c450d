import dataclasses
import math

import numpy as np
import pytest

from conelab.exceptions import InvalidParameterError, SeparationError
from conelab.services.analysis import modulus_profile, modulus_sweep, stmax_delta_certificate, strict_max_modulus
from conelab.services.analysis import is_maximal
from conelab.services.analysis.strict import modulus_bound
from conelab.services.cones import OrthantCone, base_of
from conelab.services.sets import DiskSet, FlatSet, SquareSet
from conelab.services.solvers import SolverConfig, grid_argmin


def _saturated_step(N, epsilon):
    m = N - 1
    return 0.5 * (-m + math.sqrt(m * m + 4.0 * epsilon * epsilon))


def test_flat_modulus_at_origin(cfg):
    K = FlatSet(4)
    report = strict_max_modulus(K, K.default_cone(), np.zeros(4), 0.7, cfg)
    assert not report.dominated
    assert report.strictly_maximal
    assert 0.0 < report.delta_hat <= _saturated_step(4, 0.7) + 1e-9
    assert report.delta_hat <= modulus_bound("kflat", 4)
    assert K.contains(report.witness, 1e-9)
    assert np.linalg.norm(report.witness.coords) >= 0.7 - 1e-9


def test_flat_sweep_decreases_with_N(cfg):
    rows = modulus_sweep("kflat", [4, 8, 16, 32, 64], 0.7, cfg, search=False)
    assert [row.n for row in rows] == [4, 8, 16, 32, 64]
    assert all(row.passed for row in rows)
    assert all(row.family == "sweep-kflat" for row in rows)
    for row in rows:
        assert row.values['delta_hat'] == pytest.approx(_saturated_step(row.n, 0.7), abs=1e-9)


def test_minus_slanted_sweep_stays_below_one_over_N(cfg):
    rows = modulus_sweep("kminusp", [8, 16, 32, 64], 0.7, cfg, search=False)
    assert all(row.passed for row in rows)
    for row in rows:
        ramp_norm = math.sqrt(row.n * (row.n + 1) * (2 * row.n + 1) / 6.0)
        assert row.values['delta_hat'] <= 2.0 * 0.7 / ramp_norm + 1e-9


def test_sweep_rejects_unknown_family(cfg):
    with pytest.raises(InvalidParameterError):
        modulus_sweep("ktriple", [4], 0.5, cfg)
    with pytest.raises(InvalidParameterError):
        modulus_bound("disk2d", 2)


def test_profile_is_monotone_in_epsilon(cfg):
    K = DiskSet()
    x = np.array([1.0, 1.0]) / math.sqrt(2.0)
    epsilons = [0.5, 0.2, 1.0]
    reports = modulus_profile(K, OrthantCone(2), x, epsilons, cfg)
    assert [r.epsilon for r in reports] == epsilons
    by_epsilon = sorted(reports, key=lambda r: r.epsilon)
    deltas = [r.delta_hat for r in by_epsilon]
    assert deltas == sorted(deltas)
    assert deltas[0] > 0


def test_dominated_point_has_zero_modulus(cfg):
    report = strict_max_modulus(DiskSet(), OrthantCone(2), [-1.0, 0.0], 0.3, cfg)
    assert report.dominated
    assert report.delta_hat == 0.0
    assert not report.strictly_maximal


def test_modulus_needs_positive_epsilon(cfg):
    with pytest.raises(InvalidParameterError):
        strict_max_modulus(DiskSet(), OrthantCone(2), [1.0, 0.0], 0.0, cfg)


def test_square_certificate_closed_form(cfg):
    P = OrthantCone(2)
    cert = stmax_delta_certificate(SquareSet(), P, base_of(P, [1.0, 1.0]), [0.0, 0.0], 0.6,
                                   dataclasses.replace(cfg, samples=10000))
    expected = (0.6 / 3.0) / math.sqrt(2.0)
    assert cert.delta == pytest.approx(expected, abs=1e-12)
    assert cert.alpha == pytest.approx(expected, abs=1e-12)
    assert np.allclose(cert.functional.coords, [1.0 / math.sqrt(2.0)] * 2)
    assert cert.sup_value <= 0.0
    assert cert.samples == 10000
    assert cert.violations == 0


def test_flat_certificate_is_positive(cfg):
    K = FlatSet(4)
    P = K.default_cone()
    cert = stmax_delta_certificate(K, P, base_of(P, np.ones(4)), np.zeros(4), 0.6, cfg)
    assert cert.delta > 0
    assert cert.delta <= 0.2
    assert cert.violations == 0


def test_certificate_fails_at_dominated_corner(cfg):
    P = OrthantCone(2)
    with pytest.raises(SeparationError):
        stmax_delta_certificate(SquareSet(), P, base_of(P, [1.0, 1.0]), [-1.0, -1.0], 0.6, cfg)


def _disk_modulus_by_grid(x, epsilon):
    def objective(points):
        gaps = points - x
        feasible = (np.linalg.norm(points, axis=1) <= 1.0) & (np.linalg.norm(gaps, axis=1) >= epsilon)
        values = np.linalg.norm(np.minimum(gaps, 0.0), axis=1)
        return np.where(feasible, values, np.inf)

    return grid_argmin(objective, [-1.0, -1.0], [1.0, 1.0], step=5e-3, levels=3)[1]


@pytest.mark.parametrize("epsilon", [0.2, 0.5])
def test_disk_modulus_matches_grid(cfg, epsilon):
    x = np.array([1.0, 1.0]) / math.sqrt(2.0)
    report = strict_max_modulus(DiskSet(), OrthantCone(2), x, epsilon, cfg)
    expected = _disk_modulus_by_grid(x, epsilon)
    assert report.delta_hat == pytest.approx(expected, abs=1e-3)
    assert np.linalg.norm(report.witness.coords) <= 1.0 + 1e-9
    assert np.linalg.norm(report.witness.coords - x) >= epsilon - 1e-9


def test_disk_modulus_at_half():
    x = np.array([1.0, 1.0]) / math.sqrt(2.0)
    report = strict_max_modulus(DiskSet(), OrthantCone(2), x, 0.5, SolverConfig())
    assert report.delta_hat > 0.1
    assert report.delta_hat == pytest.approx(0.4307, abs=2e-3)
    assert report.strictly_maximal


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_modulus_grows_with_epsilon(cfg, seed):
    cfg = dataclasses.replace(cfg, seed=seed)
    x = np.array([1.0, 1.0]) / math.sqrt(2.0)
    deltas = [strict_max_modulus(DiskSet(), OrthantCone(2), x, eps, cfg).delta_hat for eps in (0.2, 0.5, 1.0)]
    assert all(a <= b + 1e-6 for a, b in zip(deltas, deltas[1:]))


@pytest.mark.parametrize("seed", [1, 2, 3])
@pytest.mark.parametrize("K,x", [
    (DiskSet(), [1.0 / math.sqrt(2.0)] * 2),
    (DiskSet(), [-1.0, 0.0]),
    (SquareSet(), [0.0, 0.0]),
    (SquareSet(), [-1.0, -1.0]),
    (FlatSet(4), [0.0] * 4),
    (FlatSet(4), [-0.5, 0.3, 0.0, 0.0]),
])
def test_strictly_maximal_points_are_maximal(cfg, seed, K, x):
    cfg = dataclasses.replace(cfg, seed=seed)
    P = K.default_cone()
    report = strict_max_modulus(K, P, x, 0.3, cfg)
    verdict = is_maximal(K, P, x, cfg).verdict
    if report.strictly_maximal:
        assert verdict == "maximal"
    if verdict == "dominated":
        assert not report.strictly_maximal
        assert report.delta_hat == 0.0


def test_flat_sweep_with_search_recovers_saturated_step(cfg):
    rows = modulus_sweep("kflat", [4, 8, 16, 32, 64], 0.7, cfg)
    assert all(row.passed for row in rows)
    deltas = [row.values['delta_hat'] for row in rows]
    assert all(a > b for a, b in zip(deltas, deltas[1:]))
    for row in rows:
        assert row.values['delta_hat'] <= row.values['bound']
        assert row.values['delta_hat'] == pytest.approx(_saturated_step(row.n, 0.7), abs=1e-6)


def test_minus_slanted_sweep_with_search(cfg):
    rows = modulus_sweep("kminusp", [8, 16, 32, 64], 0.7, cfg)
    assert all(row.passed for row in rows)
    deltas = [row.values['delta_hat'] for row in rows]
    assert all(a > b for a, b in zip(deltas, deltas[1:]))
    for row in rows:
        ramp_norm = math.sqrt(row.n * (row.n + 1) * (2 * row.n + 1) / 6.0)
        # any z in -S with |z| >= eps sits at least eps / |ramp| below the half space x_1 >= 0
        assert 0.7 / ramp_norm - 1e-6 <= row.values['delta_hat'] <= 2.0 * 0.7 / ramp_norm + 1e-9
