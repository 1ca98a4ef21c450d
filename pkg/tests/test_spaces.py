import math

import numpy as np
import pytest

from conelab.exceptions import DimensionMismatchError, InvalidInputError
from conelab.models import NormKind, Vector
from conelab.services.analysis.families import flat_witness
from conelab.services.spaces import alpha_N, apply_T, dual_norm, inner, norm, weak_null_gap


def test_triple_norm_of_basis_vector():
    assert norm(Vector.basis(1, 4), NormKind.TRIPLE) == pytest.approx(1.5)


def test_triple_norm_of_sphere_point():
    x = Vector.from_values([2.0 / 3.0], 4)
    assert abs(norm(x, NormKind.TRIPLE) - 1.0) <= 1e-12


@pytest.mark.parametrize("kind", list(NormKind))
def test_norm_of_zero(kind):
    assert norm(Vector.zeros(5), kind) == 0.0


def test_norm_defaults_to_ambient():
    x = Vector([1.0, -2.0], NormKind.L1)
    assert norm(x) == 3.0


def test_apply_T_weights():
    t = apply_T([1.0, 1.0, 1.0, 1.0])
    assert t.ambient == NormKind.L2
    assert list(t.coords) == [0.5, 0.25, 0.125, 0.0625]
    assert norm(t) == pytest.approx(math.sqrt(0.33203125))
    assert norm(t) <= 1.0 / math.sqrt(3.0)


def test_inner_with_harmonic_functional():
    N = 10
    f = 1.0 / np.arange(1, N + 1)
    for n in range(2, N + 1):
        x = np.zeros(N)
        x[0], x[n - 1] = -1.0 / n, 1.0
        assert inner(f, x) == pytest.approx(0.0, abs=1e-15)


def test_inner_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        inner([1.0, 0.0], [1.0, 0.0, 0.0])


def test_dual_norms():
    f = [3.0, -4.0]
    assert dual_norm(f, NormKind.L2) == 5.0
    assert dual_norm(f, NormKind.L1) == 4.0
    assert dual_norm(f, NormKind.SUP) == 7.0


def test_norm_equivalence_and_T_bound():
    rng = np.random.default_rng(3)
    for N in (1, 4, 32):
        for x in rng.standard_normal((50, N)):
            sup = norm(x, NormKind.SUP)
            triple = norm(x, NormKind.TRIPLE)
            assert sup <= triple <= alpha_N(N) * sup + 1e-12
            assert norm(apply_T(x)) <= sup / math.sqrt(3.0) + 1e-12


def test_apply_T_is_linear():
    rng = np.random.default_rng(4)
    x, y = rng.standard_normal((2, 16))
    combined = apply_T(2.0 * x - 3.0 * y).coords
    assert np.allclose(combined, 2.0 * apply_T(x).coords - 3.0 * apply_T(y).coords, atol=1e-14)


@pytest.mark.parametrize("kind", list(NormKind))
def test_triangle_inequality_and_homogeneity(kind):
    rng = np.random.default_rng(5)
    for x, y in rng.standard_normal((30, 2, 8)):
        assert norm(x + y, kind) <= norm(x, kind) + norm(y, kind) + 1e-12
        assert norm(-2.5 * x, kind) == pytest.approx(2.5 * norm(x, kind))


def test_vector_helpers():
    v = Vector.from_values([1.0, 2.0], 4)
    assert v.N == 4 and v[2] == 2.0 and v[4] == 0.0
    assert (v + Vector.basis(4, 4))[4] == 1.0
    assert (-v)[1] == -1.0
    assert (2 * v).to_dict()['coords'] == [2.0, 4.0, 0.0, 0.0]
    with pytest.raises(DimensionMismatchError):
        v + Vector.zeros(3)
    with pytest.raises(InvalidInputError):
        v + Vector.zeros(4, NormKind.L1)
    with pytest.raises(InvalidInputError):
        Vector([1.0, float("nan")])
    with pytest.raises(InvalidInputError):
        Vector([])


def test_weak_null_gap_on_flat_witnesses():
    family = [flat_witness(n, 101) for n in range(1, 101)]
    rows = weak_null_gap(family, 3)
    last = rows[-1]
    assert last.n == 100
    assert last.values['probe_max'] == pytest.approx(1.0 / math.sqrt(200.0))
    assert last.values['norm'] >= 1.0 / math.sqrt(2.0)
    assert last.flags['pc_failure_witness']


def test_weak_null_gap_without_decay():
    constant = weak_null_gap([Vector.basis(1, 5)] * 10, 3)
    assert all(row.values['probe_max'] == 1.0 for row in constant)
    assert not any(row.flags['pc_failure_witness'] for row in constant)

    shrinking = weak_null_gap([np.eye(5)[0] / n for n in range(1, 11)], 3)
    assert not any(row.flags['pc_failure_witness'] for row in shrinking)


def test_weak_null_gap_rejects_mixed_dimensions():
    with pytest.raises(DimensionMismatchError):
        weak_null_gap([np.zeros(3), np.zeros(4)], 2)
