"""Norms, the weighting operator T and coordinate pairings on truncations.

Every function accepts a :class:`Vector` or a plain coordinate array. The
TRIPLE norm is ``||x||_inf + ||T x||_2`` with ``(T x)_n = x_n / 2^n``.
"""
import logging
import math
from typing import List, Sequence, Union

import numpy as np

from conelab.exceptions import DimensionMismatchError, InvalidInputError, InvalidParameterError
from conelab.models import GalleryRow, NormKind, Vector, coords_of

logger = logging.getLogger(__name__)

ArrayLike = Union[Vector, Sequence[float], np.ndarray]

PC_PROBE_THRESHOLD = 0.1
PC_NORM_FLOOR = 0.5


def t_weights(N: int) -> np.ndarray:
    """2^{-n} for n = 1..N (underflows to 0 for huge n, which is harmless)"""
    return np.ldexp(1.0, -np.arange(1, N + 1))


def apply_T(x: ArrayLike) -> Vector:
    c = coords_of(x)
    return Vector(c * t_weights(c.size), NormKind.L2)


def _norm_coords(c: np.ndarray, kind: NormKind) -> float:
    if kind == NormKind.L2:
        return float(np.linalg.norm(c))
    if kind == NormKind.L1:
        return float(np.abs(c).sum())
    if kind == NormKind.SUP:
        return float(np.abs(c).max())
    return float(np.abs(c).max() + np.linalg.norm(c * t_weights(c.size)))


def norm(x: ArrayLike, kind: Union[NormKind, str, None] = None) -> float:
    if kind is None:
        kind = x.ambient if isinstance(x, Vector) else NormKind.L2
    kind = NormKind.parse(kind)
    c = coords_of(x)
    if c.size == 0:
        raise InvalidInputError("norm of a vector of dimension 0")
    return _norm_coords(c, kind)


def batch_norm(points: np.ndarray, kind: Union[NormKind, str]) -> np.ndarray:
    """Row-wise norms of a (count, N) array"""
    kind = NormKind.parse(kind)
    points = np.atleast_2d(points)
    if kind == NormKind.L2:
        return np.linalg.norm(points, axis=1)
    if kind == NormKind.L1:
        return np.abs(points).sum(axis=1)
    sup = np.abs(points).max(axis=1)
    if kind == NormKind.SUP:
        return sup
    return sup + np.linalg.norm(points * t_weights(points.shape[1]), axis=1)


def dual_norm(f: ArrayLike, kind: Union[NormKind, str, None] = None) -> float:
    """Dual norm of a functional given by its coordinates.

    The dual of TRIPLE is bounded by the l1-norm (|||x||| >= ||x||_inf), which
    is what margins use; it never overstates positivity.
    """
    if kind is None:
        kind = f.ambient if isinstance(f, Vector) else NormKind.L2
    kind = NormKind.parse(kind)
    c = coords_of(f)
    if kind == NormKind.L2:
        return float(np.linalg.norm(c))
    if kind == NormKind.L1:
        return float(np.abs(c).max())
    return float(np.abs(c).sum())


def inner(x: ArrayLike, y: ArrayLike) -> float:
    a, b = coords_of(x), coords_of(y)
    if a.size != b.size:
        raise DimensionMismatchError(a.size, b.size)
    return float(np.dot(a, b))


def alpha_N(N: int) -> float:
    """Equivalence constant of TRIPLE against the sup-norm at truncation N"""
    if N < 1:
        raise InvalidInputError("alpha_N needs N >= 1")
    return 1.0 + math.sqrt((1.0 - 4.0 ** (-N)) / 3.0)


def weak_null_gap(family: List[ArrayLike], probe_count: int,
                  threshold: float = PC_PROBE_THRESHOLD, floor: float = PC_NORM_FLOOR,
                  kind: Union[NormKind, str, None] = None) -> List[GalleryRow]:
    """Coordinate probes against norms along a family of vectors.

    A row is flagged as a point-of-continuity failure witness when every one
    of the first ``probe_count`` coordinate functionals is below ``threshold``
    while the norm stays at or above ``floor``.
    """
    if not family:
        raise InvalidInputError("weak_null_gap needs a nonempty family")
    dims = {coords_of(z).size for z in family}
    if len(dims) != 1:
        a, b = sorted(dims)[:2]
        raise DimensionMismatchError(a, b)
    N = dims.pop()
    if not 1 <= probe_count <= N:
        raise InvalidParameterError(f"probe_count must lie in 1..{N}, got {probe_count}")

    rows = []
    for index, z in enumerate(family, start=1):
        c = coords_of(z)
        probe = float(np.abs(c[:probe_count]).max())
        z_norm = norm(z, kind)
        witness = probe < threshold and z_norm >= floor
        rows.append(GalleryRow(
            family="weak_null_gap",
            n=index,
            values={'probe_max': probe, 'norm': z_norm},
            passed=True,
            flags={'pc_failure_witness': witness},
        ))
    flagged = sum(row.flags['pc_failure_witness'] for row in rows)
    logger.debug(f"weak_null_gap: {flagged}/{len(rows)} rows flagged")
    return rows
