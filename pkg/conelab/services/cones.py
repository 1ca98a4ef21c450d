"""Ordering cones: membership, metric projection, dual positivity, bases and dilation.

Three families are supported:

* ``OrthantCone`` - the nonnegative orthant of any ambient norm,
* ``SlantedCone`` - ``{x : n*x_1 - |x_n| >= 0, 2 <= n <= N}`` in l2,
* ``DilatedCone`` - the conical hull of ``base + delta * ball`` in l2.

The slanted cone is the cone over the box ``{x_1 = 1, |x_n| <= n}``; its
extreme rays are the box vertices ``(1, +-2, ..., +-N)``.
"""
import logging
import math
from itertools import product
from typing import Optional, Tuple, Union

import numpy as np
from scipy.optimize import linprog, minimize_scalar

from conelab.exceptions import DimensionMismatchError, InvalidParameterError, SolverFailureError
from conelab.models import NormKind, Vector, coords_of
from conelab.services.solvers import (
    SolverConfig,
    bisect_monotone,
    dykstra_project,
    project_weighted_simplex,
)
from conelab.services.spaces import batch_norm, dual_norm, norm

logger = logging.getLogger(__name__)

DILATION_POINTEDNESS = 0.9
BOUNDED_GROWTH_RATIO = 1.25
MAX_ENUMERATED_DIM = 12


def _cfg(tol: float) -> SolverConfig:
    return SolverConfig(tol=max(tol, 1e-12))


class ConeSpec:
    family = "cone"

    def __init__(self, dim: int, ambient: Union[NormKind, str] = NormKind.L2):
        if dim < 1:
            raise InvalidParameterError("cone dimension must be at least 1")
        self.dim = int(dim)
        self.ambient = NormKind.parse(ambient)

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim}, ambient={self.ambient.value})"

    def _coords(self, x) -> np.ndarray:
        c = coords_of(x)
        if c.size != self.dim:
            raise DimensionMismatchError(c.size, self.dim)
        return c

    def contains(self, x, tol: float = 1e-9) -> bool:
        raise NotImplementedError

    def project_coords(self, z: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        raise NotImplementedError

    def project(self, z, tol: float = 1e-9) -> Tuple[Vector, float]:
        zc = self._coords(z)
        p = self.project_coords(zc, tol)
        return Vector(p, self.ambient), norm(zc - p, self.ambient)

    def distance(self, x, tol: float = 1e-9) -> float:
        return self.project(x, tol)[1]

    def batch_distance(self, points: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        points = np.atleast_2d(points)
        return np.array([norm(p - self.project_coords(p, tol), self.ambient) for p in points])

    def dual_margin(self, f) -> float:
        """inf of f/||f||_* over the normalized cone, sign-exact"""
        raise NotImplementedError

    def dual_strictly_positive(self, f, margin: float = 0.0) -> bool:
        return self.dual_margin(f) > margin

    def rays(self) -> np.ndarray:
        raise NotImplementedError

    def sample(self, count: int, seed: int = 0) -> np.ndarray:
        raise NotImplementedError


class OrthantCone(ConeSpec):
    family = "orthant"

    def contains(self, x, tol: float = 1e-9) -> bool:
        return bool(self._coords(x).min() >= -tol)

    def project_coords(self, z: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        # clipping is a nearest point for every lattice norm
        return np.maximum(z, 0.0)

    def batch_distance(self, points: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        return batch_norm(np.minimum(np.atleast_2d(points), 0.0), self.ambient)

    def dual_margin(self, f) -> float:
        fc = self._coords(f)
        scale = dual_norm(fc, self.ambient)
        if scale == 0:
            return 0.0
        return float(fc.min() / scale)

    def rays(self) -> np.ndarray:
        return np.eye(self.dim)

    def sample(self, count: int, seed: int = 0) -> np.ndarray:
        rng = np.random.default_rng(seed)
        points = np.abs(rng.standard_normal((count, self.dim)))
        # some samples on the boundary faces
        mask = rng.random((count, self.dim)) < 0.2
        points[mask] = 0.0
        return points


class SlantedCone(ConeSpec):
    family = "slanted"

    def __init__(self, dim: int):
        super().__init__(dim, NormKind.L2)
        self._n = np.arange(2, self.dim + 1, dtype=float)

    def contains(self, x, tol: float = 1e-9) -> bool:
        c = self._coords(x)
        if c[0] < -tol:
            return False
        return bool(np.all(np.abs(c[1:]) - self._n * c[0] <= tol))

    def project_coords(self, z: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        """Minimize over the first coordinate; the rest is a clamp to [-n p1, n p1]"""
        z1, a, n = z[0], np.abs(z[1:]), self._n
        if z1 >= 0 and np.all(a <= n * z1):
            return z.copy()

        def slope(p1: float) -> float:
            return p1 - z1 - float(np.sum(n * np.maximum(a - n * p1, 0.0)))

        if slope(0.0) >= 0:
            return np.zeros_like(z)

        hi = max(z1, 0.0) + float(np.sum(n * a)) + 1.0
        p1 = bisect_monotone(slope, 0.0, hi, _cfg(tol))
        # exact value once the clamped index set is known
        active = a > n * p1
        exact = (z1 + float(np.sum(n[active] * a[active]))) / (1.0 + float(np.sum(n[active] ** 2)))
        if exact >= 0 and np.array_equal(active, a > n * exact):
            p1 = exact

        p = np.empty_like(z)
        p[0] = p1
        p[1:] = np.clip(z[1:], -n * p1, n * p1)
        return p

    def box_norm(self, kind: NormKind = NormKind.L2) -> float:
        """Norm shared by every extreme ray (1, +-2, ..., +-N)"""
        return norm(np.concatenate([[1.0], self._n]), kind)

    def min_on_box(self, f: np.ndarray) -> float:
        """min of f over the box {x_1 = 1, |x_n| <= n}"""
        return float(f[0] - np.sum(self._n * np.abs(f[1:])))

    def dual_margin(self, f) -> float:
        fc = self._coords(f)
        scale = float(np.linalg.norm(fc))
        if scale == 0:
            return 0.0
        return self.min_on_box(fc) / (self.box_norm() * scale)

    def rays(self) -> np.ndarray:
        rays = [np.eye(self.dim)[0]]
        for n in range(2, self.dim + 1):
            for sign in (1.0, -1.0):
                r = np.zeros(self.dim)
                r[0], r[n - 1] = 1.0, sign * n
                rays.append(r)
        return np.array(rays)

    def extreme_rays(self) -> np.ndarray:
        if self.dim > MAX_ENUMERATED_DIM + 1:
            raise InvalidParameterError(f"extreme rays are enumerated only up to N = {MAX_ENUMERATED_DIM + 1}")
        if self.dim == 1:
            return np.ones((1, 1))
        signs = np.array(list(product((1.0, -1.0), repeat=self.dim - 1))).reshape(-1, self.dim - 1)
        return np.hstack([np.ones((signs.shape[0], 1)), signs * self._n])

    def sample(self, count: int, seed: int = 0) -> np.ndarray:
        rng = np.random.default_rng(seed)
        scale = rng.random(count)
        u = np.clip(1.2 * rng.uniform(-1.0, 1.0, (count, self.dim - 1)), -1.0, 1.0)
        return scale[:, None] * np.hstack([np.ones((count, 1)), u * self._n])


class BaseSpec:
    """The slice {x in P : <f, x> = level} of a cone by a strictly positive functional"""

    def __init__(self, cone: ConeSpec, functional, level: float = 1.0):
        if isinstance(cone, DilatedCone):
            raise InvalidParameterError("bases are taken of orthant or slanted cones")
        f = cone._coords(functional)
        if not level > 0:
            raise InvalidParameterError(f"base level must be positive, got {level}")
        if not cone.dual_strictly_positive(f, 0.0):
            raise InvalidParameterError("base functional is not strictly positive on the cone")
        self.cone = cone
        self.functional = Vector(f, cone.ambient)
        self.level = float(level)
        self.dim = cone.dim
        self.ambient = cone.ambient

    def __repr__(self):
        return f"BaseSpec({self.cone!r}, level={self.level:g}, bounded={self.bounded})"

    @property
    def f(self) -> np.ndarray:
        return self.functional.coords

    def rescaled(self, level: float) -> "BaseSpec":
        return BaseSpec(self.cone, self.functional, level)

    def sup_norm_at(self, k: int) -> float:
        """sup of the ambient norm over the base of the k-th truncation"""
        k = max(1, min(int(k), self.dim))
        f = self.f[:k]
        if isinstance(self.cone, OrthantCone):
            unit = np.ones(k)
            if self.ambient == NormKind.TRIPLE:
                unit = unit + np.ldexp(1.0, -np.arange(1, k + 1))
            return float(np.max(self.level * unit / f))
        truncated = SlantedCone(k)
        return self.level * truncated.box_norm(self.ambient) / truncated.min_on_box(f)

    @property
    def sup_norm(self) -> float:
        return self.sup_norm_at(self.dim)

    @property
    def growth(self) -> float:
        return self.sup_norm_at(self.dim) / self.sup_norm_at(1)

    @property
    def bounded(self) -> bool:
        half = math.ceil(self.dim / 2)
        return self.sup_norm_at(self.dim) <= BOUNDED_GROWTH_RATIO * self.sup_norm_at(half)

    @property
    def min_norm(self) -> float:
        """inf of the ambient norm over the base"""
        f = self.f
        if self.ambient == NormKind.L2:
            return self.level / float(np.linalg.norm(self.cone.project_coords(f)))
        if self.ambient == NormKind.L1:
            return self.level / float(f.max())
        # SUP exactly, TRIPLE as a lower bound
        return self.level / float(f.sum())

    def min_functional(self, g) -> float:
        """inf of <g, b> over the base"""
        g = self.cone._coords(g)
        if isinstance(self.cone, OrthantCone):
            return float(np.min(self.level * g / self.f))
        return self._slanted_lp(g)

    def _slanted_lp(self, g: np.ndarray) -> float:
        N = self.dim
        rows = []
        for n in range(2, N + 1):
            for sign in (1.0, -1.0):
                row = np.zeros(N)
                row[0], row[n - 1] = -float(n), sign
                rows.append(row)
        bounds = [(0, None)] + [(None, None)] * (N - 1)
        result = linprog(
            g,
            A_ub=np.array(rows) if rows else None,
            b_ub=np.zeros(len(rows)) if rows else None,
            A_eq=self.f.reshape(1, -1),
            b_eq=[self.level],
            bounds=bounds,
            method="highs",
        )
        if result.status != 0:
            raise SolverFailureError(f"base linear program failed: {result.message}")
        return float(result.fun)

    def vertices(self) -> np.ndarray:
        if isinstance(self.cone, OrthantCone):
            return np.diag(self.level / self.f)
        rays = self.cone.extreme_rays()
        return self.level * rays / (rays @ self.f)[:, None]

    def contains(self, x, tol: float = 1e-9) -> bool:
        c = self.cone._coords(x)
        return self.cone.contains(c, tol) and abs(float(self.f @ c) - self.level) <= tol

    def project(self, z, tol: float = 1e-9, scale: float = 1.0) -> np.ndarray:
        """Euclidean projection onto scale * base"""
        zc = self.cone._coords(z)
        level = self.level * scale
        if isinstance(self.cone, OrthantCone):
            return project_weighted_simplex(zc, self.f, level)
        f = self.f
        ff = float(f @ f)

        def to_hyperplane(y):
            return y + (level - float(f @ y)) / ff * f

        return dykstra_project(zc, [lambda y: self.cone.project_coords(y, tol), to_hyperplane], _cfg(tol))

    def sample(self, count: int, seed: int = 0) -> np.ndarray:
        rng = np.random.default_rng(seed)
        if isinstance(self.cone, OrthantCone):
            weights = rng.dirichlet(np.ones(self.dim), count)
            return weights * (self.level / self.f)
        points = self.cone.sample(count, seed)
        points[:, 0] = np.maximum(points[:, 0], 1e-3)
        return self.level * points / (points @ self.f)[:, None]


class DilatedCone(ConeSpec):
    """Closed conical hull of base + delta * (unit l2 ball)"""
    family = "dilated"

    def __init__(self, base: BaseSpec, delta: float):
        super().__init__(base.dim, NormKind.L2)
        self.base = base
        self.delta = float(delta)

    def __repr__(self):
        return f"DilatedCone(dim={self.dim}, delta={self.delta:g}, cone={self.base.cone.family})"

    def _slice_distance(self, x: np.ndarray, lam: float, tol: float) -> Tuple[float, np.ndarray]:
        if lam <= 0:
            return float(np.linalg.norm(x)), np.zeros_like(x)
        y = self.base.project(x, tol, scale=lam)
        return float(np.linalg.norm(x - y)), y

    def project_coords(self, z: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        """d(z, P_delta) = max(0, min_lam d(z, lam*B) - lam*delta), convex in lam"""
        z_norm = float(np.linalg.norm(z))
        if z_norm == 0:
            return z.copy()
        gap = self.base.min_norm - self.delta
        lam_max = 2.0 * z_norm / gap + 1.0

        def objective(lam):
            return self._slice_distance(z, lam, tol)[0] - lam * self.delta

        result = minimize_scalar(objective, bounds=(0.0, lam_max), method="bounded",
                                 options={"xatol": 1e-12, "maxiter": 500})
        lam = float(result.x)
        if objective(lam) >= z_norm:
            return np.zeros_like(z)
        dist, y = self._slice_distance(z, lam, tol)
        if dist <= lam * self.delta:
            return z.copy()
        return y + lam * self.delta * (z - y) / dist

    def contains(self, x, tol: float = 1e-9) -> bool:
        c = self._coords(x)
        if self.base.cone.contains(c, 0.0):
            return True
        return self.distance(c, tol) <= tol

    def dual_margin(self, f) -> float:
        fc = self._coords(f)
        scale = float(np.linalg.norm(fc))
        if scale == 0:
            return 0.0
        return (self.base.min_functional(fc) - self.delta * scale) / scale

    def rays(self) -> np.ndarray:
        if isinstance(self.base.cone, OrthantCone) or self.dim <= MAX_ENUMERATED_DIM + 1:
            return self.base.vertices()
        return self.base.sample(4 * self.dim, seed=0)

    def sample(self, count: int, seed: int = 0) -> np.ndarray:
        rng = np.random.default_rng(seed)
        b = self.base.sample(count, seed)
        u = rng.standard_normal((count, self.dim))
        u *= (rng.random(count) ** (1.0 / self.dim) / np.linalg.norm(u, axis=1))[:, None]
        return rng.random(count)[:, None] * (b + self.delta * u)


def cone_contains(P: ConeSpec, x, tol: float = 1e-9) -> bool:
    return P.contains(x, tol)


def cone_project(P: ConeSpec, z, tol: float = 1e-9) -> Tuple[Vector, float]:
    return P.project(z, tol)


def dual_strictly_positive(P: ConeSpec, f, margin: float = 0.0) -> bool:
    return P.dual_strictly_positive(f, margin)


def base_of(P: ConeSpec, f, level: float = 1.0) -> BaseSpec:
    base = BaseSpec(P, f, level)
    logger.debug(f"base_of {P!r}: sup_norm={base.sup_norm:.6g} growth={base.growth:.6g} bounded={base.bounded}")
    return base


def max_dilation(base: BaseSpec) -> float:
    return DILATION_POINTEDNESS * base.min_norm


def dilate(P: ConeSpec, base: BaseSpec, delta: float) -> DilatedCone:
    if isinstance(P, DilatedCone):
        raise InvalidParameterError("dilate expects an orthant or slanted cone")
    if base.cone is not P and (type(base.cone) is not type(P) or base.dim != P.dim or base.ambient != P.ambient):
        raise InvalidParameterError("base does not belong to the cone being dilated")
    if P.ambient != NormKind.L2:
        raise InvalidParameterError("dilated cones are supported in l2 only")
    limit = max_dilation(base)
    if not 0 < delta <= limit:
        raise InvalidParameterError(f"delta must lie in (0, {limit:.6g}] for a pointed dilation, got {delta}")
    return DilatedCone(base, delta)


def make_cone(name: str, N: int, ambient: Union[NormKind, str] = NormKind.L2) -> ConeSpec:
    name = name.lower()
    if name == "orthant":
        return OrthantCone(N, ambient)
    if name == "slanted":
        if NormKind.parse(ambient) != NormKind.L2:
            raise InvalidParameterError("the slanted cone lives in l2")
        return SlantedCone(N)
    raise InvalidParameterError(f"unknown cone family: {name}")
