"""Feasible sets as oracle objects: membership, projection, linear maximization.

Projections are Euclidean; ``project`` reports the distance in the set's
ambient norm. Every family also carries a deterministic sampler used by
supremum certificates and property checks.
"""
import logging
import math
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from conelab.exceptions import DimensionMismatchError, InvalidInputError, InvalidParameterError
from conelab.models import NormKind, Vector, coords_of
from conelab.services.cones import ConeSpec, OrthantCone, SlantedCone
from conelab.services.solvers import SolverConfig, dykstra_project, project_l1_ball
from conelab.services.spaces import batch_norm, norm, t_weights

logger = logging.getLogger(__name__)

# T weights below this are treated as zero in the triple-ball oracles
T_WEIGHT_FLOOR = 1e-100


class SetSpec:
    family = "set"

    def __init__(self, dim: int, radius: Optional[float] = None, ambient: NormKind = NormKind.L2):
        if dim < 1:
            raise InvalidParameterError("set dimension must be at least 1")
        if radius is not None and not radius > 0:
            raise InvalidParameterError(f"radius must be positive, got {radius}")
        self.dim = int(dim)
        self.radius = radius
        self.ambient = NormKind.parse(ambient)

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim}, radius={self.radius})"

    def _coords(self, x) -> np.ndarray:
        c = coords_of(x)
        if c.size != self.dim:
            raise DimensionMismatchError(c.size, self.dim)
        return c

    def violation(self, x) -> float:
        """Largest violated constraint, 0 inside the set"""
        raise NotImplementedError

    def contains(self, x, tol: float = 1e-9) -> bool:
        return self.violation(x) <= tol

    def batch_contains(self, points: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        return np.array([self.violation(p) <= tol for p in np.atleast_2d(points)])

    def project_coords(self, z: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        raise NotImplementedError

    def project(self, z, tol: float = 1e-9) -> Tuple[Vector, float]:
        zc = self._coords(z)
        y = self.project_coords(zc, tol)
        return Vector(y, self.ambient), norm(zc - y, self.ambient)

    def linear_max_coords(self, f: np.ndarray, tol: float = 1e-9) -> Tuple[np.ndarray, float]:
        raise NotImplementedError

    def linear_maximize(self, f, tol: float = 1e-9) -> Tuple[Vector, float]:
        fc = self._coords(f)
        if not np.any(fc):
            raise InvalidInputError("linear_maximize needs a nonzero functional")
        x, _ = self.linear_max_coords(fc, tol)
        return Vector(x, self.ambient), float(fc @ x)

    def sample(self, count: int, seed: int = 0) -> np.ndarray:
        raise NotImplementedError

    def normal_at(self, x, tol: float = 1e-9) -> np.ndarray:
        """Unit vector of the normal cone built from active constraints, zero inside"""
        grads = [g / np.linalg.norm(g) for g in self._active_gradients(self._coords(x), tol) if np.any(g)]
        if not grads:
            return np.zeros(self.dim)
        total = np.sum(grads, axis=0)
        length = np.linalg.norm(total)
        return total / length if length > 0 else np.zeros(self.dim)

    def _active_gradients(self, x: np.ndarray, tol: float):
        return []

    def radius_bound(self) -> float:
        """Bound on the ambient norm of every member"""
        return math.inf if self.radius is None else float(self.radius)

    def default_cone(self) -> ConeSpec:
        return OrthantCone(self.dim, self.ambient)


def box_ball_max(g: np.ndarray, a: float, rho: float) -> np.ndarray:
    """argmax <g, y> over |y_n| <= a, ||y||_2 <= rho"""
    y = np.zeros_like(g)
    nz = g != 0
    if a <= 0 or rho <= 0 or not nz.any():
        return y
    corner = a * np.sign(g)
    if np.linalg.norm(corner) <= rho:
        return corner
    G = np.abs(g[nz])

    def excess(lam):
        return float(np.sum(np.minimum(a, lam * G) ** 2)) - rho * rho

    lam = brentq(excess, 0.0, a / G.min(), xtol=1e-15, rtol=4 * np.finfo(float).eps)
    y[nz] = np.sign(g[nz]) * np.minimum(a, lam * G)
    length = np.linalg.norm(y)
    if length > rho:
        y *= rho / length
    return y


class FlatSet(SetSpec):
    """{x : x_1 + x_n^2 <= 0, 2 <= n <= N}, intersected with rB unless radius is None"""
    family = "kflat"

    def __init__(self, dim: int, radius: Optional[float] = 1.0):
        if dim < 2:
            raise InvalidParameterError("kflat needs N >= 2")
        super().__init__(dim, radius, NormKind.L2)

    def violation(self, x) -> float:
        c = self._coords(x)
        worst = c[0] + float(np.max(c[1:] ** 2))
        if self.radius is not None:
            worst = max(worst, float(np.linalg.norm(c)) - self.radius)
        return max(worst, 0.0)

    def batch_contains(self, points: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        points = np.atleast_2d(points)
        ok = points[:, 0] + np.max(points[:, 1:] ** 2, axis=1) <= tol
        if self.radius is not None:
            ok &= np.linalg.norm(points, axis=1) - self.radius <= tol
        return ok

    @staticmethod
    def _project_unbounded(z: np.ndarray) -> np.ndarray:
        """Search over u = max|y_n|; the best y_1 is min(z_1, -u^2), the rest a clamp"""
        z1, a = z[0], np.abs(z[1:])
        if z1 + float(np.max(a ** 2)) <= 0:
            return z.copy()

        def slope(u):
            return 2.0 * u * max(z1 + u * u, 0.0) - float(np.sum(np.maximum(a - u, 0.0)))

        if slope(0.0) >= 0:
            u = 0.0
        else:
            hi = float(a.max()) + math.sqrt(max(-z1, 0.0)) + 1.0
            u = brentq(slope, 0.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        y = np.empty_like(z)
        y[0] = min(z1, -u * u)
        y[1:] = np.clip(z[1:], -u, u)
        return y

    def project_coords(self, z: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        y = self._project_unbounded(z)
        if self.radius is None or np.linalg.norm(y) <= self.radius:
            return y
        r = self.radius

        # KKT with the ball multiplier mu: y = proj_F(z / (1 + mu))
        def excess(mu):
            return float(np.linalg.norm(self._project_unbounded(z / (1.0 + mu)))) - r

        hi = 1.0
        while excess(hi) > 0 and hi < 1e12:
            hi *= 2.0
        mu = brentq(excess, 0.0, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)
        y = self._project_unbounded(z / (1.0 + mu))
        length = np.linalg.norm(y)
        if length > r:
            y *= r / length  # shrinking keeps x_1 + x_n^2 <= 0
        return y

    def _value_at(self, f: np.ndarray, t: float) -> Tuple[float, np.ndarray]:
        r = self.radius
        rest = box_ball_max(f[1:], math.sqrt(t), math.sqrt(max(r * r - t * t, 0.0)))
        return -f[0] * t + float(f[1:] @ rest), rest

    def linear_max_coords(self, f: np.ndarray, tol: float = 1e-9) -> Tuple[np.ndarray, float]:
        """Concave in t = -x_1; the inner problem is a box-ball maximization"""
        if self.radius is None:
            raise InvalidParameterError("linear maximization needs a bounded kflat (radius set)")
        r = self.radius
        result = minimize_scalar(lambda t: -self._value_at(f, t)[0], bounds=(0.0, r), method="bounded",
                                 options={"xatol": 1e-12, "maxiter": 1000})
        best_t, best_value = 0.0, -math.inf
        for t in (float(result.x), 0.0, r):
            value, _ = self._value_at(f, t)
            if value > best_value:
                best_t, best_value = t, value
        _, rest = self._value_at(f, best_t)
        x = np.concatenate([[-best_t], rest])
        return x, float(f @ x)

    def sample(self, count: int, seed: int = 0) -> np.ndarray:
        r = 1.0 if self.radius is None else self.radius
        rng = np.random.default_rng(seed)
        t = r * rng.random(count)
        u = np.clip(1.3 * rng.uniform(-1.0, 1.0, (count, self.dim - 1)), -1.0, 1.0)
        points = np.hstack([-t[:, None], np.sqrt(t)[:, None] * u])
        lengths = np.linalg.norm(points, axis=1)
        over = lengths > r
        points[over] *= (r / lengths[over])[:, None]
        points[0] = 0.0
        if count > 1:
            points[1] = 0.0
            points[1, 0] = -r
        return points

    def _active_gradients(self, x: np.ndarray, tol: float):
        grads = []
        for n in range(1, self.dim):
            if x[0] + x[n] ** 2 >= -tol:
                g = np.zeros(self.dim)
                g[0], g[n] = 1.0, 2.0 * x[n]
                grads.append(g)
        if self.radius is not None and np.linalg.norm(x) >= self.radius - tol:
            grads.append(x.copy())
        return grads


class MinusSlantedSet(SetSpec):
    """(-S) intersected with rB, S the slanted cone"""
    family = "kminusp"

    def __init__(self, dim: int, radius: float = 1.0):
        if dim < 2:
            raise InvalidParameterError("kminusp needs N >= 2")
        super().__init__(dim, radius, NormKind.L2)
        self.cone = SlantedCone(dim)
        self._n = np.arange(2, dim + 1, dtype=float)

    def violation(self, x) -> float:
        c = self._coords(x)
        worst = max(c[0], float(np.max(np.abs(c[1:]) + self._n * c[0])), float(np.linalg.norm(c)) - self.radius)
        return max(worst, 0.0)

    def project_coords(self, z: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        # cone projection scaled into the ball is the projection onto cone and ball
        p = -self.cone.project_coords(-z, tol)
        length = np.linalg.norm(p)
        if length > self.radius:
            p *= self.radius / length
        return p

    def linear_max_coords(self, f: np.ndarray, tol: float = 1e-9) -> Tuple[np.ndarray, float]:
        q = -self.cone.project_coords(-f, tol)
        length = float(np.linalg.norm(q))
        if length <= 1e-15:
            x = np.zeros_like(f)
        else:
            x = self.radius * q / length
        return x, float(f @ x)

    def sample(self, count: int, seed: int = 0) -> np.ndarray:
        rng = np.random.default_rng(seed)
        points = -self.cone.sample(count, seed)
        lengths = np.linalg.norm(points, axis=1)
        lengths[lengths == 0] = 1.0
        radii = self.radius * np.clip(1.2 * rng.random(count), 0.0, 1.0)
        points = points / lengths[:, None] * radii[:, None]
        points[0] = 0.0
        return points

    def _active_gradients(self, x: np.ndarray, tol: float):
        grads = []
        for i, n in enumerate(self._n, start=1):
            if abs(x[i]) + n * x[0] >= -tol:
                g = np.zeros(self.dim)
                g[0], g[i] = n, np.sign(x[i])
                grads.append(g)
        if np.linalg.norm(x) >= self.radius - tol:
            grads.append(x.copy())
        return grads

    def default_cone(self) -> ConeSpec:
        return SlantedCone(self.dim)


class SlabSet(SetSpec):
    """{x : -1 <= <f, x> <= 0} with f = (1/n), intersected with 2B in l1"""
    family = "kslab"

    def __init__(self, dim: int, radius: float = 2.0):
        super().__init__(dim, radius, NormKind.L1)
        self.f = 1.0 / np.arange(1, dim + 1, dtype=float)

    def violation(self, x) -> float:
        c = self._coords(x)
        level = float(self.f @ c)
        return max(level, -1.0 - level, float(np.abs(c).sum()) - self.radius, 0.0)

    def batch_contains(self, points: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        points = np.atleast_2d(points)
        level = points @ self.f
        return (level <= tol) & (level >= -1.0 - tol) & (np.abs(points).sum(axis=1) <= self.radius + tol)

    def _project_slab(self, y: np.ndarray) -> np.ndarray:
        level = float(self.f @ y)
        target = min(max(level, -1.0), 0.0)
        return y + (target - level) / float(self.f @ self.f) * self.f

    def project_coords(self, z: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        if self.violation(z) == 0.0:
            return z.copy()
        return dykstra_project(
            z,
            [self._project_slab, lambda y: project_l1_ball(y, self.radius)],
            SolverConfig(tol=max(tol, 1e-12)),
        )

    def linear_max_coords(self, f: np.ndarray, tol: float = 1e-9) -> Tuple[np.ndarray, float]:
        """Vertices are cross-polytope vertices in the slab or edge crossings of its planes"""
        N, r, w = self.dim, self.radius, self.f
        best_value, best_x = -math.inf, None

        for i in range(N):
            for sign in (1.0, -1.0):
                level = sign * r * w[i]
                if -1.0 <= level <= 0.0 and sign * r * f[i] > best_value:
                    best_value = sign * r * f[i]
                    best_x = np.zeros(N)
                    best_x[i] = sign * r

        upper = np.triu(np.ones((N, N), dtype=bool), k=1)
        for si in (1.0, -1.0):
            for sj in (1.0, -1.0):
                A = (si * r * w)[:, None]
                B = (sj * r * w)[None, :]
                gA = (si * r * f)[:, None]
                gB = (sj * r * f)[None, :]
                denom = B - A
                safe = np.where(denom == 0, 1.0, denom)
                for c in (0.0, -1.0):
                    theta = (c - A) / safe
                    valid = upper & (denom != 0) & (theta >= 0.0) & (theta <= 1.0)
                    if not valid.any():
                        continue
                    values = np.where(valid, (1.0 - theta) * gA + theta * gB, -np.inf)
                    k = int(np.argmax(values))
                    i, j = divmod(k, N)
                    if values[i, j] > best_value:
                        best_value = float(values[i, j])
                        best_x = np.zeros(N)
                        best_x[i] = (1.0 - theta[i, j]) * si * r
                        best_x[j] = theta[i, j] * sj * r
        return best_x, float(f @ best_x)

    def sample(self, count: int, seed: int = 0) -> np.ndarray:
        rng = np.random.default_rng(seed)
        out = np.empty((0, self.dim))
        while out.shape[0] < count:
            batch = max(4 * count, 64)
            weights = rng.dirichlet(np.ones(self.dim), batch)
            signs = rng.choice((-1.0, 1.0), (batch, self.dim))
            radii = self.radius * np.clip(1.2 * rng.random(batch), 0.0, 1.0)
            candidates = signs * weights * radii[:, None]
            out = np.vstack([out, candidates[self.batch_contains(candidates, 0.0)]])
        out = out[:count]
        out[0] = 0.0
        return out

    def _active_gradients(self, x: np.ndarray, tol: float):
        grads = []
        level = float(self.f @ x)
        if level >= -tol:
            grads.append(self.f.copy())
        if level <= -1.0 + tol:
            grads.append(-self.f)
        if np.abs(x).sum() >= self.radius - tol:
            grads.append(np.sign(x))
        return grads

    def radius_bound(self) -> float:
        return self.radius


def box_ellipsoid_project(z: np.ndarray, a: float, rho: float, d: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {|y_n| <= a, ||d * y||_2 <= rho}"""
    def at(mu):
        return np.clip(z / (1.0 + mu * d * d), -a, a)

    y = at(0.0)
    if np.linalg.norm(d * y) <= rho:
        return y
    if rho <= 0:
        return np.where(d > 0, 0.0, y)

    def excess(mu):
        return float(np.linalg.norm(d * at(mu))) - rho

    hi = 1.0
    while excess(hi) > 0 and hi < 1e300:
        hi *= 4.0
    mu = brentq(excess, 0.0, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)
    y = at(mu)
    length = np.linalg.norm(d * y)
    if length > rho:
        y = np.where(d > 0, y * rho / length, y)
    return y


def box_ellipsoid_max(g: np.ndarray, a: float, rho: float, d: np.ndarray) -> np.ndarray:
    """argmax <g, y> over |y_n| <= a, ||d * y||_2 <= rho"""
    corner = a * np.sign(g)
    if a <= 0 or not np.any(g):
        return np.zeros_like(g)
    if np.linalg.norm(d * corner) <= rho:
        return corner
    if rho <= 0:
        return np.where(d > 0, 0.0, corner)
    mask = (g != 0) & (d > 0)
    G, D2 = np.abs(g[mask]), d[mask] ** 2

    def excess(lam):
        return float(np.linalg.norm(np.sqrt(D2) * np.minimum(a, G / (lam * D2)))) - rho

    lo = float(np.min(G / (a * D2)))
    hi = float(np.sqrt(np.sum(G ** 2 / D2))) / rho
    if excess(lo) <= 0:
        lam = lo
    else:
        lam = brentq(excess, lo, max(hi, lo), xtol=1e-300, rtol=4 * np.finfo(float).eps)
    y = corner.copy()
    y[mask] = np.sign(g[mask]) * np.minimum(a, G / (lam * D2))
    length = np.linalg.norm(d * y)
    if length > rho:
        y = np.where(d > 0, y * rho / length, y)
    return y


class TripleBallSet(SetSpec):
    """Unit ball of |||x||| = ||x||_inf + ||T x||_2"""
    family = "ktriple"

    def __init__(self, dim: int):
        super().__init__(dim, 1.0, NormKind.TRIPLE)
        w = t_weights(dim)
        self.d = np.where(w < T_WEIGHT_FLOOR, 0.0, w)

    def violation(self, x) -> float:
        return max(norm(self._coords(x), NormKind.TRIPLE) - 1.0, 0.0)

    def batch_contains(self, points: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        return batch_norm(points, NormKind.TRIPLE) <= 1.0 + tol

    def project_coords(self, z: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        """Split the budget: ||y||_inf <= t and ||T y||_2 <= 1 - t, convex in t"""
        if self.violation(z) == 0.0:
            return z.copy()

        def gap(t):
            return float(np.linalg.norm(z - box_ellipsoid_project(z, t, 1.0 - t, self.d)))

        result = minimize_scalar(gap, bounds=(0.0, 1.0), method="bounded", options={"xatol": 1e-12, "maxiter": 1000})
        y = box_ellipsoid_project(z, float(result.x), 1.0 - float(result.x), self.d)
        size = norm(y, NormKind.TRIPLE)
        return y / size if size > 1.0 else y

    def linear_max_coords(self, f: np.ndarray, tol: float = 1e-9) -> Tuple[np.ndarray, float]:
        def value(t):
            return float(f @ box_ellipsoid_max(f, t, 1.0 - t, self.d))

        result = minimize_scalar(lambda t: -value(t), bounds=(0.0, 1.0), method="bounded",
                                 options={"xatol": 1e-12, "maxiter": 1000})
        best_t = max((float(result.x), 0.0, 1.0), key=value)
        x = box_ellipsoid_max(f, best_t, 1.0 - best_t, self.d)
        size = norm(x, NormKind.TRIPLE)
        if size > 1.0:
            x = x / size
        return x, float(f @ x)

    def sample(self, count: int, seed: int = 0) -> np.ndarray:
        rng = np.random.default_rng(seed)
        points = rng.uniform(-1.0, 1.0, (count, self.dim))
        sizes = batch_norm(points, NormKind.TRIPLE)
        sizes[sizes == 0] = 1.0
        radii = np.clip(1.2 * rng.random(count), 0.0, 1.0)
        points = points / sizes[:, None] * radii[:, None]
        points[0] = 0.0
        return points

    def _active_gradients(self, x: np.ndarray, tol: float):
        if norm(x, NormKind.TRIPLE) < 1.0 - tol:
            return []
        g = np.zeros(self.dim)
        i = int(np.argmax(np.abs(x)))
        g[i] = np.sign(x[i])
        tx = self.d * x
        length = np.linalg.norm(tx)
        if length > 0:
            g = g + self.d * tx / length
        return [g]


class DiskSet(SetSpec):
    family = "disk2d"

    def __init__(self, radius: float = 1.0):
        super().__init__(2, radius, NormKind.L2)

    def violation(self, x) -> float:
        return max(float(np.linalg.norm(self._coords(x))) - self.radius, 0.0)

    def batch_contains(self, points: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        return np.linalg.norm(np.atleast_2d(points), axis=1) <= self.radius + tol

    def project_coords(self, z: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        length = np.linalg.norm(z)
        return z.copy() if length <= self.radius else z * (self.radius / length)

    def linear_max_coords(self, f: np.ndarray, tol: float = 1e-9) -> Tuple[np.ndarray, float]:
        x = self.radius * f / np.linalg.norm(f)
        return x, float(f @ x)

    def sample(self, count: int, seed: int = 0) -> np.ndarray:
        rng = np.random.default_rng(seed)
        angles = 2.0 * np.pi * rng.random(count)
        radii = self.radius * np.sqrt(rng.random(count))
        radii[: count // 4] = self.radius
        return np.column_stack([radii * np.cos(angles), radii * np.sin(angles)])

    def _active_gradients(self, x: np.ndarray, tol: float):
        return [x.copy()] if np.linalg.norm(x) >= self.radius - tol else []


class SquareSet(SetSpec):
    """The square [-1, 0]^2"""
    family = "square2d"

    def __init__(self):
        super().__init__(2, None, NormKind.L2)

    def violation(self, x) -> float:
        c = self._coords(x)
        return max(float(c.max()), float((-1.0 - c).max()), 0.0)

    def batch_contains(self, points: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        points = np.atleast_2d(points)
        return (points.max(axis=1) <= tol) & (points.min(axis=1) >= -1.0 - tol)

    def project_coords(self, z: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        return np.clip(z, -1.0, 0.0)

    def linear_max_coords(self, f: np.ndarray, tol: float = 1e-9) -> Tuple[np.ndarray, float]:
        x = np.where(f < 0, -1.0, 0.0)
        return x, float(f @ x)

    def sample(self, count: int, seed: int = 0) -> np.ndarray:
        rng = np.random.default_rng(seed)
        points = -rng.random((count, 2))
        corners = np.array([[0.0, 0.0], [-1.0, 0.0], [0.0, -1.0], [-1.0, -1.0]])
        k = min(4, count)
        points[:k] = corners[:k]
        return points

    def _active_gradients(self, x: np.ndarray, tol: float):
        grads = []
        for i in range(2):
            e = np.zeros(2)
            e[i] = 1.0
            if x[i] >= -tol:
                grads.append(e)
            elif x[i] <= -1.0 + tol:
                grads.append(-e)
        return grads

    def radius_bound(self) -> float:
        return math.sqrt(2.0)


class HalfSpaceCapSet(SetSpec):
    """{<a, x> <= b} intersected with rB"""
    family = "halfspace_cap"

    def __init__(self, dim: int = 2, normal=None, offset: float = 0.0, radius: float = 1.0):
        super().__init__(dim, radius, NormKind.L2)
        a = np.ones(dim) if normal is None else np.asarray(normal, dtype=float)
        if a.size != dim:
            raise DimensionMismatchError(a.size, dim)
        if not np.any(a):
            raise InvalidParameterError("halfspace normal must be nonzero")
        self.a = a
        self.b = float(offset)
        if -self.b / np.linalg.norm(a) > radius:
            raise InvalidParameterError("halfspace misses the ball")

    def violation(self, x) -> float:
        c = self._coords(x)
        return max(float(self.a @ c) - self.b, float(np.linalg.norm(c)) - self.radius, 0.0)

    def _on_hyperplane_disk(self, z: np.ndarray) -> np.ndarray:
        aa = float(self.a @ self.a)
        h = z - (float(self.a @ z) - self.b) / aa * self.a
        center = self.b / aa * self.a
        rho = math.sqrt(max(self.radius ** 2 - float(center @ center), 0.0))
        offset = h - center
        length = np.linalg.norm(offset)
        if length <= rho:
            return h
        return center + rho * offset / length

    def project_coords(self, z: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        length = np.linalg.norm(z)
        in_ball = z if length <= self.radius else z * (self.radius / length)
        if float(self.a @ in_ball) <= self.b:
            return in_ball
        aa = float(self.a @ self.a)
        in_half = z - max(float(self.a @ z) - self.b, 0.0) / aa * self.a
        if np.linalg.norm(in_half) <= self.radius:
            return in_half
        return self._on_hyperplane_disk(z)

    def linear_max_coords(self, f: np.ndarray, tol: float = 1e-9) -> Tuple[np.ndarray, float]:
        x = self.radius * f / np.linalg.norm(f)
        if float(self.a @ x) > self.b:
            aa = float(self.a @ self.a)
            center = self.b / aa * self.a
            rho = math.sqrt(max(self.radius ** 2 - float(center @ center), 0.0))
            tangent = f - float(f @ self.a) / aa * self.a
            length = np.linalg.norm(tangent)
            x = center if length == 0 else center + rho * tangent / length
        return x, float(f @ x)

    def sample(self, count: int, seed: int = 0) -> np.ndarray:
        rng = np.random.default_rng(seed)
        out = np.empty((0, self.dim))
        while out.shape[0] < count:
            batch = max(4 * count, 64)
            u = rng.standard_normal((batch, self.dim))
            u /= np.linalg.norm(u, axis=1)[:, None]
            candidates = u * (self.radius * rng.random(batch) ** (1.0 / self.dim))[:, None]
            keep = candidates @ self.a <= self.b
            out = np.vstack([out, candidates[keep]])
        return out[:count]

    def _active_gradients(self, x: np.ndarray, tol: float):
        grads = []
        if float(self.a @ x) >= self.b - tol:
            grads.append(self.a.copy())
        if np.linalg.norm(x) >= self.radius - tol:
            grads.append(x.copy())
        return grads


SET_FAMILIES = ("kflat", "kminusp", "kslab", "ktriple", "disk2d", "square2d", "halfspace_cap")
FIXED_DIMENSION = {"disk2d": 2, "square2d": 2}


def make_set(name: str, N: Optional[int] = None, radius: Optional[float] = None) -> SetSpec:
    name = name.lower()
    if name not in SET_FAMILIES:
        raise InvalidParameterError(f"unknown set family: {name} (expected one of {', '.join(SET_FAMILIES)})")
    if name in FIXED_DIMENSION:
        if N is not None and N != FIXED_DIMENSION[name]:
            raise InvalidParameterError(f"{name} is two-dimensional, got N = {N}")
        return DiskSet(radius or 1.0) if name == "disk2d" else SquareSet()
    if name == "halfspace_cap":
        return HalfSpaceCapSet(N or 2, radius=radius or 1.0)
    if N is None:
        raise InvalidParameterError(f"{name} needs a truncation dimension N")
    if name == "kflat":
        return FlatSet(N, 1.0 if radius is None else radius)
    if name == "kminusp":
        return MinusSlantedSet(N, radius or 1.0)
    if name == "kslab":
        return SlabSet(N)
    return TripleBallSet(N)


def set_contains(K: SetSpec, x, tol: float = 1e-9) -> bool:
    return K.contains(x, tol)


def set_project(K: SetSpec, z, tol: float = 1e-9) -> Tuple[Vector, float]:
    return K.project(z, tol)


def linear_maximize(K: SetSpec, f, tol: float = 1e-9) -> Tuple[Vector, float]:
    return K.linear_maximize(f, tol)
