import logging
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from conelab.config import Config
from conelab.exceptions import InvalidInputError, InvalidParameterError, SolverFailureError
from conelab.models import Vector, coords_of

logger = logging.getLogger(__name__)

Projection = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-9
    max_iter: int = 100000
    multistarts: int = 8
    seed: int = 0
    alt_iter: int = 25
    samples: int = 10000

    def __post_init__(self):
        if not self.tol > 0:
            raise InvalidParameterError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise InvalidParameterError(f"max_iter must be at least 1, got {self.max_iter}")
        if self.multistarts < 1:
            raise InvalidParameterError(f"multistarts must be at least 1, got {self.multistarts}")

    @classmethod
    def from_env(cls, **overrides) -> "SolverConfig":
        cfg = cls(
            tol=Config.TOL,
            max_iter=Config.MAX_ITER,
            multistarts=Config.MULTISTARTS,
            seed=Config.seed(),
            alt_iter=Config.ALT_ITER,
            samples=Config.SAMPLES,
        )
        return replace(cfg, **overrides) if overrides else cfg

    def rng(self, offset: int = 0) -> np.random.Generator:
        return np.random.default_rng([abs(int(self.seed)), int(offset)])


DEFAULT_CONFIG = SolverConfig()


def bisect_monotone(g: Callable[[float], float], lo: float, hi: float,
                    cfg: Optional[SolverConfig] = None) -> float:
    """Root of a nondecreasing g on [lo, hi] with g(lo) <= 0 <= g(hi)"""
    cfg = cfg or DEFAULT_CONFIG
    if lo > hi:
        raise InvalidInputError(f"empty bracket [{lo}, {hi}]")
    if g(lo) > 0 or g(hi) < 0:
        raise InvalidInputError(f"bracket [{lo}, {hi}] does not enclose a sign change")

    iterations = 0
    while hi - lo > cfg.tol and iterations < cfg.max_iter:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if g(mid) <= 0:
            lo = mid
        else:
            hi = mid
        iterations += 1
    return 0.5 * (lo + hi)


def ray_length(contains: Callable[[np.ndarray], bool], x: np.ndarray, d: np.ndarray,
               t_max: float, cfg: Optional[SolverConfig] = None) -> float:
    """Largest t in [0, t_max] with x + t*d feasible, for convex feasible sets containing x"""
    cfg = cfg or DEFAULT_CONFIG
    if contains(x + t_max * d):
        return t_max
    lo, hi = 0.0, t_max
    width = cfg.tol * max(1.0, t_max)
    iterations = 0
    while hi - lo > width and iterations < 200:
        mid = 0.5 * (lo + hi)
        if contains(x + mid * d):
            lo = mid
        else:
            hi = mid
        iterations += 1
    return lo


def project_weighted_simplex(z: np.ndarray, w: np.ndarray, level: float = 1.0) -> np.ndarray:
    """Euclidean projection onto {p >= 0, <w, p> = level} for positive weights w"""
    z = np.asarray(z, dtype=float)
    w = np.asarray(w, dtype=float)
    if np.any(w <= 0):
        raise InvalidParameterError("simplex weights must be positive")
    ratios = z / w
    order = np.argsort(-ratios, kind="stable")
    zs, ws = z[order], w[order]
    theta = (np.cumsum(ws * zs) - level) / np.cumsum(ws * ws)
    active = np.nonzero(ratios[order] - theta > 0)[0]
    k = active[-1] if active.size else 0
    return np.maximum(z - theta[k] * w, 0.0)


def project_simplex(z: np.ndarray, radius: float = 1.0) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    return project_weighted_simplex(z, np.ones_like(z), radius)


def project_l1_ball(z: np.ndarray, radius: float = 1.0) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if np.abs(z).sum() <= radius:
        return z.copy()
    return np.sign(z) * project_simplex(np.abs(z), radius)


def dykstra_project(z: np.ndarray, projections: Sequence[Projection],
                    cfg: Optional[SolverConfig] = None, max_iter: Optional[int] = None) -> np.ndarray:
    """Projection onto an intersection of convex sets by Dykstra's algorithm"""
    cfg = cfg or DEFAULT_CONFIG
    max_iter = max_iter or cfg.max_iter
    x = np.asarray(z, dtype=float).copy()
    increments = [np.zeros_like(x) for _ in projections]

    for iteration in range(1, max_iter + 1):
        x_prev = x
        for i, project in enumerate(projections):
            y = project(x + increments[i])
            increments[i] = x + increments[i] - y
            x = y
        if np.linalg.norm(x - x_prev) < cfg.tol:
            logger.debug(f"Dykstra converged after {iteration} rounds")
            return x
    raise SolverFailureError(f"Dykstra did not converge in {max_iter} rounds",
                             best_iterate=x, iterations=max_iter)


def projected_gradient_max(f, project: Projection, x0,
                           cfg: Optional[SolverConfig] = None, step: float = 1.0) -> Tuple[np.ndarray, float]:
    """Maximize <f, x> over a convex set given its metric projection"""
    cfg = cfg or DEFAULT_CONFIG
    fv = coords_of(f)
    scale = np.linalg.norm(fv)
    if scale == 0:
        raise InvalidInputError("projected_gradient_max needs a nonzero functional")
    direction = fv / scale

    x = project(np.array(coords_of(x0), dtype=float))
    value = float(fv @ x)
    for iteration in range(1, cfg.max_iter + 1):
        x_new = project(x + step * direction)
        moved = np.linalg.norm(x_new - x)
        x, value = x_new, float(fv @ x_new)
        if moved < cfg.tol:
            return x, value
    raise SolverFailureError(f"projected gradient did not converge in {cfg.max_iter} steps",
                             best_iterate=x, iterations=cfg.max_iter)


def separate_point(K, z, cfg: Optional[SolverConfig] = None) -> Vector:
    """Unit functional separating z from K, taken along z - proj_K(z).

    ``K`` is a set oracle with ``project`` or a bare projection callable.
    """
    cfg = cfg or DEFAULT_CONFIG
    zc = coords_of(z)
    if hasattr(K, "project"):
        y = coords_of(K.project(zc, cfg.tol)[0])
    else:
        y = np.asarray(K(zc), dtype=float)
    gap = zc - y
    dist = float(np.linalg.norm(gap))
    if dist <= cfg.tol:
        raise InvalidInputError("separate_point: the point lies in the set")
    return Vector(gap / dist)


def grid_argmin(objective: Callable[[np.ndarray], np.ndarray], lower: Sequence[float],
                upper: Sequence[float], step: float = 1e-3, levels: int = 1) -> Tuple[np.ndarray, float]:
    """Brute-force minimum over a regular grid in dimension <= 3.

    ``objective`` takes a (count, d) array and returns values, +inf outside
    the feasible set. Each extra level re-grids a box of two steps around the
    incumbent at a tenth of the step.
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if lower.size > 3:
        raise InvalidInputError("grid oracles are defined for dimension <= 3")

    best_point, best_value = None, np.inf
    for _ in range(levels):
        axes = [np.arange(lo, hi + 0.5 * step, step) for lo, hi in zip(lower, upper)]
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, lower.size)
        values = objective(mesh)
        i = int(np.argmin(values))
        if values[i] < best_value:
            best_point, best_value = mesh[i], float(values[i])
        if best_point is None:
            break
        lower, upper = best_point - 2 * step, best_point + 2 * step
        step /= 10.0
    return best_point, best_value
