import logging
import math
from typing import Optional, Tuple

import numpy as np

from conelab.exceptions import (
    InvalidInputError,
    InvalidParameterError,
    SolverFailureError,
    TruncationSaturatedError,
)
from conelab.models import Certificate, Vector, coords_of
from conelab.services.cones import BaseSpec, ConeSpec
from conelab.services.sets import FlatSet, SetSpec
from conelab.services.solvers import SolverConfig, ray_length
from conelab.services.spaces import batch_norm, norm

logger = logging.getLogger(__name__)

REPLAY_TOL = 1e-12


def dominance_threshold(tol: float) -> float:
    """Smallest step counted as domination; rounding on curved boundaries allows steps near sqrt(tol)"""
    return max(10.0 * tol, 10.0 * math.sqrt(tol))


def _search_directions(K: SetSpec, P: ConeSpec, cfg: SolverConfig) -> np.ndarray:
    candidates = np.vstack([P.rays(), P.sample(4 * cfg.multistarts, seed=cfg.seed)])
    lengths = batch_norm(candidates, K.ambient)
    keep = lengths > 0
    return candidates[keep] / lengths[keep][:, None]


def is_maximal(K: SetSpec, P: ConeSpec, x, cfg: Optional[SolverConfig] = None) -> Certificate:
    """Look for y in K with y - x in P and ||y - x|| above the dominance threshold.

    Line searches run along cone rays and samples, then along directions
    recovered by alternating projections between K and x + P. A found step is
    returned as a "dominated" certificate; "maximal" means none was found.
    """
    cfg = cfg or SolverConfig.from_env()
    xc = K._coords(x)
    if not K.contains(xc, cfg.tol):
        raise InvalidInputError(f"is_maximal: point is not in {K.family} (violation {K.violation(xc):.3g})")

    threshold = dominance_threshold(cfg.tol)
    member_tol = 0.0 if K.contains(xc, 0.0) else cfg.tol
    radius = K.radius_bound()
    t_max = 2.0 * radius if math.isfinite(radius) else 2.0 * (norm(xc, K.ambient) + 1.0) * 1e3

    def feasible(y):
        return K.violation(y) <= member_tol

    best_t, best_d = 0.0, None
    directions = _search_directions(K, P, cfg)
    try:
        for d in directions:
            t = ray_length(feasible, xc, d, t_max, cfg)
            if t > best_t:
                best_t, best_d = t, d

        if best_t <= threshold:
            starts = P.sample(cfg.multistarts, seed=cfg.seed + 1)
            for start in starts:
                length = norm(start, K.ambient)
                if length == 0:
                    continue
                s = xc + t_max * start / length
                for _ in range(cfg.alt_iter):
                    s = K.project_coords(s, cfg.tol)
                    s = xc + P.project_coords(s - xc, cfg.tol)
                d = P.project_coords(K.project_coords(s, cfg.tol) - xc, cfg.tol)
                length = norm(d, K.ambient)
                if length == 0:
                    continue
                d = d / length
                t = ray_length(feasible, xc, d, t_max, cfg)
                if t > best_t:
                    best_t, best_d = t, d
    except SolverFailureError as e:
        logger.warning(f"❌ is_maximal inconclusive on {K.family}: {str(e)}")
        return Certificate(kind="maximality", verdict="inconclusive",
                           residuals={'best_step': best_t, 'threshold': threshold, 'tol': cfg.tol})

    if best_t > threshold:
        y = xc + best_t * best_d
        residuals = {
            'distance': norm(y - xc, K.ambient),
            'set_violation': K.violation(y),
            'cone_violation': P.distance(y - xc, cfg.tol),
            'threshold': threshold,
            'tol': cfg.tol,
        }
        logger.debug(f"{K.family}: dominated by a step of length {best_t:.6g}")
        return Certificate(kind="maximality", verdict="dominated", witness=Vector(y, K.ambient), residuals=residuals)

    return Certificate(kind="maximality", verdict="maximal", residuals={
        'best_step': best_t,
        'directions': float(len(directions)),
        'threshold': threshold,
        'tol': cfg.tol,
    })


def nonmax_certificate_flat(x, N: Optional[int] = None, radius: Optional[float] = None,
                            tol: float = 1e-9) -> Tuple[int, float, Vector]:
    """Dominating step x + eps*e_n0 for a point of K_flat with x_1 < 0.

    n0 is the unsaturated index (x_n^2 != |x_1|) with the smallest |x_n|,
    eps = (sqrt|x_1| - |x_n0|) / 2, shrunk to keep y inside rB when a radius is given.
    """
    xc = coords_of(x)
    N = N or xc.size
    if xc.size > N:
        raise InvalidInputError(f"point has {xc.size} coordinates but N = {N}")
    xc = np.concatenate([xc, np.zeros(N - xc.size)])
    K = FlatSet(N, radius)
    if not K.contains(xc, tol):
        raise InvalidInputError("point is not in kflat")
    if xc[0] >= -tol:
        raise InvalidInputError("nonmax certificate needs x_1 < 0")

    s = -xc[0]
    tail = np.abs(xc[1:])
    unsaturated = np.nonzero(np.abs(tail ** 2 - s) > tol)[0]
    if unsaturated.size == 0:
        raise TruncationSaturatedError(f"every index 2..{N} satisfies x_n^2 = |x_1|")
    i = int(unsaturated[np.argmin(tail[unsaturated])])
    n0 = i + 2
    eps = 0.5 * (math.sqrt(s) - tail[i])

    if radius is not None:
        room = radius ** 2 - float(xc @ xc)
        eps = min(eps, -xc[n0 - 1] + math.sqrt(max(xc[n0 - 1] ** 2 + room, 0.0)))
        if eps <= tol:
            raise InvalidInputError(f"no room inside the ball of radius {radius} along e_{n0}")

    y = xc.copy()
    y[n0 - 1] += eps
    logger.debug(f"nonmax certificate: n0={n0} eps={eps:.6g}")
    return n0, float(eps), Vector(y)


def pos_support_check(K: SetSpec, P: ConeSpec, x, f, cfg: Optional[SolverConfig] = None) -> Certificate:
    """x is positive for f when f is strictly positive on P and f attains sup f(K) at x"""
    cfg = cfg or SolverConfig.from_env()
    xc = K._coords(x)
    fc = K._coords(f)
    if not K.contains(xc, cfg.tol):
        raise InvalidInputError("pos_support_check: point is not in the set")

    margin = P.dual_margin(fc)
    maximizer, sup_value = K.linear_maximize(fc, cfg.tol)
    value_at_x = float(fc @ xc)
    supported = sup_value <= value_at_x + cfg.tol
    verdict = bool(margin > cfg.tol and supported)

    residuals = {
        'margin': margin,
        'sup_value': sup_value,
        'value_at_x': value_at_x,
        'gap': sup_value - value_at_x,
        'set_violation': K.violation(maximizer),
        'tol': cfg.tol,
    }
    return Certificate(kind="support", verdict=verdict,
                       witness=None if supported else maximizer,
                       functional=Vector(fc), residuals=residuals)


def find_positive_point(K: SetSpec, P: ConeSpec, base: BaseSpec, f=None,
                        cfg: Optional[SolverConfig] = None) -> Tuple[Vector, Vector]:
    """Maximize a strictly positive functional over K; the maximizer is a positive point"""
    cfg = cfg or SolverConfig.from_env()
    if not base.bounded:
        raise InvalidParameterError("find_positive_point needs a cone with a bounded base")
    f0 = base.functional if f is None else Vector(K._coords(f))
    x0, _ = K.linear_maximize(f0, cfg.tol)
    cert = pos_support_check(K, P, x0, f0, cfg)
    if not cert.verdict:
        raise InvalidParameterError(
            f"functional does not certify a positive point (margin {cert.residuals['margin']:.3g})"
        )
    logger.debug(f"positive point on {K.family}: sup value {cert.residuals['sup_value']:.12g}")
    return Vector(x0.coords, K.ambient), Vector(f0.coords)


def replay_certificate(cert: Certificate, K: SetSpec, P: ConeSpec, x, tol: float = REPLAY_TOL) -> bool:
    """Recompute a certificate's residuals from its witness using only oracle calls"""
    if cert.witness is None:
        return True
    xc = K._coords(x)
    w = cert.witness.coords
    recorded = cert.residuals
    member_tol = recorded.get('tol', 1e-9)

    if cert.kind == "maximality":
        recomputed = {
            'distance': norm(w - xc, K.ambient),
            'set_violation': K.violation(w),
            'cone_violation': P.distance(w - xc, member_tol),
        }
        valid = (recomputed['set_violation'] <= member_tol
                 and recomputed['cone_violation'] <= member_tol
                 and recomputed['distance'] > recorded['threshold'])
    elif cert.kind == "support":
        fc = cert.functional.coords
        recomputed = {
            'gap': float(fc @ w) - float(fc @ xc),
            'set_violation': K.violation(w),
        }
        valid = recomputed['set_violation'] <= member_tol and recomputed['gap'] > member_tol
    else:
        raise InvalidParameterError(f"unknown certificate kind: {cert.kind}")

    drift = max(abs(recorded[key] - value) for key, value in recomputed.items())
    if drift > tol or not valid:
        logger.warning(f"❌ certificate replay failed: drift {drift:.3g}, valid={valid}")
        return False
    return True
