"""Approximation of a maximal point by positive points of dilated cones."""
import logging
from typing import List, Optional, Sequence

import numpy as np

from conelab.exceptions import InvalidInputError, InvalidParameterError, SolverFailureError
from conelab.models import AbbIterate, AbbTrace, GalleryRow, NormKind, Vector
from conelab.services.analysis.maximality import is_maximal
from conelab.services.cones import BaseSpec, ConeSpec, DilatedCone, OrthantCone, base_of, dilate, max_dilation
from conelab.services.sets import FlatSet, SetSpec
from conelab.services.solvers import SolverConfig, bisect_monotone, dykstra_project, projected_gradient_max

logger = logging.getLogger(__name__)

DEFAULT_START_FRACTION = 0.45
DEFAULT_STEPS = 20
MARGIN_FLOOR = 1e-6
RESTRICTED_ITER = 500


def default_schedule(base: BaseSpec, count: int = DEFAULT_STEPS) -> List[float]:
    """delta_k = 0.45 * inf_B ||b|| * 2^-k for k = 1..count"""
    delta0 = DEFAULT_START_FRACTION * base.min_norm
    return [delta0 * 2.0 ** -k for k in range(1, count + 1)]


def parse_schedule(text: str) -> List[float]:
    """Read "geom:delta0:ratio:count" or "list:a,b,c" """
    kind, _, body = text.partition(":")
    try:
        if kind == "geom":
            delta0, ratio, count = body.split(":")
            return [float(delta0) * float(ratio) ** k for k in range(1, int(count) + 1)]
        if kind == "list":
            return [float(v) for v in body.split(",") if v.strip()]
    except ValueError as e:
        raise InvalidParameterError(f"malformed schedule {text!r}: {str(e)}") from e
    raise InvalidParameterError(f"schedule must start with geom: or list:, got {text!r}")


def validate_schedule(schedule: Sequence[float], base: BaseSpec) -> List[float]:
    schedule = [float(d) for d in schedule]
    if not schedule:
        raise InvalidParameterError("dilation schedule is empty")
    limit = max_dilation(base)
    for previous, current in zip(schedule, schedule[1:]):
        if not current < previous:
            raise InvalidParameterError(f"dilation schedule must strictly decrease: {previous} then {current}")
    if schedule[-1] <= 0 or schedule[0] > limit:
        raise InvalidParameterError(f"dilations must lie in (0, {limit:.6g}]")
    return schedule


def tilt_functional(P_k: DilatedCone, normal: np.ndarray, base_hat: np.ndarray,
                    cfg: SolverConfig) -> np.ndarray:
    """Functional on the segment from the outer normal to the base functional.

    Takes the point closest to the normal whose dual margin on P_k exceeds
    MARGIN_FLOOR. The base functional end always qualifies for an admissible delta.
    """
    def tilt(t):
        return (1.0 - t) * normal + t * base_hat

    def positive(t):
        return P_k.dual_margin(tilt(t)) > MARGIN_FLOOR

    if not np.any(normal) or positive(0.0):
        return tilt(0.0) if np.any(normal) else base_hat.copy()
    if not positive(1.0):
        raise InvalidParameterError(f"delta={P_k.delta:g} leaves no strictly positive functional")
    t = bisect_monotone(lambda s: 1.0 if positive(s) else -1.0, 0.0, 1.0, cfg)
    t = min(1.0, t + cfg.tol)
    return tilt(t if positive(t) else 1.0)


def _restricted_maximize(K: SetSpec, P_k: DilatedCone, x_bar: np.ndarray, f: np.ndarray,
                         cfg: SolverConfig) -> np.ndarray:
    """argmax f over K intersected with x_bar + P_k"""
    inner = SolverConfig(tol=max(cfg.tol, 1e-9), max_iter=RESTRICTED_ITER, seed=cfg.seed)

    def project(y):
        return dykstra_project(y, [lambda v: K.project_coords(v, inner.tol),
                                   lambda v: x_bar + P_k.project_coords(v - x_bar, inner.tol)], inner)

    try:
        x, _ = projected_gradient_max(f, project, x_bar, inner, step=0.1)
    except SolverFailureError as e:
        if e.best_iterate is None:
            logger.warning(f"restricted maximization gave up, keeping x_bar: {str(e)}")
            return x_bar.copy()
        x = e.best_iterate
    return x


def abb_approximate(K: SetSpec, P: ConeSpec, base: BaseSpec, target, schedule: Optional[Sequence[float]] = None,
                    cfg: Optional[SolverConfig] = None, check_target: bool = True) -> AbbTrace:
    """Positive points x_k of the dilated cones P_k that converge to a maximal target.

    Each f_k is strictly positive on P_k and x_k maximizes f_k over K. If the
    maximizer leaves x_bar + P_k the maximization is restricted to that cone.
    """
    cfg = cfg or SolverConfig.from_env()
    if P.ambient != NormKind.L2 or K.ambient != NormKind.L2:
        raise InvalidParameterError("ABB approximation runs in l2")
    x_bar = K._coords(target)
    if not K.contains(x_bar, cfg.tol):
        raise InvalidInputError("target is not in the set")
    if check_target:
        cert = is_maximal(K, P, x_bar, cfg)
        if cert.verdict == "dominated":
            raise InvalidInputError("target is dominated, so it is not maximal")

    schedule = validate_schedule(default_schedule(base) if schedule is None else schedule, base)
    normal = K.normal_at(x_bar, cfg.tol)
    base_hat = base.f / np.linalg.norm(base.f)

    iterates = []
    for k, delta in enumerate(schedule, start=1):
        P_k = dilate(P, base, delta)
        f = tilt_functional(P_k, normal, base_hat, cfg)
        x, _ = K.linear_max_coords(f, cfg.tol)
        sup_value = float(f @ x)
        restricted = False
        in_cone = P_k.contains(x - x_bar, cfg.tol)
        if not in_cone:
            x = _restricted_maximize(K, P_k, x_bar, f, cfg)
            restricted = True
            in_cone = P_k.contains(x - x_bar, 1e-6)

        iterate = AbbIterate(
            k=k,
            delta=delta,
            x=Vector(x),
            f=Vector(f),
            support_residual=sup_value - float(f @ x),
            distance_to_target=float(np.linalg.norm(x - x_bar)),
            margin=P_k.dual_margin(f),
            in_dilated_cone=in_cone,
            restricted=restricted,
        )
        logger.debug(f"ABB k={k} delta={delta:.3g} |x_k - x_bar|={iterate.distance_to_target:.6g}"
                     f"{' (restricted)' if restricted else ''}")
        iterates.append(iterate)

    trace = AbbTrace(target=Vector(x_bar), schedule=schedule, iterates=iterates)
    logger.info(f"ABB on {K.family}: {len(iterates)} steps, final distance {trace.final_distance:.3g}")
    return trace


def abb_degradation_table(Ns: Sequence[int], threshold: float = 0.5, count: int = DEFAULT_STEPS,
                          cfg: Optional[SolverConfig] = None) -> List[GalleryRow]:
    """First k with ||x_k|| below threshold for kflat at x_bar = 0, as N grows"""
    cfg = cfg or SolverConfig.from_env()
    rows = []
    for N in sorted(Ns):
        K = FlatSet(N)
        P = OrthantCone(N)
        base = base_of(P, np.ones(N))
        trace = abb_approximate(K, P, base, np.zeros(N), default_schedule(base, count), cfg, check_target=False)
        first = trace.first_below(threshold)
        rows.append(GalleryRow(
            family="abb-degradation",
            n=N,
            values={
                'first_k_below': float(first) if first is not None else float("nan"),
                'final_distance': trace.final_distance,
                'threshold': threshold,
            },
            passed=first is not None,
            flags={'restricted': any(it.restricted for it in trace.iterates)},
        ))
    return rows
