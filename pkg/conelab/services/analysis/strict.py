import logging
import math
from dataclasses import replace
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from conelab.exceptions import InvalidInputError, InvalidParameterError, SeparationError
from conelab.models import DeltaCertificate, GalleryRow, ModulusReport, NormKind, Vector
from conelab.services.analysis.families import (
    flat_witness,
    minus_slanted_witness,
    saturated_flat_witness,
    saturated_minus_slanted_witness,
    slab_witness,
    triple_start_index,
    triple_witness,
)
from conelab.services.analysis.maximality import is_maximal
from conelab.services.cones import BaseSpec, ConeSpec
from conelab.services.sets import FlatSet, MinusSlantedSet, SetSpec, SlabSet, TripleBallSet, make_set
from conelab.services.solvers import SolverConfig
from conelab.services.spaces import alpha_N, batch_norm, norm

logger = logging.getLogger(__name__)

CONVERGENCE_SPREAD = 1e-6
SLSQP_MAX_ITER = 200
SWEEP_FAMILIES = ("kflat", "kminusp", "kslab")

Candidate = Tuple[float, np.ndarray, str]


def _family_candidates(K: SetSpec, x: np.ndarray, epsilon: float) -> List[Tuple[np.ndarray, str]]:
    """Closed-form far points of K for the known extremal families"""
    N = K.dim
    at_origin = not np.any(x)
    points: List[Tuple[np.ndarray, str]] = []

    if isinstance(K, FlatSet) and at_origin:
        points += [(flat_witness(n, N), f"family n={n}") for n in range(1, N)]
        try:
            points.append((saturated_flat_witness(N, epsilon, K.radius_bound()), "saturated"))
        except InvalidParameterError:
            pass
    elif isinstance(K, MinusSlantedSet) and at_origin:
        points += [(minus_slanted_witness(n, N), f"family n={n}") for n in range(1, N)]
        if epsilon <= K.radius_bound():
            points.append((saturated_minus_slanted_witness(N, epsilon), "saturated"))
    elif isinstance(K, SlabSet) and at_origin:
        points += [(slab_witness(n, N), f"family n={n}") for n in range(2, N + 1)]
    elif isinstance(K, TripleBallSet) and abs(norm(x, NormKind.TRIPLE) - 1.0) <= 1e-9:
        alpha = alpha_N(N)
        points += [(triple_witness(x, n, alpha)[0], f"family n={n}")
                   for n in range(triple_start_index(x, alpha), N + 1)]
    return points


def _verified(K: SetSpec, x: np.ndarray, z: np.ndarray, epsilon: float, tol: float) -> bool:
    return K.contains(z, tol) and norm(z - x, K.ambient) >= epsilon - tol


def _gap_direction(z: np.ndarray, projected: np.ndarray) -> np.ndarray:
    gap = z - projected
    length = np.linalg.norm(gap)
    return gap / length if length > 0 else np.zeros_like(z)


def _repair(K: SetSpec, x: np.ndarray, z: np.ndarray, epsilon: float, tol: float) -> np.ndarray:
    """Pull an SLSQP end point back into K and out to distance epsilon"""
    if not K.contains(z, tol):
        z = K.project_coords(z, tol)
    gap = z - x
    length = norm(gap, K.ambient)
    if 0 < length < epsilon:
        z = K.project_coords(x + gap * (epsilon / length), tol)
    return z


def _refine(K: SetSpec, P: ConeSpec, x: np.ndarray, z: np.ndarray, epsilon: float,
            cfg: SolverConfig) -> Candidate:
    """Minimize d(w - x, P) over w in K with ||w - x|| >= epsilon by SLSQP, started at z.

    Gradients are analytic for Euclidean sets and cones and finite differences otherwise.
    """
    start_value = P.distance(z - x, cfg.tol)
    euclid = K.ambient == NormKind.L2 and P.ambient == NormKind.L2

    def objective(w):
        return P.distance(w - x, cfg.tol)

    def objective_grad(w):
        u = w - x
        return _gap_direction(u, P.project_coords(u, cfg.tol))

    def inside(w):
        return -float(np.linalg.norm(w - K.project_coords(w, cfg.tol)))

    def inside_grad(w):
        return -_gap_direction(w, K.project_coords(w, cfg.tol))

    def far(w):
        return norm(w - x, K.ambient) - epsilon

    def far_grad(w):
        return _gap_direction(w, x)

    constraints = [{'type': 'ineq', 'fun': inside}, {'type': 'ineq', 'fun': far}]
    if euclid:
        constraints[0]['jac'] = inside_grad
        constraints[1]['jac'] = far_grad

    result = minimize(objective, z, jac=objective_grad if euclid else None, method="SLSQP",
                      constraints=constraints,
                      options={'maxiter': SLSQP_MAX_ITER, 'ftol': cfg.tol})
    w = np.asarray(result.x, dtype=float)
    if np.all(np.isfinite(w)):
        w = _repair(K, x, w, epsilon, cfg.tol)
    if np.all(np.isfinite(w)) and _verified(K, x, w, epsilon, cfg.tol):
        value = objective(w)
        if value < start_value:
            return value, w, "search"
    logger.debug(f"{K.family}: SLSQP kept its start ({result.message})")
    return start_value, z, "search"


def _sampled_search(K: SetSpec, P: ConeSpec, x: np.ndarray, epsilon: float,
                    cfg: SolverConfig) -> List[Candidate]:
    pool = K.sample(max(64 * cfg.multistarts, 512), seed=cfg.seed)
    far = pool[batch_norm(pool - x, K.ambient) >= epsilon]
    if far.shape[0] == 0:
        return []
    values = P.batch_distance(far - x, cfg.tol)
    order = np.argsort(values, kind="stable")[:cfg.multistarts]
    return [_refine(K, P, x, far[i], epsilon, cfg) for i in order]


def strict_max_modulus(K: SetSpec, P: ConeSpec, x, epsilon: float,
                       cfg: Optional[SolverConfig] = None, search: bool = True) -> ModulusReport:
    """Estimate inf { d(z - x, P) : z in K, ||z - x|| >= epsilon } from above.

    Analytic witness families are combined with a sampled multistart search;
    only candidates that pass the membership and distance checks are counted.
    """
    cfg = cfg or SolverConfig.from_env()
    if not epsilon > 0:
        raise InvalidParameterError(f"epsilon must be positive, got {epsilon}")
    xc = K._coords(x)

    cert = is_maximal(K, P, xc, cfg)
    if cert.verdict == "dominated":
        return ModulusReport(epsilon=epsilon, delta_hat=0.0, witness=cert.witness, source="dominated",
                             upper_bound_only=False, dominated=True, strictly_maximal=False)

    candidates: List[Candidate] = []
    family = [(z, label) for z, label in _family_candidates(K, xc, epsilon)
              if _verified(K, xc, z, epsilon, cfg.tol)]
    if family:
        values = P.batch_distance(np.array([z for z, _ in family]) - xc, cfg.tol)
        candidates += [(float(v), z, label) for v, (z, label) in zip(values, family)]

    searched = _sampled_search(K, P, xc, epsilon, cfg) if search else []
    candidates += searched

    if not candidates:
        logger.info(f"{K.family}: no point of K lies {epsilon:g} away from x")
        return ModulusReport(epsilon=epsilon, delta_hat=math.inf, witness=None, source="empty",
                             upper_bound_only=False, strictly_maximal=True)

    best_value, best_z, source = min(candidates, key=lambda c: c[0])
    finals = [value for value, _, _ in searched]
    converged = (len(finals) == cfg.multistarts
                 and max(finals) - min(finals) <= CONVERGENCE_SPREAD
                 and min(finals) <= best_value + CONVERGENCE_SPREAD)
    logger.debug(f"{K.family} eps={epsilon:g}: delta_hat={best_value:.6g} from {source}")
    return ModulusReport(
        epsilon=epsilon,
        delta_hat=float(best_value),
        witness=Vector(best_z, K.ambient),
        source=source,
        upper_bound_only=not converged,
        dominated=False,
        strictly_maximal=best_value > cfg.tol,
    )


def modulus_profile(K: SetSpec, P: ConeSpec, x, epsilons: Sequence[float],
                    cfg: Optional[SolverConfig] = None, search: bool = True) -> List[ModulusReport]:
    """Reports for several epsilons, made nonincreasing toward small epsilon.

    A witness found at a larger epsilon is also admissible at every smaller one.
    """
    cfg = cfg or SolverConfig.from_env()
    by_epsilon = {}
    best: Optional[ModulusReport] = None
    for epsilon in sorted(set(epsilons), reverse=True):
        report = strict_max_modulus(K, P, x, epsilon, cfg, search)
        if best is not None and best.delta_hat < report.delta_hat:
            report = replace(report, delta_hat=best.delta_hat, witness=best.witness,
                             source=f"carried from eps={best.epsilon:g}",
                             strictly_maximal=best.delta_hat > cfg.tol)
        by_epsilon[epsilon] = report
        best = report
    return [by_epsilon[epsilon] for epsilon in epsilons]


def modulus_bound(family: str, N: int) -> float:
    """Closed-form upper bound on the modulus at x = 0 from the witness families"""
    if family == "kflat":
        return 1.0 / (math.sqrt(2.0) * (N - 1))
    if family in ("kminusp", "kslab"):
        return 1.0 / N
    raise InvalidParameterError(f"no closed-form modulus bound for {family}")


def modulus_sweep(family: str, Ns: Sequence[int], epsilon: float,
                  cfg: Optional[SolverConfig] = None, search: bool = True) -> List[GalleryRow]:
    """delta_hat at x = 0 across truncation dimensions"""
    cfg = cfg or SolverConfig.from_env()
    if family not in SWEEP_FAMILIES:
        raise InvalidParameterError(f"modulus sweeps cover {', '.join(SWEEP_FAMILIES)}, got {family}")
    rows = []
    previous = math.inf
    for N in sorted(Ns):
        K = make_set(family, N)
        P = K.default_cone()
        report = strict_max_modulus(K, P, np.zeros(N), epsilon, cfg, search)
        bound = modulus_bound(family, N)
        decreasing = report.delta_hat < previous
        rows.append(GalleryRow(
            family=f"sweep-{family}",
            n=N,
            values={'epsilon': epsilon, 'delta_hat': report.delta_hat, 'bound': bound},
            passed=bool(report.delta_hat <= bound + cfg.tol and decreasing),
            flags={'upper_bound_only': report.upper_bound_only, 'decreasing': decreasing},
        ))
        previous = report.delta_hat
    return rows


def _closest_pair(project_a, project_b, start: np.ndarray, cfg: SolverConfig) -> Tuple[np.ndarray, np.ndarray]:
    b = project_b(start)
    for _ in range(min(cfg.max_iter, 10000)):
        a = project_a(b)
        b_new = project_b(a)
        if np.linalg.norm(b_new - b) < cfg.tol:
            b = b_new
            break
        b = b_new
    return project_a(b), b


def stmax_delta_certificate(K: SetSpec, P: ConeSpec, base: BaseSpec, x_bar, epsilon: float,
                            cfg: Optional[SolverConfig] = None) -> DeltaCertificate:
    """delta > 0 with d(z, P) >= delta for every z in K - x_bar of norm above epsilon.

    The base is rescaled to norm at most epsilon/3, then a functional
    separating K - x_bar from the base gives delta = min(alpha, epsilon/3),
    where alpha is the smallest value of the functional on the base.
    """
    cfg = cfg or SolverConfig.from_env()
    if not epsilon > 0:
        raise InvalidParameterError(f"epsilon must be positive, got {epsilon}")
    if K.ambient != NormKind.L2 or P.ambient != NormKind.L2:
        raise InvalidParameterError("delta certificates are computed in l2")
    xc = K._coords(x_bar)
    if not K.contains(xc, cfg.tol):
        raise InvalidInputError("x_bar is not in the set")

    if base.sup_norm > epsilon / 3.0:
        base = base.rescaled(base.level * (epsilon / 3.0) / base.sup_norm)

    c, b = _closest_pair(
        lambda y: K.project_coords(y + xc, cfg.tol) - xc,
        lambda y: base.project(y, cfg.tol),
        np.zeros(K.dim),
        cfg,
    )
    gap = b - c
    length = float(np.linalg.norm(gap))
    if length <= cfg.tol:
        raise SeparationError("the base meets K - x_bar, so x_bar is not strictly maximal")

    f = gap / length
    alpha = base.min_functional(f)
    sup_value = K.linear_maximize(f, cfg.tol)[1] - float(f @ xc)
    if not sup_value < alpha - cfg.tol:
        raise SeparationError(
            f"functional does not separate: sup {sup_value:.6g} vs alpha {alpha:.6g}",
            functional=Vector(f), sup_value=sup_value, alpha=alpha,
        )

    delta = min(alpha, epsilon / 3.0)
    shifted = K.sample(cfg.samples, seed=cfg.seed) - xc
    far = batch_norm(shifted, K.ambient) > epsilon
    violations = 0
    if np.any(far):
        violations = int(np.count_nonzero(P.batch_distance(shifted[far], cfg.tol) < delta))
    if violations:
        logger.warning(f"❌ delta certificate: {violations} sampled points closer than {delta:.6g}")
    else:
        logger.info(f"✅ delta certificate: delta={delta:.12g} alpha={alpha:.12g}")
    return DeltaCertificate(delta=delta, functional=Vector(f), alpha=alpha, sup_value=sup_value,
                            level=base.level, samples=int(shifted.shape[0]), violations=violations)
