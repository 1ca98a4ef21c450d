import logging
import math
from typing import Callable, Dict, List, Optional

import numpy as np

from conelab.exceptions import InvalidInputError, InvalidParameterError
from conelab.models import GalleryRow, NormKind
from conelab.services.analysis.families import (
    flat_witness,
    minus_slanted_witness,
    slab_witness,
    slanted_partner,
    triple_start_index,
    triple_witness,
)
from conelab.services.cones import OrthantCone, SlantedCone
from conelab.services.sets import FlatSet, MinusSlantedSet, SlabSet, TripleBallSet
from conelab.services.spaces import alpha_N, norm, weak_null_gap

logger = logging.getLogger(__name__)

GALLERY_FAMILIES = ("flat", "minus-slanted", "slab", "triple", "weak-null")
FAMILY_ALIASES = {"prop37": "flat", "prop33": "minus-slanted", "ex34": "slab", "prop36": "triple"}
TRIPLE_GAP_TOL = 1e-6


def resolve_family(name: str) -> str:
    name = FAMILY_ALIASES.get(name.lower(), name.lower())
    if name not in GALLERY_FAMILIES:
        known = ", ".join(GALLERY_FAMILIES + tuple(FAMILY_ALIASES))
        raise InvalidParameterError(f"unknown gallery family: {name} (expected one of {known})")
    return name


def _flat_rows(n_max: int, N: int, tol: float, **_) -> List[GalleryRow]:
    K = FlatSet(N)
    P = OrthantCone(N)
    rows = []
    for n in range(1, n_max + 1):
        z = flat_witness(n, N)
        dist = P.project(z, tol)[1]
        bound = 1.0 / (math.sqrt(2.0) * n)
        z_norm = float(np.linalg.norm(z))
        in_set = K.contains(z, tol)
        rows.append(GalleryRow(
            family="flat",
            n=n,
            values={'norm_sq': z_norm ** 2, 'norm_sq_closed_form': 1.0 / (2.0 * n * n) + 0.5,
                    'dist_to_cone': dist, 'bound': bound},
            passed=bool(in_set and dist <= bound + tol and z_norm >= 1.0 / math.sqrt(2.0) - tol),
            flags={'in_set': in_set, 'matches_closed_form': abs(dist - bound) <= 1e-9},
        ))
    return rows


def _minus_slanted_rows(n_max: int, N: int, tol: float, **_) -> List[GalleryRow]:
    K = MinusSlantedSet(N)
    S = SlantedCone(N)
    rows = []
    for n in range(1, n_max + 1):
        z = minus_slanted_witness(n, N)
        w = slanted_partner(n, N)
        dist_pair = float(np.linalg.norm(z - w))
        dist_cone = S.distance(z, tol)
        bound = 1.0 / (n + 1)
        z_norm = float(np.linalg.norm(z))
        in_set = K.contains(z, tol)
        partner_in_cone = S.contains(w, tol)
        rows.append(GalleryRow(
            family="minus-slanted",
            n=n,
            values={'norm_sq': z_norm ** 2, 'dist_to_partner': dist_pair,
                    'dist_to_cone': dist_cone, 'bound': bound},
            passed=bool(in_set and partner_in_cone and dist_cone <= bound + tol and z_norm >= 0.5 - tol),
            flags={'in_set': in_set, 'partner_in_cone': partner_in_cone},
        ))
    return rows


def _slab_rows(n_max: int, N: int, tol: float, **_) -> List[GalleryRow]:
    K = SlabSet(N)
    P = OrthantCone(N, NormKind.L1)
    f = 1.0 / np.arange(1, N + 1)
    rows = []
    for n in range(2, n_max + 1):
        x = slab_witness(n, N)
        f_value = float(f @ x)
        norm_l1 = norm(x, NormKind.L1)
        dist = P.distance(x, tol)
        bound = 1.0 / n
        in_set = K.contains(x, tol)
        rows.append(GalleryRow(
            family="slab",
            n=n,
            values={'f_value': f_value, 'norm_l1': norm_l1, 'dist_to_cone': dist, 'bound': bound},
            passed=bool(in_set and abs(f_value) <= tol and dist <= bound + tol and norm_l1 >= 1.0 - tol),
            flags={'in_set': in_set},
        ))
    return rows


def _triple_rows(n_max: int, N: int, tol: float, x: Optional[np.ndarray] = None, **_) -> List[GalleryRow]:
    K = TripleBallSet(N)
    P = OrthantCone(N, NormKind.TRIPLE)
    if x is None:
        x = np.zeros(N)
        x[0] = 2.0 / 3.0
    x = np.asarray(x, dtype=float)
    if x.size != N or abs(norm(x, NormKind.TRIPLE) - 1.0) > 1e-9:
        raise InvalidInputError("the triple family starts from a point of the unit sphere")

    alpha = alpha_N(N)
    bound = 1.0 / (2.0 * alpha)
    n0 = triple_start_index(x, alpha)
    if n0 > n_max:
        raise InvalidParameterError(f"first admissible index is {n0}, beyond n_max = {n_max}")

    rows = []
    previous_beta = math.inf
    for n in range(n0, n_max + 1):
        z, shifted, beta = triple_witness(x, n, alpha)
        gap = norm(z - x, NormKind.TRIPLE)
        in_set = K.contains(z, tol)
        monotone = beta <= previous_beta + 1e-12
        rows.append(GalleryRow(
            family="triple",
            n=n,
            values={'beta': beta, 'dist_to_shift': norm(z - shifted, NormKind.TRIPLE),
                    'gap': gap, 'bound': bound, 'dist_to_cone': P.distance(z - x, tol), 'n0': float(n0)},
            passed=bool(in_set and beta >= 1.0 - tol and gap >= bound - TRIPLE_GAP_TOL),
            flags={'in_set': in_set, 'beta_nonincreasing': monotone},
        ))
        previous_beta = beta
    return rows


def _weak_null_rows(n_max: int, N: int, tol: float, probe_count: int = 3, **_) -> List[GalleryRow]:
    """Coordinate probes along the flat witnesses, which tend weakly to a vector of norm 1/sqrt(2)"""
    family = [flat_witness(n, N) for n in range(1, n_max + 1)]
    return weak_null_gap(family, min(probe_count, N))


ROW_BUILDERS: Dict[str, Callable[..., List[GalleryRow]]] = {
    "flat": _flat_rows,
    "minus-slanted": _minus_slanted_rows,
    "slab": _slab_rows,
    "triple": _triple_rows,
    "weak-null": _weak_null_rows,
}


def gallery(family: str, n_max: int, N: int, tol: float = 1e-9, **options) -> List[GalleryRow]:
    """Table of one counterexample family for n up to n_max inside R^N"""
    name = resolve_family(family)
    if n_max < 1:
        raise InvalidParameterError(f"n_max must be at least 1, got {n_max}")
    if n_max + 1 > N:
        raise InvalidParameterError(f"gallery needs n_max + 1 <= N, got n_max={n_max}, N={N}")
    rows = ROW_BUILDERS[name](n_max, N, tol, **options)
    failed = sum(not row.passed for row in rows)
    if failed:
        logger.warning(f"❌ gallery {name}: {failed} of {len(rows)} rows failed")
    else:
        logger.info(f"✅ gallery {name}: {len(rows)} rows passed")
    return rows
