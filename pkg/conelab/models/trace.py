from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from conelab.models.vector import Vector


@dataclass(frozen=True)
class AbbIterate:
    k: int
    delta: float
    x: Vector
    f: Vector
    support_residual: float
    distance_to_target: float
    margin: float
    in_dilated_cone: bool = True
    restricted: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            'k': self.k,
            'delta': self.delta,
            'distance_to_target': self.distance_to_target,
            'support_residual': self.support_residual,
            'margin': self.margin,
            'min_f': float(self.f.coords.min()),
            'in_dilated_cone': self.in_dilated_cone,
            'restricted': self.restricted,
            'x': ";".join(f"{v:.17g}" for v in self.x.coords),
            'f': ";".join(f"{v:.17g}" for v in self.f.coords),
        }


@dataclass(frozen=True)
class AbbTrace:
    target: Vector
    schedule: List[float]
    iterates: List[AbbIterate] = field(default_factory=list)

    @property
    def distances(self) -> List[float]:
        return [it.distance_to_target for it in self.iterates]

    @property
    def final_distance(self) -> float:
        return self.iterates[-1].distance_to_target if self.iterates else float("nan")

    def first_below(self, threshold: float) -> Optional[int]:
        """First k with distance to the target below threshold"""
        for it in self.iterates:
            if it.distance_to_target < threshold:
                return it.k
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'target': self.target.to_dict()['coords'],
            'schedule': list(self.schedule),
            'iterates': [it.to_dict() for it in self.iterates],
        }


@dataclass(frozen=True)
class ModulusReport:
    epsilon: float
    delta_hat: float
    witness: Optional[Vector]
    source: str = "search"
    upper_bound_only: bool = True
    dominated: bool = False
    strictly_maximal: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            'epsilon': self.epsilon,
            'delta_hat': self.delta_hat,
            'source': self.source,
            'upper_bound_only': self.upper_bound_only,
            'dominated': self.dominated,
            'strictly_maximal': self.strictly_maximal,
        }


@dataclass(frozen=True)
class DeltaCertificate:
    delta: float
    functional: Vector
    alpha: float
    sup_value: float
    level: float
    samples: int
    violations: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            'delta': self.delta,
            'alpha': self.alpha,
            'sup_value': self.sup_value,
            'level': self.level,
            'samples': self.samples,
            'violations': self.violations,
            'functional': ";".join(f"{v:.17g}" for v in self.functional.coords),
        }
