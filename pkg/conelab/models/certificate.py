from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Union

from conelab.models.vector import Vector


@dataclass(frozen=True)
class Certificate:
    """Outcome of an analysis check.

    ``verdict`` is a tag ("maximal", "dominated", "inconclusive") or a boolean
    for support checks. When the verdict reports a failure the witness is set
    and the residuals are exactly what replay recomputes from it.
    """
    kind: str
    verdict: Union[str, bool]
    witness: Optional[Vector] = None
    functional: Optional[Vector] = None
    residuals: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'kind': self.kind,
            'verdict': self.verdict,
            'witness': self.witness.to_dict()['coords'] if self.witness is not None else None,
            'functional': self.functional.to_dict()['coords'] if self.functional is not None else None,
            'residuals': dict(self.residuals),
        }
