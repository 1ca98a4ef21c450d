from dataclasses import dataclass, field
from typing import Any, Dict


@dataclass(frozen=True)
class GalleryRow:
    family: str
    n: int
    values: Dict[str, float] = field(default_factory=dict)
    passed: bool = True
    flags: Dict[str, bool] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        row: Dict[str, Any] = {'family': self.family, 'n': self.n}
        row.update(self.values)
        row.update(self.flags)
        row['passed'] = self.passed
        return row
