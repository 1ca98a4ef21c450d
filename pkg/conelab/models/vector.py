"""Finite truncations of sequence-space elements."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Iterable, Optional, Union

import numpy as np

from conelab.exceptions import DimensionMismatchError, InvalidInputError


class NormKind(str, Enum):
    L2 = "L2"
    L1 = "L1"
    SUP = "SUP"
    TRIPLE = "TRIPLE"  # sup-norm plus the l2-norm of T(x), T(x)_n = x_n / 2^n

    @classmethod
    def parse(cls, value: Union[str, "NormKind"]) -> "NormKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise InvalidInputError(f"unknown norm kind: {value}")


@dataclass(frozen=True, eq=False)
class Vector:
    coords: np.ndarray
    ambient: NormKind = NormKind.L2

    def __post_init__(self):
        coords = np.array(self.coords, dtype=float).reshape(-1)
        if coords.size == 0:
            raise InvalidInputError("vector of dimension 0")
        if not np.all(np.isfinite(coords)):
            raise InvalidInputError("vector has non-finite coordinates")
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "ambient", NormKind.parse(self.ambient))

    @property
    def N(self) -> int:
        return int(self.coords.size)

    @classmethod
    def zeros(cls, N: int, ambient: NormKind = NormKind.L2) -> "Vector":
        if N < 1:
            raise InvalidInputError("vector of dimension 0")
        return cls(np.zeros(N), ambient)

    @classmethod
    def basis(cls, n: int, N: int, ambient: NormKind = NormKind.L2) -> "Vector":
        """e_n with 1-based n"""
        if not 1 <= n <= N:
            raise InvalidInputError(f"basis index {n} outside 1..{N}")
        coords = np.zeros(N)
        coords[n - 1] = 1.0
        return cls(coords, ambient)

    @classmethod
    def from_values(cls, values: Iterable[float], N: Optional[int] = None,
                    ambient: NormKind = NormKind.L2) -> "Vector":
        """Build from a value list, zero-padded to N"""
        coords = np.array(list(values), dtype=float)
        if N is not None:
            if coords.size > N:
                raise DimensionMismatchError(coords.size, N)
            coords = np.concatenate([coords, np.zeros(N - coords.size)])
        return cls(coords, ambient)

    def with_ambient(self, ambient: NormKind) -> "Vector":
        return Vector(self.coords, ambient)

    def _check(self, other: "Vector"):
        if self.N != other.N:
            raise DimensionMismatchError(self.N, other.N)
        if self.ambient != other.ambient:
            raise InvalidInputError(f"ambient mismatch: {self.ambient.value} != {other.ambient.value}")

    def __add__(self, other: "Vector") -> "Vector":
        self._check(other)
        return Vector(self.coords + other.coords, self.ambient)

    def __sub__(self, other: "Vector") -> "Vector":
        self._check(other)
        return Vector(self.coords - other.coords, self.ambient)

    def __mul__(self, scalar: float) -> "Vector":
        return Vector(self.coords * float(scalar), self.ambient)

    __rmul__ = __mul__

    def __neg__(self) -> "Vector":
        return Vector(-self.coords, self.ambient)

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, Vector):
            return NotImplemented
        return self.ambient == other.ambient and np.array_equal(self.coords, other.coords)

    def __hash__(self) -> int:
        return hash((self.ambient, self.coords.tobytes()))

    def __len__(self) -> int:
        return self.N

    def __getitem__(self, n: int) -> float:
        """1-based coordinate access, matching x_n"""
        if not 1 <= n <= self.N:
            raise IndexError(n)
        return float(self.coords[n - 1])

    def to_dict(self) -> Dict[str, Any]:
        return {
            'ambient': self.ambient.value,
            'N': self.N,
            'coords': [float(v) for v in self.coords],
        }


def as_vector(x: Union[Vector, Iterable[float], np.ndarray], ambient: Optional[NormKind] = None) -> Vector:
    if isinstance(x, Vector):
        return x if ambient is None or x.ambient == ambient else x.with_ambient(ambient)
    return Vector(np.asarray(x, dtype=float), ambient or NormKind.L2)


def coords_of(x: Union[Vector, Iterable[float], np.ndarray]) -> np.ndarray:
    if isinstance(x, Vector):
        return x.coords
    arr = np.asarray(x, dtype=float).reshape(-1)
    if arr.size == 0:
        raise InvalidInputError("vector of dimension 0")
    return arr
