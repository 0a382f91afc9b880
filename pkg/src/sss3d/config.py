"""Robot configurations: a position and a direction on the square model."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .s2atlas import CubePoint, lift_to_sphere, project_to_cube


@dataclass(frozen=True, eq=False)
class Config:
    position: np.ndarray
    direction: CubePoint

    def __post_init__(self):
        p = np.asarray(self.position, dtype=float).reshape(3)
        if not np.all(np.isfinite(p)):
            raise ValueError("position must be finite")
        object.__setattr__(self, "position", p)

    @classmethod
    def from_vectors(cls, position, direction) -> "Config":
        return cls(np.asarray(position, dtype=float), project_to_cube(direction))

    @property
    def unit_direction(self) -> np.ndarray:
        return lift_to_sphere(self.direction)

    def as_list(self):
        """``[x, y, z, dx, dy, dz]`` with a unit direction."""
        return [float(x) for x in self.position] + [float(x) for x in self.unit_direction]

    def __eq__(self, other):
        return (isinstance(other, Config) and np.array_equal(self.position, other.position)
                and self.direction == other.direction)

    def __repr__(self):
        p = ", ".join(f"{x:g}" for x in self.position)
        return f"Config(({p}), {self.direction.face_name} {self.direction.u:g},{self.direction.v:g})"
