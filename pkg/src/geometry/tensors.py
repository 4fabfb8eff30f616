"""
Pointwise Tensor Samples
Component arrays of tensors and connections at a single chart point
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from .errors import DimensionError, MissingPartialsError


class Slot(Enum):
    """Index variance of one tensor slot"""
    UP = "up"
    DOWN = "down"
    MESH = "mesh"  # Latin frame label, no connection terms


@dataclass(frozen=True, eq=False)
class TensorSample:
    """Dense components of a tensor at a point, optionally with first partials

    components has shape (n,) * rank; partials, when present, has one more
    trailing axis holding the coordinate derivative.
    """
    point: np.ndarray
    variance: Tuple[Slot, ...]
    components: np.ndarray
    partials: Optional[np.ndarray] = None
    label: str = ""

    def __post_init__(self):
        components = np.asarray(self.components, dtype=float)
        n = np.asarray(self.point).size
        if components.shape != (n,) * len(self.variance):
            raise DimensionError(
                f"{self.label or 'tensor'}: components shape {components.shape} "
                f"does not match rank {len(self.variance)} in dimension {n}")
        object.__setattr__(self, "point", np.asarray(self.point, dtype=float))
        object.__setattr__(self, "variance", tuple(self.variance))
        object.__setattr__(self, "components", components)
        if self.partials is not None:
            partials = np.asarray(self.partials, dtype=float)
            if partials.shape != components.shape + (n,):
                raise DimensionError(f"{self.label or 'tensor'}: partials shape {partials.shape}")
            object.__setattr__(self, "partials", partials)

    @property
    def rank(self) -> int:
        return len(self.variance)

    @property
    def n(self) -> int:
        return self.point.size

    def require_partials(self) -> np.ndarray:
        """Partials or a typed error"""
        if self.partials is None:
            raise MissingPartialsError(f"{self.label or 'tensor'} carries no partials")
        return self.partials

    def with_label(self, label: str) -> "TensorSample":
        return TensorSample(self.point, self.variance, self.components, self.partials, label)


@dataclass(frozen=True, eq=False)
class ConnectionSample:
    """Connection coefficients Γ^α_{μν} at a point, index order [α][μ][ν]

    dcoeff holds Γ^α_{μν,σ} with the derivative index last.
    """
    point: np.ndarray
    coeff: np.ndarray
    dcoeff: Optional[np.ndarray] = None
    label: str = ""
    symmetric: bool = field(default=False)

    def __post_init__(self):
        coeff = np.asarray(self.coeff, dtype=float)
        n = np.asarray(self.point).size
        if coeff.shape != (n, n, n):
            raise DimensionError(f"{self.label or 'connection'}: coefficient shape {coeff.shape}")
        object.__setattr__(self, "point", np.asarray(self.point, dtype=float))
        object.__setattr__(self, "coeff", coeff)
        if self.dcoeff is not None:
            dcoeff = np.asarray(self.dcoeff, dtype=float)
            if dcoeff.shape != (n, n, n, n):
                raise DimensionError(f"{self.label or 'connection'}: partials shape {dcoeff.shape}")
            object.__setattr__(self, "dcoeff", dcoeff)

    @property
    def n(self) -> int:
        return self.point.size

    def require_partials(self) -> np.ndarray:
        """Coefficient partials or a typed error"""
        if self.dcoeff is None:
            raise MissingPartialsError(f"{self.label or 'connection'} carries no partials")
        return self.dcoeff


def down(point: np.ndarray, components: np.ndarray, partials: Optional[np.ndarray] = None,
         label: str = "") -> TensorSample:
    """Covector sample"""
    return TensorSample(point, (Slot.DOWN,), components, partials, label)


def up(point: np.ndarray, components: np.ndarray, partials: Optional[np.ndarray] = None,
       label: str = "") -> TensorSample:
    """Vector sample"""
    return TensorSample(point, (Slot.UP,), components, partials, label)


# Variance of every rank-3 (1,2) and rank-4 (1,3) object in the engine
MIXED_3 = (Slot.UP, Slot.DOWN, Slot.DOWN)
MIXED_4 = (Slot.UP, Slot.DOWN, Slot.DOWN, Slot.DOWN)
