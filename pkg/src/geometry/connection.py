"""
Connection Calculus
Curvature, torsion, covariant derivative and the index-pair antisymmetrizer for any connection sample
"""

from typing import Union

import numpy as np

from .errors import DimensionError
from .tensors import MIXED_3, MIXED_4, ConnectionSample, Slot, TensorSample


def alt(array: np.ndarray, first: int = -2, second: int = -1) -> np.ndarray:
    """𝔘 on a raw array: A[.., ν, .., σ] − A[.., σ, .., ν]"""
    return array - np.swapaxes(array, first, second)


def antisymmetrize_last2(t: Union[TensorSample, np.ndarray]) -> Union[TensorSample, np.ndarray]:
    """Apply 𝔘 to the last two component indices"""
    if isinstance(t, np.ndarray):
        if t.ndim < 2:
            raise DimensionError("antisymmetrization needs rank >= 2")
        return alt(t)
    if t.rank < 2:
        raise DimensionError(f"antisymmetrization needs rank >= 2, got {t.rank}")
    partials = None if t.partials is None else alt(t.partials, -3, -2)
    return TensorSample(t.point, t.variance, alt(t.components), partials, t.label)


def curvature(c: ConnectionSample) -> TensorSample:
    """R^α_{μνσ} = Γ^α_{μσ,ν} − Γ^α_{μν,σ} + Γ^ε_{μσ}Γ^α_{εν} − Γ^ε_{μν}Γ^α_{εσ}"""
    dcoeff = c.require_partials()
    gamma = c.coeff
    components = (np.swapaxes(dcoeff, 2, 3) - dcoeff
                  + np.einsum("ems,aen->amns", gamma, gamma)
                  - np.einsum("emn,aes->amns", gamma, gamma))
    return TensorSample(c.point, MIXED_4, components, label=f"curvature({c.label})")


def torsion_of(c: ConnectionSample) -> TensorSample:
    """T^α_{μν} = Γ^α_{μν} − Γ^α_{νμ}, with partials when the connection has them"""
    partials = None if c.dcoeff is None else alt(c.dcoeff, 1, 2)
    return TensorSample(c.point, MIXED_3, alt(c.coeff, 1, 2), partials, label=f"torsion({c.label})")


def covariant_derivative(t: TensorSample, c: ConnectionSample) -> TensorSample:
    """Covariant derivative with the derivative index appended last

    Each up slot gains +t^{..ε..}Γ^α_{εσ}, each down slot −t_{..ε..}Γ^ε_{μσ};
    mesh slots are left alone.
    """
    partials = t.require_partials()
    if t.n != c.n:
        raise DimensionError(f"tensor dimension {t.n} does not match connection dimension {c.n}")
    rank = t.rank
    free = list(range(rank))
    sigma, eps = rank, rank + 1
    result = partials.copy()
    for slot, variance in enumerate(t.variance):
        contracted = free.copy()
        contracted[slot] = eps
        if variance is Slot.UP:
            result += np.einsum(t.components, contracted, c.coeff, [slot, eps, sigma], free + [sigma])
        elif variance is Slot.DOWN:
            result -= np.einsum(t.components, contracted, c.coeff, [eps, slot, sigma], free + [sigma])
    return TensorSample(t.point, t.variance + (Slot.DOWN,), result,
                        label=f"{t.label}|{c.label}" if t.label else "")
