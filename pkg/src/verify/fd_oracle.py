"""
Finite-Difference Oracle
Central-difference derivative estimates used to cross-check the jet engine independently
"""

import logging
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from geometry.frame import (ApSpace, contracted_torsion, frame_values, metric_values, sample_frame,
                            torsion, weitzenbock)
from utils.expr_parser import Expr, evaluate

logger = logging.getLogger(__name__)

DEFAULT_STEP = 1e-4

Field = Callable[[np.ndarray], Union[float, np.ndarray]]


@dataclass(frozen=True, eq=False)
class FdEstimate:
    """Value and difference-quotient derivatives of a scalar or array field

    grad has the field shape plus one trailing axis, hess plus two.
    """
    value: np.ndarray
    grad: np.ndarray
    hess: np.ndarray = None


def fd_oracle(fn: Field, point: Sequence[float], h: float = DEFAULT_STEP, order: int = 2) -> FdEstimate:
    """Central differences of fn at point

    First derivatives use (f(x+h) − f(x−h))/2h. Second derivatives use the
    five-point stencil on the diagonal and the four-corner stencil for mixed
    partials. Singular evaluations at stencil points propagate.
    """
    if h <= 0:
        raise ValueError(f"finite-difference step must be positive, got {h}")
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    x0 = np.asarray(point, dtype=float)
    n = x0.size

    def f(offsets):
        x = x0.copy()
        for coord, steps in offsets:
            x[coord] += steps * h
        return np.asarray(fn(x), dtype=float)

    f0 = f(())
    grad = np.zeros(f0.shape + (n,))
    for j in range(n):
        grad[..., j] = (f(((j, 1),)) - f(((j, -1),))) / (2 * h)
    if order == 1:
        return FdEstimate(f0, grad)

    hess = np.zeros(f0.shape + (n, n))
    for j in range(n):
        hess[..., j, j] = (-f(((j, 2),)) + 16 * f(((j, 1),)) - 30 * f0
                           + 16 * f(((j, -1),)) - f(((j, -2),))) / (12 * h * h)
        for k in range(j + 1, n):
            mixed = (f(((j, 1), (k, 1))) - f(((j, 1), (k, -1)))
                     - f(((j, -1), (k, 1))) + f(((j, -1), (k, -1)))) / (4 * h * h)
            hess[..., j, k] = mixed
            hess[..., k, j] = mixed
    return FdEstimate(f0, grad, hess)


def fd_expression(expr: Expr, point: Sequence[float], h: float = DEFAULT_STEP) -> FdEstimate:
    """Value, gradient and Hessian of a parsed expression by differences"""
    return fd_oracle(lambda x: evaluate(expr, x), point, h)


def fd_weitzenbock(space: ApSpace, point: Sequence[float], h: float = DEFAULT_STEP) -> np.ndarray:
    """Γ^α_{μν} = λᵢ^α ∂_ν λᵢμ with the frame inverse differenced numerically"""
    lam_up, _ = frame_values(space, point)
    estimate = fd_oracle(lambda x: frame_values(space, x)[1], point, h, order=1)
    return np.einsum("ia,imn->amn", lam_up, estimate.grad)


def fd_metric(space: ApSpace, point: Sequence[float], h: float = DEFAULT_STEP) -> FdEstimate:
    """g_{μν} with gradient and Hessian by differences of the value-only frame"""
    return fd_oracle(lambda x: metric_values(frame_values(space, x)[1]), point, h)


def fd_contracted_torsion(space: ApSpace, point: Sequence[float], h: float = DEFAULT_STEP) -> FdEstimate:
    """C_{ν,σ} by differencing the jet-built C_ν at the stencil points"""
    def C_at(x):
        return contracted_torsion(torsion(weitzenbock(sample_frame(space, x)))).components
    return fd_oracle(C_at, point, h, order=1)
