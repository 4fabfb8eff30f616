"""
Random Test Spaces
Perturbed-identity frames, random smooth expressions and the conformal factor pool
"""

import logging
from typing import Optional, Sequence

import numpy as np

from geometry.errors import SingularEvaluationError
from geometry.frame import ApSpace, frame_values, metric_values
from utils.expr_parser import Binary, Call, Expr, Number, Power, Variable, parse

logger = logging.getLogger(__name__)

# Conformal factors spanning zero, constant and varying gradients
RHO_POOL = ("0", "0.5", "x1", "x1*x2", "sin(x1)")

PERTURBATION = 0.3
MAX_ATTEMPTS = 50


def rho_pool(n: int):
    """Parsed conformal factors of the pool"""
    return [parse(text, n) for text in RHO_POOL]


def _basis_term(rng: np.random.Generator, n: int) -> Expr:
    """A function bounded by 1 on [-1, 1]^n"""
    j, k = rng.integers(0, n, size=2)
    choice = rng.integers(0, 4)
    if choice == 0:
        return Variable(int(j))
    if choice == 1:
        return Binary("*", Variable(int(j)), Variable(int(k)))
    if choice == 2:
        return Call("sin", Variable(int(j)))
    return Binary("-", Call("cos", Variable(int(j))), Number(1.0))


def _rounded(rng: np.random.Generator, bound: float) -> float:
    return round(float(rng.uniform(-bound, bound)), 3)


def _frame_is_regular(space: ApSpace, points: Sequence[Sequence[float]]) -> bool:
    for point in points:
        try:
            _, lam_down = frame_values(space, point)
            np.linalg.cholesky(metric_values(lam_down))
        except (SingularEvaluationError, np.linalg.LinAlgError):
            return False
    return True


def random_space(rng: np.random.Generator, n: int, points: Optional[Sequence[Sequence[float]]] = None,
                 label: str = "") -> ApSpace:
    """Identity frame plus small polynomial/trig perturbations, resampled until regular at points"""
    if points is None:
        points = [np.zeros(n), np.ones(n), -np.ones(n)]
    for attempt in range(MAX_ATTEMPTS):
        rows = []
        for i in range(n):
            row = []
            for mu in range(n):
                term = Binary("*", Number(_rounded(rng, PERTURBATION)), _basis_term(rng, n))
                row.append(Binary("+", Number(1.0 if i == mu else 0.0), term))
            rows.append(tuple(row))
        space = ApSpace(n, tuple(rows), label or f"random-{n}d")
        if _frame_is_regular(space, points):
            return space
        logger.debug("resampling degenerate random frame (attempt %d)", attempt + 1)
    raise SingularEvaluationError(f"no regular random frame found in {MAX_ATTEMPTS} attempts")


def random_expression(rng: np.random.Generator, n: int, depth: int = 3) -> Expr:
    """Random smooth expression, finite and of moderate size everywhere on [-1, 1]^n"""
    if depth <= 0 or rng.random() < 0.25:
        if rng.random() < 0.4:
            return Number(_rounded(rng, 1.0))
        return Variable(int(rng.integers(0, n)))
    choice = rng.integers(0, 6)
    if choice == 0:
        return Call(str(rng.choice(["sin", "cos"])), random_expression(rng, n, depth - 1))
    if choice == 1:
        inner = Binary("*", Number(0.5), Call("sin", random_expression(rng, n, depth - 1)))
        return Call("exp", inner)
    if choice == 2:
        base = Call(str(rng.choice(["sin", "cos"])), random_expression(rng, n, depth - 1))
        return Power(base, float(rng.integers(2, 4)))
    if choice == 3:
        denominator = Binary("+", Number(2.0), Call("cos", random_expression(rng, n, depth - 1)))
        return Binary("/", random_expression(rng, n, depth - 1), denominator)
    op = str(rng.choice(["+", "-", "*"]))
    return Binary(op, random_expression(rng, n, depth - 1), random_expression(rng, n, depth - 1))
