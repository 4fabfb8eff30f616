"""
Second-Order Taylor Jets
Exact value, gradient and Hessian propagation for scalar and array-valued fields
"""

import math
import re
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DimensionError, FrameDegeneracyError, SingularEvaluationError

Number = Union[int, float]

# Condition number above which a frame value matrix counts as degenerate
MAX_CONDITION = 1e12


@dataclass(frozen=True, eq=False)
class Jet2:
    """Value, gradient and Hessian of a scalar field at one point"""
    value: float
    grad: np.ndarray
    hess: np.ndarray

    def __post_init__(self):
        grad = np.asarray(self.grad, dtype=float)
        hess = np.asarray(self.hess, dtype=float)
        if grad.ndim != 1 or hess.shape != (grad.size, grad.size):
            raise DimensionError(f"jet shapes disagree: grad {grad.shape}, hess {hess.shape}")
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "grad", grad)
        object.__setattr__(self, "hess", 0.5 * (hess + hess.T))

    @property
    def n(self) -> int:
        """Chart dimension"""
        return self.grad.size

    def _lift(self, other) -> "Jet2":
        if isinstance(other, Jet2):
            if other.n != self.n:
                raise DimensionError(f"cannot combine jets of dimension {self.n} and {other.n}")
            return other
        return jet_const(float(other), self.n)

    def __add__(self, other):
        return jet_arith("add", self, self._lift(other))

    def __radd__(self, other):
        return jet_arith("add", self._lift(other), self)

    def __sub__(self, other):
        return jet_arith("sub", self, self._lift(other))

    def __rsub__(self, other):
        return jet_arith("sub", self._lift(other), self)

    def __mul__(self, other):
        return jet_arith("mul", self, self._lift(other))

    def __rmul__(self, other):
        return jet_arith("mul", self._lift(other), self)

    def __truediv__(self, other):
        return jet_arith("div", self, self._lift(other))

    def __rtruediv__(self, other):
        return jet_arith("div", self._lift(other), self)

    def __neg__(self):
        return Jet2(-self.value, -self.grad, -self.hess)

    def __pow__(self, exponent: Number):
        return jet_compose("pow_const", self, exponent)

    def __repr__(self) -> str:
        return f"Jet2(value={self.value!r}, grad={self.grad.tolist()!r}, hess={self.hess.tolist()!r})"


def jet_const(c: Number, n: int) -> Jet2:
    """Constant jet"""
    if n < 1:
        raise DimensionError(f"jet dimension must be >= 1, got {n}")
    return Jet2(float(c), np.zeros(n), np.zeros((n, n)))


def jet_var(point: Sequence[float], coord: int) -> Jet2:
    """Coordinate x^coord seeded as an independent variable"""
    point = np.asarray(point, dtype=float)
    n = point.size
    if not 0 <= coord < n:
        raise DimensionError(f"coordinate index {coord} outside 0..{n - 1}")
    grad = np.zeros(n)
    grad[coord] = 1.0
    return Jet2(point[coord], grad, np.zeros((n, n)))


def jet_arith(op: str, a: Jet2, b: Jet2) -> Jet2:
    """Sum, difference, product or quotient with second-order propagation"""
    if a.n != b.n:
        raise DimensionError(f"cannot combine jets of dimension {a.n} and {b.n}")
    if op == "add":
        return Jet2(a.value + b.value, a.grad + b.grad, a.hess + b.hess)
    if op == "sub":
        return Jet2(a.value - b.value, a.grad - b.grad, a.hess - b.hess)
    if op == "mul":
        cross = np.outer(a.grad, b.grad)
        return Jet2(a.value * b.value,
                    a.value * b.grad + b.value * a.grad,
                    a.value * b.hess + b.value * a.hess + cross + cross.T)
    if op == "div":
        if b.value == 0.0:
            raise SingularEvaluationError("division by a jet with zero value")
        return jet_arith("mul", a, jet_compose("pow_const", b, -1))
    raise ValueError(f"unknown jet operation '{op}'")


def power_derivatives(x: float, p: float) -> Tuple[float, float, float]:
    """x**p and its first two derivatives"""
    if float(p).is_integer():
        k = int(p)
        if k >= 0:
            d1 = k * x ** (k - 1) if k >= 1 else 0.0
            d2 = k * (k - 1) * x ** (k - 2) if k >= 2 else 0.0
            return x ** k, d1, d2
        if x == 0.0:
            raise SingularEvaluationError(f"zero raised to negative power {p}")
    elif x < 0.0:
        raise SingularEvaluationError(f"non-integer power {p} of negative value {x}")
    elif x == 0.0:
        # value and both derivatives vanish at zero once p > 2
        if p > 2.0:
            return 0.0, 0.0, 0.0
        raise SingularEvaluationError(f"second derivative of x^{p} diverges at zero")
    return x ** p, p * x ** (p - 1), p * (p - 1) * x ** (p - 2)


def _exp(x: float) -> Tuple[float, float, float]:
    try:
        v = math.exp(x)
    except OverflowError as exc:
        raise SingularEvaluationError(f"exp overflow at {x}") from exc
    return v, v, v


def _log(x: float) -> Tuple[float, float, float]:
    if x <= 0.0:
        raise SingularEvaluationError(f"log of non-positive value {x}")
    return math.log(x), 1.0 / x, -1.0 / (x * x)


def _sqrt(x: float) -> Tuple[float, float, float]:
    if x <= 0.0:
        raise SingularEvaluationError(f"sqrt needs a positive value, got {x}")
    r = math.sqrt(x)
    return r, 0.5 / r, -0.25 / (r * x)


def _sin(x: float) -> Tuple[float, float, float]:
    s = math.sin(x)
    return s, math.cos(x), -s


def _cos(x: float) -> Tuple[float, float, float]:
    c = math.cos(x)
    return c, -math.sin(x), -c


# f(x), f'(x), f''(x) for each composable function
ELEMENTARY: Dict[str, Callable[[float], Tuple[float, float, float]]] = {
    "exp": _exp,
    "log": _log,
    "sin": _sin,
    "cos": _cos,
    "sqrt": _sqrt,
}


def jet_compose(f: str, a: Jet2, exponent: Optional[Number] = None) -> Jet2:
    """Chain rule to second order: f(a) for an elementary f or a constant power"""
    if f == "pow_const":
        if exponent is None:
            raise ValueError("pow_const needs an exponent")
        f0, f1, f2 = power_derivatives(a.value, float(exponent))
    elif f in ELEMENTARY:
        f0, f1, f2 = ELEMENTARY[f](a.value)
    else:
        raise ValueError(f"unknown jet function '{f}'")
    return Jet2(f0, f1 * a.grad, f2 * np.outer(a.grad, a.grad) + f1 * a.hess)


@dataclass(frozen=True, eq=False)
class JetField:
    """Array of jets stored as stacked value, gradient and Hessian arrays

    value has the component shape S, grad has S + (n,), hess has S + (n, n).
    """
    value: np.ndarray
    grad: np.ndarray
    hess: np.ndarray

    def __post_init__(self):
        value = np.asarray(self.value, dtype=float)
        grad = np.asarray(self.grad, dtype=float)
        hess = np.asarray(self.hess, dtype=float)
        if grad.shape[:-1] != value.shape or hess.shape != grad.shape + grad.shape[-1:]:
            raise DimensionError(
                f"jet field shapes disagree: {value.shape}, {grad.shape}, {hess.shape}")
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "grad", grad)
        object.__setattr__(self, "hess", 0.5 * (hess + np.swapaxes(hess, -1, -2)))

    @property
    def n(self) -> int:
        """Chart dimension"""
        return self.grad.shape[-1]

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.value.shape

    def jet(self, *index: int) -> Jet2:
        """Scalar jet at one component"""
        return Jet2(self.value[index], self.grad[index], self.hess[index])

    def rows(self):
        """Nested lists of Jet2, for code that works component by component"""
        return [[self.jet(i, j) for j in range(self.shape[1])] for i in range(self.shape[0])]

    def transpose(self) -> "JetField":
        """Swap the two component axes of a matrix-valued field"""
        return JetField(np.swapaxes(self.value, 0, 1),
                        np.swapaxes(self.grad, 0, 1),
                        np.swapaxes(self.hess, 0, 1))

    @classmethod
    def from_jets(cls, jets: Sequence[Sequence[Jet2]]) -> "JetField":
        """Stack a matrix of scalar jets"""
        value = np.array([[j.value for j in row] for row in jets])
        grad = np.array([[j.grad for j in row] for row in jets])
        hess = np.array([[j.hess for j in row] for row in jets])
        return cls(value, grad, hess)

    @classmethod
    def constant(cls, value: np.ndarray, n: int) -> "JetField":
        """Field with vanishing derivatives"""
        value = np.asarray(value, dtype=float)
        return cls(value, np.zeros(value.shape + (n,)), np.zeros(value.shape + (n, n)))


_SUBSCRIPTS = re.compile(r"^([a-zA-Z]*),([a-zA-Z]*)->([a-zA-Z]*)$")


def jet_einsum(subscripts: str, a: JetField, b: JetField) -> JetField:
    """Bilinear contraction of two jet fields with Leibniz propagation"""
    match = _SUBSCRIPTS.match(subscripts.replace(" ", ""))
    if not match:
        raise ValueError(f"jet_einsum needs 'ab,cd->ef' subscripts, got '{subscripts}'")
    sa, sb, out = match.groups()
    used = set(sa + sb + out)
    s, t = [c for c in "stuvwxyzpqr" if c not in used][:2]

    def ein(fmt: str, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.einsum(fmt.format(a=sa, b=sb, o=out, s=s, t=t), x, y)

    value = ein("{a},{b}->{o}", a.value, b.value)
    grad = ein("{a}{s},{b}->{o}{s}", a.grad, b.value) + ein("{a},{b}{s}->{o}{s}", a.value, b.grad)
    hess = (ein("{a}{s}{t},{b}->{o}{s}{t}", a.hess, b.value)
            + ein("{a}{s},{b}{t}->{o}{s}{t}", a.grad, b.grad)
            + ein("{a}{t},{b}{s}->{o}{s}{t}", a.grad, b.grad)
            + ein("{a},{b}{s}{t}->{o}{s}{t}", a.value, b.hess))
    return JetField(value, grad, hess)


def jet_matmul(a: JetField, b: JetField) -> JetField:
    """Matrix product of two matrix-valued jet fields"""
    return jet_einsum("ij,jk->ik", a, b)


def jet_matrix_inverse(m: Union[JetField, Sequence[Sequence[Jet2]]]) -> JetField:
    """Inverse of a matrix of jets

    With V the value matrix and G_s, H_st its derivative parts:
    d_s(V^-1) = -V^-1 G_s V^-1 and
    d_s d_t(V^-1) = V^-1 (G_s V^-1 G_t + G_t V^-1 G_s - H_st) V^-1.
    """
    if not isinstance(m, JetField):
        m = JetField.from_jets(m)
    if m.value.ndim != 2 or m.value.shape[0] != m.value.shape[1]:
        raise DimensionError(f"jet matrix must be square, got {m.value.shape}")
    try:
        inv = np.linalg.inv(m.value)
    except np.linalg.LinAlgError as exc:
        raise FrameDegeneracyError("frame matrix is singular") from exc
    cond = np.linalg.cond(m.value)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise FrameDegeneracyError(f"frame matrix is ill-conditioned (cond={cond:.3g})")

    grad = -np.einsum("ij,jks,kl->ils", inv, m.grad, inv)
    chain = np.einsum("ij,jks,kl,lmt,mp->ipst", inv, m.grad, inv, m.grad, inv)
    hess = chain + np.swapaxes(chain, -1, -2) - np.einsum("ij,jkst,kl->ilst", inv, m.hess, inv)
    return JetField(inv, grad, hess)
