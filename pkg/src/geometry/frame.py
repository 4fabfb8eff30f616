"""
AP-Space Frames
Frame fields, the induced metric and the canonical connections of an absolute-parallelism space
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from utils.expr_parser import Expr, eval_jet, evaluate, parse
from .connection import covariant_derivative, torsion_of
from .errors import DimensionError, FrameDegeneracyError, MetricSignatureError
from .jet import MAX_CONDITION, JetField, jet_einsum, jet_matrix_inverse
from .tensors import MIXED_3, ConnectionSample, Slot, TensorSample, down, up

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ApSpace:
    """Chart dimension and the contravariant frame components λᵢ^μ (row i)"""
    n: int
    frame_exprs: Tuple[Tuple[Expr, ...], ...]
    label: str = ""

    def __post_init__(self):
        if self.n < 2:
            raise DimensionError(f"dimension must be >= 2, got {self.n}")
        rows = tuple(tuple(row) for row in self.frame_exprs)
        if len(rows) != self.n or any(len(row) != self.n for row in rows):
            shape = [len(row) for row in rows]
            raise DimensionError(f"frame must be {self.n}x{self.n}, got row lengths {shape}")
        for row in rows:
            for expr in row:
                if expr.max_index() >= self.n:
                    raise DimensionError(f"frame component {expr} uses a coordinate beyond x{self.n}")
        object.__setattr__(self, "frame_exprs", rows)

    @classmethod
    def from_strings(cls, rows: Sequence[Sequence[str]], label: str = "") -> "ApSpace":
        """Parse a square array of expression strings"""
        n = len(rows)
        return cls(n, tuple(tuple(parse(text, n) for text in row) for row in rows), label)

    def frame_text(self):
        """Frame components as canonical expression strings"""
        return [[expr.text() for expr in row] for row in self.frame_exprs]


@dataclass(frozen=True, eq=False)
class FrameSample:
    """λᵢ^μ and λᵢμ as jet fields, both indexed [i][μ]"""
    point: np.ndarray
    lam_up: JetField
    lam_down: JetField

    @property
    def n(self) -> int:
        return self.point.size


@dataclass(frozen=True, eq=False)
class MetricSample:
    """g_{μν} and g^{μν} as jet fields"""
    point: np.ndarray
    g: JetField
    g_inv: JetField


def sample_frame(space: ApSpace, point: Sequence[float]) -> FrameSample:
    """Frame jets at a point, covariant components by jet-matrix inversion"""
    point = np.asarray(point, dtype=float)
    if point.size != space.n:
        raise DimensionError(f"point has {point.size} coordinates, space has dimension {space.n}")
    lam_up = JetField.from_jets([[eval_jet(expr, point) for expr in row] for row in space.frame_exprs])
    lam_down = jet_matrix_inverse(lam_up).transpose()
    return FrameSample(point, lam_up, lam_down)


def duality_products(fs: FrameSample) -> Tuple[JetField, JetField]:
    """λᵢ^μ λᵢν and λᵢ^μ λⱼμ as jet fields; both are the constant identity"""
    return (jet_einsum("im,in->mn", fs.lam_up, fs.lam_down),
            jet_einsum("im,jm->ij", fs.lam_up, fs.lam_down))


def frame_values(space: ApSpace, point: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    """Value-only λᵢ^μ and λᵢμ, used by the finite-difference oracle"""
    lam_up = np.array([[evaluate(expr, point) for expr in row] for row in space.frame_exprs])
    try:
        cond = np.linalg.cond(lam_up)
        inverse = np.linalg.inv(lam_up)
    except np.linalg.LinAlgError as exc:
        raise FrameDegeneracyError("frame matrix is singular") from exc
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise FrameDegeneracyError(f"frame matrix is ill-conditioned (cond={cond:.3g})")
    return lam_up, inverse.T


def metric_values(lam_down: np.ndarray) -> np.ndarray:
    """g_{μν} = λᵢμ λᵢν"""
    return np.einsum("im,in->mn", lam_down, lam_down)


def metric(fs: FrameSample) -> MetricSample:
    """Metric and inverse metric built from the frame"""
    g = jet_einsum("im,in->mn", fs.lam_down, fs.lam_down)
    g_inv = jet_einsum("im,in->mn", fs.lam_up, fs.lam_up)
    try:
        np.linalg.cholesky(g.value)
    except np.linalg.LinAlgError as exc:
        raise MetricSignatureError(f"metric is not positive definite at {fs.point.tolist()}") from exc
    return MetricSample(fs.point, g, g_inv)


def weitzenbock(fs: FrameSample) -> ConnectionSample:
    """Γ^α_{μν} = λᵢ^α λᵢμ,ν with first partials"""
    coeff = np.einsum("ia,imn->amn", fs.lam_up.value, fs.lam_down.grad)
    dcoeff = (np.einsum("ias,imn->amns", fs.lam_up.grad, fs.lam_down.grad)
              + np.einsum("ia,imns->amns", fs.lam_up.value, fs.lam_down.hess))
    return ConnectionSample(fs.point, coeff, dcoeff, label="weitzenbock")


def torsion(w: ConnectionSample) -> TensorSample:
    """Λ^α_{μν} of the Weitzenböck connection, with partials"""
    return torsion_of(w).with_label("torsion")


def contracted_torsion(lam: TensorSample) -> TensorSample:
    """C_μ = Λ^ε_{εμ} with C_{μ,ν}"""
    partials = None if lam.partials is None else np.einsum("eems->ms", lam.partials)
    return down(lam.point, np.einsum("eem->m", lam.components), partials, label="C")


def christoffel(m: MetricSample) -> ConnectionSample:
    """Γ̊^α_{μν} = ½ g^{αε}(g_{εν,μ} + g_{εμ,ν} − g_{μν,ε}) with partials from metric Hessians"""
    dg = m.g.grad
    d2g = m.g.hess
    first_kind = (np.einsum("enm->emn", dg) + dg - np.einsum("mne->emn", dg))
    dfirst_kind = (np.einsum("enms->emns", d2g) + d2g - np.einsum("mnes->emns", d2g))
    coeff = 0.5 * np.einsum("ae,emn->amn", m.g_inv.value, first_kind)
    dcoeff = 0.5 * (np.einsum("aes,emn->amns", m.g_inv.grad, first_kind)
                    + np.einsum("ae,emns->amns", m.g_inv.value, dfirst_kind))
    return ConnectionSample(m.point, coeff, dcoeff, label="levi-civita", symmetric=True)


def contortion(w: ConnectionSample, lc: ConnectionSample) -> TensorSample:
    """γ^α_{μν} = Γ^α_{μν} − Γ̊^α_{μν}"""
    partials = None
    if w.dcoeff is not None and lc.dcoeff is not None:
        partials = w.dcoeff - lc.dcoeff
    return TensorSample(w.point, MIXED_3, w.coeff - lc.coeff, partials, label="contortion")


def contortion_from_frame(fs: FrameSample, lc: ConnectionSample) -> np.ndarray:
    """Second route to the contortion: λᵢ^α λᵢμ;ν"""
    lam_up = fs.lam_up.value
    lam_down = fs.lam_down.value
    semicolon = fs.lam_down.grad - np.einsum("ie,emn->imn", lam_down, lc.coeff)
    return np.einsum("ia,imn->amn", lam_up, semicolon)


def symmetric_part(w: ConnectionSample) -> ConnectionSample:
    """Γ̂^α_{μν} = ½(Γ^α_{μν} + Γ^α_{νμ})"""
    coeff = 0.5 * (w.coeff + np.swapaxes(w.coeff, 1, 2))
    dcoeff = None if w.dcoeff is None else 0.5 * (w.dcoeff + np.swapaxes(w.dcoeff, 1, 2))
    return ConnectionSample(w.point, coeff, dcoeff, label="symmetric", symmetric=True)


def frame_tensors(fs: FrameSample) -> Tuple[TensorSample, TensorSample]:
    """λᵢμ and λᵢ^μ as tensors with a mesh slot, for covariant differentiation"""
    lam_down = TensorSample(fs.point, (Slot.MESH, Slot.DOWN), fs.lam_down.value, fs.lam_down.grad,
                            label="lambda_down")
    lam_up = TensorSample(fs.point, (Slot.MESH, Slot.UP), fs.lam_up.value, fs.lam_up.grad,
                          label="lambda_up")
    return lam_down, lam_up


@dataclass(frozen=True, eq=False)
class TraceQuantities:
    """Contracted torsion and the quantities derived from it with the metric"""
    C: TensorSample          # C_μ with C_{μ,ν}
    C_up: TensorSample       # C^α with C^α_{,ν}
    C_sq: float              # C_ε C^ε
    C_semi: np.ndarray       # C_{μ;ν}
    C_up_semi: np.ndarray    # C^α_{;ν}
    C_hat: Optional[np.ndarray] = None  # C_{μ|̂ν}


def trace_quantities(C: TensorSample, m: MetricSample, lc: ConnectionSample,
                     sym: Optional[ConnectionSample] = None) -> TraceQuantities:
    """Raise, square and differentiate the contracted torsion"""
    dC = C.require_partials()
    C_up_components = m.g_inv.value @ C.components
    C_up_partials = (np.einsum("aes,e->as", m.g_inv.grad, C.components)
                     + np.einsum("ae,es->as", m.g_inv.value, dC))
    C_up = up(C.point, C_up_components, C_up_partials, label="C_up")
    C_hat = None if sym is None else covariant_derivative(C, sym).components
    return TraceQuantities(
        C=C,
        C_up=C_up,
        C_sq=float(C.components @ C_up_components),
        C_semi=covariant_derivative(C, lc).components,
        C_up_semi=covariant_derivative(C_up, lc).components,
        C_hat=C_hat,
    )
