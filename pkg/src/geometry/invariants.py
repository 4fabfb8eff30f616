"""
Conformal Invariants
The three conformal connections and the invariant tensors T, K, B, Q built from their explicit formulas
"""

from enum import Enum

import numpy as np

from .connection import alt, covariant_derivative
from .errors import DimensionError
from .frame import MetricSample, TraceQuantities
from .tensors import MIXED_3, MIXED_4, ConnectionSample, TensorSample


class Stroke(Enum):
    """Connection used for the stroke derivative inside B and Q"""
    WEITZENBOCK = "weitzenbock"
    SYMMETRIC = "symmetric"


class QForm(Enum):
    """Sign of the g_{μσ}C^α_{;ν} term of Q"""
    CORRECTED = "corrected"   # − g_{μσ}C^α_{;ν}, equal to the curvature of the circ-connection
    DISPLAYED = "displayed"   # + g_{μσ}C^α_{;ν}, as usually printed


def _require_dimension(n: int) -> None:
    if n < 2:
        raise DimensionError(f"conformal invariants need dimension >= 2, got {n}")


def _stroke_connection(stroke: Stroke, w: ConnectionSample, sym: ConnectionSample) -> ConnectionSample:
    return w if stroke is Stroke.WEITZENBOCK else sym


def tensor_T(lam: TensorSample, C: TensorSample, n: int) -> TensorSample:
    """T = Λ − (1/(n−1)){δ^α_μ C_ν − δ^α_ν C_μ}"""
    _require_dimension(n)
    trace_part = alt(np.einsum("am,n->amn", np.eye(n), C.components))
    return TensorSample(lam.point, MIXED_3, lam.components - trace_part / (n - 1), label="T")


def tensor_K(C: TensorSample, n: int) -> TensorSample:
    """K = (1/(n−1)){δ^α_μ C_{ν,σ} − δ^α_μ C_{σ,ν}}"""
    _require_dimension(n)
    dC = C.require_partials()
    components = (np.einsum("am,ns->amns", np.eye(n), dC)
                  - np.einsum("am,sn->amns", np.eye(n), dC)) / (n - 1)
    return TensorSample(C.point, MIXED_4, components, label="K")


def conformal_connection_gamma(w: ConnectionSample, C: TensorSample, n: int) -> ConnectionSample:
    """𝚪 = Γ − (1/(n−1)) δ^α_μ C_ν"""
    _require_dimension(n)
    eye = np.eye(n)
    coeff = w.coeff - np.einsum("am,n->amn", eye, C.components) / (n - 1)
    dcoeff = None
    if w.dcoeff is not None and C.partials is not None:
        dcoeff = w.dcoeff - np.einsum("am,ns->amns", eye, C.partials) / (n - 1)
    return ConnectionSample(w.point, coeff, dcoeff, label="conn-gamma")


def tensor_B(lam: TensorSample, trace: TraceQuantities, w: ConnectionSample, sym: ConnectionSample,
             n: int, stroke: Stroke = Stroke.WEITZENBOCK) -> TensorSample:
    """B from the torsion, its stroke derivative and the contracted torsion"""
    _require_dimension(n)
    eye = np.eye(n)
    L = lam.components
    C = trace.C.components
    dC = trace.C.require_partials()
    C_hat = trace.C_hat if trace.C_hat is not None else covariant_derivative(trace.C, sym).components
    lam_stroke = covariant_derivative(lam, _stroke_connection(stroke, w, sym)).components

    torsion_part = 0.25 * alt(2.0 * lam_stroke
                              + np.einsum("emn,ase->amns", L, L)
                              + np.einsum("esn,aem->amns", L, L))
    h = 1.0 / (2 * (n - 1))
    trace_part = h * alt(np.einsum("am,sn->amns", eye, dC)
                         + np.einsum("as,mn->amns", eye, C_hat)
                         - h * np.einsum("an,m,s->amns", eye, C, C))
    return TensorSample(lam.point, MIXED_4, torsion_part - trace_part, label="B")


def conformal_connection_hat(sym: ConnectionSample, C: TensorSample, n: int) -> ConnectionSample:
    """𝚪̂ = Γ̂ − (1/(2(n−1)))(δ^α_μ C_ν + δ^α_ν C_μ)"""
    _require_dimension(n)
    eye = np.eye(n)
    h = 1.0 / (2 * (n - 1))
    shift = np.einsum("am,n->amn", eye, C.components) + np.einsum("an,m->amn", eye, C.components)
    dcoeff = None
    if sym.dcoeff is not None and C.partials is not None:
        dshift = np.einsum("am,ns->amns", eye, C.partials) + np.einsum("an,ms->amns", eye, C.partials)
        dcoeff = sym.dcoeff - h * dshift
    return ConnectionSample(sym.point, sym.coeff - h * shift, dcoeff, label="conn-hat", symmetric=True)


def tensor_Q(gamma: TensorSample, lam: TensorSample, trace: TraceQuantities, m: MetricSample,
             w: ConnectionSample, sym: ConnectionSample, n: int,
             stroke: Stroke = Stroke.WEITZENBOCK, form: QForm = QForm.CORRECTED) -> TensorSample:
    """Q from the contortion, the torsion and the contracted-torsion quantities"""
    _require_dimension(n)
    eye = np.eye(n)
    g = m.g.value
    G = gamma.components
    L = lam.components
    C = trace.C.components
    C_up = trace.C_up.components
    dC = trace.C.require_partials()
    gamma_stroke = covariant_derivative(gamma, _stroke_connection(stroke, w, sym)).components

    contortion_part = alt(gamma_stroke
                          + np.einsum("ems,aen->amns", G, G)
                          + 0.5 * np.einsum("ame,ens->amns", G, L))
    k = 1.0 / (n - 1)
    sign = -1.0 if form is QForm.CORRECTED else 1.0
    quadratic = (np.einsum("an,m,s->amns", eye, C, C)
                 - trace.C_sq * np.einsum("an,ms->amns", eye, g)
                 + np.einsum("ms,n,a->amns", g, C, C_up))
    trace_part = k * alt(np.einsum("am,sn->amns", eye, dC)
                         + np.einsum("as,mn->amns", eye, trace.C_semi)
                         + sign * np.einsum("ms,an->amns", g, trace.C_up_semi)
                         - k * quadratic)
    label = "Q" if form is QForm.CORRECTED else "Q(displayed)"
    return TensorSample(gamma.point, MIXED_4, contortion_part - trace_part, label=label)


def conformal_connection_circ(lc: ConnectionSample, trace: TraceQuantities, m: MetricSample,
                              n: int) -> ConnectionSample:
    """𝚪̊ = Γ̊ − (1/(n−1))(δ^α_μ C_ν + δ^α_ν C_μ − g_{μν} C^α)"""
    _require_dimension(n)
    eye = np.eye(n)
    C = trace.C.components
    C_up = trace.C_up
    shift = (np.einsum("am,n->amn", eye, C) + np.einsum("an,m->amn", eye, C)
             - np.einsum("mn,a->amn", m.g.value, C_up.components))
    dcoeff = None
    if lc.dcoeff is not None and trace.C.partials is not None and C_up.partials is not None:
        dC = trace.C.partials
        dshift = (np.einsum("am,ns->amns", eye, dC) + np.einsum("an,ms->amns", eye, dC)
                  - np.einsum("mns,a->amns", m.g.grad, C_up.components)
                  - np.einsum("mn,as->amns", m.g.value, C_up.partials))
        dcoeff = lc.dcoeff - dshift / (n - 1)
    return ConnectionSample(lc.point, lc.coeff - shift / (n - 1), dcoeff, label="conn-circ",
                            symmetric=True)
