"""
Conformal Change
Frame rescaling λ̄ᵢ^μ = e^{−ρ}λᵢ^μ and the predicted change of every derived quantity
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from utils.expr_parser import Expr, eval_jet, scaled_by_exp
from .connection import alt, covariant_derivative
from .frame import ApSpace, MetricSample, TraceQuantities
from .tensors import MIXED_3, MIXED_4, ConnectionSample, TensorSample, down, up


class SForm(Enum):
    """Sign convention of the ρ² term in S_{μν}"""
    CORRECTED = "corrected"   # + ½ g_{μν} ρ², consistent with the curvature law
    DISPLAYED = "displayed"   # − ½ g_{μν} ρ², as usually printed


@dataclass(frozen=True, eq=False)
class RhoSample:
    """ρ and its derivatives at a point, raised with the untransformed metric"""
    point: np.ndarray
    value: float
    grad: np.ndarray         # ρ_μ
    hess: np.ndarray         # ρ_{μ,ν}
    down: TensorSample       # ρ_μ with partials
    up: TensorSample         # ρ^α with partials
    sq: float                # ρ^ε ρ_ε

    @property
    def n(self) -> int:
        return self.point.size


@dataclass(frozen=True)
class ConformalFactor:
    """Conformal factor ρ(x); e^ρ is positive for every real ρ"""
    rho: Expr

    def sample(self, point: Sequence[float], m: MetricSample) -> RhoSample:
        """Evaluate ρ, ρ_μ, ρ_{μ,ν} and the raised gradient"""
        point = np.asarray(point, dtype=float)
        jet = eval_jet(self.rho, point)
        g_inv = m.g_inv
        raised = g_inv.value @ jet.grad
        raised_partials = (np.einsum("aes,e->as", g_inv.grad, jet.grad)
                           + np.einsum("ae,es->as", g_inv.value, jet.hess))
        return RhoSample(
            point=point,
            value=jet.value,
            grad=jet.grad,
            hess=jet.hess,
            down=down(point, jet.grad, jet.hess, label="rho_down"),
            up=up(point, raised, raised_partials, label="rho_up"),
            sq=float(jet.grad @ raised),
        )


@dataclass(frozen=True, eq=False)
class STensor:
    """S_{μν} and S^α_ν = g^{αε}S_{εν}"""
    down: np.ndarray
    mixed: np.ndarray
    form: SForm = SForm.CORRECTED


@dataclass(frozen=True, eq=False)
class L1Prediction:
    """Predicted transformed contracted-torsion quantities"""
    C_down: np.ndarray       # C̄_σ
    C_up: np.ndarray         # C̄^σ
    C_sq: float              # C̄²
    C_semi: np.ndarray       # C̄_{μ;;ν}
    C_up_semi: np.ndarray    # C̄^α_{;;ν}


def _delta_rho(rho: RhoSample) -> np.ndarray:
    """δ^α_μ ρ_ν"""
    return np.einsum("am,n->amn", np.eye(rho.n), rho.grad)


def _delta_drho(rho: RhoSample) -> np.ndarray:
    """δ^α_μ ρ_{ν,σ}"""
    return np.einsum("am,ns->amns", np.eye(rho.n), rho.hess)


def transform_frame(space: ApSpace, rho: Expr) -> ApSpace:
    """Space whose frame components are e^{−ρ}·λᵢ^μ"""
    rows = tuple(tuple(scaled_by_exp(rho, expr) for expr in row) for row in space.frame_exprs)
    label = f"{space.label} [rho={rho.text()}]" if space.label else f"[rho={rho.text()}]"
    return ApSpace(space.n, rows, label)


def predicted_weitzenbock(w: ConnectionSample, rho: RhoSample) -> ConnectionSample:
    """Γ̄ = Γ + δ^α_μ ρ_ν"""
    dcoeff = None if w.dcoeff is None else w.dcoeff + _delta_drho(rho)
    return ConnectionSample(w.point, w.coeff + _delta_rho(rho), dcoeff, label="weitzenbock~")


def predicted_torsion(lam: TensorSample, rho: RhoSample) -> TensorSample:
    """Λ̄ = Λ + δ^α_μ ρ_ν − δ^α_ν ρ_μ"""
    components = lam.components + alt(_delta_rho(rho))
    partials = None
    if lam.partials is not None:
        partials = lam.partials + alt(_delta_drho(rho), 1, 2)
    return TensorSample(lam.point, MIXED_3, components, partials, label="torsion~")


def predicted_metric(m: MetricSample, rho: RhoSample):
    """ḡ = e^{2ρ} g and ḡ^{-1} = e^{−2ρ} g^{-1} (values)"""
    scale = math.exp(2.0 * rho.value)
    return scale * m.g.value, m.g_inv.value / scale


def predicted_levicivita(lc: ConnectionSample, rho: RhoSample, m: MetricSample) -> ConnectionSample:
    """Γ̄̊ = Γ̊ + δ^α_μρ_ν + δ^α_νρ_μ − g_{μν}ρ^α"""
    eye = np.eye(rho.n)
    shift = (_delta_rho(rho) + np.einsum("an,m->amn", eye, rho.grad)
             - np.einsum("mn,a->amn", m.g.value, rho.up.components))
    dcoeff = None
    if lc.dcoeff is not None:
        dcoeff = (lc.dcoeff + _delta_drho(rho) + np.einsum("an,ms->amns", eye, rho.hess)
                  - np.einsum("mns,a->amns", m.g.grad, rho.up.components)
                  - np.einsum("mn,as->amns", m.g.value, rho.up.partials))
    return ConnectionSample(lc.point, lc.coeff + shift, dcoeff, label="levi-civita~", symmetric=True)


def s_tensor(rho: RhoSample, m: MetricSample, lc: ConnectionSample,
             form: SForm = SForm.CORRECTED) -> STensor:
    """S_{μν} = ρ_{μ;ν} − ρ_μρ_ν ± ½ g_{μν} ρ²"""
    sign = 1.0 if form is SForm.CORRECTED else -1.0
    rho_semi = covariant_derivative(rho.down, lc).components
    s_down = rho_semi - np.outer(rho.grad, rho.grad) + sign * 0.5 * m.g.value * rho.sq
    return STensor(s_down, m.g_inv.value @ s_down, form)


def predicted_curvature_lc(R: TensorSample, S: STensor, g: np.ndarray) -> TensorSample:
    """R̄̊ = R̊ + 𝔘_{νσ}{δ^α_σ S_{μν} − g_{μσ} S^α_ν}"""
    eye = np.eye(g.shape[0])
    inner = np.einsum("as,mn->amns", eye, S.down) - np.einsum("ms,an->amns", g, S.mixed)
    return TensorSample(R.point, MIXED_4, R.components + alt(inner), label="curvature(levi-civita)~")


def predicted_contortion(gamma: TensorSample, rho: RhoSample, g: np.ndarray) -> TensorSample:
    """γ̄ = γ − δ^α_ν ρ_μ + g_{μν} ρ^α"""
    eye = np.eye(rho.n)
    components = (gamma.components - np.einsum("an,m->amn", eye, rho.grad)
                  + np.einsum("mn,a->amn", g, rho.up.components))
    return TensorSample(gamma.point, MIXED_3, components, label="contortion~")


def predicted_C(C: TensorSample, rho: RhoSample, n: int) -> TensorSample:
    """C̄_ν = C_ν + (n−1)ρ_ν, with C̄_{ν,σ} = C_{ν,σ} + (n−1)ρ_{ν,σ}"""
    partials = None if C.partials is None else C.partials + (n - 1) * rho.hess
    return down(C.point, C.components + (n - 1) * rho.grad, partials, label="C~")


def predicted_symmetric(sym: ConnectionSample, rho: RhoSample) -> ConnectionSample:
    """Γ̄̂ = Γ̂ + ½(δ^α_μρ_ν + δ^α_νρ_μ)"""
    eye = np.eye(rho.n)
    shift = 0.5 * (_delta_rho(rho) + np.einsum("an,m->amn", eye, rho.grad))
    dcoeff = None
    if sym.dcoeff is not None:
        dcoeff = sym.dcoeff + 0.5 * (_delta_drho(rho) + np.einsum("an,ms->amns", eye, rho.hess))
    return ConnectionSample(sym.point, sym.coeff + shift, dcoeff, label="symmetric~", symmetric=True)


def predicted_curvature_sym(R_hat: TensorSample, rho: RhoSample, sym: ConnectionSample) -> TensorSample:
    """R̄̂ = R̂ + ½𝔘_{νσ}{δ^α_σ ρ_{μ|̂ν} + ½δ^α_ν ρ_σ ρ_μ}"""
    eye = np.eye(rho.n)
    rho_hat = covariant_derivative(rho.down, sym).components
    inner = (np.einsum("as,mn->amns", eye, rho_hat)
             + 0.5 * np.einsum("an,s,m->amns", eye, rho.grad, rho.grad))
    return TensorSample(R_hat.point, MIXED_4, R_hat.components + 0.5 * alt(inner),
                        label="curvature(symmetric)~")


def predicted_C_hat_derivative(trace: TraceQuantities, rho: RhoSample, sym: ConnectionSample,
                               n: int) -> np.ndarray:
    """C̄_{μ‖̂ν} = C_{μ|̂ν} + (n−1)ρ_{μ|̂ν} − ½(C_μρ_ν + C_νρ_μ) − (n−1)ρ_μρ_ν"""
    C = trace.C.components
    C_hat = trace.C_hat if trace.C_hat is not None else covariant_derivative(trace.C, sym).components
    rho_hat = covariant_derivative(rho.down, sym).components
    return (C_hat + (n - 1) * rho_hat
            - 0.5 * (np.outer(C, rho.grad) + np.outer(rho.grad, C))
            - (n - 1) * np.outer(rho.grad, rho.grad))


def lemma_L1(trace: TraceQuantities, rho: RhoSample, m: MetricSample, lc: ConnectionSample,
             n: int) -> L1Prediction:
    """Transformed C_σ, C^σ, C², C_{μ;;ν} and C^α_{;;ν}"""
    k = n - 1
    shrink = math.exp(-2.0 * rho.value)
    g = m.g.value
    eye = np.eye(n)
    C = trace.C.components
    C_up = trace.C_up.components
    rho_up = rho.up.components
    C_dot_rho = float(C @ rho_up)
    rho_semi = covariant_derivative(rho.down, lc).components
    rho_up_semi = covariant_derivative(rho.up, lc).components

    C_semi = (trace.C_semi + k * rho_semi
              - (np.outer(C, rho.grad) + np.outer(rho.grad, C) - g * C_dot_rho)
              - k * (2.0 * np.outer(rho.grad, rho.grad) - g * rho.sq))
    C_up_semi = shrink * (trace.C_up_semi + k * rho_up_semi
                          + (eye * C_dot_rho - np.outer(C_up, rho.grad) - np.outer(rho_up, C))
                          + k * (eye * rho.sq - 2.0 * np.outer(rho_up, rho.grad)))
    return L1Prediction(
        C_down=C + k * rho.grad,
        C_up=shrink * (C_up + k * rho_up),
        C_sq=shrink * (trace.C_sq + 2.0 * k * C_dot_rho + k * k * rho.sq),
        C_semi=C_semi,
        C_up_semi=C_up_semi,
    )
