"""
Verification Suite
Samples chart points, runs every geometric property check and reduces the deviations into a report
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from geometry.conformal import (ConformalFactor, RhoSample, SForm, lemma_L1, predicted_C,
                                predicted_C_hat_derivative, predicted_contortion, predicted_curvature_lc,
                                predicted_curvature_sym, predicted_levicivita, predicted_metric,
                                predicted_symmetric, predicted_torsion, predicted_weitzenbock, s_tensor,
                                transform_frame)
from geometry.connection import covariant_derivative, curvature, torsion_of
from geometry.errors import SingularEvaluationError
from geometry.frame import ApSpace, contortion_from_frame, duality_products
from geometry.invariants import Stroke, tensor_K
from geometry.jet import JetField
from geometry.sampler import PointGeometry
from geometry.tensors import Slot, TensorSample, down
from utils.expr_parser import Expr, eval_jet
from .checks import (MAX_SKIP_FRACTION, AllPointsSingularError, CheckKind, CheckResult, CheckSpec,
                     VerificationReport, deviation, resolve_tolerance)
from .fd_oracle import DEFAULT_STEP, fd_contracted_torsion, fd_expression, fd_metric, fd_weitzenbock

logger = logging.getLogger(__name__)


@dataclass
class SuiteSettings:
    """Sampling and tolerance settings of one suite run"""
    num_points: int = 20
    seed: int = 0
    domain: Optional[List[Tuple[float, float]]] = None   # default [-1, 1] per coordinate
    points: Optional[List[List[float]]] = None           # explicit points replace sampling
    tolerances: Dict[str, float] = field(default_factory=dict)
    stroke: Stroke = Stroke.WEITZENBOCK
    fd_step: float = DEFAULT_STEP
    oracle: bool = True
    workers: int = 1


@dataclass
class PointContext:
    """Everything a check may read at one point"""
    space: ApSpace
    rho_expr: Expr
    geo: PointGeometry
    bar: PointGeometry
    rho: RhoSample
    fd_step: float

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def point(self) -> np.ndarray:
        return self.geo.point


def _flat(*arrays) -> np.ndarray:
    return np.concatenate([np.ravel(np.asarray(a, dtype=float)) for a in arrays])


def _with_partials(t) -> np.ndarray:
    if isinstance(t, TensorSample):
        return _flat(t.components, t.require_partials())
    return _flat(t.coeff, t.require_partials())


# Check catalogue: name -> (kind, gating, default tolerance, function, description)
Comparison = Tuple[np.ndarray, np.ndarray]
CATALOGUE: List[Tuple[str, CheckKind, bool, Optional[float], Callable[[PointContext], Comparison], str]] = []


def check(name: str, kind: CheckKind, gating: bool = True, tolerance: Optional[float] = None,
          description: str = ""):
    """Register a per-point comparison in the catalogue"""
    def decorator(fn):
        CATALOGUE.append((name, kind, gating, tolerance, fn, description or (fn.__doc__ or "").strip()))
        return fn
    return decorator


# Frame duality, AP condition, flatness

@check("frame_duality", CheckKind.DUALITY)
def _frame_duality(ctx):
    """λᵢ^μ λᵢν = δ^μ_ν and λᵢ^μ λⱼμ = δᵢⱼ, values and both derivative orders"""
    mixed, rows = duality_products(ctx.geo.frame)
    eye = JetField.constant(np.eye(ctx.n), ctx.n)
    actual = _flat(mixed.value, mixed.grad, mixed.hess, rows.value, rows.grad, rows.hess)
    expected = _flat(eye.value, eye.grad, eye.hess, eye.value, eye.grad, eye.hess)
    return actual, expected


@check("metric_inverse", CheckKind.DUALITY)
def _metric_inverse(ctx):
    """g_{με} g^{εν} = δ"""
    m = ctx.geo.metric
    return m.g.value @ m.g_inv.value, np.eye(ctx.n)


@check("ap_condition", CheckKind.FLATNESS)
def _ap_condition(ctx):
    """λᵢμ|ν = 0 and λᵢ^μ|ν = 0 for the Weitzenböck connection"""
    lam_down, lam_up = ctx.geo.frame_tensors
    w = ctx.geo.weitzenbock
    actual = _flat(covariant_derivative(lam_down, w).components, covariant_derivative(lam_up, w).components)
    return actual, np.zeros_like(actual)


@check("weitzenbock_flatness", CheckKind.FLATNESS)
def _weitzenbock_flatness(ctx):
    """Curvature of the Weitzenböck connection vanishes"""
    R = ctx.geo.curvature_weitzenbock.components
    return R, np.zeros_like(R)


@check("metricity", CheckKind.EXACT_LAW, tolerance=1e-9)
def _metricity(ctx):
    """g_{μν;σ} = 0"""
    m = ctx.geo.metric
    g = TensorSample(ctx.point, (Slot.DOWN, Slot.DOWN), m.g.value, m.g.grad, label="g")
    actual = covariant_derivative(g, ctx.geo.christoffel).components
    return actual, np.zeros_like(actual)


@check("contortion_two_routes", CheckKind.EXACT_LAW, tolerance=1e-9)
def _contortion_two_routes(ctx):
    """Γ − Γ̊ equals λᵢ^α λᵢμ;ν"""
    return ctx.geo.contortion.components, contortion_from_frame(ctx.geo.frame, ctx.geo.christoffel)


# Transformation laws under the conformal change

@check("law_metric", CheckKind.EXACT_LAW)
def _law_metric(ctx):
    """ḡ = e^{2ρ} g and ḡ^{-1} = e^{−2ρ} g^{-1}"""
    g_bar, g_inv_bar = predicted_metric(ctx.geo.metric, ctx.rho)
    return _flat(ctx.bar.metric.g.value, ctx.bar.metric.g_inv.value), _flat(g_bar, g_inv_bar)


@check("law_weitzenbock", CheckKind.EXACT_LAW)
def _law_weitzenbock(ctx):
    """Γ̄ = Γ + δ^α_μ ρ_ν"""
    return _with_partials(ctx.bar.weitzenbock), _with_partials(predicted_weitzenbock(ctx.geo.weitzenbock, ctx.rho))


@check("law_torsion", CheckKind.EXACT_LAW)
def _law_torsion(ctx):
    """Λ̄ = Λ + δ^α_μ ρ_ν − δ^α_ν ρ_μ"""
    return _with_partials(ctx.bar.torsion), _with_partials(predicted_torsion(ctx.geo.torsion, ctx.rho))


@check("law_levi_civita", CheckKind.EXACT_LAW)
def _law_levi_civita(ctx):
    """Γ̄̊ = Γ̊ + δ^α_μρ_ν + δ^α_νρ_μ − g_{μν}ρ^α"""
    predicted = predicted_levicivita(ctx.geo.christoffel, ctx.rho, ctx.geo.metric)
    return _with_partials(ctx.bar.christoffel), _with_partials(predicted)


@check("law_lc_curvature", CheckKind.EXACT_LAW)
def _law_lc_curvature(ctx):
    """R̄̊ from R̊ and S"""
    S = s_tensor(ctx.rho, ctx.geo.metric, ctx.geo.christoffel, SForm.CORRECTED)
    predicted = predicted_curvature_lc(ctx.geo.curvature_lc, S, ctx.geo.metric.g.value)
    return ctx.bar.curvature_lc.components, predicted.components


@check("law_lc_curvature_displayed_s", CheckKind.DIAGNOSTIC, gating=False)
def _law_lc_curvature_displayed_s(ctx):
    """R̄̊ from R̊ and S with the −½ g ρ² sign"""
    S = s_tensor(ctx.rho, ctx.geo.metric, ctx.geo.christoffel, SForm.DISPLAYED)
    predicted = predicted_curvature_lc(ctx.geo.curvature_lc, S, ctx.geo.metric.g.value)
    return ctx.bar.curvature_lc.components, predicted.components


@check("law_contortion", CheckKind.EXACT_LAW)
def _law_contortion(ctx):
    """γ̄ = γ − δ^α_ν ρ_μ + g_{μν} ρ^α"""
    predicted = predicted_contortion(ctx.geo.contortion, ctx.rho, ctx.geo.metric.g.value)
    return ctx.bar.contortion.components, predicted.components


@check("law_contracted_torsion", CheckKind.EXACT_LAW)
def _law_contracted_torsion(ctx):
    """C̄_ν = C_ν + (n−1)ρ_ν together with C̄_{ν,σ}"""
    return _with_partials(ctx.bar.C), _with_partials(predicted_C(ctx.geo.C, ctx.rho, ctx.n))


@check("law_symmetric_part", CheckKind.EXACT_LAW)
def _law_symmetric_part(ctx):
    """Γ̄̂ = Γ̂ + ½(δ^α_μρ_ν + δ^α_νρ_μ)"""
    return _with_partials(ctx.bar.symmetric), _with_partials(predicted_symmetric(ctx.geo.symmetric, ctx.rho))


@check("law_sym_curvature", CheckKind.EXACT_LAW)
def _law_sym_curvature(ctx):
    """R̄̂ from R̂, ρ_{μ|̂ν} and ρ_μρ_σ"""
    predicted = predicted_curvature_sym(ctx.geo.curvature_sym, ctx.rho, ctx.geo.symmetric)
    return ctx.bar.curvature_sym.components, predicted.components


@check("law_C_hat_derivative", CheckKind.EXACT_LAW)
def _law_C_hat_derivative(ctx):
    """C̄_{μ‖̂ν} from C_{μ|̂ν} and ρ"""
    predicted = predicted_C_hat_derivative(ctx.geo.trace, ctx.rho, ctx.geo.symmetric, ctx.n)
    return ctx.bar.trace.C_hat, predicted


# Contracted-torsion quantities

def _lemma(ctx):
    return lemma_L1(ctx.geo.trace, ctx.rho, ctx.geo.metric, ctx.geo.christoffel, ctx.n)


@check("lemma_a_C_down", CheckKind.EXACT_LAW)
def _lemma_a_C_down(ctx):
    """C̄_σ"""
    return ctx.bar.C.components, _lemma(ctx).C_down


@check("lemma_a_C_up", CheckKind.EXACT_LAW)
def _lemma_a_C_up(ctx):
    """C̄^σ"""
    return ctx.bar.trace.C_up.components, _lemma(ctx).C_up


@check("lemma_b_C_sq", CheckKind.EXACT_LAW)
def _lemma_b_C_sq(ctx):
    """C̄²"""
    return ctx.bar.trace.C_sq, _lemma(ctx).C_sq


@check("lemma_c_C_semi", CheckKind.EXACT_LAW)
def _lemma_c_C_semi(ctx):
    """C̄_{μ;;ν}"""
    return ctx.bar.trace.C_semi, _lemma(ctx).C_semi


@check("lemma_d_C_up_semi", CheckKind.EXACT_LAW)
def _lemma_d_C_up_semi(ctx):
    """C̄^α_{;;ν}"""
    return ctx.bar.trace.C_up_semi, _lemma(ctx).C_up_semi


# Invariance

def _invariance(attribute: str, doc: str):
    def compare(ctx):
        before = getattr(ctx.geo, attribute)
        after = getattr(ctx.bar, attribute)
        if isinstance(before, TensorSample):
            return after.components, before.components
        return _flat(after.coeff, after.require_partials()), _flat(before.coeff, before.require_partials())
    compare.__doc__ = doc
    return compare


for _name, _attribute, _doc in (
        ("invariance_T", "T", "T̄ = T"),
        ("invariance_K", "K", "K̄ = K"),
        ("invariance_B", "B", "B̄ = B"),
        ("invariance_Q", "Q", "Q̄ = Q"),
        ("invariance_conn_gamma", "conn_gamma", "𝚪̄ = 𝚪"),
        ("invariance_conn_hat", "conn_hat", "𝚪̄̂ = 𝚪̂"),
        ("invariance_conn_circ", "conn_circ", "𝚪̄̊ = 𝚪̊")):
    check(_name, CheckKind.INVARIANCE)(_invariance(_attribute, _doc))


# Invariant tensors as torsion and curvature of the conformal connections

@check("identification_A_torsion", CheckKind.IDENTIFICATION)
def _identification_A_torsion(ctx):
    """Torsion of 𝚪 equals T"""
    return torsion_of(ctx.geo.conn_gamma).components, ctx.geo.T.components


@check("identification_A_curvature", CheckKind.IDENTIFICATION)
def _identification_A_curvature(ctx):
    """Curvature of 𝚪 equals K"""
    return curvature(ctx.geo.conn_gamma).components, ctx.geo.K.components


@check("identification_B", CheckKind.IDENTIFICATION)
def _identification_B(ctx):
    """Curvature of 𝚪̂ equals explicit B"""
    return ctx.geo.B.components, curvature(ctx.geo.conn_hat).components


@check("identification_C", CheckKind.IDENTIFICATION)
def _identification_C(ctx):
    """Curvature of 𝚪̊ equals explicit Q"""
    return ctx.geo.Q.components, curvature(ctx.geo.conn_circ).components


@check("identification_C_displayed", CheckKind.DIAGNOSTIC, gating=False)
def _identification_C_displayed(ctx):
    """Curvature of 𝚪̊ against Q with the +g_{μσ}C^α_{;ν} sign"""
    return ctx.geo.Q_displayed.components, curvature(ctx.geo.conn_circ).components


@check("antisymmetry_invariants", CheckKind.EXACT_LAW)
def _antisymmetry_invariants(ctx):
    """T in (μ,ν); K, B, Q in (ν,σ)"""
    geo = ctx.geo
    actual = _flat(geo.T.components + np.swapaxes(geo.T.components, 1, 2),
                   *(t.components + np.swapaxes(t.components, 2, 3) for t in (geo.K, geo.B, geo.Q)))
    return actual, np.zeros_like(actual)


# Finite-difference oracle

@check("oracle_weitzenbock_fd", CheckKind.ORACLE)
def _oracle_weitzenbock_fd(ctx):
    """Γ from differenced frame values"""
    return fd_weitzenbock(ctx.space, ctx.point, ctx.fd_step), ctx.geo.weitzenbock.coeff


@check("oracle_metric_fd", CheckKind.ORACLE)
def _oracle_metric_fd(ctx):
    """g, ∂g and ∂∂g from differenced frame values"""
    estimate = fd_metric(ctx.space, ctx.point, ctx.fd_step)
    g = ctx.geo.metric.g
    return _flat(estimate.value, estimate.grad, estimate.hess), _flat(g.value, g.grad, g.hess)


@check("oracle_rho_fd", CheckKind.ORACLE)
def _oracle_rho_fd(ctx):
    """ρ, ρ_μ and ρ_{μ,ν} by differences"""
    estimate = fd_expression(ctx.rho_expr, ctx.point, ctx.fd_step)
    jet = eval_jet(ctx.rho_expr, ctx.point)
    return _flat(estimate.value, estimate.grad, estimate.hess), _flat(jet.value, jet.grad, jet.hess)


@check("oracle_K_fd", CheckKind.ORACLE)
def _oracle_K_fd(ctx):
    """C_{ν,σ} and K from differencing the jet-built C"""
    estimate = fd_contracted_torsion(ctx.space, ctx.point, ctx.fd_step)
    K_fd = tensor_K(down(ctx.point, estimate.value, estimate.grad), ctx.n)
    return _flat(estimate.grad, K_fd.components), _flat(ctx.geo.C.partials, ctx.geo.K.components)


def build_specs(settings: SuiteSettings) -> List[CheckSpec]:
    """Check definitions in catalogue order with resolved tolerances"""
    specs = []
    for name, kind, gating, default, _, description in CATALOGUE:
        if kind is CheckKind.ORACLE and not settings.oracle:
            continue
        tolerance = resolve_tolerance(name, kind, settings.tolerances, default)
        specs.append(CheckSpec(name, kind, tolerance, gating, description))
    return specs


def sample_points(settings: SuiteSettings, n: int) -> np.ndarray:
    """Explicit points, or uniform samples in the domain box"""
    if settings.points:
        points = np.asarray(settings.points, dtype=float)
        if points.ndim != 2 or points.shape[1] != n:
            raise ValueError(f"explicit points must each have {n} coordinates")
        return points
    domain = np.asarray(settings.domain if settings.domain else [(-1.0, 1.0)] * n, dtype=float)
    if domain.shape != (n, 2) or np.any(domain[:, 0] >= domain[:, 1]):
        raise ValueError(f"domain must give lo < hi for each of {n} coordinates")
    rng = np.random.default_rng(settings.seed)
    return rng.uniform(domain[:, 0], domain[:, 1], size=(settings.num_points, n))


PointOutcome = Optional[Dict[str, Optional[Tuple[float, float]]]]


def evaluate_point(space: ApSpace, space_bar: ApSpace, rho_expr: Expr, point: np.ndarray,
                   specs: Sequence[CheckSpec], settings: SuiteSettings) -> PointOutcome:
    """Deviations of every check at one point; None when the point is singular"""
    functions = {entry[0]: entry[4] for entry in CATALOGUE}
    try:
        geo = PointGeometry(space, point, settings.stroke).evaluate_all()
        bar = PointGeometry(space_bar, point, settings.stroke).evaluate_all()
        rho = ConformalFactor(rho_expr).sample(point, geo.metric)
    except SingularEvaluationError as exc:
        logger.warning("skipping singular point %s: %s", point.tolist(), exc)
        return None
    ctx = PointContext(space, rho_expr, geo, bar, rho, settings.fd_step)
    outcome = {}
    for spec in specs:
        try:
            actual, expected = functions[spec.name](ctx)
            outcome[spec.name] = deviation(actual, expected)
        except SingularEvaluationError as exc:
            logger.debug("check %s singular at %s: %s", spec.name, point.tolist(), exc)
            outcome[spec.name] = None
    return outcome


def _diagnose(result: CheckResult, stroke: Stroke):
    if result.spec.kind is CheckKind.DIAGNOSTIC:
        result.diagnostic = f"suspected typo in the displayed form: max deviation {result.max_rel:.3e}"
    elif result.spec.kind is CheckKind.IDENTIFICATION:
        result.diagnostic = (f"convention mismatch suspected: max deviation {result.max_rel:.3e} "
                             f"with stroke={stroke.value}")


def run_suite(space: ApSpace, rho: Expr, settings: Optional[SuiteSettings] = None) -> VerificationReport:
    """Run every check over the sampled points and aggregate the report"""
    settings = settings or SuiteSettings()
    if rho.max_index() >= space.n:
        raise ValueError(f"conformal factor uses x{rho.max_index() + 1} in a {space.n}-dimensional space")
    specs = build_specs(settings)
    points = sample_points(settings, space.n)
    space_bar = transform_frame(space, rho)
    logger.info("running %d checks on %s (n=%d, %d points, seed %d)",
                len(specs), space.label or "space", space.n, len(points), settings.seed)

    def task(point):
        return evaluate_point(space, space_bar, rho, point, specs, settings)

    if settings.workers > 1:
        with ThreadPoolExecutor(max_workers=settings.workers) as executor:
            outcomes = list(executor.map(task, points))
    else:
        outcomes = [task(point) for point in points]

    skipped = sum(outcome is None for outcome in outcomes)
    if points.size and skipped == len(points):
        raise AllPointsSingularError(f"all {len(points)} sampled points are singular")

    report = VerificationReport(space.label, settings.seed, settings.stroke.value,
                                points_sampled=len(points) - skipped, points_skipped=skipped)
    too_many_skipped = skipped > MAX_SKIP_FRACTION * len(points)
    for spec in specs:
        result = CheckResult(spec, points_skipped=skipped)
        for outcome in outcomes:
            if outcome is None:
                continue
            values = outcome[spec.name]
            if values is None:
                result.points_skipped += 1
            else:
                result.record(*values)
        if too_many_skipped or result.points_skipped > MAX_SKIP_FRACTION * len(points):
            result.passed = False
            result.diagnostic = (f"too many singular points: {result.points_skipped} of {len(points)} "
                                 f"skipped")
        else:
            result.passed = result.points_sampled > 0 and result.max_rel <= spec.tolerance
            if not result.passed:
                _diagnose(result, settings.stroke)
        if not result.passed:
            level = logging.WARNING if spec.gating else logging.INFO
            logger.log(level, "%s: max deviation %.3e exceeds tolerance %.1e%s", spec.name, result.max_rel,
                       spec.tolerance, f" ({result.diagnostic})" if result.diagnostic else "")
        report.checks.append(result)

    logger.info("%s: %d/%d gating checks passed, %d points skipped", space.label or "space",
                sum(c.passed for c in report.checks if c.spec.gating),
                sum(c.spec.gating for c in report.checks), skipped)
    return report
