"""
Tests for the finite-difference oracle, check bookkeeping and full verification runs
"""

import json
import math
from types import SimpleNamespace

import numpy as np
import pytest

from conftest import E2_POINT, random_sample_set
from geometry.frame import ApSpace, FrameSample, sample_frame, weitzenbock
from geometry.invariants import Stroke
from geometry.jet import JetField
from utils.expr_parser import parse
from verify.checks import (AllPointsSingularError, CheckKind, CheckResult, CheckSpec, VerificationReport,
                           deviation, resolve_tolerance)
from verify.fd_oracle import fd_oracle, fd_weitzenbock
from verify.spaces import random_space, rho_pool
from verify.suite import CATALOGUE, SuiteSettings, _frame_duality, build_specs, run_suite, sample_points


class TestFdOracle:
    def test_exp_derivative(self):
        estimate = fd_oracle(lambda x: math.exp(x[0]), [0.0], h=1e-4)
        assert estimate.value == 1.0
        assert estimate.grad[0] == pytest.approx(1.0, abs=1e-8)
        assert estimate.hess[0, 0] == pytest.approx(1.0, abs=1e-6)

    def test_mixed_partial(self):
        estimate = fd_oracle(lambda x: x[0] * x[1] ** 2, [1.0, 2.0])
        np.testing.assert_allclose(estimate.grad, [4.0, 4.0], atol=1e-7)
        np.testing.assert_allclose(estimate.hess, [[0.0, 4.0], [4.0, 2.0]], atol=1e-5)

    def test_array_valued_field(self):
        estimate = fd_oracle(lambda x: np.array([x[0], x[0] * x[1]]), [0.5, 3.0], order=1)
        assert estimate.grad.shape == (2, 2)
        assert estimate.hess is None
        np.testing.assert_allclose(estimate.grad, [[1.0, 0.0], [3.0, 0.5]], atol=1e-9)

    def test_e2_weitzenbock(self, e2_space):
        expected = weitzenbock(sample_frame(e2_space, E2_POINT)).coeff
        np.testing.assert_allclose(fd_weitzenbock(e2_space, E2_POINT), expected, atol=1e-6)

    @pytest.mark.parametrize("h", [0.0, -1e-3])
    def test_step_must_be_positive(self, h):
        with pytest.raises(ValueError):
            fd_oracle(lambda x: x[0], [0.0], h=h)

    def test_order_checked(self):
        with pytest.raises(ValueError):
            fd_oracle(lambda x: x[0], [0.0], order=3)


class TestCheckBookkeeping:
    def test_tolerance_must_be_positive(self):
        with pytest.raises(ValueError):
            CheckSpec("law_metric", CheckKind.EXACT_LAW, 0.0)
        with pytest.raises(ValueError):
            CheckSpec("law_metric", CheckKind.EXACT_LAW, -1e-8)

    def test_tolerance_resolution_order(self):
        overrides = {"law_metric": 1e-3, "exact-law": 1e-5}
        assert resolve_tolerance("law_metric", CheckKind.EXACT_LAW, overrides) == 1e-3
        assert resolve_tolerance("law_torsion", CheckKind.EXACT_LAW, overrides) == 1e-5
        assert resolve_tolerance("metricity", CheckKind.FLATNESS, {}, 1e-9) == 1e-9
        assert resolve_tolerance("oracle_metric_fd", CheckKind.ORACLE) == 1e-4
        assert resolve_tolerance("frame_duality", CheckKind.DUALITY) == 1e-9

    def test_deviation_is_relative_to_magnitude(self):
        max_abs, max_rel = deviation([100.5, 0.25], [100.0, 0.0])
        assert max_abs == 0.5
        assert max_rel == 0.25

    def test_non_finite_deviation_is_infinite(self):
        assert deviation([np.nan], [0.0]) == (math.inf, math.inf)
        assert deviation([0.0], [np.inf]) == (math.inf, math.inf)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            deviation(np.zeros(2), np.zeros(3))

    def test_result_keeps_maximum(self):
        result = CheckResult(CheckSpec("law_metric", CheckKind.EXACT_LAW, 1e-8))
        result.record(1e-10, 1e-11)
        result.record(1e-12, 1e-9)
        assert result.max_abs == 1e-10
        assert result.max_rel == 1e-9
        assert result.points_sampled == 2

    def test_report_verdict_ignores_diagnostics(self):
        report = VerificationReport("x", 0, "weitzenbock")
        report.checks.append(CheckResult(CheckSpec("a", CheckKind.EXACT_LAW, 1e-8), passed=True))
        report.checks.append(CheckResult(CheckSpec("b", CheckKind.DIAGNOSTIC, 1e-8, gating=False),
                                         passed=False, diagnostic="typo"))
        assert report.passed
        assert report.failures() == []
        assert [c.name for c in report.diagnostics()] == ["b"]
        with pytest.raises(KeyError):
            report.result("c")


class TestCatalogue:
    def test_names_are_unique(self):
        names = [entry[0] for entry in CATALOGUE]
        assert len(names) == len(set(names))

    def test_oracle_checks_can_be_disabled(self):
        with_oracle = build_specs(SuiteSettings())
        without = build_specs(SuiteSettings(oracle=False))
        assert len(with_oracle) - len(without) == 4
        assert all(spec.kind is not CheckKind.ORACLE for spec in without)

    def test_exact_checks_have_tight_tolerances(self):
        specs = {spec.name: spec for spec in build_specs(SuiteSettings())}
        assert specs["metricity"].tolerance == 1e-9
        assert specs["contortion_two_routes"].tolerance == 1e-9
        assert specs["law_weitzenbock"].tolerance == 1e-8
        assert specs["weitzenbock_flatness"].tolerance == 1e-9
        assert not specs["identification_C_displayed"].gating

    def test_overrides_apply(self):
        specs = {spec.name: spec for spec in build_specs(SuiteSettings(tolerances={"invariance": 1e-6}))}
        assert specs["invariance_B"].tolerance == 1e-6


class TestSampling:
    def test_deterministic(self):
        a = sample_points(SuiteSettings(seed=7, num_points=5), 3)
        b = sample_points(SuiteSettings(seed=7, num_points=5), 3)
        np.testing.assert_array_equal(a, b)
        assert a.shape == (5, 3)
        assert np.all(np.abs(a) <= 1.0)

    def test_domain(self):
        points = sample_points(SuiteSettings(num_points=50, domain=[(2.0, 3.0), (-5.0, -4.0)]), 2)
        assert np.all((points[:, 0] >= 2.0) & (points[:, 0] <= 3.0))
        assert np.all((points[:, 1] >= -5.0) & (points[:, 1] <= -4.0))

    def test_explicit_points(self):
        points = sample_points(SuiteSettings(points=[[0.1, 0.2]]), 2)
        np.testing.assert_array_equal(points, [[0.1, 0.2]])

    def test_bad_domain(self):
        with pytest.raises(ValueError):
            sample_points(SuiteSettings(domain=[(1.0, 0.0), (0.0, 1.0)]), 2)
        with pytest.raises(ValueError):
            sample_points(SuiteSettings(points=[[0.1, 0.2, 0.3]]), 2)


class TestRunSuite:
    def test_identity_passes_everything(self, identity_space):
        report = run_suite(identity_space, parse("0", 2), SuiteSettings(num_points=5, seed=42))
        assert report.passed
        assert all(check.passed for check in report.checks)
        assert report.points_sampled == 5

    def test_e1(self, e1_space):
        report = run_suite(e1_space, parse("x1*x2", 2), SuiteSettings(num_points=10, seed=42))
        assert report.passed, [c.name for c in report.failures()]
        displayed = report.result("law_lc_curvature_displayed_s")
        assert not displayed.passed
        assert "suspected typo" in displayed.diagnostic

    def test_e2(self, e2_space):
        report = run_suite(e2_space, parse("x1", 2), SuiteSettings(num_points=10, seed=42))
        assert report.passed, [c.name for c in report.failures()]
        assert report.result("identification_C").passed
        assert report.result("identification_C_displayed").passed

    def test_random_space(self, rng):
        space = random_space(rng, 3, label="random-3d")
        report = run_suite(space, parse("sin(x1)", 3), SuiteSettings(num_points=4, seed=3))
        assert report.passed, [c.name for c in report.failures()]

    def test_convention_flip_is_detected(self, e2_space):
        report = run_suite(e2_space, parse("x1", 2),
                           SuiteSettings(num_points=5, seed=42, stroke=Stroke.SYMMETRIC))
        result = report.result("identification_C")
        assert not result.passed
        assert "convention mismatch" in result.diagnostic
        assert "stroke=symmetric" in result.diagnostic
        assert not report.passed
        assert report.stroke == "symmetric"

    def test_deterministic_report(self, e1_space):
        settings = SuiteSettings(num_points=6, seed=11)
        first = run_suite(e1_space, parse("x1*x2", 2), settings).to_json()
        second = run_suite(e1_space, parse("x1*x2", 2), settings).to_json()
        assert first == second

    def test_workers_do_not_change_results(self, e2_space):
        serial = run_suite(e2_space, parse("x1", 2), SuiteSettings(num_points=8, seed=5))
        parallel = run_suite(e2_space, parse("x1", 2), SuiteSettings(num_points=8, seed=5, workers=4))
        assert serial.to_json() == parallel.to_json()

    def test_factor_dimension_checked(self, e1_space):
        with pytest.raises(ValueError):
            run_suite(e1_space, parse("x3", 3))

    def test_few_singular_points_are_skipped(self):
        space = ApSpace.from_strings([["sqrt(x1)", "0"], ["0", "1"]], label="sqrt")
        points = [[0.3 + 0.05 * k, 0.1 * k] for k in range(9)] + [[-0.5, 0.0]]
        report = run_suite(space, parse("x2", 2), SuiteSettings(points=points))
        assert report.points_skipped == 1
        assert report.points_sampled == 9
        assert report.passed, [c.name for c in report.failures()]

    def test_too_many_singular_points_fail_every_check(self):
        space = ApSpace.from_strings([["sqrt(x1)", "0"], ["0", "1"]], label="sqrt")
        points = [[0.5, 0.0], [0.6, 0.1], [-0.5, 0.0], [-0.6, 0.2]]
        report = run_suite(space, parse("0", 2), SuiteSettings(points=points))
        assert report.points_skipped == 2
        assert not report.passed
        for check in report.checks:
            assert not check.passed
            assert "too many singular points" in check.diagnostic

    def test_all_points_singular(self):
        space = ApSpace.from_strings([["log(x1)", "0"], ["0", "1"]])
        with pytest.raises(AllPointsSingularError):
            run_suite(space, parse("0", 2), SuiteSettings(points=[[-0.5, 0.0], [-0.2, 0.3]]))


class TestReportOutput:
    @pytest.fixture
    def report(self, e2_space):
        return run_suite(e2_space, parse("x1", 2), SuiteSettings(num_points=3, seed=1))

    def test_json_fields(self, report):
        data = json.loads(report.to_json())
        assert data["label"] == "e2"
        assert data["seed"] == 1
        assert data["passed"] is True
        first = data["checks"][0]
        assert set(first) == {"name", "kind", "tolerance", "max_abs", "max_rel", "points_sampled",
                              "points_skipped", "pass", "gating", "diagnostic"}
        assert [c["name"] for c in data["checks"]] == [spec.name for spec in build_specs(SuiteSettings())]

    def test_text_summary(self, report):
        text = report.to_text()
        gating = sum(check.spec.gating for check in report.checks)
        assert text.splitlines()[-1] == f"PASS: {gating}/{gating} checks passed"
        assert "law_lc_curvature_displayed_s" in text
        assert "suspected typo" in text

    def test_frame(self, report):
        frame = report.to_frame()
        assert len(frame) == len(report.checks)
        assert list(frame.columns)[0] == "check"


class TestSuiteAtScale:
    def test_random_4d_space_passes_for_every_factor(self):
        space, points = random_sample_set(3, 4)
        settings = SuiteSettings(points=points.tolist(), oracle=False)
        for rho in rho_pool(4):
            report = run_suite(space, rho, settings)
            assert report.points_skipped == 0
            assert report.points_sampled == 20
            assert report.passed, (rho.text(), [c.name for c in report.failures()])

    def test_duality_check_reads_derivatives(self, e2_space):
        fs = sample_frame(e2_space, E2_POINT)
        good = SimpleNamespace(n=2, geo=SimpleNamespace(frame=fs))
        actual, expected = _frame_duality(good)
        assert deviation(actual, expected)[1] < 1e-12
        bad_down = JetField(fs.lam_down.value, fs.lam_down.grad + 5.0, fs.lam_down.hess - 3.0)
        bad = SimpleNamespace(n=2, geo=SimpleNamespace(frame=FrameSample(fs.point, fs.lam_up, bad_down)))
        assert deviation(*_frame_duality(bad))[1] > 1.0
