"""
Tests for the conformal connections and the invariant tensors T, K, B and Q
"""

import numpy as np
import pytest

from conftest import E2_POINT, random_sample_set
from geometry.conformal import transform_frame
from geometry.connection import curvature, torsion_of
from geometry.errors import DimensionError, MissingPartialsError
from geometry.invariants import Stroke, tensor_K, tensor_T
from geometry.sampler import PointGeometry
from geometry.tensors import MIXED_3, TensorSample, down
from utils.expr_parser import parse
from verify.spaces import RHO_POOL, random_space

INVARIANTS = ("T", "K", "B", "Q")
CONNECTIONS = ("conn_gamma", "conn_hat", "conn_circ")


class TestHandValues:
    def test_e2_trace_free_torsion_and_K_vanish(self, e2_space):
        geo = PointGeometry(e2_space, E2_POINT)
        np.testing.assert_allclose(geo.T.components, 0.0, atol=1e-12)
        np.testing.assert_allclose(geo.K.components, 0.0, atol=1e-12)

    def test_e2_conformal_connection(self, e2_space):
        coeff = PointGeometry(e2_space, E2_POINT).conn_gamma.coeff
        expected = np.zeros((2, 2, 2))
        expected[0, 0, 0] = -1.0
        expected[1, 1, 0] = -1.0
        expected[1, 0, 1] = -1.0
        expected[0, 1, 1] = 1.0
        np.testing.assert_allclose(coeff, expected, atol=1e-12)

    def test_e1_circ_connection_is_levi_civita(self, e1_space):
        geo = PointGeometry(e1_space, [0.3, 0.1])
        np.testing.assert_allclose(geo.C.components, 0.0, atol=1e-12)
        np.testing.assert_allclose(geo.conn_circ.coeff, geo.christoffel.coeff, atol=1e-12)
        np.testing.assert_allclose(geo.conn_hat.coeff, geo.symmetric.coeff, atol=1e-12)

    def test_identity_everything_vanishes(self, identity_space):
        geo = PointGeometry(identity_space, [0.5, -0.5]).evaluate_all()
        for name in INVARIANTS:
            assert not getattr(geo, name).components.any()

    def test_connections_are_symmetric_where_expected(self, rng):
        geo = PointGeometry(random_space(rng, 3), [0.2, 0.2, -0.3])
        for name in ("conn_hat", "conn_circ"):
            coeff = getattr(geo, name).coeff
            np.testing.assert_allclose(coeff, np.swapaxes(coeff, 1, 2), atol=1e-14)


class TestPointGeometry:
    def test_values_are_cached_on_the_instance(self, e2_space):
        geo = PointGeometry(e2_space, E2_POINT)
        assert "metric" not in vars(geo)
        first = geo.metric
        assert vars(geo)["metric"] is first
        assert geo.metric is first

    def test_cache_takes_no_class_level_lock(self):
        for name in ("frame", "metric", "K", "Q"):
            assert not hasattr(vars(PointGeometry)[name], "lock")

    def test_instances_do_not_share_values(self, e1_space):
        a = PointGeometry(e1_space, [0.1, 0.2])
        b = PointGeometry(e1_space, [0.5, 0.2])
        assert a.weitzenbock is not b.weitzenbock
        assert a.metric.g.value[0, 0] != b.metric.g.value[0, 0]


class TestIdentification:
    @pytest.fixture(params=[2, 3, 4])
    def geo(self, request, rng):
        n = request.param
        return PointGeometry(random_space(rng, n), rng.uniform(-0.8, 0.8, size=n))

    def test_torsion_of_gamma_is_T(self, geo):
        np.testing.assert_allclose(torsion_of(geo.conn_gamma).components, geo.T.components, atol=1e-12)

    def test_curvature_of_gamma_is_K(self, geo):
        np.testing.assert_allclose(curvature(geo.conn_gamma).components, geo.K.components, atol=1e-9)

    def test_curvature_of_hat_is_B(self, geo):
        np.testing.assert_allclose(curvature(geo.conn_hat).components, geo.B.components, atol=1e-9)

    def test_curvature_of_circ_is_Q(self, geo):
        np.testing.assert_allclose(curvature(geo.conn_circ).components, geo.Q.components, atol=1e-9)

    def test_displayed_Q_differs(self, geo):
        difference = np.abs(geo.Q_displayed.components - geo.Q.components)
        assert difference.max() > 1e-6

    def test_antisymmetry(self, geo):
        T = geo.T.components
        np.testing.assert_allclose(T, -np.swapaxes(T, 1, 2), atol=1e-14)
        for name in ("K", "B", "Q"):
            R = getattr(geo, name).components
            np.testing.assert_allclose(R, -np.swapaxes(R, 2, 3), atol=1e-14)


class TestStrokeConvention:
    def test_symmetric_stroke_breaks_circ_identification(self, e2_space):
        geo = PointGeometry(e2_space, E2_POINT, Stroke.SYMMETRIC)
        difference = np.abs(curvature(geo.conn_circ).components - geo.Q.components)
        assert difference.max() > 1e-3

    def test_weitzenbock_stroke_is_default(self, e2_space):
        geo = PointGeometry(e2_space, E2_POINT)
        assert geo.stroke is Stroke.WEITZENBOCK
        np.testing.assert_allclose(curvature(geo.conn_circ).components, geo.Q.components, atol=1e-12)


@pytest.mark.parametrize("rho_text", RHO_POOL)
class TestInvariance:
    """Twenty points per dimension, checked to 1e-8 componentwise"""

    @pytest.fixture(params=[2, 3, 4])
    def pairs(self, request, rho_text):
        n = request.param
        space, points = random_sample_set(100 + n, n)
        bar_space = transform_frame(space, parse(rho_text, n))
        return [(PointGeometry(space, point), PointGeometry(bar_space, point)) for point in points]

    def test_invariant_tensors(self, pairs):
        for geo, bar in pairs:
            for name in INVARIANTS:
                np.testing.assert_allclose(getattr(bar, name).components, getattr(geo, name).components,
                                           rtol=1e-8, atol=1e-8, err_msg=name)

    def test_conformal_connections(self, pairs):
        for geo, bar in pairs:
            for name in CONNECTIONS:
                before, after = getattr(geo, name), getattr(bar, name)
                np.testing.assert_allclose(after.coeff, before.coeff, rtol=1e-8, atol=1e-8, err_msg=name)
                np.testing.assert_allclose(after.dcoeff, before.dcoeff, rtol=1e-8, atol=1e-8, err_msg=name)


class TestErrors:
    def test_dimension_one_rejected(self):
        point = np.zeros(1)
        lam = TensorSample(point, MIXED_3, np.zeros((1, 1, 1)))
        C = down(point, np.zeros(1), np.zeros((1, 1)))
        with pytest.raises(DimensionError):
            tensor_T(lam, C, 1)
        with pytest.raises(DimensionError):
            tensor_K(C, 1)

    def test_K_needs_partials(self):
        with pytest.raises(MissingPartialsError):
            tensor_K(down(np.zeros(2), np.ones(2)), 2)
