"""
Tests for curvature, torsion and covariant differentiation of connection samples
"""

import math

import numpy as np
import pytest

from geometry.connection import alt, antisymmetrize_last2, covariant_derivative, curvature, torsion_of
from geometry.errors import DimensionError, MissingPartialsError
from geometry.tensors import MIXED_3, ConnectionSample, Slot, TensorSample, down, up


def sphere_connection(theta: float) -> ConnectionSample:
    """Levi-Civita connection of the unit sphere in (θ, φ)"""
    coeff = np.zeros((2, 2, 2))
    dcoeff = np.zeros((2, 2, 2, 2))
    coeff[0, 1, 1] = -math.sin(theta) * math.cos(theta)
    coeff[1, 0, 1] = coeff[1, 1, 0] = math.cos(theta) / math.sin(theta)
    dcoeff[0, 1, 1, 0] = -math.cos(2 * theta)
    dcoeff[1, 0, 1, 0] = dcoeff[1, 1, 0, 0] = -1.0 / math.sin(theta) ** 2
    return ConnectionSample(np.array([theta, 0.3]), coeff, dcoeff, label="sphere", symmetric=True)


class TestAntisymmetrizer:
    def test_alt_of_symmetric_array_vanishes(self):
        a = np.arange(8.0).reshape(2, 2, 2)
        assert not alt(a + np.swapaxes(a, 1, 2)).any()

    def test_alt_is_antisymmetric(self, rng):
        a = rng.normal(size=(3, 3, 3, 3))
        b = alt(a)
        np.testing.assert_array_equal(b, -np.swapaxes(b, 2, 3))

    def test_tensor_partials_follow_components(self, rng):
        t = TensorSample(np.zeros(2), MIXED_3, rng.normal(size=(2, 2, 2)), rng.normal(size=(2, 2, 2, 2)))
        a = antisymmetrize_last2(t)
        np.testing.assert_array_equal(a.components, alt(t.components))
        np.testing.assert_array_equal(a.partials, t.partials - np.swapaxes(t.partials, 1, 2))

    def test_rank_one_rejected(self):
        with pytest.raises(DimensionError):
            antisymmetrize_last2(down(np.zeros(2), np.ones(2)))
        with pytest.raises(DimensionError):
            antisymmetrize_last2(np.ones(2))


class TestCurvature:
    def test_sphere(self):
        theta = 1.0
        R = curvature(sphere_connection(theta)).components
        assert R[0, 1, 0, 1] == pytest.approx(math.sin(theta) ** 2)
        assert R[0, 1, 1, 0] == pytest.approx(-math.sin(theta) ** 2)
        assert R[1, 0, 1, 0] == pytest.approx(1.0)
        np.testing.assert_allclose(R, -np.swapaxes(R, 2, 3), atol=1e-14)

    def test_constant_zero_connection_is_flat(self):
        c = ConnectionSample(np.zeros(3), np.zeros((3, 3, 3)), np.zeros((3, 3, 3, 3)))
        assert not curvature(c).components.any()

    def test_needs_partials(self):
        with pytest.raises(MissingPartialsError):
            curvature(ConnectionSample(np.zeros(2), np.zeros((2, 2, 2))))


class TestTorsion:
    def test_symmetric_connection_is_torsion_free(self):
        T = torsion_of(sphere_connection(0.7))
        assert not T.components.any()
        assert not T.partials.any()

    def test_torsion_is_antisymmetric_difference(self, rng):
        coeff = rng.normal(size=(3, 3, 3))
        T = torsion_of(ConnectionSample(np.zeros(3), coeff)).components
        np.testing.assert_allclose(T, coeff - np.swapaxes(coeff, 1, 2))
        assert T.shape == (3, 3, 3)


class TestCovariantDerivative:
    def test_covector(self, rng):
        coeff = rng.normal(size=(2, 2, 2))
        v = down(np.zeros(2), np.array([1.0, 2.0]), np.zeros((2, 2)))
        result = covariant_derivative(v, ConnectionSample(np.zeros(2), coeff)).components
        np.testing.assert_allclose(result, -np.einsum("e,ems->ms", v.components, coeff))

    def test_vector(self, rng):
        coeff = rng.normal(size=(2, 2, 2))
        v = up(np.zeros(2), np.array([1.0, -3.0]), np.ones((2, 2)))
        result = covariant_derivative(v, ConnectionSample(np.zeros(2), coeff)).components
        np.testing.assert_allclose(result, 1.0 + np.einsum("e,aes->as", v.components, coeff))

    def test_mesh_slot_has_no_connection_term(self, rng):
        coeff = rng.normal(size=(2, 2, 2))
        frame = TensorSample(np.zeros(2), (Slot.MESH, Slot.DOWN), np.eye(2), np.zeros((2, 2, 2)))
        result = covariant_derivative(frame, ConnectionSample(np.zeros(2), coeff)).components
        # λᵢμ|σ = −λᵢε Γ^ε_{μσ}
        np.testing.assert_allclose(result, -coeff)
        assert covariant_derivative(frame, ConnectionSample(np.zeros(2), coeff)).variance == (
            Slot.MESH, Slot.DOWN, Slot.DOWN)

    def test_metric_is_parallel_on_sphere(self):
        theta = 0.9
        g = np.diag([1.0, math.sin(theta) ** 2])
        dg = np.zeros((2, 2, 2))
        dg[1, 1, 0] = math.sin(2 * theta)
        metric = TensorSample(np.array([theta, 0.3]), (Slot.DOWN, Slot.DOWN), g, dg)
        np.testing.assert_allclose(covariant_derivative(metric, sphere_connection(theta)).components, 0.0,
                                   atol=1e-14)

    def test_needs_partials(self):
        with pytest.raises(MissingPartialsError):
            covariant_derivative(down(np.zeros(2), np.ones(2)), ConnectionSample(np.zeros(2), np.zeros((2, 2, 2))))

    def test_dimension_mismatch(self):
        v = down(np.zeros(3), np.ones(3), np.zeros((3, 3)))
        with pytest.raises(DimensionError):
            covariant_derivative(v, ConnectionSample(np.zeros(2), np.zeros((2, 2, 2))))
