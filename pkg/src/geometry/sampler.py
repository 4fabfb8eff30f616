"""
Point Geometry
Lazily evaluated bundle of every derived quantity of an AP-space at one chart point
"""

import logging
from typing import Callable, Generic, Sequence, TypeVar

import numpy as np

from .connection import curvature
from .frame import (ApSpace, FrameSample, MetricSample, TraceQuantities, christoffel, contortion,
                    contracted_torsion, frame_tensors, metric, sample_frame, symmetric_part, torsion,
                    trace_quantities, weitzenbock)
from .invariants import (QForm, Stroke, conformal_connection_circ, conformal_connection_gamma,
                         conformal_connection_hat, tensor_B, tensor_K, tensor_Q, tensor_T)
from .tensors import ConnectionSample, TensorSample

logger = logging.getLogger(__name__)

V = TypeVar("V")


class lazy(Generic[V]):
    """Compute on first access and store in the instance __dict__

    Takes no lock; each PointGeometry is evaluated by a single worker thread.
    """

    def __init__(self, fn: Callable[..., V]):
        self.fn = fn
        self.__doc__ = fn.__doc__

    def __set_name__(self, owner, name: str):
        self.name = name

    def __get__(self, obj, owner=None):
        if obj is None:
            return self
        value = self.fn(obj)
        obj.__dict__[self.name] = value
        return value


class PointGeometry:
    """Frame, metric, connections, torsion quantities and invariants at a point

    Every attribute is computed on first access and cached, so a check only pays
    for what it reads. Evaluation errors surface on that first access.
    """

    def __init__(self, space: ApSpace, point: Sequence[float], stroke: Stroke = Stroke.WEITZENBOCK):
        self.space = space
        self.point = np.asarray(point, dtype=float)
        self.stroke = stroke

    @property
    def n(self) -> int:
        return self.space.n

    @lazy
    def frame(self) -> FrameSample:
        return sample_frame(self.space, self.point)

    @lazy
    def metric(self) -> MetricSample:
        return metric(self.frame)

    @lazy
    def weitzenbock(self) -> ConnectionSample:
        return weitzenbock(self.frame)

    @lazy
    def christoffel(self) -> ConnectionSample:
        return christoffel(self.metric)

    @lazy
    def symmetric(self) -> ConnectionSample:
        return symmetric_part(self.weitzenbock)

    @lazy
    def torsion(self) -> TensorSample:
        return torsion(self.weitzenbock)

    @lazy
    def contortion(self) -> TensorSample:
        return contortion(self.weitzenbock, self.christoffel)

    @lazy
    def C(self) -> TensorSample:
        return contracted_torsion(self.torsion)

    @lazy
    def trace(self) -> TraceQuantities:
        return trace_quantities(self.C, self.metric, self.christoffel, self.symmetric)

    @lazy
    def frame_tensors(self):
        """(λᵢμ, λᵢ^μ) as mesh-slot tensors"""
        return frame_tensors(self.frame)

    @lazy
    def curvature_weitzenbock(self) -> TensorSample:
        return curvature(self.weitzenbock)

    @lazy
    def curvature_lc(self) -> TensorSample:
        return curvature(self.christoffel)

    @lazy
    def curvature_sym(self) -> TensorSample:
        return curvature(self.symmetric)

    @lazy
    def conn_gamma(self) -> ConnectionSample:
        return conformal_connection_gamma(self.weitzenbock, self.C, self.n)

    @lazy
    def conn_hat(self) -> ConnectionSample:
        return conformal_connection_hat(self.symmetric, self.C, self.n)

    @lazy
    def conn_circ(self) -> ConnectionSample:
        return conformal_connection_circ(self.christoffel, self.trace, self.metric, self.n)

    @lazy
    def T(self) -> TensorSample:
        return tensor_T(self.torsion, self.C, self.n)

    @lazy
    def K(self) -> TensorSample:
        return tensor_K(self.C, self.n)

    @lazy
    def B(self) -> TensorSample:
        return tensor_B(self.torsion, self.trace, self.weitzenbock, self.symmetric, self.n, self.stroke)

    @lazy
    def Q(self) -> TensorSample:
        return tensor_Q(self.contortion, self.torsion, self.trace, self.metric, self.weitzenbock,
                        self.symmetric, self.n, self.stroke, QForm.CORRECTED)

    @lazy
    def Q_displayed(self) -> TensorSample:
        return tensor_Q(self.contortion, self.torsion, self.trace, self.metric, self.weitzenbock,
                        self.symmetric, self.n, self.stroke, QForm.DISPLAYED)

    def evaluate_all(self) -> "PointGeometry":
        """Force every quantity, raising the first evaluation error"""
        for name in ("frame", "metric", "weitzenbock", "christoffel", "symmetric", "torsion",
                     "contortion", "C", "trace", "conn_gamma", "conn_hat", "conn_circ",
                     "T", "K", "B", "Q"):
            getattr(self, name)
        logger.debug("evaluated %s at %s", self.space.label or "space", self.point.tolist())
        return self
