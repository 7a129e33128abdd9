"""Generating functions G(x, y, v), their derivatives and range reparametrization.

Two families are built in:

* ``QuadraticOT``: ``G(x, y, v) = -|x - y|^2 / 2 - v``, defined for every real ``v``.
* ``NearFieldReflector``: ``G(x, y, v) = 1/(2v) - v |x - y|^2 / 2`` on ``]0, gamma[``.

Every evaluator broadcasts over leading axes: ``x`` and ``y`` have shape
``(..., 2)``, ``v`` any shape compatible with ``x[..., 0]``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import expit, logit

TWIST_MARGIN = 1e-3


class Family(enum.Enum):
    QUADRATIC_OT = "quadratic_ot"
    NEAR_FIELD_REFLECTOR = "reflector"


class DomainError(ValueError):
    """Raised when a potential lies outside the range of the generating function."""


@dataclass(frozen=True)
class GeneratingFunctionSpec:
    """A generating function family plus the reparametrization ``zeta: R -> I``.

    For the reflector, ``zeta(t) = gamma * expit(t)`` maps the real line onto
    ``]0, gamma[``; the quadratic family uses the identity.
    """

    family: Family
    gamma: Optional[float] = None

    def __post_init__(self):
        if self.family is Family.NEAR_FIELD_REFLECTOR:
            if self.gamma is None or not self.gamma > 0:
                raise ValueError("reflector family needs a positive gamma")

    @property
    def is_reflector(self) -> bool:
        return self.family is Family.NEAR_FIELD_REFLECTOR

    def _check(self, v):
        if self.is_reflector and np.any(np.asarray(v) <= 0):
            raise DomainError("reflector focal parameter must be positive")

    # raw evaluators -------------------------------------------------------
    def G(self, x, y, v):
        d2 = _sqdist(x, y)
        v = np.asarray(v, dtype=float)
        if self.is_reflector:
            self._check(v)
            return 0.5 / v - 0.5 * v * d2
        return -0.5 * d2 - v

    def grad_x(self, x, y, v):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        diff = y - x
        if self.is_reflector:
            self._check(v)
            return np.asarray(v, dtype=float)[..., None] * diff
        return np.broadcast_to(diff, np.broadcast_shapes(diff.shape, np.shape(v) + (2,))).copy()

    def dv(self, x, y, v):
        d2 = _sqdist(x, y)
        v = np.asarray(v, dtype=float)
        if self.is_reflector:
            self._check(v)
            # exact derivative of 1/(2v) - v d^2/2
            return -0.5 / v**2 - 0.5 * d2
        return np.full(np.broadcast_shapes(d2.shape, v.shape), -1.0)

    # reparametrization ----------------------------------------------------
    def zeta(self, t):
        t = np.asarray(t, dtype=float)
        if self.is_reflector:
            return self.gamma * expit(t)
        return t.copy()

    def zeta_prime(self, t):
        t = np.asarray(t, dtype=float)
        if self.is_reflector:
            s = expit(t)
            return self.gamma * s * (1.0 - s)
        return np.ones_like(t)

    def zeta_inv(self, v):
        v = np.asarray(v, dtype=float)
        if self.is_reflector:
            if np.any((v <= 0) | (v >= self.gamma)):
                raise DomainError("raw focal parameter outside ]0, gamma[")
            return logit(v / self.gamma)
        return v.copy()

    def to_raw(self, psi, raw: bool = False) -> np.ndarray:
        """Map solver coordinates to raw ones unless ``raw`` says they already are."""
        psi = np.asarray(psi, dtype=float)
        if raw:
            self._check(psi)
            return psi.copy()
        return self.zeta(psi)


def quadratic_ot() -> GeneratingFunctionSpec:
    return GeneratingFunctionSpec(Family.QUADRATIC_OT)


def reflector(gamma: float) -> GeneratingFunctionSpec:
    return GeneratingFunctionSpec(Family.NEAR_FIELD_REFLECTOR, float(gamma))


def _sqdist(x, y):
    diff = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    return np.einsum("...i,...i->...", diff, diff)


# module-level operations --------------------------------------------------

def eval_G(spec: GeneratingFunctionSpec, x, y, v):
    return spec.G(x, y, v)


def grad_x_G(spec: GeneratingFunctionSpec, x, y, v):
    return spec.grad_x(x, y, v)


def dv_G(spec: GeneratingFunctionSpec, x, y, v):
    return spec.dv(x, y, v)


def reparam_apply(spec: GeneratingFunctionSpec, t):
    return spec.zeta(t)


def reparam_derivative(spec: GeneratingFunctionSpec, t):
    return spec.zeta_prime(t)


# source domain --------------------------------------------------------------

@dataclass(frozen=True)
class Density:
    """Source density on the domain rectangle.

    ``constant`` is set for a uniform density; otherwise ``func`` maps an
    ``(..., 2)`` array of points to nonnegative values.
    """

    constant: Optional[float] = None
    func: Optional[Callable[[np.ndarray], np.ndarray]] = None

    @property
    def is_uniform(self) -> bool:
        return self.func is None

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.func is None:
            return np.full(x.shape[:-1], self.constant)
        return np.asarray(self.func(x), dtype=float)


@dataclass(frozen=True)
class Domain:
    """Axis-aligned rectangle ``[xmin, xmax] x [ymin, ymax]`` carrying a density."""

    xmin: float
    xmax: float
    ymin: float
    ymax: float
    density: Density = field(default=None)

    def __post_init__(self):
        if not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise ValueError("degenerate rectangle")
        if self.density is None:
            object.__setattr__(self, "density", Density(constant=1.0 / self.area))

    @classmethod
    def uniform(cls, xmin, xmax, ymin, ymax) -> "Domain":
        return cls(float(xmin), float(xmax), float(ymin), float(ymax))

    @classmethod
    def with_density(cls, xmin, xmax, ymin, ymax, func, normalize: bool = True) -> "Domain":
        """Rectangle with a callable density, rescaled to unit mass unless told otherwise."""
        dom = cls(float(xmin), float(xmax), float(ymin), float(ymax), Density(func=func))
        if normalize:
            from .geometry import ArcPolygon, area

            total = area(ArcPolygon.rectangle(xmin, xmax, ymin, ymax), dom.density)
            scaled = lambda x, f=func, s=total: np.asarray(f(x), dtype=float) / s
            dom = cls(dom.xmin, dom.xmax, dom.ymin, dom.ymax, Density(func=scaled))
        return dom

    @property
    def area(self) -> float:
        return (self.xmax - self.xmin) * (self.ymax - self.ymin)

    @property
    def corners(self) -> np.ndarray:
        return np.array(
            [
                [self.xmin, self.ymin],
                [self.xmax, self.ymin],
                [self.xmax, self.ymax],
                [self.xmin, self.ymax],
            ]
        )

    def diameter(self) -> float:
        return float(np.hypot(self.xmax - self.xmin, self.ymax - self.ymin))


def square_domain() -> Domain:
    """``[-1, 1]^2`` with one fourth of the Lebesgue measure."""
    return Domain.uniform(-1.0, 1.0, -1.0, 1.0)


def twist_gamma_bound(domain: Domain, sites) -> float:
    """Largest safe upper bound of the focal range for the reflector family.

    The farthest point of a rectangle from any fixed point is one of its
    corners, so the supremum of ``|x - y|`` over ``X x Y`` is a corner distance.
    """
    sites = np.atleast_2d(np.asarray(sites, dtype=float))
    if sites.shape[0] == 0:
        raise ValueError("empty site set")
    d = np.sqrt(((sites[:, None, :] - domain.corners[None, :, :]) ** 2).sum(-1)).max()
    return (1.0 - TWIST_MARGIN) / d
