"""Randers metric on the plane: norm, one-form, fundamental tensor, indicatrix.

The metric is the Euclidean norm plus a one-form of constant amplitude,

    F(x, y) = |y| + b * (cos(theta(x)) * y1 + sin(theta(x)) * y2),

with 0 < b < 1 so that F stays positive on nonzero tangent vectors.  The
angle field theta is one of: a constant, the polar angle atan2(x2, x1)
plus a constant, or a user-supplied expression in (x1, x2).

All evaluators broadcast over a leading sample axis: points and tangent
vectors have shape (..., 2).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import exprparse, numdiff

ORIGIN_EXCLUSION = 1e-9  # polar angle is undefined at the origin

CONSTANT = "constant"
POLAR = "polar"
EXPRESSION = "expression"


class MetricDomainError(ValueError):
    """Raised when a query point/vector is outside the metric's domain."""


class MetricDataError(ValueError):
    """Raised when metric data is invalid (bad amplitude, non-PD tensor)."""


@dataclass(frozen=True)
class OneForm:
    """One-form b*(cos(theta) dx1 + sin(theta) dx2) with constant amplitude b.

    Build through the factory classmethods, which enforce 0 < b < 1.
    `euclidean_oracle` constructs the degenerate b = 0 form; it exists so
    tests can compare against plain Euclidean geometry and is not part of
    the validated public surface.
    """

    kind: str
    b: float
    angle: float = 0.0
    source: str | None = None
    _compiled: object = field(default=None, repr=False, compare=False)

    @classmethod
    def constant(cls, b, c=0.0):
        _check_amplitude(b)
        return cls(CONSTANT, float(b), float(c))

    @classmethod
    def polar(cls, b, c=0.0):
        _check_amplitude(b)
        return cls(POLAR, float(b), float(c))

    @classmethod
    def expression(cls, b, source):
        _check_amplitude(b)
        compiled = exprparse.parse(source, variables=("x1", "x2"))
        return cls(EXPRESSION, float(b), 0.0, source, compiled)

    @classmethod
    def euclidean_oracle(cls):
        return cls(CONSTANT, 0.0, 0.0)

    def theta(self, x):
        """Angle field at points x of shape (..., 2); returns shape (...)."""
        x = np.asarray(x, dtype=float)
        if self.kind == CONSTANT:
            return np.full(x.shape[:-1], self.angle)
        if self.kind == POLAR:
            r = np.hypot(x[..., 0], x[..., 1])
            if np.any(r < ORIGIN_EXCLUSION):
                raise MetricDomainError(
                    "polar angle is undefined within %g of the origin" % ORIGIN_EXCLUSION)
            return np.arctan2(x[..., 1], x[..., 0]) + self.angle
        if self.kind == EXPRESSION:
            value = exprparse.evaluate(self._compiled, {"x1": x[..., 0], "x2": x[..., 1]})
            return np.broadcast_to(np.asarray(value, dtype=float), x.shape[:-1])
        raise MetricDataError(f"unknown one-form kind '{self.kind}'")

    def covector(self, x):
        """The covector (b cos(theta), b sin(theta)) at x, shape (..., 2)."""
        th = self.theta(x)
        return self.b * np.stack([np.cos(th), np.sin(th)], axis=-1)


def _check_amplitude(b):
    if not (0.0 < float(b) < 1.0):
        raise MetricDataError(f"one-form amplitude must satisfy 0 < b < 1, got {b}")


def from_exact_one_form(p, q):
    """One-form matching the exact form p dx1 + q dx2 (constant coefficients).

    Requires 0 < p**2 + q**2 < 1; the result is a constant-angle form with
    amplitude hypot(p, q) and angle atan2(q, p).
    """
    b = float(np.hypot(p, q))
    if b == 0.0:
        raise MetricDataError("p = q = 0 gives a degenerate one-form")
    if b >= 1.0:
        raise MetricDataError(f"p**2 + q**2 must be < 1, got amplitude {b}")
    return OneForm.constant(b, float(np.arctan2(q, p)))


@dataclass(frozen=True)
class RandersPlane:
    """The plane with F = |y| + beta(x, y); alpha is fixed Euclidean."""

    one_form: OneForm

    @property
    def b(self):
        return self.one_form.b

    @classmethod
    def euclidean_oracle(cls):
        return cls(OneForm.euclidean_oracle())


@dataclass(frozen=True)
class TangentSample:
    """A point/velocity pair (x, y) with y nonzero."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        y = np.atleast_1d(np.asarray(self.y, dtype=float))
        if x.shape[-1] != 2 or y.shape[-1] != 2:
            raise MetricDataError("tangent samples live on the plane (2 components)")
        if np.any(np.hypot(y[..., 0], y[..., 1]) == 0.0):
            raise MetricDomainError("tangent vector must be nonzero")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)


def randers_norm(plane, x, y):
    """F(x, y) = |y| + b*(cos(theta) y1 + sin(theta) y2), shape (...)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    alpha = np.hypot(y[..., 0], y[..., 1])
    if np.any(alpha == 0.0):
        raise MetricDomainError("F is evaluated on nonzero tangent vectors only")
    if plane.b == 0.0:
        return alpha
    cov = plane.one_form.covector(x)
    return alpha + cov[..., 0] * y[..., 0] + cov[..., 1] * y[..., 1]


def fundamental_tensor(plane, x, y, step=numdiff.DEFAULT_RICHARDSON_STEP):
    """Velocity Hessian of F**2/2 at (x, y), shape (..., 2, 2).

    Computed by order-4 central differences with step scaled by max(1, |y|);
    the stencil is symmetric by construction.  Raises MetricDataError when
    the result is not positive definite, which signals either invalid
    metric data or a finite-difference failure.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x_b, y_b = np.broadcast_arrays(x, y)

    def half_norm_sq(v):
        return 0.5 * randers_norm(plane, x_b, v) ** 2

    # step scales with the vector norm, not per component: F**2 is
    # 2-homogeneous, so the Hessian varies on the scale of |y| in every
    # direction.
    scale = np.maximum(1.0, np.hypot(y_b[..., 0], y_b[..., 1]))[..., None]
    g = numdiff.hessian(half_norm_sq, y_b, order=4, absolute_step=step * scale)
    tr = g[..., 0, 0] + g[..., 1, 1]
    det = g[..., 0, 0] * g[..., 1, 1] - g[..., 0, 1] * g[..., 1, 0]
    if np.any(det <= 0.0) or np.any(tr <= 0.0):
        raise MetricDataError("fundamental tensor is not positive definite")
    return g


def tensor_determinant(plane, x, y, step=numdiff.DEFAULT_RICHARDSON_STEP):
    """det of the fundamental tensor, shape (...)."""
    g = fundamental_tensor(plane, x, y, step=step)
    return g[..., 0, 0] * g[..., 1, 1] - g[..., 0, 1] * g[..., 1, 0]


def indicatrix_radius(plane, x, psi):
    """Radius rho with F(x, rho*(cos psi, sin psi)) = 1.

    Closed form rho = 1 / (1 + b cos(psi - theta(x))), positive since b < 1.
    """
    x = np.asarray(x, dtype=float)
    psi = np.asarray(psi, dtype=float)
    if plane.b == 0.0:
        return np.ones(np.broadcast(psi, x[..., 0]).shape)
    th = plane.one_form.theta(x)
    return 1.0 / (1.0 + plane.b * np.cos(psi - th))
