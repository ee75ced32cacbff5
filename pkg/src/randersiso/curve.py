"""Closed plane curves as truncated Fourier series, with length and area.

A curve of degree M stores, per coordinate, a mean plus M cosine and M
sine coefficients:

    x_i(t) = mean_i + sum_k  cos_coef[i, k-1] cos(k t) + sin_coef[i, k-1] sin(k t)

on t in [0, 2*pi].  Closure and smoothness are automatic; velocities are
exact termwise derivatives, never finite differences.  Construction
normalizes orientation (positive signed area) and rejects irregular
curves (vanishing velocity on the sampling grid).

Quadrature is uniform-grid trapezoid, which is spectrally accurate for
these periodic integrands; integrals of trigonometric polynomials are
exact once the grid resolves twice the degree.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .measure import sigma_closed
from .metric import POLAR, MetricDomainError, randers_norm

REGULARITY_TOL = 1e-9
DEFAULT_ORIGIN_CLEARANCE = 1e-3  # minimum |x| under a polar one-form

# irrational grid offset for the simplicity check: keeps special points of
# hand-built curves (t = 0, pi, ...) off the polygon vertices
_SIMPLE_OFFSET = 0.3819660112501051


class CurveError(ValueError):
    """Raised for invalid curve data or operations on unsuitable curves."""


@dataclass(frozen=True)
class CurveSamples:
    """Positions and exact velocities on a uniform parameter grid."""

    t: np.ndarray
    x: np.ndarray
    xdot: np.ndarray


@dataclass(frozen=True)
class ClosedCurve:
    mean: np.ndarray      # (2,)
    cos_coef: np.ndarray  # (2, M)
    sin_coef: np.ndarray  # (2, M)

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(2)
        cos_coef = np.atleast_2d(np.asarray(self.cos_coef, dtype=float))
        sin_coef = np.atleast_2d(np.asarray(self.sin_coef, dtype=float))
        if cos_coef.shape != sin_coef.shape or cos_coef.shape[0] != 2:
            raise CurveError("coefficient arrays must both have shape (2, M)")
        for name, value in (("mean", mean), ("cos_coef", cos_coef), ("sin_coef", sin_coef)):
            if not np.all(np.isfinite(value)):
                raise CurveError(f"non-finite curve coefficients in {name}")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cos_coef", cos_coef)
        object.__setattr__(self, "sin_coef", sin_coef)

        n = self.default_samples()
        t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
        speed = np.hypot(*self.velocity(t).T)
        if speed.min() <= REGULARITY_TOL * max(1.0, speed.max()):
            raise CurveError("curve is not regular: velocity vanishes on the grid")
        if self._signed_area_on_grid(n) < 0.0:
            # reverse orientation (t -> -t) so Green's theorem applies as-is
            object.__setattr__(self, "sin_coef", -sin_coef)

        for arr in (self.mean, self.cos_coef, self.sin_coef):
            arr.setflags(write=False)

    # -- geometry ------------------------------------------------------

    @property
    def degree(self):
        return self.cos_coef.shape[1]

    def default_samples(self):
        return max(512, 8 * self.degree)

    def _angles(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        k = np.arange(1, self.degree + 1, dtype=float)
        return t[:, None] * k[None, :], k

    def point(self, t):
        ang, _ = self._angles(t)
        return (self.mean[None, :]
                + np.cos(ang) @ self.cos_coef.T
                + np.sin(ang) @ self.sin_coef.T)

    def velocity(self, t):
        ang, k = self._angles(t)
        return (-(np.sin(ang) * k) @ self.cos_coef.T
                + (np.cos(ang) * k) @ self.sin_coef.T)

    def acceleration(self, t):
        ang, k = self._angles(t)
        return (-(np.cos(ang) * k**2) @ self.cos_coef.T
                - (np.sin(ang) * k**2) @ self.sin_coef.T)

    def samples(self, n=None, offset=0.0):
        n = n or self.default_samples()
        t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False) + offset
        return CurveSamples(t=t, x=self.point(t), xdot=self.velocity(t))

    def _signed_area_on_grid(self, n):
        s = self.samples(n)
        cross = s.x[:, 0] * s.xdot[:, 1] - s.x[:, 1] * s.xdot[:, 0]
        return 0.5 * cross.mean() * 2.0 * np.pi

    # -- coefficient-vector form (interchange order) --------------------

    def to_coefficients(self):
        """Flat vector (a10, a11..a1M, b11..b1M, a20, a21..a2M, b21..b2M)."""
        parts = []
        for i in range(2):
            parts.append([self.mean[i]])
            parts.append(self.cos_coef[i])
            parts.append(self.sin_coef[i])
        return np.concatenate(parts)

    @classmethod
    def from_coefficients(cls, vec):
        vec = np.asarray(vec, dtype=float).ravel()
        if vec.size % 2 != 0 or (vec.size // 2 - 1) % 2 != 0:
            raise CurveError(f"coefficient vector length {vec.size} is not 2*(2M+1)")
        m = (vec.size // 2 - 1) // 2
        half = 2 * m + 1
        mean = np.array([vec[0], vec[half]])
        cos_coef = np.stack([vec[1:1 + m], vec[half + 1:half + 1 + m]])
        sin_coef = np.stack([vec[1 + m:half], vec[half + 1 + m:]])
        return cls(mean, cos_coef, sin_coef)

    # -- simple transforms ----------------------------------------------

    def phase_shifted(self, s):
        """The same geometric curve reparametrized as t -> t + s."""
        k = np.arange(1, self.degree + 1, dtype=float)
        ck, sk = np.cos(k * s), np.sin(k * s)
        return ClosedCurve(self.mean,
                           self.cos_coef * ck + self.sin_coef * sk,
                           -self.cos_coef * sk + self.sin_coef * ck)

    def scaled(self, factor):
        if factor <= 0.0:
            raise CurveError("scale factor must be positive")
        return ClosedCurve(self.mean * factor, self.cos_coef * factor,
                           self.sin_coef * factor)

    def translated(self, v):
        return ClosedCurve(self.mean + np.asarray(v, dtype=float),
                           self.cos_coef, self.sin_coef)


def circle(a):
    """The circle (a cos t, a sin t) centred at the origin."""
    if a <= 0.0:
        raise CurveError(f"circle radius must be positive, got {a}")
    return ClosedCurve(np.zeros(2), [[a], [0.0]], [[0.0], [a]])


def ellipse(rx, ry):
    """Axis-aligned ellipse (rx cos t, ry sin t) centred at the origin."""
    if rx <= 0.0 or ry <= 0.0:
        raise CurveError("ellipse radii must be positive")
    return ClosedCurve(np.zeros(2), [[rx], [0.0]], [[0.0], [ry]])


def fourier_fit(fn, degree, n=4096):
    """Project a sampled closed curve t -> (x1, x2) onto a Fourier curve.

    Exact for trigonometric polynomials of degree <= `degree` when
    n > 2*degree; otherwise a plain discrete projection.
    """
    t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    pts = np.asarray(fn(t), dtype=float)
    if pts.shape != (n, 2):
        raise CurveError("curve function must return an (n, 2) array")
    k = np.arange(1, degree + 1, dtype=float)
    ang = t[:, None] * k[None, :]
    mean = pts.mean(axis=0)
    cos_coef = 2.0 / n * pts.T @ np.cos(ang)
    sin_coef = 2.0 / n * pts.T @ np.sin(ang)
    return ClosedCurve(mean, cos_coef, sin_coef)


# ----------------------------------------------------------------------
# Measurements

def signed_area(curve, n=None):
    """Euclidean signed area (1/2) * closed integral of x1 dx2 - x2 dx1."""
    return curve._signed_area_on_grid(n or curve.default_samples())


def euclidean_length(curve, n=None):
    s = curve.samples(n)
    return np.hypot(s.xdot[:, 0], s.xdot[:, 1]).mean() * 2.0 * np.pi


def randers_length(plane, curve, n=None, r_min=DEFAULT_ORIGIN_CLEARANCE):
    """Randers length: closed integral of F(x(t), xdot(t)) dt.

    Positive for any regular curve since b < 1.  Under a polar one-form
    the curve must keep |x| >= r_min; the angle field degenerates at the
    origin.
    """
    s = curve.samples(n)
    if plane.one_form.kind == POLAR:
        clearance = np.hypot(s.x[:, 0], s.x[:, 1]).min()
        if clearance < r_min:
            raise MetricDomainError(
                f"curve approaches the origin (min |x| = {clearance:.3g} < {r_min:.3g}) "
                "where the polar angle field is singular")
    return randers_norm(plane, s.x, s.xdot).mean() * 2.0 * np.pi


def enclosed_area(curve, kind, b, n=None, check=True):
    """Volume-form-weighted enclosed area sigma_kind(b) * Euclidean area.

    Green's theorem requires a simple, positively oriented curve;
    non-simple curves are rejected.
    """
    if check and not is_simple(curve):
        raise CurveError("enclosed area requires a simple (non-self-intersecting) curve")
    return sigma_closed(kind, b, n=2) * signed_area(curve, n)


def is_simple(curve, n=512):
    """True iff the n-gon through offset samples has no proper self-crossing.

    Segment-pair orientation test over all non-adjacent pairs, O(n^2)
    vectorized.  Tangential touching does not count as a crossing.
    """
    s = curve.samples(n, offset=_SIMPLE_OFFSET * 2.0 * np.pi / n)
    p = s.x
    q = np.roll(p, -1, axis=0)

    def cross(u, v):
        return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]

    d = q - p                              # segment direction, (n, 2)
    rel_p = p[None, :, :] - p[:, None, :]  # p_j - p_i
    rel_q = q[None, :, :] - p[:, None, :]  # q_j - p_i
    d1 = cross(d[:, None, :], rel_p)
    d2 = cross(d[:, None, :], rel_q)
    straddles = (d1 * d2 < 0.0)
    proper = straddles & straddles.T       # both segments straddle the other's line

    idx = np.arange(n)
    gap = (idx[None, :] - idx[:, None]) % n
    adjacent = (gap == 0) | (gap == 1) | (gap == n - 1)
    return not bool(np.any(proper & ~adjacent))


# ----------------------------------------------------------------------
# Interchange format: degree on the first line, then the coefficient
# vector in fixed order, one decimal per line, 17 significant digits.

def dump_curve(curve, stream):
    stream.write(f"{curve.degree}\n")
    for value in curve.to_coefficients():
        stream.write(f"{value:.17g}\n")


def dumps_curve(curve):
    buf = io.StringIO()
    dump_curve(curve, buf)
    return buf.getvalue()


def load_curve(stream):
    tokens = stream.read().split()
    if not tokens:
        raise CurveError("empty curve record")
    try:
        degree = int(tokens[0])
        values = [float(tok) for tok in tokens[1:]]
    except ValueError as err:
        raise CurveError(f"malformed curve record: {err}") from None
    expected = 2 * (2 * degree + 1)
    if len(values) != expected:
        raise CurveError(
            f"curve record: expected {expected} coefficients for degree {degree}, "
            f"got {len(values)}")
    return ClosedCurve.from_coefficients(np.array(values))


def loads_curve(text):
    return load_curve(io.StringIO(text))


def read_curve_file(path):
    with open(path, "r", encoding="ascii") as fh:
        return load_curve(fh)


def write_curve_file(curve, path):
    with open(path, "w", encoding="ascii") as fh:
        dump_curve(curve, fh)
