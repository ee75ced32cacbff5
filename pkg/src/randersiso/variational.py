"""Variational machinery for the constrained area problem.

The Lagrange density combines the weighted-area integrand with the
length integrand through a multiplier,

    h(x, xdot) = (sigma/2) (x1 xdot2 - x2 xdot1) + lam * F(x, xdot),

and everything in this module is derived from it: Euler-Lagrange
residuals, normality, Weierstrass excess, functional increment, second
variation, the Jacobi data along circles, conjugate-point analysis and
the aggregated five-condition sufficiency report (after Hestenes).

Derivatives of h are taken by central finite differences on the exact
density (the angle field is evaluated at the true point, never frozen),
with parameter derivatives of sampled quantities by spectral
differentiation on the periodic grid.  The one exception is `normality`:
there the length integrand is restricted to the curve, with the angle
field sampled along it and treated as data in t.  That is the
convention under which the normality components have their reference
closed forms on circles (P1 = cos t + b sin(t+c) for the polar form);
differentiating the angle in x instead would fold the curl of the
one-form into P and change the reported values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import numdiff
from .curve import circle as _circle  # noqa: F401  (re-export convenience)
from .measure import VolumeKind, sigma_closed
from .metric import CONSTANT, EXPRESSION, POLAR, randers_norm


class VariationalError(RuntimeError):
    """Raised when a variational evaluation cannot be completed."""


# ----------------------------------------------------------------------
# Lagrange density

@dataclass(frozen=True)
class LagrangeContext:
    """Everything needed to evaluate h = f + lam*g and its derivatives."""

    plane: object
    kind: VolumeKind
    multiplier: float

    def __post_init__(self):
        if not math.isfinite(self.multiplier):
            raise ValueError("multiplier must be finite")

    @property
    def sigma(self):
        return sigma_closed(self.kind, self.plane.b, n=2)


def area_density(ctx, x, xdot):
    """f = (sigma/2) (x1 xdot2 - x2 xdot1)."""
    x = np.asarray(x, dtype=float)
    xdot = np.asarray(xdot, dtype=float)
    return 0.5 * ctx.sigma * (x[..., 0] * xdot[..., 1] - x[..., 1] * xdot[..., 0])


def length_density(plane, x, xdot):
    """g = F(x, xdot), the Randers length integrand."""
    return randers_norm(plane, x, xdot)


def lagrange_density(ctx, x, xdot):
    """h = f + lam*g at (x, xdot); broadcasts over sample axes."""
    return area_density(ctx, x, xdot) + ctx.multiplier * length_density(
        ctx.plane, x, xdot)


def lagrange_density_polar(ctx, r, rdot, t):
    """h written in polar curve coordinates x = (r cos t, r sin t).

    Equals `lagrange_density` at the corresponding Cartesian sample:
    (sigma/2) r^2 + lam * (sqrt(r^2 + rdot^2)
                           + b (rdot cos(theta - t) + r sin(theta - t))).
    """
    r = np.asarray(r, dtype=float)
    rdot = np.asarray(rdot, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(r <= 0.0):
        raise ValueError("polar form requires r > 0")
    x = np.stack([r * np.cos(t), r * np.sin(t)], axis=-1)
    speed = np.sqrt(r * r + rdot * rdot)
    plane = ctx.plane
    value = 0.5 * ctx.sigma * r * r + ctx.multiplier * speed
    if plane.b != 0.0:
        th = plane.one_form.theta(x)
        value = value + ctx.multiplier * plane.b * (
            rdot * np.cos(th - t) + r * np.sin(th - t))
    return value


def multiplier_for_circle(plane, kind, a):
    """The multiplier making circle(a) an extremal of h = f + lam*g.

    lam = -a * sigma_kind / (1 + b * thetadot * sin(c)) with thetadot = 0
    for a constant angle field and 1 for the polar field.  Expression
    fields do not make the denominator constant along circles; evaluate
    the Euler-Lagrange residual directly for those.
    """
    if a <= 0.0:
        raise ValueError("circle radius must be positive")
    form = plane.one_form
    if form.kind == CONSTANT:
        denom = 1.0
    elif form.kind == POLAR:
        denom = 1.0 + form.b * math.sin(form.angle)
    elif form.kind == EXPRESSION:
        raise VariationalError(
            "no constant multiplier for expression one-forms; "
            "check the Euler-Lagrange residual directly")
    else:
        raise ValueError(f"unknown one-form kind '{form.kind}'")
    if denom <= 0.0:
        raise VariationalError(
            f"multiplier denominator 1 + b sin(c) = {denom:g} is not positive")
    return -a * sigma_closed(kind, form.b, n=2) / denom


# ----------------------------------------------------------------------
# First-order objects

def _spectral_derivative(values, axis=-1):
    """d/dt of periodic samples on a uniform [0, 2pi) grid."""
    values = np.asarray(values, dtype=float)
    n = values.shape[axis]
    freqs = np.arange(n // 2 + 1, dtype=float)
    if n % 2 == 0:
        freqs[-1] = 0.0  # the Nyquist mode has no well-defined derivative
    spectrum = np.fft.rfft(values, axis=axis)
    shape = [1] * values.ndim
    shape[axis] = freqs.size
    return np.fft.irfft(spectrum * (1j * freqs).reshape(shape), n=n, axis=axis)


def _velocity_steps(xdot, step):
    # the norm scales every velocity derivative: F is 1-homogeneous, so
    # its y-curvature lives on the scale of |y|
    return step * np.hypot(xdot[..., 0], xdot[..., 1])[..., None]


def _density_partials(fn, x, xdot):
    """(d/dx, d/dxdot) of a density fn(x, xdot), each shaped like x.

    Order-4 stencils: the partials feed spectral differentiation and
    excess/constraint integrals whose tolerances sit at 1e-8, which a
    plain central stencil cannot reach once its noise is amplified."""
    grad_x = numdiff.gradient(lambda xx: fn(xx, xdot), x, order=4)
    grad_v = numdiff.gradient(
        lambda vv: fn(x, vv), xdot, order=4,
        absolute_step=_velocity_steps(xdot, numdiff.DEFAULT_RICHARDSON_STEP))
    return grad_x, grad_v


def euler_lagrange_residual(ctx, curve, n=None):
    """Per-node residual dh/dx_i - d/dt (dh/dxdot_i), shape (n, 2).

    Spatial and velocity partials by central differences on the exact
    density; the t-derivative by spectral differentiation of the sampled
    velocity partials.  Returns (t, residual).
    """
    s = curve.samples(n)
    h_x, h_v = _density_partials(lambda x, v: lagrange_density(ctx, x, v), s.x, s.xdot)
    res = h_x - _spectral_derivative(h_v, axis=0)
    return s.t, res


@dataclass(frozen=True)
class NormalityResult:
    t: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    max_abs_p1: float
    max_abs_p2: float
    min_joint_norm: float
    is_normal: bool


def normality(plane, curve, n=None, tol=1e-8):
    """Components P_i = g_x_i - d/dt g_xdot_i of the length integrand.

    The angle field is sampled along the curve and held as data in t
    (see the module docstring), so g carries no explicit x-dependence
    and P_i reduces to -d/dt g_xdot_i.  The curve is normal when neither
    component vanishes identically (max |P_i| > tol)."""
    s = curve.samples(n)
    b = plane.b
    if b != 0.0:
        th = plane.one_form.theta(s.x)
        cov = b * np.stack([np.cos(th), np.sin(th)], axis=-1)
    else:
        cov = np.zeros_like(s.x)

    def frozen_g(v):
        speed = np.hypot(v[..., 0], v[..., 1])
        return speed + cov[..., 0] * v[..., 0] + cov[..., 1] * v[..., 1]

    g_v = numdiff.gradient(
        frozen_g, s.xdot, order=4,
        absolute_step=_velocity_steps(s.xdot, numdiff.DEFAULT_RICHARDSON_STEP))
    p = -_spectral_derivative(g_v, axis=0)
    joint = np.hypot(p[:, 0], p[:, 1])
    max1 = float(np.max(np.abs(p[:, 0])))
    max2 = float(np.max(np.abs(p[:, 1])))
    return NormalityResult(
        t=s.t, p1=p[:, 0], p2=p[:, 1],
        max_abs_p1=max1, max_abs_p2=max2,
        min_joint_norm=float(joint.min()),
        is_normal=(max1 > tol) and (max2 > tol))


# ----------------------------------------------------------------------
# Weierstrass excess and the increment of the functional

def weierstrass_excess(ctx, x, xdot, u):
    """Definitional excess E = h(x,u) - h(x,xdot) - (u - xdot) . dh/dxdot.

    The area term and the one-form term are linear in the velocity, so
    they cancel exactly; what remains is the closed form
    (lam/|xdot|) (|u||xdot| - xdot.u), exposed separately as
    `weierstrass_excess_closed`."""
    x = np.asarray(x, dtype=float)
    xdot = np.asarray(xdot, dtype=float)
    u = np.asarray(u, dtype=float)
    _, h_v = _density_partials(lambda xx, vv: lagrange_density(ctx, xx, vv), x, xdot)
    return (lagrange_density(ctx, x, u) - lagrange_density(ctx, x, xdot)
            - np.sum((u - xdot) * h_v, axis=-1))


def weierstrass_excess_closed(multiplier, xdot, u):
    """Closed form (lam/|xdot|) (|u||xdot| - xdot.u); zero iff u = k xdot."""
    xdot = np.asarray(xdot, dtype=float)
    u = np.asarray(u, dtype=float)
    speed = np.hypot(xdot[..., 0], xdot[..., 1])
    mag = np.hypot(u[..., 0], u[..., 1])
    if np.any(speed == 0.0) or np.any(mag == 0.0):
        raise ValueError("excess is defined for nonzero velocity pairs")
    dot = xdot[..., 0] * u[..., 0] + xdot[..., 1] * u[..., 1]
    # Cauchy-Schwarz guarantees |u||xdot| >= dot; clamp roundoff so the
    # sign statement is exact
    gap = np.maximum(mag * speed - dot, 0.0)
    return multiplier / speed * gap


def functional_increment(ctx, curve, u_field, n=None):
    """Increment of J: the excess integrated against a comparison field.

    `u_field` maps the parameter array to comparison velocities (n, 2),
    nonzero at every node."""
    s = curve.samples(n)
    u = np.asarray(u_field(s.t), dtype=float)
    if u.shape != s.xdot.shape:
        raise ValueError("comparison field must match the sample grid")
    return weierstrass_excess(ctx, s.x, s.xdot, u).mean() * 2.0 * np.pi


# ----------------------------------------------------------------------
# Second variation and admissible variations

@dataclass(frozen=True)
class Variation:
    """A variation field sampled on the uniform curve grid."""

    t: np.ndarray
    y: np.ndarray
    ydot: np.ndarray

    def scaled(self, k):
        return Variation(self.t, k * self.y, k * self.ydot)


def _stacked_density(ctx):
    def fn(z):
        return lagrange_density(ctx, z[..., :2], z[..., 2:])
    return fn


def _second_partial_steps(x, xdot):
    steps = np.empty(x.shape[:-1] + (4,))
    steps[..., :2] = numdiff.DEFAULT_SECOND_STEP * np.maximum(1.0, np.abs(x))
    speed = np.hypot(xdot[..., 0], xdot[..., 1])
    steps[..., 2:] = numdiff.DEFAULT_SECOND_STEP * np.maximum(0.5, speed)[..., None]
    return steps


def _hessian_blocks(ctx, x, xdot):
    z = np.concatenate([x, xdot], axis=-1)
    h = numdiff.hessian(_stacked_density(ctx), z, order=2,
                        absolute_step=_second_partial_steps(x, xdot))
    return h[..., :2, :2], h[..., :2, 2:], h[..., 2:, 2:]


def _omega(hxx, hxv, hvv, y, ydot):
    return (np.einsum("...ij,...i,...j->...", hxx, y, y)
            + 2.0 * np.einsum("...ij,...i,...j->...", hxv, y, ydot)
            + np.einsum("...ij,...i,...j->...", hvv, ydot, ydot))


def second_variation(ctx, curve, variation):
    """J''(curve, y) = closed integral of 2*omega(t, y, ydot) dt.

    All second partials of h by central differences at the curve samples.
    Quadratic in the variation; negative on admissible non-tangential
    variations when the circle is a strict local maximum."""
    n = variation.t.size
    s = curve.samples(n)
    if not np.allclose(s.t, variation.t):
        raise ValueError("variation grid does not match the curve grid")
    hxx, hxv, hvv = _hessian_blocks(ctx, s.x, s.xdot)
    return 2.0 * _omega(hxx, hxv, hvv, variation.y, variation.ydot).mean() * 2.0 * np.pi


def variation_constraint(plane, curve, variation, mode="summed"):
    """Linearized length constraint integral for a variation field.

    mode="summed" returns the single scalar
    integral of (g_x . y + g_xdot . ydot) dt; mode="split" returns the
    two per-component integrals as an array."""
    n = variation.t.size
    s = curve.samples(n)
    g_x, g_v = _density_partials(
        lambda x, v: length_density(plane, x, v), s.x, s.xdot)
    integrand = g_x * variation.y + g_v * variation.ydot  # (n, 2) per component
    per_component = integrand.mean(axis=0) * 2.0 * np.pi
    if mode == "summed":
        return float(per_component.sum())
    if mode == "split":
        return per_component
    raise ValueError("constraint mode must be 'summed' or 'split'")


def velocity_hessian_form(ctx, xdot, y):
    """Sum h_xdot_i_xdot_j y_i y_j via the closed form
    lam (xdot2 y1 - xdot1 y2)^2 / |xdot|^3."""
    xdot = np.asarray(xdot, dtype=float)
    y = np.asarray(y, dtype=float)
    speed = np.hypot(xdot[..., 0], xdot[..., 1])
    if np.any(speed == 0.0):
        raise ValueError("velocity must be nonzero")
    cross = xdot[..., 1] * y[..., 0] - xdot[..., 0] * y[..., 1]
    return ctx.multiplier * cross**2 / speed**3


def velocity_hessian_form_fd(ctx, x, xdot, y):
    """The same contraction from the finite-difference velocity Hessian.

    Order-4 stencil with a generous velocity-proportional step: the
    density is dominated by terms linear in the velocity whose level
    (not curvature) sets the roundoff, so a small step would drown the
    quadratic part."""
    x = np.asarray(x, dtype=float)
    xdot = np.asarray(xdot, dtype=float)
    y = np.asarray(y, dtype=float)
    speed = np.hypot(xdot[..., 0], xdot[..., 1])
    hvv = numdiff.hessian(
        lambda vv: lagrange_density(ctx, x, vv), xdot, order=4,
        absolute_step=5e-3 * speed[..., None])
    return np.einsum("...ij,...i,...j->...", hvv, y, y)


# -- admissible variation sampling -------------------------------------

def endpoint_vanishing_basis(t, kmax=8):
    """Fields sin(kt) e_i and (1 - cos(kt)) e_i, k = 1..kmax, i = 1, 2.

    Every element vanishes at t = 0 and t = 2*pi.  Returns (Y, Ydot) of
    shape (4*kmax, n, 2)."""
    t = np.asarray(t, dtype=float)
    fields, derivs = [], []
    for k in range(1, kmax + 1):
        for profile, dprofile in ((np.sin(k * t), k * np.cos(k * t)),
                                  (1.0 - np.cos(k * t), k * np.sin(k * t))):
            for i in range(2):
                y = np.zeros((t.size, 2))
                yd = np.zeros((t.size, 2))
                y[:, i] = profile
                yd[:, i] = dprofile
                fields.append(y)
                derivs.append(yd)
    return np.array(fields), np.array(derivs)


def _tangential_dictionary(s, accel, kmax=8):
    """Fields phi(t) * xdot with phi in the endpoint-vanishing profiles."""
    t = s.t
    fields, derivs = [], []
    for k in range(1, kmax + 1):
        for profile, dprofile in ((np.sin(k * t), k * np.cos(k * t)),
                                  (1.0 - np.cos(k * t), k * np.sin(k * t))):
            fields.append(profile[:, None] * s.xdot)
            derivs.append(dprofile[:, None] * s.xdot + profile[:, None] * accel)
    return np.array(fields), np.array(derivs)


def _normal_reference_fields(curve, s, count=4):
    """Pointwise-normal admissible fields used for constraint projection."""
    accel = curve.acceleration(s.t)
    speed = np.hypot(s.xdot[:, 0], s.xdot[:, 1])
    normal = np.stack([s.xdot[:, 1], -s.xdot[:, 0]], axis=-1) / speed[:, None]
    dnormal = np.stack([accel[:, 1], -accel[:, 0]], axis=-1) / speed[:, None] \
        - normal * (np.sum(s.xdot * accel, axis=-1) / speed**2)[:, None]
    profiles = ((1.0 - np.cos(s.t), np.sin(s.t)),
                (np.sin(s.t), np.cos(s.t)),
                (1.0 - np.cos(2.0 * s.t), 2.0 * np.sin(2.0 * s.t)),
                (np.sin(2.0 * s.t), 2.0 * np.cos(2.0 * s.t)))
    refs = []
    for profile, dprofile in profiles[:count]:
        y = profile[:, None] * normal
        yd = dprofile[:, None] * normal + profile[:, None] * dnormal
        refs.append((y, yd))
    return refs


def _select_references(candidates_y, candidates_yd, cvals, n_constraints):
    """Pick `n_constraints` candidate fields with a well-conditioned
    constraint Gram matrix (greedy on the projection volume)."""
    order = np.argsort(-np.linalg.norm(cvals, axis=1))
    chosen = [int(order[0])]
    while len(chosen) < n_constraints:
        best, best_vol = None, 0.0
        for j in order:
            if int(j) in chosen:
                continue
            trial = cvals[chosen + [int(j)]]
            vol = abs(np.linalg.det(trial @ trial.T)) ** 0.5
            if vol > best_vol:
                best, best_vol = int(j), vol
        if best is None:
            break
        chosen.append(best)
    gram = cvals[chosen][:, :n_constraints]
    if len(chosen) < n_constraints or abs(np.linalg.det(gram)) < 1e-12:
        raise VariationalError("degenerate constraint projection references")
    return candidates_y[chosen], candidates_yd[chosen], gram


def sample_admissible_variations(plane, curve, count, rng, kmax=8, n=None,
                                 constraint_mode="summed"):
    """Random admissible variations for the second-variation test.

    Draw coefficients in the endpoint-vanishing basis, remove the
    tangential component by least squares against phi(t)*xdot profiles,
    then project onto the kernel of the linearized length constraint
    using pointwise-normal reference fields (reparametrization fields
    are length-neutral, so the steps do not fight each other).

    Returns (variations, normal_fractions)."""
    n = n or curve.default_samples()
    s = curve.samples(n)
    accel = curve.acceleration(s.t)

    basis_y, basis_yd = endpoint_vanishing_basis(s.t, kmax)
    weights = rng.standard_normal((count, basis_y.shape[0]))
    ys = np.einsum("cb,bnj->cnj", weights, basis_y)
    yds = np.einsum("cb,bnj->cnj", weights, basis_yd)

    # tangential removal (least squares on the grid)
    tan_y, tan_yd = _tangential_dictionary(s, accel, kmax)
    flat_dict = tan_y.reshape(tan_y.shape[0], -1).T          # (2n, nd)
    coef, *_ = np.linalg.lstsq(flat_dict, ys.reshape(count, -1).T, rcond=None)
    ys -= np.einsum("dc,dnj->cnj", coef, tan_y)
    yds -= np.einsum("dc,dnj->cnj", coef, tan_yd)

    # project onto the constraint kernel
    g_x, g_v = _density_partials(
        lambda x, v: length_density(plane, x, v), s.x, s.xdot)

    def constraint_values(y_batch, yd_batch):
        per = (np.einsum("cnj,nj->cn", y_batch, g_x)
               + np.einsum("cnj,nj->cn", yd_batch, g_v))
        total = per.mean(axis=1) * 2.0 * np.pi
        if constraint_mode == "summed":
            return total[:, None]
        halves = (np.einsum("cnj,nj->cnj", y_batch, g_x)
                  + np.einsum("cnj,nj->cnj", yd_batch, g_v))
        return halves.mean(axis=1) * 2.0 * np.pi

    candidates = _normal_reference_fields(curve, s)
    n_constraints = 1 if constraint_mode == "summed" else 2
    cand_y = np.array([r[0] for r in candidates])
    cand_yd = np.array([r[1] for r in candidates])
    ref_y, ref_yd, gram = _select_references(
        cand_y, cand_yd, constraint_values(cand_y, cand_yd), n_constraints)
    alpha = np.linalg.solve(gram.T, constraint_values(ys, yds).T)  # (nref, count)
    ys -= np.einsum("rc,rnj->cnj", alpha, ref_y)
    yds -= np.einsum("rc,rnj->cnj", alpha, ref_yd)

    speed = np.hypot(s.xdot[:, 0], s.xdot[:, 1])
    tangent = s.xdot / speed[:, None]
    tangential = np.einsum("cnj,nj->cn", ys, tangent)
    normal_sq = np.einsum("cnj,cnj->c", ys, ys) - np.einsum("cn,cn->c", tangential,
                                                            tangential)
    total_sq = np.einsum("cnj,cnj->c", ys, ys)
    fractions = np.sqrt(np.maximum(normal_sq, 0.0) / np.maximum(total_sq, 1e-300))

    variations = [Variation(s.t, ys[c], yds[c]) for c in range(count)]
    return variations, fractions


# ----------------------------------------------------------------------
# Jacobi data along circles and conjugate points

@dataclass(frozen=True)
class JacobiCoefficients:
    """Coefficients of the Jacobi equation along circle(a) with multiplier lam:
    h1 = lam/a^3, h2 = -lam/a^3, U = 1/a, K(t) = lam sin(t) cos(t) / a."""

    radius: float
    multiplier: float
    h1: float = field(init=False)
    h2: float = field(init=False)
    U: float = field(init=False)

    def __post_init__(self):
        if self.radius <= 0.0:
            raise ValueError("radius must be positive")
        object.__setattr__(self, "h1", self.multiplier / self.radius**3)
        object.__setattr__(self, "h2", -self.multiplier / self.radius**3)
        object.__setattr__(self, "U", 1.0 / self.radius)

    def K(self, t):
        t = np.asarray(t, dtype=float)
        return self.multiplier * np.sin(t) * np.cos(t) / self.radius


def jacobi_coefficients(a, multiplier, check=True):
    """Jacobi coefficients along circle(a); optionally self-check by FD
    that dh1/dt = 0 and dK/dt = lam cos(2t)/a along the circle."""
    coef = JacobiCoefficients(float(a), float(multiplier))
    if check:
        t = np.linspace(0.1, 2.0 * np.pi, 7)
        dk = numdiff.scalar_derivative(coef.K, t)
        target = multiplier * np.cos(2.0 * t) / a
        if np.max(np.abs(dk - target)) > 1e-6 * max(1.0, abs(multiplier / a)):
            raise VariationalError("Jacobi coefficient self-check failed for dK/dt")
        dh1 = numdiff.scalar_derivative(lambda tt: np.full_like(tt, coef.h1), t)
        if np.max(np.abs(dh1)) > 1e-9:
            raise VariationalError("Jacobi coefficient self-check failed for dh1/dt")
    return coef


@dataclass(frozen=True)
class JacobiSolution:
    """omega(t) = c1 cos t + c2 sin t + mu a^2 / lam solves the Jacobi
    equation omega'' + omega - mu a^2/lam = 0 identically."""

    c1: float
    c2: float
    mu: float
    radius: float
    multiplier: float

    def __post_init__(self):
        if self.multiplier == 0.0:
            raise ValueError("multiplier must be nonzero")

    def offset(self):
        return self.mu * self.radius**2 / self.multiplier

    def omega(self, t):
        t = np.asarray(t, dtype=float)
        return self.c1 * np.cos(t) + self.c2 * np.sin(t) + self.offset()

    def omega_second(self, t):
        t = np.asarray(t, dtype=float)
        return -self.c1 * np.cos(t) - self.c2 * np.sin(t)


def jacobi_residual(solution, t):
    """omega'' + omega - mu a^2/lam, evaluated analytically (identically 0)."""
    return solution.omega_second(t) + solution.omega(t) - solution.offset()


def conjugate_bracket(dt):
    """(t1-t0) sin(t1-t0) + 2 cos(t1-t0) - 2; negative on (0, 2*pi)."""
    dt = np.asarray(dt, dtype=float)
    return dt * np.sin(dt) + 2.0 * np.cos(dt) - 2.0


def conjugate_determinant(dt, a, multiplier):
    """Determinant (a^2/lam) U [bracket] of the conjugate-point system."""
    if multiplier == 0.0:
        raise ValueError("multiplier must be nonzero")
    if a <= 0.0:
        raise ValueError("radius must be positive")
    return (a / multiplier) * conjugate_bracket(dt)


def find_conjugate_points(a, multiplier, interval=None, nodes=10000):
    """Roots of the conjugate-point bracket in the open interval.

    Grid scan plus bisection on sign changes.  The bracket vanishes at 0
    and 2*pi; 2*pi is the trivial closure of the circle, not a conjugate
    point, which is why the default interval stays strictly inside."""
    if multiplier == 0.0:
        raise ValueError("multiplier must be nonzero")
    lo, hi = interval if interval is not None else (1e-3, 2.0 * np.pi - 1e-3)
    if not 0.0 < lo < hi:
        raise ValueError("interval must satisfy 0 < lo < hi")
    grid = np.linspace(lo, hi, nodes)
    values = conjugate_bracket(grid)
    roots = [float(g) for g, v in zip(grid, values) if v == 0.0]
    signs = np.sign(values)
    flips = np.nonzero(signs[:-1] * signs[1:] < 0.0)[0]
    for i in flips:
        left, right = grid[i], grid[i + 1]
        fleft = conjugate_bracket(left)
        for _ in range(200):
            mid = 0.5 * (left + right)
            fmid = conjugate_bracket(mid)
            if fmid == 0.0 or right - left < 1e-14:
                break
            if fleft * fmid < 0.0:
                right = mid
            else:
                left, fleft = mid, fmid
        roots.append(0.5 * (left + right))
    return sorted(roots)


# ----------------------------------------------------------------------
# The five-condition sufficiency report

@dataclass(frozen=True)
class HestenesReport:
    """Structured evidence for the five sufficiency conditions.

    Condition thresholds are recorded alongside the evidence; `overall`
    is the conjunction of the five verdicts."""

    extremal_pass: bool
    extremal_sup: float
    normal_pass: bool
    normal_max_p1: float
    normal_max_p2: float
    normal_min_joint: float
    excess_pass: bool
    excess_max: float
    second_variation_pass: bool
    second_variation_max: float
    form_pass: bool
    form_max: float
    overall: bool
    thresholds: dict
    multiplier: float
    variation_count: int
    min_normal_fraction: float

    def condition_rows(self):
        return [
            ("1 extremal (Euler-Lagrange)", self.extremal_pass,
             f"sup|EL residual| = {self.extremal_sup:.6g}"),
            ("2 normality", self.normal_pass,
             f"max|P1| = {self.normal_max_p1:.6g}, max|P2| = {self.normal_max_p2:.6g}, "
             f"min|(P1,P2)| = {self.normal_min_joint:.6g}"),
            ("3 Weierstrass excess < 0", self.excess_pass,
             f"max E off-ray = {self.excess_max:.6g}"),
            ("4 second variation < 0", self.second_variation_pass,
             f"max J'' = {self.second_variation_max:.6g}"),
            ("5 velocity quadratic form < 0", self.form_pass,
             f"max form off-ray = {self.form_max:.6g}"),
        ]

    def to_text(self):
        lines = ["Hestenes sufficiency report",
                 f"multiplier lambda = {self.multiplier:.12g}",
                 f"variations sampled = {self.variation_count}"
                 f" (min normal fraction {self.min_normal_fraction:.3g})"]
        for name, ok, detail in self.condition_rows():
            lines.append(f"condition {name}: {'PASS' if ok else 'FAIL'}   {detail}")
        lines.append(f"overall: {'PASS' if self.overall else 'FAIL'}")
        lines.append("thresholds: " + ", ".join(
            f"{k}={v:g}" for k, v in sorted(self.thresholds.items())))
        return "\n".join(lines) + "\n"


def _offray_samples(rng, s, count, ray_exclusion, mag_lo, mag_hi):
    """Random (node, direction, magnitude) samples with angle-to-velocity
    at least `ray_exclusion`."""
    idx = rng.integers(0, s.t.size, size=count)
    xdot = s.xdot[idx]
    base_angle = np.arctan2(xdot[:, 1], xdot[:, 0])
    offsets = rng.uniform(ray_exclusion, 2.0 * np.pi - ray_exclusion, size=count)
    angles = base_angle + offsets
    mags = np.exp(rng.uniform(np.log(mag_lo), np.log(mag_hi), size=count))
    vecs = mags[:, None] * np.stack([np.cos(angles), np.sin(angles)], axis=-1)
    return idx, vecs


def hestenes_report(ctx, curve, variation_count=60, rng=None, *,
                    el_tol=1e-6, normality_tol=1e-8, negativity_tol=1e-10,
                    ray_exclusion=1e-3, excess_samples=2000, form_samples=2000,
                    n=None, kmax=8, constraint_mode="summed"):
    """Run the five sufficiency checks and aggregate the evidence.

    The randomized grids for conditions (3) and (5) and the admissible
    variations for (4) are driven by the caller's generator, so equal
    seeds give bit-identical reports."""
    rng = rng if rng is not None else np.random.default_rng(0)
    n = n or curve.default_samples()
    s = curve.samples(n)

    # (1) isoperimetric extremal
    _, residual = euler_lagrange_residual(ctx, curve, n)
    el_sup = float(np.max(np.abs(residual)))
    el_pass = el_sup < el_tol

    # (2) normality
    norm_result = normality(ctx.plane, curve, n, tol=normality_tol)

    # (3) Weierstrass excess on an off-ray random grid
    idx, u = _offray_samples(rng, s, excess_samples, ray_exclusion, 0.1, 10.0)
    excess = weierstrass_excess(ctx, s.x[idx], s.xdot[idx], u)
    excess_max = float(excess.max())
    excess_pass = excess_max < -negativity_tol

    # (4) second variation on random admissible variations
    variations, fractions = sample_admissible_variations(
        ctx.plane, curve, variation_count, rng, kmax=kmax, n=n,
        constraint_mode=constraint_mode)
    hxx, hxv, hvv = _hessian_blocks(ctx, s.x, s.xdot)
    j2_values = []
    for var in variations:
        j2_values.append(2.0 * _omega(hxx, hxv, hvv, var.y, var.ydot).mean()
                         * 2.0 * np.pi)
    j2_max = float(np.max(j2_values))
    j2_pass = j2_max < 0.0

    # (5) velocity quadratic form on an off-ray random grid
    idx5, y5 = _offray_samples(rng, s, form_samples, ray_exclusion, 0.5, 2.0)
    form = velocity_hessian_form(ctx, s.xdot[idx5], y5)
    form_max = float(form.max())
    form_pass = form_max < -negativity_tol

    overall = el_pass and norm_result.is_normal and excess_pass and j2_pass and form_pass
    return HestenesReport(
        extremal_pass=el_pass, extremal_sup=el_sup,
        normal_pass=norm_result.is_normal,
        normal_max_p1=norm_result.max_abs_p1,
        normal_max_p2=norm_result.max_abs_p2,
        normal_min_joint=norm_result.min_joint_norm,
        excess_pass=excess_pass, excess_max=excess_max,
        second_variation_pass=j2_pass, second_variation_max=j2_max,
        form_pass=form_pass, form_max=form_max,
        overall=overall,
        thresholds={"el_tol": el_tol, "normality_tol": normality_tol,
                    "negativity_tol": negativity_tol,
                    "ray_exclusion": ray_exclusion},
        multiplier=ctx.multiplier,
        variation_count=variation_count,
        min_normal_fraction=float(fractions.min()) if variation_count else 0.0)
