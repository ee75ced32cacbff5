"""Constrained shape optimization over Fourier curves.

`maximize_area` solves the discretized isoperimetric problem: maximize
the volume-form-weighted enclosed area at fixed Randers length, over the
coefficient vector of a degree-M Fourier curve.  The method is an
augmented Lagrangian on the equality constraint,

    minimize  -A(c) + eta (L(c) - L0) + (mu/2) (L(c) - L0)^2,

with central finite-difference gradients over the coefficients and a
BFGS inner descent with Armijo backtracking.  After each inner solve the
iterate is rescaled to exact feasibility (curve scaling is the natural
gauge here: lengths scale linearly and areas quadratically), the
multiplier is updated from the pre-rescale violation, and the penalty
grows whenever the violation fails to shrink by a quarter.

No gauge fixing is applied to the parametrization redundancy of the
Fourier representation; results are compared through geometric
quantities only, never through raw coefficients.

Translations are a different matter.  The continuous problem is posed
over closed curves through a fixed base point, which removes rigid
translations from the admissible variations; without that, curves under
a polar angle field can lower their length cost indefinitely by drifting
away from the origin (the second variation along a constant field is
positive) and no local maximum exists.  The discretization removes the
same two degrees of freedom by freezing the centroid coefficients
(`pin_mean`, on by default), which keeps the origin-centred circles
feasible.  Disable it only for translation-invariant (constant-angle)
one-forms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .curve import ClosedCurve, circle, enclosed_area, fourier_fit, is_simple, \
    randers_length, signed_area
from .measure import sigma_closed
from .metric import POLAR


class OptimizerError(RuntimeError):
    """Raised for invalid optimizer input (not for non-convergence)."""


@dataclass(frozen=True)
class OptimizerConfig:
    degree: int = 16
    target_length: float = 2.0 * np.pi
    penalty_initial: float = 10.0
    penalty_growth: float = 2.0
    max_outer: int = 50
    max_inner: int = 500
    gradient_tol: float = 1e-6
    constraint_tol: float = 1e-8
    origin_clearance: float = 1e-3
    pin_mean: bool = True
    seed: int = 0  # reserved for stochastic restarts; the core loop is deterministic

    def __post_init__(self):
        if self.degree < 1:
            raise OptimizerError("Fourier degree must be >= 1")
        for name in ("penalty_initial", "penalty_growth", "gradient_tol",
                     "constraint_tol", "origin_clearance", "target_length"):
            if getattr(self, name) <= 0.0:
                raise OptimizerError(f"{name} must be positive")


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    area: float
    length: float
    violation: float
    step_size: float


@dataclass(frozen=True)
class OptimizationResult:
    curve: ClosedCurve
    area: float
    length: float
    violation: float
    iterations: int
    converged: bool
    message: str
    trace: tuple = field(default=(), repr=False)


class _GridEvaluator:
    """Length/area of a raw coefficient vector on a fixed uniform grid.

    Keeps the trig design matrices prebuilt so objective and gradient
    evaluations inside the optimizer stay cheap; validity (regularity,
    origin clearance under polar forms) is checked on every call.
    """

    def __init__(self, plane, kind, degree, n=None, origin_clearance=1e-3):
        self.plane = plane
        self.sigma = sigma_closed(kind, plane.b, n=2)
        self.degree = degree
        self.n = n or max(512, 8 * degree)
        self.origin_clearance = origin_clearance
        t = np.linspace(0.0, 2.0 * np.pi, self.n, endpoint=False)
        k = np.arange(1, degree + 1, dtype=float)
        ang = t[:, None] * k[None, :]
        self._cos = np.cos(ang)
        self._sin = np.sin(ang)
        self._kcos = self._cos * k
        self._ksin = self._sin * k
        self._polar = plane.one_form.kind == POLAR

    def split(self, vec):
        m = self.degree
        half = 2 * m + 1
        return (np.array([vec[0], vec[half]]),
                np.stack([vec[1:1 + m], vec[half + 1:half + 1 + m]]),
                np.stack([vec[1 + m:half], vec[half + 1 + m:]]))

    def measures(self, vec):
        """(length, weighted_area) or None when the curve is invalid."""
        mean, cosc, sinc = self.split(vec)
        x = mean[None, :] + self._cos @ cosc.T + self._sin @ sinc.T
        v = -self._ksin @ cosc.T + self._kcos @ sinc.T
        speed = np.hypot(v[:, 0], v[:, 1])
        if speed.min() <= 1e-9 * max(1.0, speed.max()):
            return None
        integrand = speed
        if self.plane.b != 0.0:
            if self._polar:
                radius = np.hypot(x[:, 0], x[:, 1])
                if radius.min() < self.origin_clearance:
                    return None
            cov = self.plane.one_form.covector(x)
            integrand = speed + cov[:, 0] * v[:, 0] + cov[:, 1] * v[:, 1]
        length = integrand.mean() * 2.0 * np.pi
        area = 0.5 * (x[:, 0] * v[:, 1] - x[:, 1] * v[:, 0]).mean() * 2.0 * np.pi
        return length, self.sigma * area


def _fd_gradient(fn, vec, step=1e-6, fixed=()):
    grad = np.empty_like(vec)
    for i in range(vec.size):
        if i in fixed:
            grad[i] = 0.0
            continue
        h = step * max(1.0, abs(vec[i]))
        plus = vec.copy()
        plus[i] += h
        minus = vec.copy()
        minus[i] -= h
        grad[i] = (fn(plus) - fn(minus)) / (2.0 * h)
    return grad


def _bfgs_inner(fn, vec, grad_tol, max_iter, on_iterate=None, fixed=()):
    """BFGS with Armijo backtracking; `fn` may return inf for invalid points.

    Coordinates listed in `fixed` are frozen (zero gradient, never stepped)."""
    n = vec.size
    hinv = np.eye(n)
    value = fn(vec)
    if not np.isfinite(value):
        raise OptimizerError("initial iterate is infeasible for the objective")
    grad = _fd_gradient(fn, vec, fixed=fixed)
    iterations = 0
    for _ in range(max_iter):
        if np.linalg.norm(grad, ord=np.inf) < grad_tol:
            break
        direction = -hinv @ grad
        slope = float(direction @ grad)
        if not np.isfinite(slope) or slope >= 0.0:
            hinv = np.eye(n)
            direction = -grad
            slope = -float(grad @ grad)
        step = 1.0
        accepted = False
        for _ in range(60):
            candidate = vec + step * direction
            cand_value = fn(candidate)
            if np.isfinite(cand_value) and cand_value <= value + 1e-4 * step * slope:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        new_grad = _fd_gradient(fn, candidate, fixed=fixed)
        delta = step * direction
        gamma = new_grad - grad
        curv = float(delta @ gamma)
        if curv > 1e-12 * np.linalg.norm(delta) * np.linalg.norm(gamma):
            rho = 1.0 / curv
            outer = np.outer(delta, gamma)
            hinv = (np.eye(n) - rho * outer) @ hinv @ (np.eye(n) - rho * outer.T) \
                + rho * np.outer(delta, delta)
        vec, value, grad = candidate, cand_value, new_grad
        iterations += 1
        if on_iterate is not None:
            on_iterate(vec, step)
    return vec, grad, iterations


def scale_to_length(plane, curve, target, tol=1e-12, n=None):
    """Rescale a curve so its Randers length matches `target` exactly.

    Bisection on the global scale factor; the initial bracket comes from
    the linear estimate target/length."""
    base = randers_length(plane, curve, n)
    if base <= 0.0:
        raise OptimizerError("cannot rescale a curve of nonpositive length")
    guess = target / base
    lo, hi = 0.5 * guess, 2.0 * guess

    def gap(s):
        return randers_length(plane, curve.scaled(s), n) - target

    glo, ghi = gap(lo), gap(hi)
    if glo > 0.0 or ghi < 0.0:
        raise OptimizerError("length rescaling bracket failed")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        gmid = gap(mid)
        if abs(hi - lo) < tol * guess or gmid == 0.0:
            break
        if gmid < 0.0:
            lo = mid
        else:
            hi = mid
    return curve.scaled(0.5 * (lo + hi))


def _pad_coefficients(init, degree):
    if init.degree > degree:
        raise OptimizerError(
            f"initial curve degree {init.degree} exceeds configured degree {degree}")
    pad = degree - init.degree
    if pad == 0:
        return init.to_coefficients()
    cosc = np.pad(init.cos_coef, ((0, 0), (0, pad)))
    sinc = np.pad(init.sin_coef, ((0, 0), (0, pad)))
    return ClosedCurve(init.mean, cosc, sinc).to_coefficients()


def maximize_area(plane, kind, config, init):
    """Maximize weighted enclosed area at fixed Randers length.

    Returns the best feasible iterate found; `converged` is set only
    when the final violation is below the constraint tolerance and the
    projected gradient of the area is below the gradient tolerance.
    Non-convergence is reported through the flag, not an exception.
    """
    target = config.target_length
    evaluator = _GridEvaluator(plane, kind, config.degree,
                               origin_clearance=config.origin_clearance)
    init_length = randers_length(plane, init)
    if abs(init_length - target) > 0.5 * target:
        raise OptimizerError(
            f"initial length {init_length:.6g} is not within 50% of the target"
            f" {target:.6g}")
    if not is_simple(init):
        raise OptimizerError("initial curve must be simple")

    vec = _pad_coefficients(init, config.degree)
    fixed = (0, 2 * config.degree + 1) if config.pin_mean else ()
    eta = 0.0
    mu = config.penalty_initial
    trace = []
    best = None  # (area, vec, length, violation)
    total_iterations = 0
    prev_violation = None
    inner_tol = max(config.gradient_tol, 1e-3)
    message = "iteration budget exhausted"
    converged = False

    def objective(v, eta_k, mu_k):
        pair = evaluator.measures(v)
        if pair is None:
            return np.inf
        length, area = pair
        gap = length - target
        return -area + eta_k * gap + 0.5 * mu_k * gap * gap

    for outer in range(config.max_outer):
        def penalized(v, _eta=eta, _mu=mu):
            return objective(v, _eta, _mu)

        def record(v, step):
            pair = evaluator.measures(v)
            if pair is not None:
                trace.append(TraceRow(len(trace), pair[1], pair[0],
                                      abs(pair[0] - target), step))

        vec, _, used = _bfgs_inner(penalized, vec, inner_tol,
                                   config.max_inner, on_iterate=record, fixed=fixed)
        total_iterations += used

        length, area = evaluator.measures(vec)
        violation = abs(length - target)

        # multiplier update from the pre-rescale violation, then restore
        # exact feasibility by scaling (the gauge direction of the problem)
        eta += mu * (length - target)
        if prev_violation is not None and violation > 0.25 * prev_violation:
            mu *= config.penalty_growth
        prev_violation = violation

        feasible_curve = scale_to_length(
            plane, ClosedCurve.from_coefficients(vec), target)
        vec = _pad_coefficients(feasible_curve, config.degree)
        length_f, area_f = evaluator.measures(vec)
        violation_f = abs(length_f - target)

        if is_simple(feasible_curve) and (best is None or area_f > best[0]):
            best = (area_f, vec.copy(), length_f, violation_f)

        # projected gradient of -area on the constraint manifold
        area_grad = _fd_gradient(
            lambda v: -(evaluator.measures(v) or (np.nan, np.nan))[1], vec)
        len_grad = _fd_gradient(
            lambda v: (evaluator.measures(v) or (np.nan, np.nan))[0], vec)
        len_norm_sq = float(len_grad @ len_grad)
        projected = area_grad - (float(area_grad @ len_grad) / len_norm_sq) * len_grad
        projected_norm = float(np.linalg.norm(projected, ord=np.inf))
        trace.append(TraceRow(len(trace), area_f, length_f, violation_f,
                              projected_norm))

        if violation_f < config.constraint_tol and projected_norm < config.gradient_tol:
            converged = True
            message = "converged"
            break
        inner_tol = max(config.gradient_tol, 0.1 * inner_tol)

    if best is None:
        final_vec = vec
        final_curve = ClosedCurve.from_coefficients(final_vec)
        length_f, area_f = evaluator.measures(final_vec)
        converged = False
        message = "no simple feasible iterate found"
    else:
        area_f, final_vec, length_f, violation_f = best
        final_curve = ClosedCurve.from_coefficients(final_vec)

    return OptimizationResult(
        curve=final_curve, area=area_f, length=length_f,
        violation=abs(length_f - target), iterations=total_iterations,
        converged=converged, message=message, trace=tuple(trace))


# ----------------------------------------------------------------------
# Perturbation scan around circles

@dataclass(frozen=True)
class ModeScan:
    mode: int
    delta_plus: float
    delta_minus: float
    curvature: float


def support_mode_perturbation(a, mode, eps):
    """circle(a) perturbed along support-function mode `mode`.

    The boundary of the body with support function a + eps*a*cos(k phi):
    mode 1 is an exact translation by eps*a, higher modes are genuine
    shape changes.  The result is a Fourier curve of degree mode + 1.
    """
    delta = eps * a

    def fn(t):
        u = np.stack([np.cos(t), np.sin(t)], axis=-1)
        uperp = np.stack([-np.sin(t), np.cos(t)], axis=-1)
        h = a + delta * np.cos(mode * t)
        hprime = -delta * mode * np.sin(mode * t)
        return h[:, None] * u + hprime[:, None] * uperp

    return fourier_fit(fn, degree=mode + 1, n=max(256, 16 * mode))


def perturbation_scan(plane, kind, a, modes, eps=1e-3, n=None):
    """Area change of length-matched support-mode perturbations of circle(a).

    For each mode k, the perturbed curves at +eps and -eps are rescaled
    to the circle's exact Randers length, and the rows report the area
    differences plus the second-difference curvature estimate
    (delta_plus + delta_minus) / eps^2.  Negative deltas in every mode
    are the numerical signature of the circle being a local maximum.
    """
    if eps < 0.0:
        raise OptimizerError("perturbation size must be nonnegative")
    base_curve = circle(a)
    target = randers_length(plane, base_curve, n)
    base_area = enclosed_area(base_curve, kind, plane.b, n)
    rows = []
    for mode in modes:
        if mode < 1:
            raise OptimizerError("perturbation modes must be >= 1")
        deltas = []
        for sign in (1.0, -1.0):
            if eps == 0.0:
                deltas.append(0.0)
                continue
            perturbed = support_mode_perturbation(a, mode, sign * eps)
            matched = scale_to_length(plane, perturbed, target, n=n)
            deltas.append(enclosed_area(matched, kind, plane.b, n) - base_area)
        curvature = (deltas[0] + deltas[1]) / eps**2 if eps > 0.0 else 0.0
        rows.append(ModeScan(mode, deltas[0], deltas[1], curvature))
    return rows


def isoperimetric_deficit(curve, n=None):
    """Euclidean deficit L^2 - 4*pi*A; nonnegative for simple curves,
    zero exactly on circles."""
    if not is_simple(curve):
        raise OptimizerError("the isoperimetric deficit requires a simple curve")
    s = curve.samples(n)
    length = np.hypot(s.xdot[:, 0], s.xdot[:, 1]).mean() * 2.0 * np.pi
    return length * length - 4.0 * np.pi * signed_area(curve, n)
