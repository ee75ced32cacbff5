"""Volume-form densities for Randers planes and general (alpha, beta) metrics.

Four densities are supported, identified by `VolumeKind`:

  * BH      Busemann-Hausdorff: Euclidean ball volume over unit-ball volume.
  * HT      Holmes-Thompson: averaged det(g) over the unit ball.
  * MAX/MIN extrema of sqrt(det(g)) over the indicatrix.

For Randers metrics all four have closed forms (`sigma_closed`).  The
general (alpha, beta) volume factor is computed by quadrature from a
user-supplied profile phi(s) (`volume_factor_quadrature`), and
`sigma_definition` evaluates the densities straight from their
definitions as an independent cross-check.

Known wrinkle, surfaced deliberately: the definitional max/min values
for Randers are (1 +/- b)**((n+1)/2), the extremum of sqrt(det g), while
the closed forms used by every area functional are (1 +/- b)**(n+1), the
extremum of det(g) itself.  `sigma_closed` follows the area convention;
`sigma_definition` reports the definitional number.  Both are exposed
and never silently reconciled.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import minimize_scalar

from . import exprparse, numdiff
from .metric import indicatrix_radius, tensor_determinant


class QuadratureError(RuntimeError):
    """Quadrature failed to reach the requested tolerance."""


class RegularityError(ValueError):
    """The (alpha, beta) profile violates a regularity requirement."""


class VolumeKind(Enum):
    BH = "bh"
    HT = "ht"
    MAX = "max"
    MIN = "min"

    @classmethod
    def from_name(cls, name):
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ValueError(f"unknown volume kind '{name}'") from None


def sigma_closed(kind, b, n=2):
    """Closed-form Randers density for the given volume kind.

    BH: (1-b^2)^((n+1)/2), HT: 1, MAX: (1+b)^(n+1), MIN: (1-b)^(n+1).
    Requires 0 <= b < 1 and n >= 2.
    """
    b = float(b)
    if not (0.0 <= b < 1.0):
        raise ValueError(f"amplitude must satisfy 0 <= b < 1, got {b}")
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    if kind == VolumeKind.BH:
        return (1.0 - b * b) ** ((n + 1) / 2.0)
    if kind == VolumeKind.HT:
        return 1.0
    if kind == VolumeKind.MAX:
        return (1.0 + b) ** (n + 1)
    if kind == VolumeKind.MIN:
        return (1.0 - b) ** (n + 1)
    raise ValueError(f"unknown volume kind {kind!r}")


def trapezoid_doubling(fn, lo, hi, n0=4096, tol=1e-10, max_doublings=6):
    """Uniform trapezoid quadrature, doubling nodes until stable.

    `fn` must be vectorized.  For smooth integrands that extend to smooth
    periodic functions (everything in this module), the rule converges
    spectrally, so doubling stabilizes after very few rounds.
    """
    def estimate(n):
        t = np.linspace(lo, hi, n + 1)
        values = fn(t)
        return np.trapezoid(values, dx=(hi - lo) / n)

    n = n0
    prev = estimate(n)
    for _ in range(max_doublings):
        n *= 2
        cur = estimate(n)
        if abs(cur - prev) < tol:
            return cur
        prev = cur
    raise QuadratureError(
        f"trapezoid failed to stabilize below {tol} after {max_doublings} doublings")


@dataclass(frozen=True)
class PhiSpec:
    """Profile phi(s) of an (alpha, beta)-metric F = alpha * phi(beta/alpha).

    `source` is an expression in the variable s, valid on s in [-b, b].
    Regularity (phi > 0 and T > 0 on the range) is enforced where the
    quadrature samples the profile.
    """

    source: str
    n: int = 2
    b: float = 0.0
    _compiled: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"dimension must be >= 2, got {self.n}")
        if not (0.0 <= self.b < 1.0):
            raise ValueError(f"amplitude must satisfy 0 <= b < 1, got {self.b}")
        object.__setattr__(self, "_compiled",
                           exprparse.parse(self.source, variables=("s",)))

    def phi(self, s):
        return np.asarray(exprparse.evaluate(self._compiled, {"s": s}), dtype=float)

    def phi_prime(self, s):
        return numdiff.scalar_derivative(self.phi, np.asarray(s, dtype=float))

    def phi_second(self, s):
        return numdiff.scalar_second_derivative(self.phi, np.asarray(s, dtype=float))

    def regularity_factor(self, s):
        """T(s) = phi (phi - s phi')^(n-2) [phi - s phi' + (b^2 - s^2) phi'']."""
        s = np.asarray(s, dtype=float)
        p = self.phi(s)
        p1 = self.phi_prime(s)
        p2 = self.phi_second(s)
        core = p - s * p1
        return p * core ** (self.n - 2) * (core + (self.b**2 - s * s) * p2)


def volume_factor_quadrature(phi, kind, tol=1e-10):
    """General (alpha, beta) volume factor f(b) for BH or HT by quadrature.

      BH: (int_0^pi sin^(n-2) t dt) / (int_0^pi sin^(n-2) t / phi(b cos t)^n dt)
      HT: (int_0^pi sin^(n-2) t * T(b cos t) dt) / (int_0^pi sin^(n-2) t dt)
    """
    n, b = phi.n, phi.b

    def sin_pow(t):
        return np.sin(t) ** (n - 2)

    def check_positive(values, what):
        if np.any(values <= 0.0):
            raise RegularityError(f"{what} must be positive on s in [-b, b]")

    reference = trapezoid_doubling(sin_pow, 0.0, np.pi, tol=tol)
    if kind == VolumeKind.BH:
        def integrand(t):
            p = phi.phi(b * np.cos(t))
            check_positive(p, "phi")
            return sin_pow(t) / p**n

        return reference / trapezoid_doubling(integrand, 0.0, np.pi, tol=tol)
    if kind == VolumeKind.HT:
        def integrand(t):
            tval = phi.regularity_factor(b * np.cos(t))
            check_positive(tval, "the regularity factor T")
            return sin_pow(t) * tval

        return trapezoid_doubling(integrand, 0.0, np.pi, tol=tol) / reference
    raise ValueError("the general volume factor is defined for BH and HT only")


def sigma_definition(plane, x, kind, n0=1024, tol=3e-9):
    """Density at x evaluated straight from the definitions (n = 2).

    BH integrates the indicatrix-enclosed Euclidean area; HT integrates
    det(g) over the unit ball in polar form; MAX/MIN locate the extremum
    of sqrt(det g) on the indicatrix by scan plus golden-section refine.
    det(g) comes from the finite-difference fundamental tensor, so this
    path is independent of the Randers closed forms.
    """
    x = np.asarray(x, dtype=float)

    if kind == VolumeKind.BH:
        def half_rho_sq(psi):
            return 0.5 * indicatrix_radius(plane, x, psi) ** 2

        area = trapezoid_doubling(half_rho_sq, 0.0, 2.0 * np.pi, n0=n0, tol=1e-12)
        return np.pi / area

    if kind == VolumeKind.HT:
        def integrand(psi):
            # det(g) is 0-homogeneous in y, so the radial integral of
            # det(g) r dr is rho^2/2 times its value along the ray
            y = np.stack([np.cos(psi), np.sin(psi)], axis=-1)
            det = tensor_determinant(plane, x, y)
            rho = indicatrix_radius(plane, x, psi)
            return 0.5 * rho**2 * det

        return trapezoid_doubling(integrand, 0.0, 2.0 * np.pi, n0=n0, tol=tol) / np.pi

    if kind in (VolumeKind.MAX, VolumeKind.MIN):
        sign = -1.0 if kind == VolumeKind.MAX else 1.0

        def objective(psi):
            y = np.stack([np.cos(psi), np.sin(psi)], axis=-1)
            rho = indicatrix_radius(plane, x, psi)
            return sign * np.sqrt(tensor_determinant(plane, x, rho[..., None] * y))

        psi_grid = np.linspace(0.0, 2.0 * np.pi, n0, endpoint=False)
        values = objective(psi_grid)
        i = int(np.argmin(values))
        if values.max() - values.min() < 1e-12:
            return sign * float(values[i])  # flat objective (b -> 0)
        spacing = 2.0 * np.pi / n0
        result = minimize_scalar(
            lambda p: float(objective(np.asarray(p))),
            bracket=(psi_grid[i] - spacing, psi_grid[i], psi_grid[i] + spacing),
            method="golden", options={"xtol": 1e-10})
        return sign * result.fun

    raise ValueError(f"unknown volume kind {kind!r}")
