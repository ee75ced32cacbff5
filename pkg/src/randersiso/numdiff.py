"""Central finite-difference helpers shared across the toolkit.

All routines accept vectorized callables: `f` maps an array of points of
shape (..., d) to values of shape (...).  Steps may be scalars or arrays
broadcastable to the point array, so per-sample step scaling is cheap.

Second derivatives are offered at two accuracies: plain central stencils
(order 2, noise floor around eps/h^2) and Richardson-extrapolated
stencils (order 4), which are required wherever results must hold to
1e-8 or better.
"""

from __future__ import annotations

import numpy as np

DEFAULT_FIRST_STEP = 1e-6
DEFAULT_SECOND_STEP = 1.2e-4   # ~eps**(1/4), balances truncation/roundoff at order 2
DEFAULT_RICHARDSON_STEP = 1e-3  # order-4 stencils tolerate a larger step


def scalar_derivative(f, x, step=DEFAULT_FIRST_STEP):
    """Central first derivative of a scalar (or vectorized scalar) function."""
    h = step * np.maximum(1.0, np.abs(x))
    return (f(x + h) - f(x - h)) / (2.0 * h)


def scalar_second_derivative(f, x, step=DEFAULT_RICHARDSON_STEP):
    """Order-4 (Richardson) central second derivative."""
    h = step * np.maximum(1.0, np.abs(x))
    f0 = f(x)

    def d2(hh):
        return (f(x + hh) - 2.0 * f0 + f(x - hh)) / hh**2

    return (4.0 * d2(h) - d2(2.0 * h)) / 3.0


def _component_steps(z, step):
    z = np.asarray(z, dtype=float)
    h = step * np.maximum(1.0, np.abs(z))
    return z, h


def gradient(f, z, step=None, order=2, absolute_step=None):
    """Central first partials of f along the last axis of z: (..., d).

    order=2 is the plain central stencil; order=4 Richardson-extrapolates
    it, pushing the noise floor low enough for 1e-8-level targets.
    Steps default to `step * max(1, |z_i|)` per component; pass
    `absolute_step` (scalar or broadcastable to z) to control them.
    """
    if order not in (2, 4):
        raise ValueError("order must be 2 or 4")
    if absolute_step is not None:
        z = np.asarray(z, dtype=float)
        h = np.broadcast_to(np.asarray(absolute_step, dtype=float), z.shape)
    else:
        if step is None:
            step = DEFAULT_FIRST_STEP if order == 2 else DEFAULT_RICHARDSON_STEP
        z, h = _component_steps(z, step)
    out = np.empty_like(z)
    for i in range(z.shape[-1]):
        dz = np.zeros_like(z)
        dz[..., i] = h[..., i]
        d1 = (f(z + dz) - f(z - dz)) / (2.0 * h[..., i])
        if order == 2:
            out[..., i] = d1
        else:
            d2 = (f(z + 2.0 * dz) - f(z - 2.0 * dz)) / (4.0 * h[..., i])
            out[..., i] = (4.0 * d1 - d2) / 3.0
    return out


def hessian(f, z, step=None, order=2, absolute_step=None):
    """Central second partials of f, shape (..., d, d), symmetric by stencil.

    order=2 uses plain central differences; order=4 Richardson-extrapolates
    the same stencils evaluated at h and 2h.  By default the step is
    `step * max(1, |z_i|)` per component; pass `absolute_step` (scalar or
    broadcastable to z) to control it directly.
    """
    if order not in (2, 4):
        raise ValueError("order must be 2 or 4")
    if absolute_step is not None:
        z = np.asarray(z, dtype=float)
        h = np.broadcast_to(np.asarray(absolute_step, dtype=float), z.shape)
    else:
        if step is None:
            step = DEFAULT_SECOND_STEP if order == 2 else DEFAULT_RICHARDSON_STEP
        z, h = _component_steps(z, step)
    d = z.shape[-1]
    f0 = f(z)

    def stencil(hloc):
        H = np.empty(z.shape[:-1] + (d, d), dtype=float)
        units = []
        for i in range(d):
            dz = np.zeros_like(z)
            dz[..., i] = hloc[..., i]
            units.append(dz)
        for i in range(d):
            H[..., i, i] = (f(z + units[i]) - 2.0 * f0 + f(z - units[i])) \
                / hloc[..., i]**2
            for j in range(i + 1, d):
                mixed = (f(z + units[i] + units[j]) + f(z - units[i] - units[j])
                         - f(z + units[i] - units[j]) - f(z - units[i] + units[j])) \
                        / (4.0 * hloc[..., i] * hloc[..., j])
                H[..., i, j] = mixed
                H[..., j, i] = mixed
        return H

    if order == 2:
        return stencil(h)
    return (4.0 * stencil(h) - stencil(2.0 * h)) / 3.0
