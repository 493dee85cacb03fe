"""Memory kernel from projection-free inputs, and RK4 propagation of G(t).

Both integrals use the trapezoidal rule on the stored grid.

Kernel (implicit at each grid point, hbar = 1)::

    K(tau) = i Fdot(tau) - F(tau) <L> + i int_0^tau F(tau - s) K(s) ds

Propagator::

    dG/dt = -i <L> G(t) - int_0^t K(tau) G(t - tau) dtau,   G(0) = I

RK4 stages at ``t_n + dt/2`` need G between grid points; those history
values come from linear interpolation of neighbouring stored G, and the one
kernel value at the half-step end point is interpolated the same way.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, SingularSystemError, ValidationError
from .series import MemoryKernelSeries, PfiSeries, PropagatorSeries

MAX_CONDITION = 1e12


def solve_volterra(pfis: PfiSeries, proj_l: np.ndarray) -> MemoryKernelSeries:
    f = np.asarray(pfis.F)
    fdot = np.asarray(pfis.Fdot)
    proj_l = np.asarray(proj_l, dtype=complex)
    steps, d, _ = f.shape
    if proj_l.shape != (d, d):
        raise DimensionError(f"projected Liouvillian must be {d}x{d}, got {proj_l.shape}")
    h = pfis.dt
    eye = np.eye(d, dtype=complex)

    lhs = eye - 0.5j * h * f[0]
    cond = np.linalg.cond(lhs)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise SingularSystemError(
            f"condition number {cond:.3e} of I - i dt/2 F(0) exceeds {MAX_CONDITION:g}; reduce dt"
        )
    lhs_inv = np.linalg.inv(lhs)

    source = 1j * fdot - f @ proj_l
    k = np.zeros_like(f)
    if steps == 0:
        return MemoryKernelSeries(h, k)
    k[0] = source[0]
    for n in range(1, steps):
        # trapezoid: h [ F_n K_0 / 2 + sum_{m=1}^{n-1} F_{n-m} K_m + F_0 K_n / 2 ]
        acc = 0.5 * f[n] @ k[0]
        if n > 1:
            acc = acc + _history_sum(f[n - 1 : 0 : -1], k[1:n])
        k[n] = lhs_inv @ (source[n] + 1j * h * acc)
    return MemoryKernelSeries(h, k)


def _history_sum(k: np.ndarray, g: np.ndarray) -> np.ndarray:
    """sum_j K_j G_j over matched leading axes."""
    j, a, b = k.shape
    if j == 0:
        return 0.0
    return k.transpose(1, 0, 2).reshape(a, j * b) @ g.reshape(j * b, -1)


def propagate_gqme(
    proj_l: np.ndarray, kernel: MemoryKernelSeries, steps: int | None = None
) -> PropagatorSeries:
    """Integrate the GQME for G on the kernel's grid; returns ``steps`` grid points."""
    kmat = np.asarray(kernel.K)
    if steps is None:
        steps = kernel.steps
    if steps < 1:
        raise ValidationError("steps must be at least 1")
    if steps > kernel.steps:
        raise ValidationError(
            f"requested {steps} steps but the kernel only has {kernel.steps}"
        )
    d = kmat.shape[1]
    proj_l = np.asarray(proj_l, dtype=complex)
    if proj_l.shape != (d, d):
        raise DimensionError(f"projected Liouvillian must be {d}x{d}, got {proj_l.shape}")
    h = kernel.dt
    gen = -1j * proj_l

    g = np.zeros((steps, d, d), dtype=complex)
    g[0] = np.eye(d)
    # g_half[m] ~ G((m + 1/2) h) from linear interpolation of stored history
    g_half = np.zeros((steps, d, d), dtype=complex)

    k0 = kmat[0]
    for n in range(steps - 1):
        # stage at t_n: nodes tau = j h, j = 0..n
        if n == 0:
            hist_0, w_0 = 0.0, 0.0
        else:
            hist_0 = h * (_history_sum(kmat[1:n], g[n - 1 : 0 : -1]) + 0.5 * kmat[n] @ g[0])
            w_0 = 0.5 * h

        # stages at t_n + h/2: nodes tau = j h (j = 0..n) plus the end point t
        k_end = 0.5 * (kmat[n] + kmat[n + 1])
        if n == 0:
            hist_h = 0.25 * h * (k_end @ g[0])
            w_h = 0.25 * h
        else:
            # history G at (n - j + 1/2) h is g_half[n - j]
            tail = g_half[0]
            hist_h = h * (_history_sum(kmat[1:n], g_half[n - 1 : 0 : -1]) + 0.5 * kmat[n] @ tail)
            hist_h = hist_h + 0.25 * h * (kmat[n] @ tail + k_end @ g[0])
            w_h = 0.5 * h

        # stage at t_{n+1}: nodes tau = j h, j = 0..n+1
        hist_1 = h * (_history_sum(kmat[1 : n + 1], g[n:0:-1]) + 0.5 * kmat[n + 1] @ g[0])
        w_1 = 0.5 * h

        def rhs(y, hist, w):
            return gen @ y - (hist + w * (k0 @ y))

        y = g[n]
        k1 = rhs(y, hist_0, w_0)
        k2 = rhs(y + 0.5 * h * k1, hist_h, w_h)
        k3 = rhs(y + 0.5 * h * k2, hist_h, w_h)
        k4 = rhs(y + h * k3, hist_1, w_1)
        g[n + 1] = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        g_half[n] = 0.5 * (g[n] + g[n + 1])
    return PropagatorSeries(h, g)


def sigma_z_curve(propagator: PropagatorSeries, sigma0: np.ndarray | None = None) -> np.ndarray:
    """Donor minus acceptor population for every grid point of ``propagator``."""
    if sigma0 is None:
        sigma0 = np.diag([1.0, 0.0])
    v0 = np.asarray(sigma0, dtype=complex).reshape(-1)
    out = np.asarray(propagator.G) @ v0
    return (out[:, 0] - out[:, 3]).real
