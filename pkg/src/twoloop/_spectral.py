"""Periodic spectral helpers and the Szego-kernel boundary correspondence."""

from __future__ import annotations

import numpy as np

from .errors import ConvergenceError, NonFiniteError


def wavenumbers(n):
    k = np.fft.fftfreq(n, 1.0 / n)
    if n % 2 == 0:
        k[n // 2] = 0
    return k


def periodic_derivative(values):
    """d/dt of uniform samples of a smooth 2 pi-periodic function."""
    return np.fft.ifft(1j * wavenumbers(len(values)) * np.fft.fft(values))


def lifted_derivative(angle, winding):
    """Derivative of an angle function theta(t) = winding * t + periodic."""
    n = len(angle)
    t = 2 * np.pi * np.arange(n) / n
    return winding + periodic_derivative(angle - winding * t).real


def signed_area(z):
    return 0.5 * np.imag(np.sum(np.conj(z) * np.roll(z, -1)))


def cauchy_eval(z, dz, values, points):
    """Interior values of the analytic function with boundary ``values`` on the ccw curve ``z``.

    Barycentric form of the trapezoidal Cauchy integral, which stays accurate
    close to the boundary.
    """
    points = np.asarray(points, dtype=complex)
    flat = points.ravel()
    num = np.zeros(flat.shape, dtype=complex)
    den = np.zeros(flat.shape, dtype=complex)
    hit = np.full(flat.shape, -1)
    chunk = 2048
    for s in range(0, len(flat), chunk):
        p = flat[s:s + chunk]
        d = z[None, :] - p[:, None]
        exact = np.abs(d) == 0
        d[exact] = 1.0
        w = dz[None, :] / d
        num[s:s + chunk] = w @ values
        den[s:s + chunk] = w.sum(axis=1)
        rows, cols = np.nonzero(exact)
        hit[s + rows] = cols
    out = num / den
    mask = hit >= 0
    out[mask] = values[hit[mask]]
    return out.reshape(points.shape)


def szego_correspondence(z, a=0.0):
    """Boundary correspondence of the Riemann map of the interior of ``z`` onto the unit disk.

    ``z`` holds uniform samples of a smooth counterclockwise Jordan curve in its
    parameter t. Returns (theta, dtheta/dt) with f(z_j) = e^{i theta_j}, f(a) = 0,
    and theta unwrapped. The rotation is left arbitrary. The Szego kernel is
    found from the Kerzman-Stein integral equation discretized by the
    trapezoidal rule, which converges spectrally for analytic curves.
    """
    n = len(z)
    dz = periodic_derivative(z)
    speed = np.abs(dz)
    T = dz / speed
    diff = z[None, :] - z[:, None]
    np.fill_diagonal(diff, 1.0)
    H = T[None, :] / diff / (2j * np.pi)
    A = (H - np.conj(H.T)) * speed[None, :] * (2 * np.pi / n)
    np.fill_diagonal(A, 0.0)
    g = np.conj(T / (z - a) / (2j * np.pi))
    S = np.linalg.solve(np.eye(n) - A, g)
    if not np.all(np.isfinite(S)):
        raise NonFiniteError("Szego kernel solve produced non-finite values")
    S2 = np.abs(S) ** 2
    boundary = -1j * T * S**2 / S2
    theta = np.unwrap(np.angle(boundary))
    dtheta = 2 * np.pi * S2 * speed / (np.sum(S2 * speed) * 2 * np.pi / n)
    total = theta[-1] - theta[0] + np.angle(np.exp(1j * (theta[0] - theta[-1])))
    if abs(total - 2 * np.pi) > 1.0:
        raise ConvergenceError("boundary correspondence does not wind once", abs(total - 2 * np.pi))
    return theta, dtheta


def invert_angle(theta, winding, targets, iters=10):
    """Parameters t with theta(t) = targets (mod 2 pi), theta sampled uniformly in t.

    ``theta`` is monotone with total change 2 pi * winding (winding = +1 or -1)
    and is interpolated by its trigonometric interpolant; Newton refines a
    piecewise-linear first guess.
    """
    n = len(theta)
    t = 2 * np.pi * np.arange(n) / n
    c = np.fft.fft(theta - winding * t) / n
    k = wavenumbers(n)
    targets = np.asarray(targets, dtype=float)
    base = theta[0]
    if winding > 0:
        phi = base + np.mod(targets - base, 2 * np.pi)
    else:
        phi = base - np.mod(base - targets, 2 * np.pi)
    tt = np.concatenate([t - 2 * np.pi, t, t + 2 * np.pi, [4 * np.pi]])
    th = np.concatenate([theta - 2 * np.pi * winding, theta, theta + 2 * np.pi * winding,
                         [theta[0] + 4 * np.pi * winding]])
    if winding < 0:
        tt, th = tt[::-1], th[::-1]
    s = np.interp(phi, th, tt)
    for _ in range(iters):
        e = np.exp(1j * np.multiply.outer(s, k))
        val = winding * s + (e @ c).real
        der = winding + (e @ (1j * k * c)).real
        step = (val - phi) / der
        s = s - step
        if np.max(np.abs(step)) < 1e-15:
            break
    return s
