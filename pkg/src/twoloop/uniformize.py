"""Numerical uniformization of a two-loop configuration.

Produces f1 on e^{-2 pi tau} D onto the disk bounded by gamma1, fA on the
standard annulus onto the region between the loops, and f2 on the exterior of
the unit disk onto the unbounded component. Single-boundary maps come from the
Szego-kernel boundary correspondence; the annulus map from the Koebe
alternating iteration built on top of it.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.spatial import cKDTree

from ._spectral import cauchy_eval, invert_angle, periodic_derivative, signed_area, szego_correspondence
from .errors import ConvergenceError, DomainError
from .loops import Loop, TwoLoopConfig, _deep_point
from .mapseries import ConformalMapSeries, Uniformization, exact_circle_uniformization

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class UniformizeOptions:
    n_min: int = 256
    n_max: int = 1024
    tol: float = 1e-8
    koebe_tol: float = 1e-13
    max_iter: int = 100

    def key(self):
        return ("uniformization", self.n_min, self.n_max, self.tol, self.koebe_tol, self.max_iter)

    def sizes(self, degree):
        n = self.n_min
        while n <= 4 * degree:
            n *= 2
        out = []
        while n <= self.n_max:
            out.append(n)
            n *= 2
        if not out:
            raise DomainError(f"loop degree {degree} needs more than n_max={self.n_max} samples")
        return out


def correspondence(z, a=0.0):
    """(theta, dtheta/dt) for samples of either orientation; theta increases for ccw curves."""
    if signed_area(z) > 0:
        return szego_correspondence(z, a)
    idx = (-np.arange(len(z))) % len(z)
    theta, dtheta = szego_correspondence(z[idx], a)
    return np.unwrap(theta[idx]), -dtheta[idx]


def nearest_parameter(loop: Loop, points, n_dense=None):
    """Parameter of the nearest loop point: nearest dense sample, then Newton steps."""
    points = np.asarray(points, dtype=complex)
    n_dense = n_dense or max(4096, 16 * loop.degree)
    dense = loop.sample(n_dense)
    _, idx = cKDTree(np.column_stack([dense.real, dense.imag])).query(
        np.column_stack([points.real, points.imag]))
    t = 2 * np.pi * idx / n_dense
    for _ in range(4):
        g, d1, d2 = loop(t), loop.derivative(t, 1), loop.derivative(t, 2)
        num = np.real(np.conj(g - points) * d1)
        den = np.abs(d1) ** 2 + np.real(np.conj(g - points) * d2)
        # keep the current guess where Newton is degenerate (e.g. at a centre of curvature)
        ok = den > 1e-12 * np.abs(d1) ** 2
        trial = np.where(ok, t - num / np.where(ok, den, 1.0), t)
        better = np.abs(loop(trial) - points) <= np.abs(g - points)
        t = np.where(better, trial, t)
    return t


def distance_to_loop(loop: Loop, points, n_dense=None):
    return np.abs(loop(nearest_parameter(loop, points, n_dense)) - np.asarray(points))


def _uniform_values(loop: Loop, theta, winding):
    """Loop values at the parameters the correspondence sends to uniform angles 2 pi m / n."""
    n = len(theta)
    targets = 2 * np.pi * np.arange(n) / n
    return loop(invert_angle(theta, winding, targets))


def _interior_series(loop: Loop, n, radius=1.0):
    theta, _ = correspondence(loop.sample(n), 0.0)
    spec = np.fft.fft(_uniform_values(loop, theta, 1)) / n
    f = ConformalMapSeries("interior", spec[: n // 2], [], radius)
    return f.rotated(-np.angle(spec[1]))


def _exterior_series(loop: Loop, n):
    # theta belongs to the inverted curve, so f(e^{-i theta_j}) = gamma(t_j)
    theta, _ = correspondence(1.0 / loop.sample(n), 0.0)
    spec = np.fft.fft(_uniform_values(loop, -theta, 1)) / n
    neg = spec[(-np.arange(n // 2)) % n]
    f = ConformalMapSeries("exterior", [0, spec[1]], neg, 1.0)
    return f.rotated(-np.angle(spec[1]))


def disk_map(loop: Loop, side="interior", options: UniformizeOptions = UniformizeOptions()):
    """Normalized Riemann map onto the interior (0 -> 0) or exterior (inf -> inf) of ``loop``.

    The resolution is doubled until the image of the unit circle lies within
    ``options.tol`` of the loop.
    """
    if side not in ("interior", "exterior"):
        raise ValueError(f"side must be 'interior' or 'exterior', got {side!r}")
    residual = math.inf
    for n in options.sizes(loop.degree):
        f = _interior_series(loop, n) if side == "interior" else _exterior_series(loop, n)
        residual = _series_residual(f, f.inner_radius or 1.0, loop, 4 * n)
        if residual < options.tol:
            return f
    raise ConvergenceError(f"{side} disk map did not reach tolerance {options.tol}", residual)


def _series_residual(f, r, loop, n):
    return float(distance_to_loop(loop, f.ring_values(r, n, max_order=0)[0]).max())


def koebe_iteration(z1, z2, tol=1e-13, max_iter=100, floor=1e-10):
    """Images of the sample sets under the conformal map of the region between them onto an annulus.

    Returns (w1, w2, iterations) with w2 on the unit circle and w1 on a
    concentric circle. Iteration stops once the log-radius spread of w1 is
    below ``tol``, or once it stagnates below ``floor`` (rounding dominates
    and further sweeps only redistribute the samples).
    """
    c1, c2 = np.array(z1, dtype=complex), np.array(z2, dtype=complex)
    best = (math.inf, None, None, 0)
    for it in range(1, max_iter + 1):
        # fill in the outer boundary
        theta, _ = correspondence(c2, 0.0)
        disk = np.exp(1j * theta)
        c1 = cauchy_eval(c2, periodic_derivative(c2), disk, c1)
        c2 = disk
        spread = float(np.ptp(np.log(np.abs(c1))))
        if spread < tol:
            return c1, c2, it
        if spread < best[0]:
            improved = spread < 0.5 * best[0]
            best = (spread, c1, c2, it)
            if not improved and spread < floor:
                return c1, c2, it
        elif best[0] < floor:
            return best[1], best[2], best[3]
        # fill in the inner boundary through z -> 1/(z - p), p deep inside c1
        p = _deep_point(c1)
        w = 1.0 / (c1 - p)
        theta, _ = correspondence(w, 0.0)
        disk = np.exp(1j * theta)
        c2 = 1.0 / cauchy_eval(w, periodic_derivative(w), disk, 1.0 / (c2 - p))
        c1 = 1.0 / disk
    if best[0] < floor:
        return best[1], best[2], best[3]
    raise ConvergenceError(f"Koebe iteration did not converge in {max_iter} steps", best[0])


def _annulus_series(cfg: TwoLoopConfig, w1, w2):
    n = len(w1)
    rho = float(np.exp(np.mean(np.log(np.abs(w1)))))
    outer = np.fft.fft(_uniform_values(cfg.gamma2, np.unwrap(np.angle(w2)), 1)) / n
    inner = np.fft.fft(_uniform_values(cfg.gamma1, np.unwrap(np.angle(w1)), 1)) / n
    # outer circle data carries A_k, inner circle data carries A_k rho^k
    q = inner[(-np.arange(n // 2)) % n]
    q[0] = 0.0
    return ConformalMapSeries("annulus", outer[: n // 2], q, rho)


def _fix_rotation(fA: ConformalMapSeries):
    """Rotate so that arg fA'(rho) = 0."""
    rho = fA.radius

    def h(delta):
        return np.angle(np.exp(1j * delta) * fA(rho * np.exp(1j * delta), order=1))

    grid = np.linspace(0.0, 2 * np.pi, 257)
    vals = np.array([h(d) for d in grid])
    if abs(vals[0]) < 1e-15:
        return fA
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        # a sign change without a 2 pi wrap brackets a root
        if fa * fb <= 0 and abs(fa - fb) < np.pi:
            return fA.rotated(brentq(h, a, b, xtol=1e-15))
    raise ConvergenceError("could not fix the rotation of the annulus map")


def _residuals(u: Uniformization, cfg: TwoLoopConfig, n):
    rho = u.rho
    parts = {
        "f1": distance_to_loop(cfg.gamma1, u.f1.ring_values(rho, n, 0)[0]).max(),
        "fA_inner": distance_to_loop(cfg.gamma1, u.fA.ring_values(rho, n, 0)[0]).max(),
        "fA_outer": distance_to_loop(cfg.gamma2, u.fA.ring_values(1.0, n, 0)[0]).max(),
        "f2": distance_to_loop(cfg.gamma2, u.f2.ring_values(1.0, n, 0)[0]).max(),
    }
    return {k: float(v) for k, v in parts.items()}


def uniformize_at(cfg: TwoLoopConfig, n, options: UniformizeOptions = UniformizeOptions()):
    """One uniformization with ``n`` boundary samples per loop (no adaptivity)."""
    z1, z2 = cfg.gamma1.sample(n), cfg.gamma2.sample(n)
    w1, w2, iterations = koebe_iteration(z1, z2, options.koebe_tol, options.max_iter)
    fA = _fix_rotation(_annulus_series(cfg, w1, w2))
    rho = fA.radius
    tau = -math.log(rho) / (2 * math.pi)
    f1 = ConformalMapSeries("interior", _interior_series(cfg.gamma1, n).pos, [], rho)
    f2 = _exterior_series(cfg.gamma2, n)
    u = Uniformization(tau, f1, fA, f2, math.inf, {"n": n, "koebe_iterations": iterations})
    res = _residuals(u, cfg, 4 * n)
    info = dict(u.info, residuals=res)
    return Uniformization(tau, f1, fA, f2, max(res.values()), info)


def _concentric_radius(loop: Loop):
    """Radius if ``loop`` is a circle centred at 0 (single mode c_1), else None."""
    M = loop.degree
    c = loop.coeffs
    if M < 1:
        return None
    r = abs(c[M + 1])
    others = np.delete(c, M + 1)
    if r > 0 and np.all(np.abs(others) <= 1e-15 * r):
        return float(r)
    return None


def annulus_uniformize(cfg: TwoLoopConfig, options: UniformizeOptions = UniformizeOptions()):
    """Uniformization of ``cfg``, doubling the resolution until the boundary residual meets ``options.tol``.

    Results are memoized in ``cfg.cache``.
    """
    if "exact" in cfg.cache:
        return cfg.cache["exact"]
    r1, r2 = _concentric_radius(cfg.gamma1), _concentric_radius(cfg.gamma2)
    if r1 is not None and r2 is not None and r1 < r2:
        u = exact_circle_uniformization(math.log(r2 / r1) / (2 * math.pi), r2)
        cfg.cache["exact"] = u
        return u
    key = options.key()
    if key in cfg.cache:
        return cfg.cache[key]
    u = None
    failure = None
    for n in options.sizes(max(cfg.gamma1.degree, cfg.gamma2.degree)):
        try:
            u = uniformize_at(cfg, n, options)
        except ConvergenceError as exc:
            # under-resolved boundary data; the next resolution may succeed
            failure = exc
            continue
        log.debug("uniformize n=%d tau=%.15g residual=%.3e", n, u.tau, u.boundary_residual)
        if u.boundary_residual < options.tol:
            cfg.cache[key] = u
            return u
    if u is None:
        raise failure
    raise ConvergenceError(f"uniformization did not reach tolerance {options.tol}", u.boundary_residual)


def log_deriv_ratio(u: Uniformization) -> float:
    """log|f2'(inf)| - log|f1'(0)|."""
    return float(math.log(abs(u.f2.derivative_at_origin())) - math.log(abs(u.f1.pos[1]))
                 + math.log(u.f1.radius))


def two_circle_modulus(c1, r1, c2, r2):
    """Modulus of the annulus between the circle |z-c1|=r1 and the enclosing circle |z-c2|=r2."""
    d = abs(c1 - c2)
    if d + r1 >= r2:
        raise DomainError("first circle must lie strictly inside the second")
    delta = (r1**2 + r2**2 - d**2) / (2 * r1 * r2)
    return math.acosh(delta) / (2 * math.pi)
