"""Two-loop Loewner potential by the pre-Schwarzian and winding-energy routes, plus Grunsky data.

Area integrals of |h|^2 for holomorphic h are evaluated exactly from Laurent
coefficients: the coefficients come from FFTs of h on the boundary circles,
and each mode integrates in closed form over a disk, exterior disk or annulus.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BranchError, ConvergenceError, DomainError, NonFiniteError, ValidationError
from .loops import TwoLoopConfig
from .mapseries import ConformalMapSeries, Uniformization, formal_log
from .specfun import log_euler_phi
from .uniformize import UniformizeOptions, annulus_uniformize, log_deriv_ratio, nearest_parameter

# relative spectral tail above which the angular resolution is doubled
ALIAS_TOL = 1e-13
MAX_ANGULAR = 1 << 15


@dataclass(frozen=True)
class PotentialBreakdown:
    tau: float
    circle_term: float
    I1: float
    IA: float
    I2: float
    log_ratio_term: float
    total: float

    def to_json(self):
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class GrunskyData:
    """Grunsky coefficients and the two sides of the multiple Grunsky equality.

    ``b_minus_scaled[k-1]`` is b_{-k,0} rho^k and ``beta_neg_scaled[m-1]`` is
    beta_{-m} rho^{-m}; the scaling keeps both bounded where the raw
    coefficients would overflow.
    """

    N: int
    b_minus_scaled: np.ndarray
    beta_pos: np.ndarray
    beta_neg_scaled: np.ndarray
    b_plus: np.ndarray
    lhs: float
    rhs: float
    gap: float
    tail_bound: float

    def to_json(self):
        return {"N": self.N, "lhs": self.lhs, "rhs": self.rhs, "gap": self.gap,
                "tail_bound": self.tail_bound}


def _check_tau(tau):
    if not tau > 0 or not math.isfinite(tau):
        raise DomainError(f"modulus must be positive and finite, got {tau!r}")


def lpot_circles(tau: float) -> float:
    """Potential of the concentric pair with modulus tau, constant fixed to 0."""
    _check_tau(tau)
    return -math.log(tau) - 2.0 * log_euler_phi(math.exp(-4.0 * math.pi * tau))


def blm_interaction_circles(tau: float) -> float:
    """Brownian loop interaction of the concentric pair relative to tau = 1."""
    return lpot_circles(tau) - lpot_circles(1.0)


def _angular_size(f: ConformalMapSeries):
    n = 64
    while n < 4 * (f.degree + 4):
        n *= 2
    return n


def _ring_spectrum(func, f: ConformalMapSeries, r, n):
    """FFT of ``func(f, f', f'')`` on |z| = r, doubling n until the spectral tail is negligible."""
    while True:
        vals = f.ring_values(r, n, max_order=2)
        h = func(r * np.exp(2j * np.pi * np.arange(n) / n), *vals)
        if not np.all(np.isfinite(h)):
            raise NonFiniteError("non-finite integrand on a quadrature ring")
        spec = np.fft.fft(h) / n
        power = np.abs(spec) ** 2
        k = np.fft.fftfreq(n, 1.0 / n)
        tail = power[np.abs(k) > 3 * n // 8].sum()
        # relative test, with an absolute floor at rounding level of terms ~ 1/r
        if tail <= ALIAS_TOL**2 * max(power.sum(), (0.1 / r) ** 2):
            return spec, k.astype(int)
        if n >= MAX_ANGULAR:
            raise ConvergenceError("angular quadrature not resolved", math.sqrt(tail))
        n *= 2


def _check_derivative(f: ConformalMapSeries):
    n = _angular_size(f)
    radii = {"interior": [f.radius], "exterior": [1.0], "annulus": [f.radius, 1.0]}[f.kind]
    for r in radii:
        d = np.abs(f.ring_values(r, n, max_order=1)[1])
        if d.min() <= 1e-12 * d.max():
            raise DomainError(f"derivative of the {f.kind} map vanishes near |z| = {r:g}")


def area_energy(func, f: ConformalMapSeries) -> float:
    """Integral over the domain of f of |func(z, f, f', f'')|^2, func holomorphic there."""
    n = _angular_size(f)
    if f.kind == "interior":
        spec, k = _ring_spectrum(func, f, f.radius, n)
        # coefficient of z^k on |z| = R carries g_k R^k
        m = k[k >= 0]
        return float(math.pi * f.radius**2 * np.sum(np.abs(spec[k >= 0]) ** 2 / (m + 1)))
    if f.kind == "exterior":
        spec, k = _ring_spectrum(func, f, 1.0, n)
        if np.any(np.abs(spec[k >= -1]) > 1e-9 * max(np.abs(spec).max(), 1.0)):
            raise DomainError("integrand is not O(z^-2) at infinity; energy diverges")
        m = -k[k <= -2]
        return float(math.pi * np.sum(np.abs(spec[k <= -2]) ** 2 / (m - 1)))
    rho = f.radius
    outer, k = _ring_spectrum(func, f, 1.0, n)
    inner, _ = _ring_spectrum(func, f, rho, len(outer))
    if len(inner) != len(outer):
        outer, k = _ring_spectrum(func, f, 1.0, len(inner))
    total = 0.0
    pos = k >= 0
    total += np.sum(np.abs(outer[pos]) ** 2 * (1 - rho ** (2 * k[pos] + 2)) / (k[pos] + 1))
    neg = k <= -2
    m = -k[neg]
    total += np.sum(np.abs(inner[neg]) ** 2 * (rho**2 - rho ** (2 * m)) / (m - 1))
    g_minus1 = outer[k == -1][0]
    total += 2 * abs(g_minus1) ** 2 * math.log(1 / rho)
    return float(math.pi * total)


def _preschwarzian(z, f, d1, d2):
    return d2 / d1


def _winding_gradient(z, f, d1, d2):
    return d2 / d1 - d1 / f + 1.0 / z


def preschwarzian_energy(f: ConformalMapSeries) -> float:
    """Integral of |f''/f'|^2 over the domain of f."""
    _check_derivative(f)
    return area_energy(_preschwarzian, f)


def _uniformization(cfg, options):
    return annulus_uniformize(cfg, options or UniformizeOptions())


def breakdown_from(u: Uniformization) -> PotentialBreakdown:
    circle = lpot_circles(u.tau)
    I1, IA, I2 = (preschwarzian_energy(f) for f in (u.f1, u.fA, u.f2))
    ratio = log_deriv_ratio(u)
    total = circle + (I1 + IA + I2) / (12 * math.pi) - ratio / 3
    if not math.isfinite(total):
        raise NonFiniteError("two-loop potential is not finite")
    return PotentialBreakdown(u.tau, circle, I1, IA, I2, ratio, total)


def lpot_two(cfg: TwoLoopConfig, options: Optional[UniformizeOptions] = None) -> PotentialBreakdown:
    """Two-loop Loewner potential via pre-Schwarzian integrals of the uniformizing maps."""
    return breakdown_from(_uniformization(cfg, options))


def _winding_boundary(f: ConformalMapSeries, r, n):
    """Unwrapped arg(z f'/f) on |z| = r and the image points."""
    z = r * np.exp(2j * np.pi * np.arange(n) / n)
    val, d1 = f.ring_values(r, n, max_order=1)
    phi = np.unwrap(np.angle(z * d1 / val))
    if abs(phi[-1] - phi[0]) > np.pi:
        raise BranchError("arg(z f'/f) winds around a boundary circle")
    return phi, val


def _tangent_angle(loop, t):
    """arg(tangent) - pi/2 - arg(w) along the loop, continuous in t with its t = 0 value principal."""
    n = max(4096, 16 * loop.degree)
    grid = 2 * np.pi * np.arange(n + 1) / n
    canon = np.unwrap(np.angle(loop.derivative(grid, 1)) - np.pi / 2 - np.angle(loop(grid)))
    principal = np.angle(loop.derivative(t, 1)) - np.pi / 2 - np.angle(loop(t))
    approx = np.interp(np.mod(t, 2 * np.pi), grid, canon)
    return principal + 2 * np.pi * np.round((approx - principal) / (2 * np.pi))


def _branch_offset(loop, phi, points):
    """Integer m with phi = tangent angle + 2 pi m along the loop, and the largest mismatch."""
    d = phi - _tangent_angle(loop, nearest_parameter(loop, points))
    m = np.round(d / (2 * np.pi))
    if np.ptp(m) != 0:
        raise BranchError("winding function branch is not constant along a loop")
    return int(m[0]), float(np.abs(d - 2 * np.pi * m).max())


def winding_jumps(u: Uniformization, cfg: TwoLoopConfig, n=512):
    """Branch continuity diagnostics for the winding function.

    Anchors the exterior branch by phi(inf) = 0 and the inner disk branch by
    phi(0) = 0 (mean value property), fits the annulus branch to the outer
    loop and returns the resulting jump across each loop.
    """
    phi2, w2 = _winding_boundary(u.f2, 1.0, n)
    phi2 = phi2 - 2 * np.pi * np.round(phi2.mean() / (2 * np.pi))
    phiA_out, wA_out = _winding_boundary(u.fA, 1.0, n)
    phiA_in, wA_in = _winding_boundary(u.fA, u.rho, n)
    phi1, w1 = _winding_boundary(u.f1, u.rho, n)
    phi1 = phi1 - 2 * np.pi * np.round(phi1.mean() / (2 * np.pi))

    m2, e2 = _branch_offset(cfg.gamma2, phi2, w2)
    mAo, eAo = _branch_offset(cfg.gamma2, phiA_out, wA_out)
    mAi, eAi = _branch_offset(cfg.gamma1, phiA_in, wA_in)
    m1, e1 = _branch_offset(cfg.gamma1, phi1, w1)
    # the annulus branch is shifted to agree with the exterior on gamma2
    shift = m2 - mAo
    return {"gamma2": 2 * np.pi * abs(m2 - (mAo + shift)) + max(e2, eAo),
            "gamma1": 2 * np.pi * abs(m1 - (mAi + shift)) + max(e1, eAi)}


def winding_energy(u: Uniformization, cfg: Optional[TwoLoopConfig] = None, jump_tol=1e-6) -> float:
    """Dirichlet energy (1/16 pi) of the winding function over the plane.

    With ``cfg`` given, the continuity of the branch across both loops is
    checked first.
    """
    if cfg is not None:
        jumps = winding_jumps(u, cfg)
        worst = max(jumps.values())
        if worst > jump_tol:
            raise BranchError("winding function jumps across a loop", worst)
    total = sum(area_energy(_winding_gradient, f) for f in (u.f1, u.fA, u.f2))
    return total / (16 * math.pi)


# value of lpot_two_via_lk - lpot_two on any configuration; 0 makes both routes
# vanish identically on concentric circle pairs
LK_CONSTANT = 0.0


def lpot_two_via_lk(cfg: TwoLoopConfig, options: Optional[UniformizeOptions] = None,
                    check_branch=True) -> float:
    """Two-loop Loewner potential via the Loewner-Kufarev energy of the winding function."""
    u = _uniformization(cfg, options)
    S = winding_energy(u, cfg if check_branch and "exact" not in cfg.cache else None)
    return lpot_circles(u.tau) + 4.0 * S / 3.0 - log_deriv_ratio(u) / 6.0 + LK_CONSTANT


def _log_ring_coefficients(f: ConformalMapSeries, r, n):
    z = r * np.exp(2j * np.pi * np.arange(n) / n)
    w = f.ring_values(r, n, max_order=0)[0] / z
    arg = np.unwrap(np.angle(w))
    if abs(arg[-1] - arg[0]) > np.pi:
        raise ValidationError("f(z)/z has a zero in the annulus; log series undefined")
    return np.fft.fft(np.log(np.abs(w)) + 1j * arg) / n


def _tail_resolved(f: ConformalMapSeries, rel=1e-8):
    # omitted Grunsky terms then contribute about N * rel^2 to either side
    scale = np.abs(f.pos).max()
    for c in (f.pos, f.neg):
        if len(c) > 8 and np.abs(c[-len(c) // 8:]).max() > rel * scale:
            return False
    return True


def grunsky(u: Uniformization, N: int = 128) -> GrunskyData:
    """Grunsky coefficients of the three maps and the gap of the multiple Grunsky equality."""
    if N < 1:
        raise DomainError("N must be positive")
    for f in (u.f1, u.fA, u.f2):
        # beyond its degree a series is exactly zero, which is only honest if it has decayed
        if N > f.degree and not _tail_resolved(f):
            raise DomainError(f"N={N} exceeds the resolved truncation of the {f.kind} map")
    rho = u.rho
    # interior map: f1(z)/z is a power series in u = z/rho
    a = np.zeros(N + 1, dtype=complex)
    src = u.f1.pos[1: N + 2]
    a[: len(src)] = src
    log1 = formal_log(a)
    b_minus_scaled = log1.coeffs[1: N + 1]
    # exterior map: f2(z)/z is a power series in 1/z
    c = np.zeros(N + 1, dtype=complex)
    src = np.concatenate([[u.f2.pos[1]], u.f2.neg])[: N + 1]
    c[: len(src)] = src
    log2 = formal_log(c)
    b_plus = log2.coeffs[1: N + 1]
    # annulus map: Laurent coefficients of log(fA/z) from both boundary circles
    n = 64
    while n < 4 * (N + u.fA.degree):
        n *= 2
    outer = _log_ring_coefficients(u.fA, 1.0, n)
    inner = _log_ring_coefficients(u.fA, rho, n)
    k = np.arange(1, N + 1)
    beta_pos = outer[k]
    beta_neg_scaled = inner[(-k) % n]

    w = rho ** (2 * k)
    lhs = math.pi * float(np.sum(k * np.abs(b_minus_scaled) ** 2)
                          + np.sum(k * np.abs(beta_pos) ** 2 * (1 - w))
                          + np.sum(k * np.abs(beta_neg_scaled) ** 2 * (1 - w))
                          + np.sum(k * np.abs(b_plus) ** 2))
    rhs = 2 * math.pi * log_deriv_ratio(u)
    return GrunskyData(N, b_minus_scaled, beta_pos, beta_neg_scaled, b_plus, lhs, rhs, rhs - lhs,
                       log1.tail_bound + log2.tail_bound)
