"""Finite-difference check of the Schwarzian variational formula for the two-loop potential."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.spatial import cKDTree

from ._spectral import signed_area
from .errors import ConvergenceError, DomainError
from .loops import Loop, TwoLoopConfig, _winding
from .mapseries import ConformalMapSeries
from .potentials import lpot_two
from .uniformize import UniformizeOptions, annulus_uniformize, distance_to_loop

PROFILE_DEGREE = 4


@dataclass(frozen=True)
class BeltramiBump:
    """nu(w) = amplitude * (1 - |w - center|^2 / radius^2)^PROFILE_DEGREE on the disk of the support."""

    center: complex
    radius: float
    amplitude: complex

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError("bump radius must be positive")
        if abs(self.amplitude) > 0.1:
            raise DomainError("bump amplitude must be at most 0.1 in modulus")

    def __call__(self, w):
        s2 = np.abs(np.asarray(w) - self.center) ** 2 / self.radius**2
        return self.amplitude * np.where(s2 < 1, np.clip(1 - s2, 0, None) ** PROFILE_DEGREE, 0.0)

    def mass(self):
        """Integral of nu over the plane."""
        return self.amplitude * math.pi * self.radius**2 / (PROFILE_DEGREE + 1)

    def quadrature(self, n_radial=24, n_angular=48):
        """Nodes and weights for integrals of nu * g over the support (exact for the radial factor)."""
        x, wx = np.polynomial.legendre.leggauss(n_radial)
        s = self.radius * (x + 1) / 2
        ws = wx * self.radius / 2
        phi = 2 * np.pi * np.arange(n_angular) / n_angular
        nodes = self.center + s[:, None] * np.exp(1j * phi)[None, :]
        weights = (ws * s)[:, None] * np.full(n_angular, 2 * np.pi / n_angular)[None, :]
        return nodes.ravel(), (weights * self(nodes)).ravel()


@dataclass(frozen=True)
class Deformation:
    """z -> z + eps * V(z), V the Cauchy transform -(1/pi) int nu(w)/(w - z) dA(w)."""

    nu: BeltramiBump
    eps: float

    def velocity(self, z):
        z = np.asarray(z, dtype=complex)
        if np.any(np.abs(z - self.nu.center) <= self.nu.radius):
            raise DomainError("first-order deformation is only evaluated off the bump support")
        nodes, weights = self.nu.quadrature()
        out = np.empty(z.shape, dtype=complex)
        flat = z.ravel()
        for i in range(0, len(flat), 1024):
            chunk = flat[i:i + 1024]
            out.ravel()[i:i + 1024] = -(weights[None, :] / (nodes[None, :] - chunk[:, None])).sum(axis=1) / math.pi
        return out

    def __call__(self, z):
        if self.eps == 0:
            return np.asarray(z, dtype=complex)
        return np.asarray(z, dtype=complex) + self.eps * self.velocity(z)

    def apply(self, cfg: TwoLoopConfig, n=None) -> TwoLoopConfig:
        n = n or max(1024, 4 * cfg.sample_count)
        loops = [Loop.from_samples(self(loop.sample(n))) for loop in (cfg.gamma1, cfg.gamma2)]
        return TwoLoopConfig(*loops)


def first_order_deformation(nu: BeltramiBump, eps: float) -> Deformation:
    return Deformation(nu, float(eps))


def support_side(cfg: TwoLoopConfig, nu: BeltramiBump) -> str:
    """'D1' or 'D2', checking that the support keeps clear of both loops."""
    for loop in (cfg.gamma1, cfg.gamma2):
        if distance_to_loop(loop, np.array([nu.center]))[0] <= nu.radius:
            raise DomainError("bump support overlaps a loop")
    n = cfg.sample_count
    if _winding(cfg.gamma1.sample(n), nu.center) == 1:
        return "D1"
    if _winding(cfg.gamma2.sample(n), nu.center) == 0:
        return "D2"
    raise DomainError("bump support lies in the annulus; the variation would change the modulus")


def schwarzian(f: Callable, z):
    d1, d2, d3 = f(z, 1), f(z, 2), f(z, 3)
    p = d2 / d1
    return d3 / d1 - 1.5 * p**2


def invert_map(f: Callable, w, seeds_z, tol=1e-12, max_iter=50):
    """Solve f(z) = w by Newton's method from the seed whose image is nearest to w."""
    w = np.asarray(w, dtype=complex)
    images = f(seeds_z, 0)
    _, idx = cKDTree(np.column_stack([images.real, images.imag])).query(np.column_stack([w.real, w.imag]))
    z = seeds_z[idx].astype(complex)
    scale = max(1.0, float(np.abs(w).max()))
    for _ in range(max_iter):
        step = (f(z, 0) - w) / f(z, 1)
        z = z - step
        if np.max(np.abs(step)) < tol * scale:
            break
    resid = float(np.abs(f(z, 0) - w).max())
    if resid > 1e-10 * scale:
        raise ConvergenceError("Newton inversion of the uniformizing map failed", resid)
    return z


def _seeds(f: ConformalMapSeries, nu: BeltramiBump, n_radial=64, n_angular=128):
    if f.kind == "interior":
        r = f.radius * (np.arange(n_radial) + 0.5) / n_radial
    else:
        r_max = 2.0 * (abs(nu.center) + nu.radius) / abs(f.pos[1]) + 2.0
        r = np.exp(np.linspace(0.0, math.log(r_max), n_radial + 1)[1:])
    phi = 2 * np.pi * np.arange(n_angular) / n_angular
    return (r[:, None] * np.exp(1j * phi)[None, :]).ravel()


def schwarzian_integral(nu: BeltramiBump, f: Callable, seeds_z) -> complex:
    """Integral of nu * S[f^{-1}] over the support, with S[f^{-1}](f(z)) = -S[f](z) / f'(z)^2."""
    nodes, weights = nu.quadrature()
    z = invert_map(f, nodes, seeds_z)
    return complex(np.sum(weights * (-schwarzian(f, z) / f(z, 1) ** 2)))


@dataclass(frozen=True)
class VariationResult:
    fd: float
    rhs: float
    rel_err: float
    side: str


def variation_check(cfg: TwoLoopConfig, nu: BeltramiBump, eps: float = 1e-3,
                    options: Optional[UniformizeOptions] = None) -> VariationResult:
    """Central difference of the potential along the bump deformation against the Schwarzian integral."""
    if not eps > 0:
        raise DomainError("finite-difference step must be positive")
    side = support_side(cfg, nu)
    if nu.amplitude == 0:
        return VariationResult(0.0, 0.0, 0.0, side)
    u = annulus_uniformize(cfg, options or UniformizeOptions())
    f = u.f1 if side == "D1" else u.f2
    integral = schwarzian_integral(nu, f, _seeds(f, nu))
    rhs = -integral.real / (3 * math.pi)
    plus = lpot_two(first_order_deformation(nu, eps).apply(cfg), options).total
    minus = lpot_two(first_order_deformation(nu, -eps).apply(cfg), options).total
    fd = (plus - minus) / (2 * eps)
    denom = max(abs(rhs), abs(fd))
    rel = abs(fd - rhs) / denom if denom > 0 else 0.0
    return VariationResult(float(fd), float(rhs), float(rel), side)
