"""Truncated series for the three uniformizing maps and their container.

Coefficients are stored against scaled variables so nothing overflows:
a map is ``sum_k pos[k] (z/R)^k + sum_k neg[k] (S/z)^k`` where the scales are
fixed by the kind of map.

* interior: domain |z| < R, ``neg`` empty.
* exterior: domain |z| > 1, ``pos = [0, b1]`` and ``neg[j]`` multiplies z^{-j}.
* annulus: domain rho < |z| < 1 with R = 1 and S = rho.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ValidationError

KINDS = ("interior", "exterior", "annulus")


def _falling(k, n):
    out = np.ones_like(k, dtype=float)
    for j in range(n):
        out = out * (k - j)
    return out


def _rising(k, n):
    out = np.ones_like(k, dtype=float)
    for j in range(n):
        out = out * (k + j)
    return out


@dataclass(frozen=True, eq=False)
class ConformalMapSeries:
    kind: str
    pos: np.ndarray
    neg: np.ndarray
    radius: float

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown map kind {self.kind!r}")
        object.__setattr__(self, "pos", np.asarray(self.pos, dtype=complex))
        object.__setattr__(self, "neg", np.asarray(self.neg, dtype=complex))
        if not self.radius > 0:
            raise DomainError("domain radius must be positive")

    @property
    def pos_scale(self):
        return self.radius if self.kind == "interior" else 1.0

    @property
    def neg_scale(self):
        return self.radius if self.kind == "annulus" else 1.0

    @property
    def inner_radius(self):
        return {"interior": 0.0, "exterior": 1.0, "annulus": self.radius}[self.kind]

    @property
    def outer_radius(self):
        return {"interior": self.radius, "exterior": math.inf, "annulus": 1.0}[self.kind]

    @property
    def degree(self):
        return max(len(self.pos), len(self.neg)) - 1

    def derivative_at_origin(self):
        """f'(0) for interior maps and f'(infinity) for exterior maps."""
        if self.kind == "interior":
            return self.pos[1] / self.radius
        if self.kind == "exterior":
            return self.pos[1]
        raise DomainError("annulus maps have neither 0 nor infinity in their domain")

    def __call__(self, z, order=0):
        """The ``order``-th derivative at the points ``z``."""
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        if len(self.pos):
            k = np.arange(len(self.pos))
            c = self.pos * _falling(k, order)
            c = c[order:] / self.pos_scale**order
            if len(c):
                out = out + np.polynomial.polynomial.polyval(z / self.pos_scale, c)
        if len(self.neg) and order < 64:
            k = np.arange(len(self.neg))
            c = self.neg * _rising(k, order) * (-1) ** order
            out = out + np.polynomial.polynomial.polyval(self.neg_scale / z, c) / z**order
        return out

    def ring_values(self, r, n, max_order=2):
        """Values of f, f', ... f^(max_order) at r e^{2 pi i m/n}, m < n, by FFT.

        Exact up to aliasing, which vanishes once n exceeds the mode span.
        """
        out = []
        for order in range(max_order + 1):
            spec = np.zeros(n, dtype=complex)
            if len(self.pos):
                k = np.arange(order, len(self.pos))
                amp = (self.pos[order:] * _falling(k, order)
                       * (r / self.pos_scale) ** (k - order) / self.pos_scale**order)
                np.add.at(spec, (k - order) % n, amp)
            if len(self.neg):
                k = np.arange(len(self.neg))
                amp = self.neg * (-1) ** order * _rising(k, order) * (self.neg_scale / r) ** k / r**order
                np.add.at(spec, (-k - order) % n, amp)
            out.append(np.fft.ifft(spec) * n)
        return out

    def rotated(self, delta):
        """The map z -> f(e^{i delta} z)."""
        kp = np.arange(len(self.pos))
        kn = np.arange(len(self.neg))
        return ConformalMapSeries(self.kind, self.pos * np.exp(1j * kp * delta),
                                  self.neg * np.exp(-1j * kn * delta), self.radius)

    def precomposed_scaling(self, s):
        """The map z -> f(s z), restricted to the correspondingly rescaled domain (interior only)."""
        if self.kind != "interior":
            raise DomainError("only interior maps can be precomposed with a scaling here")
        k = np.arange(len(self.pos))
        return ConformalMapSeries("interior", self.pos * s**k, [], self.radius)

    def to_json(self):
        pack = lambda a: [[float(x.real), float(x.imag)] for x in a]
        return {"kind": self.kind, "radius": self.radius, "pos": pack(self.pos), "neg": pack(self.neg)}

    @classmethod
    def from_json(cls, obj):
        unpack = lambda a: np.array([complex(re, im) for re, im in a], dtype=complex)
        return cls(obj["kind"], unpack(obj["pos"]), unpack(obj["neg"]), float(obj["radius"]))


@dataclass(frozen=True, eq=False)
class Uniformization:
    tau: float
    f1: ConformalMapSeries
    fA: ConformalMapSeries
    f2: ConformalMapSeries
    boundary_residual: float
    info: dict = field(default_factory=dict)

    @property
    def rho(self):
        return math.exp(-2 * math.pi * self.tau)

    def to_json(self):
        return {"tau": self.tau, "boundary_residual": self.boundary_residual,
                "f1": self.f1.to_json(), "fA": self.fA.to_json(), "f2": self.f2.to_json(),
                "info": self.info}

    @classmethod
    def from_json(cls, obj):
        return cls(float(obj["tau"]), ConformalMapSeries.from_json(obj["f1"]),
                   ConformalMapSeries.from_json(obj["fA"]), ConformalMapSeries.from_json(obj["f2"]),
                   float(obj["boundary_residual"]), dict(obj.get("info", {})))


def exact_circle_uniformization(tau, scale=1.0):
    """Uniformization of the concentric pair scale * e^{-2 pi tau} S^1, scale * S^1."""
    rho = math.exp(-2 * math.pi * tau)
    return Uniformization(
        tau,
        ConformalMapSeries("interior", [0, scale * rho], [], rho),
        ConformalMapSeries("annulus", [0, scale], [0], rho),
        ConformalMapSeries("exterior", [0, scale], [0], 1.0),
        0.0, {"exact": True})


@dataclass(frozen=True)
class TruncatedLog:
    coeffs: np.ndarray
    tail_bound: float


def formal_log(a, tol_zero=1e-300):
    """Coefficients of log(a(u)/a_0) for a power series a with a_0 != 0.

    Uses n L_n = n a_n - sum_{k<n} k L_k a_{n-k} (from a L' = a'). The tail
    bound extrapolates the geometric decay of the last computed coefficients
    onto the unit circle.
    """
    a = np.asarray(a, dtype=complex)
    if abs(a[0]) <= tol_zero:
        raise ValidationError("formal logarithm needs a nonzero constant term")
    a = a / a[0]
    n = len(a)
    L = np.zeros(n, dtype=complex)
    kL = np.zeros(n, dtype=complex)
    for m in range(1, n):
        conv = np.dot(kL[1:m], a[m - 1:0:-1]) if m > 1 else 0.0
        L[m] = a[m] - conv / m
        kL[m] = m * L[m]
    mags = np.abs(L[n // 2:])
    if n < 8 or mags.max() == 0:
        return TruncatedLog(L, float(mags.sum()) if n >= 8 else 0.0)
    k = np.arange(n // 2, n)
    keep = mags > 0
    slope = np.polyfit(k[keep], np.log(mags[keep]), 1)[0]
    ratio = math.exp(min(slope, -1e-3))
    tail = mags[-1] * ratio / (1 - ratio)
    return TruncatedLog(L, float(tail))
