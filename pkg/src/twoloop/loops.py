"""Loops as trigonometric polynomials and validated two-loop configurations.

A configuration is kept in standard position: the first loop bounds a disk
containing 0, the second bounds a disk containing infinity, and the annulus
between them is nonempty.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree
from shapely.geometry import LinearRing

from .errors import DomainError, ValidationError

MAX_DEGREE = 256


def _winding(z, p):
    """Winding number of the closed polygon ``z`` around the point ``p``."""
    d = np.angle(np.roll(z - p, -1) / (z - p))
    return int(round(d.sum() / (2 * np.pi)))


@dataclass(frozen=True, eq=False)
class Loop:
    """theta -> sum_{k=-M}^{M} coeffs[k + M] e^{i k theta}, counterclockwise."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 1 or len(c) % 2 != 1:
            raise ValidationError("loop coefficients must have odd length 2M+1")
        if (len(c) - 1) // 2 > MAX_DEGREE:
            raise ValidationError(f"loop degree exceeds {MAX_DEGREE}")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self):
        return (len(self.coeffs) - 1) // 2

    @property
    def modes(self):
        return np.arange(-self.degree, self.degree + 1)

    def __call__(self, theta):
        return self.derivative(theta, 0)

    def derivative(self, theta, order=1):
        theta = np.asarray(theta, dtype=float)
        k = self.modes
        weights = self.coeffs * (1j * k) ** order
        return np.exp(1j * np.multiply.outer(theta, k)) @ weights

    def sample(self, n, order=0):
        """Values (or derivatives) at theta_j = 2 pi j / n, exact for n > 2M."""
        M = self.degree
        if n <= 2 * M:
            return self.derivative(2 * np.pi * np.arange(n) / n, order)
        spec = np.zeros(n, dtype=complex)
        k = self.modes
        spec[k % n] = self.coeffs * (1j * k) ** order
        return np.fft.ifft(spec) * n

    @classmethod
    def from_samples(cls, z, tol=1e-14, max_degree=MAX_DEGREE, min_degree=1):
        """Least-squares trigonometric fit to uniform samples, truncated where the tail is below ``tol``."""
        z = np.asarray(z, dtype=complex)
        n = len(z)
        spec = np.fft.fft(z) / n
        kmax = (n - 1) // 2
        k = np.arange(-kmax, kmax + 1)
        c = spec[k % n]
        scale = np.abs(c).max()
        mags = np.maximum(np.abs(c[kmax:]), np.abs(c[kmax::-1]))
        significant = np.nonzero(mags > tol * scale)[0]
        M = max(int(significant.max()) if len(significant) else 0, min_degree)
        if M > max_degree or M >= kmax - 1:
            raise ValidationError(
                f"trigonometric fit needs degree {M} (cap {min(max_degree, kmax - 2)}); "
                "loop is too rough for the sampling")
        return cls(c[kmax - M: kmax + M + 1])

    @classmethod
    def circle(cls, radius=1.0, center=0.0):
        return cls(np.array([0.0, center, radius], dtype=complex))

    @classmethod
    def from_function(cls, func, n=1024, tol=1e-14, max_degree=MAX_DEGREE):
        """Fit ``func(theta)`` sampled at ``n`` uniform points."""
        theta = 2 * np.pi * np.arange(n) / n
        return cls.from_samples(func(theta), tol=tol, max_degree=max_degree)

    def to_json(self):
        return {"coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs],
                "degree": self.degree}

    @classmethod
    def from_json(cls, obj):
        try:
            coeffs = np.array([complex(re, im) for re, im in obj["coeffs"]])
            degree = int(obj["degree"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed loop JSON: {exc}") from exc
        if len(coeffs) != 2 * degree + 1:
            raise ValidationError("loop JSON 'degree' does not match number of coefficients")
        return cls(coeffs)

    def allclose(self, other, atol=1e-14):
        M = max(self.degree, other.degree)
        a = np.zeros(2 * M + 1, complex)
        b = np.zeros(2 * M + 1, complex)
        a[M - self.degree: M + self.degree + 1] = self.coeffs
        b[M - other.degree: M + other.degree + 1] = other.coeffs
        return bool(np.all(np.abs(a - b) <= atol))


@dataclass(frozen=True, eq=False)
class MoebiusMap:
    """z -> (a z + b) / (c z + d), stored with determinant 1."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if abs(det) == 0:
            raise DomainError("Moebius map must have nonzero determinant")
        s = np.sqrt(complex(det))
        for name in "abcd":
            object.__setattr__(self, name, complex(getattr(self, name)) / s)

    @classmethod
    def identity(cls):
        return cls(1, 0, 0, 1)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return (self.a * z + self.b) / (self.c * z + self.d)

    def image_of_infinity(self):
        return math.inf if self.c == 0 else self.a / self.c

    @property
    def pole(self):
        """The point sent to infinity (None if infinity is fixed)."""
        return None if self.c == 0 else -self.d / self.c

    def inverse(self):
        return MoebiusMap(self.d, -self.b, -self.c, self.a)

    def compose(self, other):
        """self o other."""
        return MoebiusMap(self.a * other.a + self.b * other.c, self.a * other.b + self.b * other.d,
                          self.c * other.a + self.d * other.c, self.c * other.b + self.d * other.d)

    def as_matrix(self):
        return np.array([[self.a, self.b], [self.c, self.d]])


@dataclass(frozen=True, eq=False)
class TwoLoopConfig:
    gamma1: Loop
    gamma2: Loop
    cache: dict = field(default_factory=dict, repr=False)

    def to_json(self):
        return {"loops": [self.gamma1.to_json(), self.gamma2.to_json()]}

    @classmethod
    def from_json(cls, obj, check=True):
        try:
            l1, l2 = obj["loops"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError("configuration JSON needs a 'loops' list of two loops") from exc
        cfg = cls(Loop.from_json(l1), Loop.from_json(l2))
        if check:
            validate(cfg).raise_if_invalid()
        return cfg

    @classmethod
    def load(cls, path, check=True):
        try:
            with open(path) as fh:
                obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"malformed JSON in {path}: {exc}") from exc
        return cls.from_json(obj, check=check)

    def dump(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1)

    @property
    def sample_count(self):
        return max(64, 8 * max(self.gamma1.degree, self.gamma2.degree))


def make_circle_pair(tau):
    """The concentric pair e^{-2 pi tau} S^1, S^1 with its exact uniformization cached."""
    from .mapseries import exact_circle_uniformization

    if not tau > 0:
        raise DomainError(f"modulus must be positive, got {tau!r}")
    rho = math.exp(-2 * math.pi * tau)
    cfg = TwoLoopConfig(Loop.circle(rho), Loop.circle(1.0))
    cfg.cache["exact"] = exact_circle_uniformization(tau)
    return cfg


@dataclass
class Diagnostics:
    simple1: bool
    simple2: bool
    turning1: int
    turning2: int
    min_distance: float
    certified_margin: float
    contains_origin: bool
    nested: bool
    decay1: float
    decay2: float
    messages: list = field(default_factory=list)

    @property
    def ok(self):
        return (self.simple1 and self.simple2 and self.turning1 == 1 and self.turning2 == 1
                and self.certified_margin > 0 and self.contains_origin and self.nested)

    def raise_if_invalid(self):
        if not self.ok:
            raise ValidationError("invalid two-loop configuration: " + "; ".join(self.messages))

    def to_json(self):
        return {k: v for k, v in self.__dict__.items()}


def coefficient_decay(loop: Loop):
    """Geometric decay rate of |c_k| from a log-linear fit; 0 for a single-mode loop.

    The fit runs over the tail envelope max_{j>=k} |c_{+-j}| for k >= 2, with
    one extra point at roundoff level just past the degree, so that sparse
    trigonometric polynomials still certify decay.
    """
    c = loop.coeffs
    M = loop.degree
    scale = np.abs(c).max()
    floor = 1e-16 * scale
    mags = np.array([max(abs(c[M + k]), abs(c[M - k])) for k in range(2, M + 1)])
    if not np.any(mags > floor):
        return 0.0
    env = np.maximum.accumulate(mags[::-1])[::-1]
    last = int(np.nonzero(env > floor)[0].max())
    k = np.arange(2, last + 4)
    vals = np.append(env[: last + 1], [floor, floor])[: len(k)]
    slope = np.polyfit(k, np.log(np.maximum(vals, floor)), 1)[0]
    return float(math.exp(slope))


def _turning_number(loop, n):
    d = loop.sample(n, order=1)
    if np.min(np.abs(d)) < 1e-12 * np.max(np.abs(d)):
        return 0
    return _winding(d, 0.0)


def validate(cfg: TwoLoopConfig) -> Diagnostics:
    """Simplicity, disjointness, standard position and smoothness checks."""
    n = cfg.sample_count
    z1 = cfg.gamma1.sample(n)
    z2 = cfg.gamma2.sample(n)
    msgs = []
    simple = []
    for name, z in (("gamma1", z1), ("gamma2", z2)):
        ok = bool(LinearRing(np.column_stack([z.real, z.imag])).is_simple)
        if not ok:
            msgs.append(f"{name} self-intersects")
        simple.append(ok)
    turning = [_turning_number(cfg.gamma1, n), _turning_number(cfg.gamma2, n)]
    for name, t in zip(("gamma1", "gamma2"), turning):
        if t != 1:
            msgs.append(f"{name} has tangent turning number {t} (need a counterclockwise simple loop)")

    tree = cKDTree(np.column_stack([z2.real, z2.imag]))
    dist, _ = tree.query(np.column_stack([z1.real, z1.imag]))
    dmin = float(dist.min())
    speed = np.abs(cfg.gamma1.sample(n, 1)).max() + np.abs(cfg.gamma2.sample(n, 1)).max()
    margin = dmin - speed * (np.pi / n)
    if margin <= 0:
        msgs.append(f"loops are not certified disjoint (sampled distance {dmin:.3e})")

    contains = _winding(z1, 0.0) == 1
    if not contains:
        msgs.append("gamma1 does not enclose 0 counterclockwise")
    nested = _winding(z2, z1[0]) == 1 and _winding(z2, 0.0) == 1
    if not nested:
        msgs.append("gamma1 does not lie inside gamma2")
    return Diagnostics(simple[0], simple[1], turning[0], turning[1], dmin, float(margin),
                       contains, nested, coefficient_decay(cfg.gamma1),
                       coefficient_decay(cfg.gamma2), msgs)


def _far_point(cfg, avoid):
    """A finite point of the unbounded component, as far as possible from ``avoid``."""
    R = 2.0 * np.abs(cfg.gamma2.sample(cfg.sample_count)).max() + 1.0
    candidates = R * np.exp(2j * np.pi * np.arange(8) / 8)
    if avoid is None:
        return candidates[0]
    return candidates[np.argmax(np.abs(candidates - avoid))]


def normalizing_moebius(m: MoebiusMap, cfg: TwoLoopConfig) -> MoebiusMap:
    """Compose ``m`` with the Moebius map restoring standard position, if it is lost."""
    n = cfg.sample_count
    z2 = cfg.gamma2.sample(n)
    total = m
    pole = m.pole
    if pole is not None and _winding(z2, pole) != 0:
        # infinity would land in the annulus or in D1: send a point of D2 there instead
        q = m(_far_point(cfg, pole))
        total = MoebiusMap(0, 1, 1, -q).compose(total)
    w1 = total(cfg.gamma1.sample(n))
    if _winding(w1, 0.0) != 1:
        shift = _deep_point(w1, complex(total(0.0)))
        total = MoebiusMap(1, -shift, 0, 1).compose(total)
    return total


def _deep_point(z, fallback=0.0):
    """A point well inside the polygon ``z``: the better of its area centroid and ``fallback``."""
    cross = np.imag(np.conj(z) * np.roll(z, -1))
    centroid = complex(np.sum((z + np.roll(z, -1)) * cross) / (3 * np.sum(cross)))
    candidates = [c for c in (centroid, fallback) if abs(_winding(z, c)) == 1]
    return max(candidates, key=lambda c: np.abs(z - c).min())


def random_moebius(rng: np.random.Generator, cfg: TwoLoopConfig, reach=0.6) -> MoebiusMap:
    """A random Moebius map keeping ``cfg`` in well-conditioned standard position.

    Composes a disk automorphism of a disk containing both loops (zero at
    ``alpha``, |alpha| < reach * R) with a random rotation and scaling, then
    translates so the deepest point of the image of D1 goes to 0.
    """
    R = 1.01 * np.abs(cfg.gamma2.sample(cfg.sample_count)).max()
    alpha = reach * R * math.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
    scale = math.exp(rng.uniform(-0.7, 0.7)) * np.exp(2j * np.pi * rng.uniform())
    m = MoebiusMap(scale, -scale * alpha, -np.conj(alpha) / R**2, 1)
    w1 = m(cfg.gamma1.sample(cfg.sample_count))
    shift = _deep_point(w1, complex(m(0.0)))
    return MoebiusMap(1, -shift, 0, 1).compose(m)


def apply_moebius(m: MoebiusMap, cfg: TwoLoopConfig, n_fit: Optional[int] = None,
                  tol=1e-14, check=True) -> TwoLoopConfig:
    """Image of ``cfg`` under ``m`` (renormalized to standard position), refit as loops."""
    total = normalizing_moebius(m, cfg)
    n = n_fit or max(1024, 4 * cfg.sample_count)
    loops = []
    for loop in (cfg.gamma1, cfg.gamma2):
        w = total(loop.sample(n))
        if not np.all(np.isfinite(w)):
            raise ValidationError("Moebius map sends a loop point to infinity")
        fitted = Loop.from_samples(w, tol=tol)
        resid = np.abs(fitted.sample(n) - w).max()
        if resid > 1e-10 * np.abs(w).max():
            raise ValidationError(f"Fourier refit residual {resid:.2e} above tolerance")
        loops.append(fitted)
    out = TwoLoopConfig(*loops)
    if check:
        validate(out).raise_if_invalid()
    return out
