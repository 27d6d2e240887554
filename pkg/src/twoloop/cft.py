"""Annulus partition functions and the circle-pair minimizer criterion.

log g(tau) = -(pi/3) c tau + log Z(A_tau) is scanned over a log-spaced grid,
interior minima are refined by golden-section search, and the behaviour at
tau -> 0 and tau -> inf is read off leading asymptotics
log g ~ A/tau + B log tau (at 0) and log g ~ A tau + B log tau (at inf).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq, golden

from .errors import DomainError, NonFiniteError, ValidationError
from .specfun import log_euler_phi
from .zetadet import FlatAnnulus, det_annulus

GOLDEN_TOL = 1e-10
# step of the central difference used to polish the golden-section minimizer
DERIV_STEP = 1e-4


@dataclass(frozen=True)
class Asymptotics:
    """Leading terms: log g ~ zero_rate/tau + zero_log*log(tau) as tau -> 0, and
    log g ~ inf_rate*tau + inf_log*log(tau) as tau -> inf."""

    zero_rate: float
    zero_log: float
    inf_rate: float
    inf_log: float

    @property
    def diverges_at_zero(self):
        return self.zero_rate < 0 or (self.zero_rate == 0 and self.zero_log > 0)

    @property
    def diverges_at_infinity(self):
        return self.inf_rate < 0 or (self.inf_rate == 0 and self.inf_log < 0)


@dataclass(frozen=True)
class Trivialization:
    name: str
    kind: str
    c: float
    log_Z_annulus: Callable[[float], float] = field(compare=False, repr=False)
    weights: tuple = ()
    asymptotics: Optional[Asymptotics] = None

    def __post_init__(self):
        if not math.isfinite(self.c) or self.c == 0:
            raise DomainError(f"central charge must be finite and nonzero, got {self.c!r}")

    def to_json(self):
        if self.kind not in ("zeta", "characters"):
            raise ValidationError(f"trivialization of kind {self.kind!r} has no JSON form")
        return {"kind": self.kind, "c": self.c, "weights": [[h, n] for h, n in self.weights]}

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict) or "kind" not in obj or "c" not in obj:
            raise ValidationError("trivialization JSON needs 'kind' and 'c'")
        try:
            c = float(obj["c"])
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"bad central charge {obj['c']!r}") from exc
        if obj["kind"] == "zeta":
            return make_zeta_trivialization(c)
        if obj["kind"] == "characters":
            try:
                weights = [(float(h), n) for h, n in obj.get("weights", [])]
            except (TypeError, ValueError) as exc:
                raise ValidationError("weights must be a list of [h, n] pairs") from exc
            return make_character_trivialization(c, weights)
        raise ValidationError(f"unknown trivialization kind {obj['kind']!r}")

    @classmethod
    def load(cls, path):
        try:
            with open(path) as fh:
                obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: malformed JSON ({exc})") from exc
        return cls.from_json(obj)


def _check_tau(tau):
    tau = float(tau)
    if not tau > 0 or not math.isfinite(tau):
        raise DomainError(f"modulus must be positive and finite, got {tau!r}")
    return tau


def make_zeta_trivialization(c: float) -> Trivialization:
    """Z(A_tau) = det(Laplacian on the flat annulus)^(-c/2); the boundary term vanishes for flat annuli."""
    c = float(c)

    def log_Z(tau):
        tau = _check_tau(tau)
        return -0.5 * c * det_annulus(FlatAnnulus(math.exp(-2 * math.pi * tau), 1.0))

    # log g = (c/2)(-log tau - 2 log phi(e^{-4 pi tau})) + const
    asym = Asymptotics(zero_rate=c * math.pi / 24, zero_log=0.0, inf_rate=0.0, inf_log=-c / 2)
    return Trivialization(f"zeta(c={c:g})", "zeta", c, log_Z, (), asym)


def _check_weights(weights):
    out = []
    for item in weights:
        h, n = item
        if isinstance(n, bool) or not float(n).is_integer() or n < 1:
            raise DomainError(f"multiplicities must be positive integers, got {n!r}")
        if not math.isfinite(float(h)):
            raise DomainError(f"weight must be finite, got {h!r}")
        out.append((float(h), int(n)))
    if not out:
        raise DomainError("character trivialization needs at least one weight")
    return tuple(out)


def make_character_trivialization(c: float, weights: Sequence) -> Trivialization:
    """Z(A_tau) = sum_h n_h chi_{c,h}(q) with q = e^{-pi/tau}, summed in log space."""
    c = float(c)
    weights = _check_weights(weights)
    hs = np.array([h for h, _ in weights])
    log_n = np.log([n for _, n in weights])

    def log_Z(tau):
        tau = _check_tau(tau)
        log_q = -math.pi / tau
        # e^{log_q} may underflow to 0, where log phi is exactly 0
        with np.errstate(over="ignore", invalid="ignore"):
            terms = log_n + (hs - c / 24) * log_q - log_euler_phi(math.exp(log_q))
        if not np.all(np.isfinite(terms)):
            raise NonFiniteError(f"character sum overflows at tau={tau!r}")
        top = terms.max()
        return float(top + math.log(np.exp(terms - top).sum()))

    h_min = hs.min()
    asym = Asymptotics(zero_rate=-math.pi * (h_min - c / 24), zero_log=0.0,
                       inf_rate=large_tau_slope(c), inf_log=-0.5)
    label = ",".join(f"{h:g}x{n}" for h, n in weights)
    return Trivialization(f"characters(c={c:g};{label})", "characters", c, log_Z, weights, asym)


def large_tau_slope(c: float) -> float:
    """d/dtau log g for characters as tau -> inf, from log phi(e^{-pi/tau}) ~ -pi tau/6."""
    return math.pi / 6 - math.pi * c / 3


def criterion(t: Trivialization, tau: float) -> float:
    """log g(tau) = -(pi/3) c tau + log Z(A_tau)."""
    tau = _check_tau(tau)
    return -math.pi / 3 * t.c * tau + t.log_Z_annulus(tau)


CLASSIFICATIONS = ("interior-minimum", "infimum-at-zero", "infimum-at-infinity", "monotone-no-min")


@dataclass(frozen=True)
class CriterionResult:
    classification: str
    tau_star: Optional[float]
    value_at_star: Optional[float]
    scan: list
    diverges_at_zero: bool
    diverges_at_infinity: bool

    def to_json(self):
        return {
            "classification": self.classification,
            "tau_star": self.tau_star,
            "value_at_star": self.value_at_star,
            "diverges_at_zero": self.diverges_at_zero,
            "diverges_at_infinity": self.diverges_at_infinity,
            "scan": [[float(a), float(b)] for a, b in self.scan],
        }


def scan_criterion(t: Trivialization, tau_range, grid):
    lo, hi = map(float, tau_range)
    if not 0 < lo < hi:
        raise DomainError(f"need 0 < tau_min < tau_max, got {tau_range!r}")
    taus = np.geomspace(lo, hi, int(grid))
    vals = np.array([criterion(t, x) for x in taus])
    if not np.all(np.isfinite(vals)):
        raise NonFiniteError("criterion scan produced non-finite values")
    return taus, vals


def _derivative(func, x, h):
    return (-func(x + 2 * h) + 8 * func(x + h) - 8 * func(x - h) + func(x - 2 * h)) / (12 * h)


def refine_minimum(t: Trivialization, a, b, c):
    """Golden-section search in the bracket a < b < c, polished by a root of the derivative."""
    f = lambda x: criterion(t, x)
    x = float(golden(f, brack=(a, b, c), tol=GOLDEN_TOL))
    # golden's accuracy is limited by flatness at the minimum; the derivative root is not
    h = DERIV_STEP * x
    lo, hi = max(a, x - 1e-3 * x), min(c, x + 1e-3 * x)
    d = lambda y: _derivative(f, y, h)
    if d(lo) < 0 < d(hi):
        x = brentq(d, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)
    return x, f(x)


def _end_slopes(taus, vals):
    """Slopes of log g against log tau at the two ends of the scan."""
    s = np.log(taus)
    return (vals[1] - vals[0]) / (s[1] - s[0]), (vals[-1] - vals[-2]) / (s[-1] - s[-2])


def classify_minimizer(t: Trivialization, tau_range=(0.05, 20.0), grid: int = 64) -> CriterionResult:
    """Decide whether log g has a global minimum on (0, inf).

    Precedence: divergence to -inf at infinity, then at zero, then an interior
    minimum lying below both ends of the scan, then monotone behaviour.
    Without analytic asymptotics the end slopes of the scan decide divergence.
    """
    if int(grid) < 16:
        raise DomainError(f"grid must have at least 16 points, got {grid!r}")
    taus, vals = scan_criterion(t, tau_range, grid)
    scan = list(zip(taus.tolist(), vals.tolist()))
    left, right = _end_slopes(taus, vals)
    if t.asymptotics is not None:
        at_zero, at_inf = t.asymptotics.diverges_at_zero, t.asymptotics.diverges_at_infinity
    else:
        at_zero, at_inf = bool(left > 0), bool(right < 0)

    def result(label, x=None, v=None):
        return CriterionResult(label, x, v, scan, bool(at_zero), bool(at_inf))

    if at_inf:
        return result("infimum-at-infinity")
    if at_zero:
        return result("infimum-at-zero")
    local = [i for i in range(1, len(vals) - 1) if vals[i] <= vals[i - 1] and vals[i] <= vals[i + 1]]
    best = None
    for i in local:
        x, v = refine_minimum(t, taus[i - 1], taus[i], taus[i + 1])
        if best is None or v < best[1]:
            best = (x, v)
    if best is not None and best[1] < min(vals[0], vals[-1]):
        return result("interior-minimum", float(best[0]), float(best[1]))
    steps = np.diff(vals)
    if np.all(steps >= 0) or np.all(steps <= 0):
        return result("monotone-no-min")
    return result("infimum-at-zero" if vals[0] < vals[-1] else "infimum-at-infinity")
