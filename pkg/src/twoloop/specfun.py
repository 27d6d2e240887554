"""Scalar special functions: the Euler function, zeta'(-1), Verma characters."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import mpmath

from .errors import DomainError

# Raw products are only used below this nome; above it the modular transformation
# of the Dedekind eta function gives a rapidly convergent series instead.
MODULAR_THRESHOLD = 0.98
# Truncate products once x**k drops below this.
PRODUCT_CUTOFF = 1e-18


@dataclass(frozen=True)
class QArgument:
    x: float

    def __post_init__(self):
        if not (0.0 <= self.x < 1.0) or math.isnan(self.x):
            raise DomainError(f"nome must lie in [0, 1), got {self.x!r}")


@dataclass(frozen=True)
class CharacterParams:
    c: float
    h: float
    q: float

    def __post_init__(self):
        if not (0.0 < self.q < 1.0):
            raise DomainError(f"character nome must lie in (0, 1), got {self.q!r}")


def _check_nome(x):
    return QArgument(float(x)).x


def _log_phi_product(x):
    if x == 0.0:
        return 0.0
    terms = []
    xk = x
    while xk >= PRODUCT_CUTOFF:
        terms.append(math.log1p(-xk))
        xk *= x
    return math.fsum(terms)


def _log_phi_modular(x):
    # x = exp(-2 pi t); eta(i/t) = sqrt(t) eta(i t)
    t = -math.log(x) / (2.0 * math.pi)
    dual = math.exp(-2.0 * math.pi / t)
    return (math.pi * t / 12.0 - 0.5 * math.log(t) - math.pi / (12.0 * t)
            + _log_phi_product(dual))


def log_euler_phi(x, method="auto"):
    """Return ``sum_k log(1 - x**k)``.

    ``method`` is ``"auto"``, ``"product"`` or ``"modular"``. The automatic choice
    switches to the modular route above ``MODULAR_THRESHOLD``.
    """
    x = _check_nome(x)
    if method == "product":
        return _log_phi_product(x)
    if method == "modular":
        if x == 0.0:
            return 0.0
        return _log_phi_modular(x)
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    if x > MODULAR_THRESHOLD:
        return _log_phi_modular(x)
    return _log_phi_product(x)


def euler_phi(x):
    """The Euler function prod_{k>=1} (1 - x**k).

    Underflows to 0.0 for nomes extremely close to 1; use :func:`log_euler_phi`
    there.
    """
    x = _check_nome(x)
    if x > MODULAR_THRESHOLD:
        return math.exp(_log_phi_modular(x))
    prod = 1.0
    xk = x
    while xk >= PRODUCT_CUTOFF:
        prod *= 1.0 - xk
        xk *= x
    return prod


def euler_phi_coefficients(degree):
    """Integer coefficients of prod_{k=1}^{degree} (1 - x**k) up to x**degree."""
    coeffs = [0] * (degree + 1)
    coeffs[0] = 1
    for k in range(1, degree + 1):
        for n in range(degree, k - 1, -1):
            coeffs[n] -= coeffs[n - k]
    return coeffs


@functools.lru_cache(maxsize=None)
def zeta_prime_minus_one():
    """zeta_R'(-1), evaluated once at 30 digits and cached."""
    with mpmath.workdps(30):
        return float(mpmath.zeta(-1, derivative=1))


def virasoro_character(p: CharacterParams):
    """log chi_{c,h}(q) = (h - c/24) log q - log phi(q) for a Verma module."""
    return (p.h - p.c / 24.0) * math.log(p.q) - log_euler_phi(p.q)


def log_virasoro_character(c, h, q):
    return virasoro_character(CharacterParams(float(c), float(h), float(q)))
