import math

import numpy as np
import pytest

from conftest import perturbed_pair, wobbly
from twoloop.errors import DomainError
from twoloop.loops import TwoLoopConfig, make_circle_pair
from twoloop.uniformize import annulus_uniformize
from twoloop.variation import (PROFILE_DEGREE, BeltramiBump, first_order_deformation, schwarzian,
                               schwarzian_integral, support_side, variation_check, _seeds)


def outside_bump():
    return BeltramiBump(3.0 + 0.5j, 0.5, 0.05)


def test_bump_profile_and_mass():
    nu = BeltramiBump(1.0j, 0.4, 0.02 - 0.01j)
    assert nu(1.0j) == 0.02 - 0.01j and nu(1.0j + 0.41) == 0
    nodes, weights = nu.quadrature()
    assert weights.sum() == pytest.approx(nu.mass(), rel=1e-13)
    assert nu.mass() == pytest.approx((0.02 - 0.01j) * math.pi * 0.16 / (PROFILE_DEGREE + 1), rel=1e-15)


@pytest.mark.parametrize("args", [(0, 0.0, 0.01), (0, -1.0, 0.01), (0, 0.5, 0.2)])
def test_bump_rejects_bad_parameters(args):
    with pytest.raises(DomainError):
        BeltramiBump(*args)


def test_zero_eps_is_identity():
    z = np.array([1.0, 2j, -0.5 + 0.5j])
    assert np.array_equal(first_order_deformation(outside_bump(), 0.0)(z), z)


def test_velocity_closed_form_outside_support():
    # a radial bump acts outside its support like a point mass at its centre
    nu = outside_bump()
    z = np.array([0.0, 1.0j, -2.0, 3.0 + 2j])
    expected = nu.amplitude * nu.radius**2 / ((PROFILE_DEGREE + 1) * (z - nu.center))
    assert np.allclose(first_order_deformation(nu, 1.0).velocity(z), expected, atol=1e-15)


def test_small_bump_magnitude():
    nu = BeltramiBump(5.0, 0.01, 0.1)
    eps = 1e-3
    disp = np.abs(first_order_deformation(nu, eps)(np.array([0.0])) - 0.0)[0]
    assert disp <= eps * nu.radius**2 / 4.9
    assert disp > 0


def test_linear_in_eps():
    z = np.array([0.3, 1.2j])
    d1 = first_order_deformation(outside_bump(), 1e-3)(z) - z
    d2 = first_order_deformation(outside_bump(), 2e-3)(z) - z
    assert np.allclose(d2, 2 * d1, atol=1e-18)


def test_velocity_rejects_support_points():
    with pytest.raises(DomainError):
        first_order_deformation(outside_bump(), 1e-3).velocity(np.array([3.0 + 0.5j]))


def test_support_side():
    cfg = perturbed_pair(0.5)
    assert support_side(cfg, outside_bump()) == "D2"
    assert support_side(cfg, BeltramiBump(0.0, 0.02, 0.05)) == "D1"
    with pytest.raises(DomainError):
        support_side(cfg, BeltramiBump(0.5, 0.1, 0.05))  # in the annulus
    with pytest.raises(DomainError):
        support_side(cfg, BeltramiBump(1.0, 0.2, 0.05))  # straddles gamma2


def test_schwarzian_of_moebius_vanishes():
    a, b, c, d = 1.0, 0.2, 0.3j, 1.0

    def m(z, order=0):
        z = np.asarray(z, dtype=complex)
        det = a * d - b * c
        if order == 0:
            return (a * z + b) / (c * z + d)
        return det * math.factorial(order) * (-c) ** (order - 1) / (c * z + d) ** (order + 1)

    assert np.abs(schwarzian(m, np.array([0.1, -0.4j]))).max() < 1e-14


def test_zero_amplitude():
    res = variation_check(perturbed_pair(0.5), BeltramiBump(3.0, 0.5, 0.0))
    assert (res.fd, res.rhs) == (0.0, 0.0)


def test_circle_pair_rhs_vanishes():
    res = variation_check(make_circle_pair(0.5), outside_bump())
    assert res.rhs == pytest.approx(0.0, abs=1e-14)
    assert abs(res.fd) < 1e-3 * 1e-3 * 10


def test_perturbed_fd_matches_rhs():
    res = variation_check(perturbed_pair(0.5), outside_bump(), eps=1e-3)
    assert res.side == "D2"
    assert res.rel_err < 0.05
    assert abs(res.rhs) > 1e-7


def test_inner_bump():
    cfg = TwoLoopConfig(wobbly(0.4, 0.06, 3), wobbly(1.0, 0.05, 2))
    res = variation_check(cfg, BeltramiBump(0.1 + 0.05j, 0.08, 0.05 + 0.03j))
    assert res.side == "D1" and res.rel_err < 0.05
    assert abs(res.rhs) > 1e-7


def test_rhs_invariant_under_disk_automorphism():
    cfg = perturbed_pair(0.5)
    u = annulus_uniformize(cfg)
    nu = outside_bump()
    base = schwarzian_integral(nu, u.f2, _seeds(u.f2, nu))
    rotated = u.f2.rotated(0.7)
    assert schwarzian_integral(nu, rotated, _seeds(rotated, nu)) == pytest.approx(base, abs=1e-8 * abs(base))


def test_fd_linear_in_amplitude():
    cfg = perturbed_pair(0.5)
    amps = np.array([0.02, 0.05, 0.08])
    fds = np.array([variation_check(cfg, BeltramiBump(3.0 + 0.5j, 0.5, a)).fd for a in amps])
    slope, intercept = np.polyfit(amps, fds, 1)
    resid = fds - (slope * amps + intercept)
    r2 = 1 - np.sum(resid**2) / np.sum((fds - fds.mean()) ** 2)
    assert r2 > 0.999
