import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twoloop.errors import ConvergenceError, DomainError
from twoloop.specfun import log_euler_phi, zeta_prime_minus_one
from twoloop.zetadet import (ConformalFactorField, FlatAnnulus, FlatDisk, checked_polyakov_alvarez,
                             conformal_anomaly, det_annulus, det_disk, polyakov_alvarez)


def bumpy(z):
    return np.real(z) + 0.3 * np.abs(z) ** 2 + 0.1 * np.imag(z**3)


def test_det_disk_unit():
    assert det_disk(FlatDisk(1.0)) == pytest.approx(-0.7737, abs=1e-3)
    terms = [-math.log(2) / 6, -0.5 * math.log(math.pi), -2 * zeta_prime_minus_one(), -5 / 12]
    assert det_disk(FlatDisk(1.0)) == pytest.approx(math.fsum(terms), abs=1e-15)


def test_det_disk_radius_dependence():
    assert det_disk(FlatDisk(math.e)) == pytest.approx(det_disk(FlatDisk(1.0)) - 1 / 3, abs=1e-14)
    assert det_disk(FlatDisk(2.0)) - det_disk(FlatDisk(1.0)) == pytest.approx(-math.log(2) / 3, abs=1e-14)


def test_det_annulus_values():
    a = FlatAnnulus(math.exp(-2 * math.pi), 1.0)
    expected = (-math.log(math.pi) - 2 * math.pi / 3 + math.log(2 * math.pi)
                + 2 * log_euler_phi(math.exp(-4 * math.pi)))
    assert det_annulus(a) == pytest.approx(expected, abs=1e-13)
    expected = (-math.log(math.pi) + math.log(0.5) / 3 + math.log(math.log(2))
                + 2 * log_euler_phi(0.25))
    assert det_annulus(FlatAnnulus(0.5, 1.0)) == pytest.approx(expected, abs=1e-9)


@given(st.floats(0.01, 0.9), st.floats(0.1, 10.0))
@settings(max_examples=40, deadline=None)
def test_det_annulus_scale_invariant(ratio, s):
    assert det_annulus(FlatAnnulus(s * ratio, s)) == pytest.approx(
        det_annulus(FlatAnnulus(ratio, 1.0)), abs=1e-12)


def test_annulus_modulus():
    assert FlatAnnulus(math.exp(-2 * math.pi), 1.0).modulus == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("args", [(0.0,), (-1.0,)])
def test_bad_disk(args):
    with pytest.raises(DomainError):
        FlatDisk(*args)


@pytest.mark.parametrize("args", [(1.0, 1.0), (2.0, 1.0), (0.0, 1.0)])
def test_bad_annulus(args):
    with pytest.raises(DomainError):
        FlatAnnulus(*args)


@given(st.floats(0.1, 5.0), st.floats(-2.0, 2.0))
@settings(max_examples=30, deadline=None)
def test_constant_factor_on_disk(r, s):
    field = ConformalFactorField.from_function(lambda z: np.full(z.shape, s), FlatDisk(r), 8, 8)
    assert polyakov_alvarez(field) == pytest.approx(-s / 3, abs=1e-12)
    assert conformal_anomaly(field) == pytest.approx(s / 6, abs=1e-12)


def test_constant_factor_on_annulus():
    field = ConformalFactorField.from_function(lambda z: np.full(z.shape, 0.7), FlatAnnulus(0.3, 1.0))
    assert polyakov_alvarez(field) == pytest.approx(0.0, abs=1e-11)


def test_zero_factor():
    field = ConformalFactorField.from_function(lambda z: np.zeros(z.shape), FlatDisk(1.0))
    assert conformal_anomaly(field) == 0.0


def test_harmonic_factor_closed_form():
    # |grad Re z|^2 = 1 and both boundary integrals vanish
    field = ConformalFactorField.from_function(np.real, FlatDisk(1.0))
    assert polyakov_alvarez(field) == pytest.approx(-1 / 12, abs=1e-13)


@pytest.mark.parametrize("domain", [FlatDisk(1.0), FlatAnnulus(0.4, 1.3)])
def test_refinement_oracle(domain):
    coarse = polyakov_alvarez(ConformalFactorField.from_function(bumpy, domain, 32, 64))
    fine = polyakov_alvarez(ConformalFactorField.from_function(bumpy, domain, 128, 256))
    assert coarse == pytest.approx(fine, abs=1e-8)


def test_exact_normal_derivative_agrees():
    # d/dr of Re z + 0.3 r^2 + 0.1 Im z^3 at r = 1
    dn = lambda z: np.real(z) + 0.6 * np.abs(z) ** 2 + 0.3 * np.imag(z**3)
    a = polyakov_alvarez(ConformalFactorField.from_function(bumpy, FlatDisk(1.0)))
    b = polyakov_alvarez(ConformalFactorField.from_function(bumpy, FlatDisk(1.0), normal_derivative=dn))
    assert a == pytest.approx(b, abs=1e-11)


def test_anomaly_identity():
    field = ConformalFactorField.from_function(bumpy, FlatDisk(1.0))
    _, normal = field.boundary_integrals()
    lhs = conformal_anomaly(field) + 0.5 * polyakov_alvarez(field)
    assert lhs == pytest.approx(-normal / (8 * math.pi), abs=1e-13)
    assert normal == pytest.approx(2 * math.pi * 0.6, abs=1e-10)


def test_checked_detects_underresolution():
    rough = lambda z: np.real(np.exp(6 * z))
    with pytest.raises(ConvergenceError):
        checked_polyakov_alvarez(rough, FlatDisk(1.0), 8, 8, tol=1e-10)
    assert math.isfinite(checked_polyakov_alvarez(bumpy, FlatDisk(1.0)))


def test_domain_mismatch():
    field = ConformalFactorField.from_function(bumpy, FlatDisk(1.0))
    with pytest.raises(DomainError):
        polyakov_alvarez(field, FlatDisk(2.0))
