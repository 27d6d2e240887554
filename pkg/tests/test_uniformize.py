import math

import numpy as np
import pytest

from conftest import perturbed_pair
from twoloop.errors import DomainError
from twoloop.loops import Loop, MoebiusMap, TwoLoopConfig, apply_moebius, make_circle_pair, random_moebius
from twoloop.uniformize import (UniformizeOptions, annulus_uniformize, disk_map, distance_to_loop,
                                koebe_iteration, log_deriv_ratio, two_circle_modulus, uniformize_at)


def outer_pole_pair():
    """gamma1 = e^{-2 pi} S^1, gamma2 = image of S^1 under z + 0.05 z^{-2}."""
    g2 = Loop.from_function(lambda t: np.exp(1j * t) + 0.05 * np.exp(-2j * t))
    return TwoLoopConfig(Loop.circle(math.exp(-2 * math.pi)), g2)


def test_options_sizes():
    opts = UniformizeOptions()
    assert opts.sizes(3) == [256, 512, 1024]
    assert opts.sizes(100) == [512, 1024]
    with pytest.raises(DomainError):
        opts.sizes(300)


@pytest.mark.parametrize("r", [1.0, 0.3, 2.5])
def test_disk_map_circle(r):
    f = disk_map(Loop.circle(r))
    assert f.pos[1] == pytest.approx(r, abs=1e-13)
    assert np.abs(np.delete(f.pos, 1)).max() < 1e-12


def test_disk_map_recovers_univalent_polynomial():
    loop = Loop.from_function(lambda t: np.exp(1j * t) + 0.1 * np.exp(2j * t))
    f = disk_map(loop)
    assert np.allclose(f.pos[:4], [0, 1, 0.1, 0], atol=1e-8)
    assert np.abs(f.pos[4:]).max() < 1e-8


def test_disk_map_exterior():
    loop = Loop.from_function(lambda t: 1.1 * np.exp(1j * t) + 0.2 + 0.05 * np.exp(-2j * t))
    f = disk_map(loop, "exterior")
    assert f.pos[1] == pytest.approx(1.1, abs=1e-10)
    assert np.allclose(f.neg[:4], [0.2, 0, 0.05, 0], atol=1e-10)


def test_disk_map_bad_side():
    with pytest.raises(ValueError):
        disk_map(Loop.circle(1.0), "sideways")


def test_distance_to_loop():
    loop = Loop.circle(1.0, 0.5)
    pts = np.array([0.5 + 2j, 0.5 + 0.0j, 3.0])
    assert np.allclose(distance_to_loop(loop, pts), [1.0, 1.0, 1.5], atol=1e-12)


def test_circle_pair_numerically():
    # bypass the exact shortcut
    for tau in (0.3, 1.0):
        u = uniformize_at(TwoLoopConfig(Loop.circle(math.exp(-2 * math.pi * tau)), Loop.circle(1.0)), 256)
        assert u.tau == pytest.approx(tau, abs=1e-10)
        assert np.abs(u.fA.pos[2:]).max() < 1e-10 and abs(u.fA.pos[1] - 1) < 1e-10
        assert u.f1.pos[1] == pytest.approx(u.rho, abs=1e-12)
        assert u.f2.pos[1] == pytest.approx(1.0, abs=1e-12)


def test_concentric_shortcut_is_exact():
    u = annulus_uniformize(TwoLoopConfig(Loop.circle(0.2), Loop.circle(2.0)))
    assert u.tau == math.log(10) / (2 * math.pi)
    assert u.boundary_residual == 0.0


def test_modulus_monotonicity():
    taus = []
    for r in (0.2, 0.1):
        taus.append(uniformize_at(TwoLoopConfig(Loop.circle(r), Loop.circle(1.0)), 256).tau)
    assert taus[1] - taus[0] == pytest.approx(math.log(2) / (2 * math.pi), abs=1e-12)


def test_two_circle_modulus():
    assert two_circle_modulus(0, 0.5, 0, 1) == pytest.approx(math.log(2) / (2 * math.pi), abs=1e-15)
    with pytest.raises(DomainError):
        two_circle_modulus(0.6, 0.5, 0, 1)


def test_moebius_circle_pair():
    cfg = apply_moebius(MoebiusMap(1, 0.3, 0.3, 1), make_circle_pair(0.4))
    u = annulus_uniformize(cfg)
    assert u.tau == pytest.approx(0.4, abs=1e-6)
    assert u.boundary_residual < 1e-8


def test_outer_pole_self_convergence():
    cfg = outer_pole_pair()
    taus = [uniformize_at(cfg, n).tau for n in (256, 512, 1024)]
    # Richardson with geometric convergence: the last difference bounds the error
    assert abs(taus[2] - taus[1]) < 1e-10
    u = annulus_uniformize(cfg)
    assert u.tau == pytest.approx(taus[2], abs=1e-6)
    assert u.boundary_residual < 1e-8
    assert set(u.info["residuals"]) == {"f1", "fA_inner", "fA_outer", "f2"}


def test_annulus_map_conformal_and_gauged():
    u = annulus_uniformize(perturbed_pair(0.5))
    r = np.linspace(u.rho, 1.0, 40)[1:-1]
    z = r[:, None] * np.exp(1j * np.linspace(0, 2 * np.pi, 128, endpoint=False))[None, :]
    assert np.abs(u.fA(z, 1)).min() > 1e-3
    assert abs(np.angle(u.fA(u.rho, 1))) < 1e-12
    assert u.f1.pos[1].imag == pytest.approx(0.0, abs=1e-14) and u.f1.pos[1].real > 0
    assert u.f2.pos[1].imag == pytest.approx(0.0, abs=1e-14) and u.f2.pos[1].real > 0


def test_log_deriv_ratio_circles_and_scaling():
    assert log_deriv_ratio(annulus_uniformize(make_circle_pair(1.0))) == 0.0
    cfg = outer_pole_pair()
    scaled = apply_moebius(MoebiusMap(3.0, 0, 0, 1), cfg)
    a = log_deriv_ratio(annulus_uniformize(cfg))
    assert log_deriv_ratio(annulus_uniformize(scaled)) == pytest.approx(a, abs=1e-10)
    assert a > 0


def test_log_deriv_ratio_resolution_stable():
    cfg = outer_pole_pair()
    vals = [log_deriv_ratio(uniformize_at(cfg, n)) for n in (512, 1024)]
    assert vals[0] == pytest.approx(vals[1], abs=1e-8)


def test_koebe_returns_circles():
    z1 = 0.2 * np.exp(2j * np.pi * np.arange(256) / 256) + 0.05
    z2 = np.exp(2j * np.pi * np.arange(256) / 256)
    w1, w2, it = koebe_iteration(z1, z2)
    assert np.ptp(np.log(np.abs(w1))) < 1e-10 and np.allclose(np.abs(w2), 1)
    assert it >= 1


def test_cache_reused():
    cfg = perturbed_pair(0.5)
    assert annulus_uniformize(cfg) is annulus_uniformize(cfg)


@pytest.mark.parametrize("seed", range(3))
def test_random_moebius_images_of_circles(seed):
    base = make_circle_pair(0.35)
    cfg = apply_moebius(random_moebius(np.random.default_rng(seed), base), base)
    assert annulus_uniformize(cfg).tau == pytest.approx(0.35, abs=1e-6)
