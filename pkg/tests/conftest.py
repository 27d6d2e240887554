import math
import time

import numpy as np
import pytest

from twoloop.loops import Loop, TwoLoopConfig, make_circle_pair


def wobbly(radius, amp, k, phase=0.0, center=0.0):
    """radius * e^{it} (1 + amp cos(k t + phase)) + center."""
    return Loop.from_function(
        lambda t: center + radius * np.exp(1j * t) * (1 + amp * np.cos(k * t + phase)))


def perturbed_pair(tau=1.0, amp=0.05, k=3):
    """Circle of radius e^{-2 pi tau} inside the unit circle perturbed by amp cos(k t)."""
    return TwoLoopConfig(Loop.circle(math.exp(-2 * math.pi * tau)), wobbly(1.0, amp, k))


def smooth_family():
    """Five genuinely two-sided perturbed configurations."""
    return [
        perturbed_pair(1.0, 0.05, 3),
        TwoLoopConfig(wobbly(0.3, 0.08, 2), wobbly(1.0, 0.05, 3)),
        TwoLoopConfig(wobbly(0.2, 0.1, 4, 0.3, 0.02), Loop.from_function(
            lambda t: np.exp(1j * t) + 0.05 * np.exp(-2j * t))),
        TwoLoopConfig(wobbly(0.4, 0.05, 5), wobbly(1.2, 0.04, 2, 1.0, 0.05)),
        TwoLoopConfig(Loop.from_function(lambda t: 0.25 * (np.exp(1j * t) + 0.1 * np.exp(2j * t))),
                      wobbly(1.0, 0.06, 3, 0.5)),
    ]


def circumcircle(loop):
    """Centre and radius of the circle through three points of ``loop``."""
    a, b, c = loop(np.array([0.0, 2.0, 4.0]))
    w = (c - a) / (b - a)
    center = (b - a) * (w - abs(w) ** 2) / (2j * w.imag) + a
    return center, abs(a - center)


@pytest.fixture
def circle_pair():
    return make_circle_pair(1.0)


@pytest.fixture(scope="session")
def family():
    return smooth_family()


# acceptance criteria report, filled by tests/test_acceptance.py
ACCEPTANCE = []
SUITE_BUDGET = 600.0


def record(name, passed, detail):
    ACCEPTANCE.append((name, bool(passed), detail))
    print(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")


def pytest_sessionstart(session):
    session.config._suite_start = time.perf_counter()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    elapsed = time.perf_counter() - config._suite_start
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE:
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
    ok = elapsed < SUITE_BUDGET
    terminalreporter.write_line(
        f"[{'PASS' if ok else 'FAIL'}] C9 suite runtime: {elapsed:.1f} s (limit {SUITE_BUDGET:.0f} s)")


def pytest_sessionfinish(session, exitstatus):
    if time.perf_counter() - session.config._suite_start >= SUITE_BUDGET and exitstatus == 0:
        session.exitstatus = 1
