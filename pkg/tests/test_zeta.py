import math
import random

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import zeta as scipy_zeta

from critstrip.errors import (DegenerateDenominator, DomainError, NonConvergence,
                              OutsideDomain, OutsideRegionA, PoleAt1)
from critstrip.types import CPoint
from critstrip.zeta import (dirichlet_tail_bound, eta, eta_critical_line, eta_partial,
                            euler_product_tail_bound, locate_critical_zeros, primes_up_to,
                            zeta_dirichlet, zeta_euler_product, zeta_from_eta, zeta_real)

LOG2 = math.log(2.0)
ZETA2 = math.pi ** 2 / 6

# imaginary parts of the first three zeros, from mpmath.zetazero at 30 digits
FIRST_ZEROS = (14.13472514173469379, 21.022039638771554993, 25.010857580145688763)


def altzeta(x, y):
    return complex(mpmath.altzeta(mpmath.mpc(x, y)))


def smoothed_partial(s, N):
    """Mean of the partial sums at N and N+1, which cancels the leading tail."""
    a = eta_partial(s, N)
    b = a + (-1) ** N * (N + 1) ** (-complex(s.x, s.y))
    return 0.5 * (a + b)


def test_eta_partial_two_terms():
    assert eta_partial(CPoint(1, 0), 2) == 0.5


def test_eta_partial_rejects_zero_terms():
    with pytest.raises(ValueError):
        eta_partial(CPoint(1, 0), 0)


def test_eta_partial_tends_to_log2():
    assert abs(smoothed_partial(CPoint(1, 0), 10 ** 6).real - LOG2) < 1e-12


def test_eta_partial_matches_accelerated():
    s = CPoint(0.75, 14.0)
    assert abs(eta_partial(s, 10 ** 6) - eta(s, 1e-12).value) <= 1e-4


@pytest.mark.parametrize("s,expected", [
    (CPoint(1, 0), LOG2),
    (CPoint(2, 0), math.pi ** 2 / 12),
])
def test_eta_closed_forms(s, expected):
    ev = eta(s, 1e-10)
    assert abs(ev.value - expected) <= 1e-10
    assert ev.error_estimate <= 1e-10
    assert ev.terms_used >= 1


def test_eta_brute_force_oracle():
    s = CPoint(0.6, 20.5)
    oracle = smoothed_partial(s, 10 ** 7)
    assert abs(eta(s, 1e-8).value - oracle) <= 1e-6


@pytest.mark.parametrize("x,y", [(0.05, 3.0), (0.2, 3), (0.5, 14.134725), (0.6, 20.5),
                                 (0.75, 50), (1.0, 0.0), (3.0, -7.0), (0.5, 49.9)])
def test_eta_against_mpmath(x, y):
    ev = eta(CPoint(x, y), 1e-12)
    err = abs(ev.value - altzeta(x, y))
    assert err <= 1e-12
    assert err <= 10 * ev.error_estimate + 1e-15


def test_eta_requires_positive_real_part():
    with pytest.raises(DomainError):
        eta(CPoint(0.0, 5.0), 1e-8)
    with pytest.raises(ValueError):
        eta(CPoint(1.0, 0.0), 0.0)


def test_eta_unreachable_tolerance_raises():
    # rounding in the phases of 800+ terms at y = 50 exceeds 1e-15
    with pytest.raises(NonConvergence):
        eta(CPoint(0.05, 50.0), 1e-15)


def test_eta_is_deterministic():
    s = CPoint(0.7, 12.3)
    assert eta(s, 1e-12) == eta(s, 1e-12)


def test_zeta_from_eta_values():
    assert abs(zeta_from_eta(CPoint(2, 0)) - ZETA2) < 1e-12
    assert abs(zeta_from_eta(CPoint(0.5, 14.134725))) < 1e-4


def test_zeta_from_eta_pole_and_degenerate_points():
    with pytest.raises(PoleAt1):
        zeta_from_eta(CPoint(1, 0))
    with pytest.raises(DegenerateDenominator):
        zeta_from_eta(CPoint(1.0, 2 * math.pi / LOG2))


def test_zeta_dirichlet_examples():
    assert zeta_dirichlet(CPoint(2, 0), 1) == 1.0
    assert abs(zeta_dirichlet(CPoint(2, 0), 10 ** 6) - ZETA2) <= 1e-6 + 1e-12
    assert abs(zeta_dirichlet(CPoint(3, 0), 10 ** 5) - zeta_from_eta(CPoint(3, 0))) <= 1e-9
    with pytest.raises(OutsideRegionA):
        zeta_dirichlet(CPoint(1.0, 3.0), 10)


def test_zeta_dirichlet_tail_bound_holds():
    for N in (10, 1000, 10 ** 5):
        gap = ZETA2 - zeta_dirichlet(CPoint(2, 0), N).real
        assert 0 < gap <= dirichlet_tail_bound(2.0, N)


def test_euler_product_examples():
    assert zeta_euler_product(CPoint(2, 0), 2) == pytest.approx(4 / 3, abs=1e-15)
    v = zeta_euler_product(CPoint(2, 0), 10 ** 6)
    assert abs(v - ZETA2) <= 1e-5
    assert abs(v - ZETA2) <= euler_product_tail_bound(2.0, 10 ** 6, v)
    assert abs(zeta_euler_product(CPoint(3, 0), 10 ** 5) - zeta_dirichlet(CPoint(3, 0), 10 ** 6)) <= 1e-6
    with pytest.raises(OutsideRegionA):
        zeta_euler_product(CPoint(0.9, 0), 100)


def test_sieve_counts():
    assert primes_up_to(30).tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert len(primes_up_to(10 ** 6)) == 78498
    # cached superset still answers smaller bounds
    assert len(primes_up_to(1000)) == 168


def test_zeta_real_values():
    assert abs(zeta_real(2.0) - ZETA2) < 1e-13
    assert zeta_real(1.0001) > 9999
    assert abs(zeta_real(1.5) - zeta_from_eta(CPoint(1.5, 0)).real) <= 1e-12
    for u in (1.05, 1.3, 2.5, 7.0):
        assert zeta_real(u) == pytest.approx(float(scipy_zeta(u)), rel=1e-13)
    with pytest.raises(OutsideDomain):
        zeta_real(1.0)


def test_locator_below_first_zero_is_empty():
    assert locate_critical_zeros(10.0) == []


def test_locator_first_zero():
    ys = locate_critical_zeros(15.0)
    assert len(ys) == 1
    assert abs(ys[0] - FIRST_ZEROS[0]) < 1e-6


def test_locator_three_zeros():
    ys = locate_critical_zeros(26.0)
    assert len(ys) == 3
    assert ys == sorted(ys)
    assert ys[1] - ys[0] == pytest.approx(6.9, abs=0.05)
    for y, ref in zip(ys, FIRST_ZEROS):
        assert abs(y - ref) < 1e-6
        assert abs(eta_critical_line(y, 1e-13)) < 1e-8


def test_locator_rejects_bad_arguments():
    with pytest.raises(ValueError):
        locate_critical_zeros(0.0)
    with pytest.raises(ValueError):
        locate_critical_zeros(10.0, coarse_step=1.5)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 4.0), st.floats(-50.0, 50.0))
def test_eta_reflection(x, y):
    a = eta(CPoint(x, y), 1e-12).value
    b = eta(CPoint(x, -y), 1e-12).value
    assert abs(a - b.conjugate()) <= 1e-12


def test_cross_evaluator_agreement():
    rng = random.Random(20240611)
    for _ in range(20):
        s = CPoint(rng.uniform(1.1, 4.0), rng.uniform(-30.0, 30.0))
        ref = zeta_from_eta(s, 1e-12)
        eta_err = 1e-12 / abs(1 - 2 ** (1 - s.s))
        d = zeta_dirichlet(s, 20000)
        assert abs(d - ref) <= dirichlet_tail_bound(s.x, 20000) + eta_err
        e = zeta_euler_product(s, 20000)
        assert abs(e - ref) <= euler_product_tail_bound(s.x, 20000, e) + eta_err


def test_error_estimate_honesty():
    rng = random.Random(7)
    tol = 1e-8
    for _ in range(10):
        s = CPoint(rng.uniform(0.3, 2.0), rng.uniform(0.0, 40.0))
        oracle = smoothed_partial(s, 10 ** 7)
        assert abs(eta(s, tol).value - oracle) <= 10 * tol
