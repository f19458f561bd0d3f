import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from critstrip.errors import DomainError, DomainProximity, OutsideRegionA
from critstrip.types import CPoint, ScanGrid, StripWindow, TruncationSpec
from critstrip.zeros import (alternating_z_sum, condition_closed_form, double_series_identity,
                             fe_residual_region_a, fe_residual_strip, identity_3_10_residual,
                             log_square_check, scan_condition, symmetry_check, z_function,
                             z_values)
from critstrip.zeta import dirichlet_tail_bound, locate_critical_zeros, zeta_real

# mpmath at 30 digits: 1/2 - |eta(0.75)|^2 / (2 zeta(1.5)), and Z_2(0.75, 0) summed to infinity
# (Euler-Maclaurin nsum, confirmed by a 10^7-term sum plus integral tail)
C_075_0 = 0.41885706069965834893
Z2_075_0 = 0.76977381130380636137


def test_z_function_plain_truncation():
    N = 10 ** 5
    zv = z_function(1, 0.75, 0.0, N)
    n = np.arange(1, N + 1, dtype=float)
    brute = math.fsum(1.0 / (n * (n + 1)) ** 0.75) / zeta_real(1.5)
    assert zv.value == pytest.approx(brute, abs=1e-15)
    assert zv.tail_estimate == pytest.approx(N ** -0.5 / 0.5 / zeta_real(1.5))
    assert Z2_075_0 - zv.value <= zv.tail_estimate


def test_z_function_tail_corrected():
    zv = z_function(1, 0.75, 0.0, 1000, tail_correction=True)
    assert abs(zv.value - Z2_075_0) <= 1e-12
    assert zv.tail_estimate >= 0


def test_z_decays_in_k():
    vals = [z_function(k, 0.75, 0.0, 2000).value for k in (1, 10, 100, 1000)]
    assert all(a > b > 0 for a, b in zip(vals, vals[1:]))


def test_z_function_domain():
    with pytest.raises(DomainError):
        z_function(1, 0.5, 3.0, 10)
    with pytest.raises(ValueError):
        z_function(0, 0.75, 3.0, 10)


def test_z_routes_agree():
    z, _ = z_values(0.8, 13.0, 50, 3000, tail_correction=False)
    for k in (1, 7, 50):
        assert abs(z[k - 1] - z_function(k, 0.8, 13.0, 3000).value) <= 1e-13


def test_condition_pinned_value():
    rep = alternating_z_sum(0.75, 0.0, TruncationSpec(K=4000, N=4000))
    assert abs(rep.condition_value - C_075_0) <= 1e-10
    assert rep.deviation == abs(rep.condition_value - 0.5)
    assert abs(condition_closed_form(CPoint(0.75, 0)) - C_075_0) <= 1e-13
    # doubled truncation agrees with itself
    rep2 = alternating_z_sum(0.75, 0.0, TruncationSpec(K=8000, N=8000))
    assert abs(rep.condition_value - rep2.condition_value) <= 1e-10


def test_condition_near_critical_zero_height():
    rep = alternating_z_sum(0.75, 14.134725)
    assert rep.condition_value < 0.5


def test_condition_matches_closed_form():
    rng = random.Random(3)
    for _ in range(5):
        x, y = rng.uniform(0.55, 0.95), rng.uniform(0, 30)
        rep = alternating_z_sum(x, y)
        assert abs(rep.condition_value - condition_closed_form(CPoint(x, y))) <= max(1e-8, rep.error_estimate)


def test_condition_proximity_guard():
    with pytest.raises(DomainProximity):
        alternating_z_sum(0.5005, 3.0)


def test_identity_raw_single_term():
    # only Z_2 with n = 1 survives: -2 zeta(1.2) * 2^-0.6 / zeta(1.2) against an empty rectangle
    r = identity_3_10_residual(CPoint(0.6, 0), TruncationSpec(K=1, N=1), raw=True)
    assert r == pytest.approx(2 ** 0.4, abs=1e-14)


def test_identity_examples():
    assert identity_3_10_residual(CPoint(2, 0), TruncationSpec(K=2000, N=2000)) <= 1e-4
    assert identity_3_10_residual(CPoint(0.75, 10), TruncationSpec(K=4000, N=4000)) <= 1e-3


def test_identity_within_documented_bound():
    rng = random.Random(17)
    trunc = TruncationSpec(K=2000, N=2000)
    for _ in range(10):
        s = CPoint(rng.uniform(0.56, 0.95), rng.uniform(0.0, 30.0))
        chk = double_series_identity(s, trunc)
        assert chk.residual <= chk.error_bound


def test_region_a_examples():
    r = fe_residual_region_a(CPoint(2, 0), CPoint(3, 0), TruncationSpec(N=2000))
    assert r.residual <= 1e-6
    assert fe_residual_region_a(CPoint(2, 0), CPoint(2, 0), TruncationSpec(N=1)).residual == 0
    r = fe_residual_region_a(CPoint(1.5, 2), CPoint(1.5, -2), TruncationSpec(N=5000))
    assert r.residual <= 1e-5
    exact = fe_residual_region_a(CPoint(2, 0), CPoint(3, 0), TruncationSpec(N=2000), exact_zeta=True)
    assert exact.residual <= exact.tail_bound
    with pytest.raises(OutsideRegionA):
        fe_residual_region_a(CPoint(1.0, 0), CPoint(3, 0))


def test_region_a_random_pairs():
    rng = random.Random(23)
    trunc = TruncationSpec(N=500)
    for _ in range(10):
        s1 = CPoint(rng.uniform(1.2, 4.0), rng.uniform(-20, 20))
        s2 = CPoint(rng.uniform(1.2, 4.0), rng.uniform(-20, 20))
        chk = fe_residual_region_a(s1, s2, trunc, exact_zeta=True)
        assert chk.residual <= chk.tail_bound


def test_strip_residual_examples():
    assert fe_residual_strip(CPoint(2, 0), TruncationSpec(K=4000, N=4000)) <= 1e-5
    assert fe_residual_strip(CPoint(0.75, 10), TruncationSpec(K=10 ** 4, N=10 ** 4)) <= 1e-3
    with pytest.raises(DomainProximity):
        fe_residual_strip(CPoint(0.5005, 10))


def test_strip_residual_plain_truncation_shrinks():
    pts = [CPoint(0.75, 10), CPoint(0.6, 5), CPoint(0.9, 20), CPoint(2, 0), CPoint(0.8, 27)]
    for s in pts:
        res = [fe_residual_strip(s, TruncationSpec(K=n, N=n, passes=1), tail_correction=False)
               for n in (1000, 2000, 4000)]
        assert res[1] <= 3 * res[0] and res[2] <= 3 * res[1]
        assert res[2] < res[0]


def test_symmetry_examples():
    assert symmetry_check(0.8, 25.0, 7, 10 ** 5) == 0
    assert symmetry_check(0.75, 7.0, 3, 1000) == 0
    assert symmetry_check(0.75, 0.0, 3, 1000) == 0


@settings(max_examples=30, deadline=None)
@given(st.floats(0.51, 3.0), st.floats(0.0, 100.0), st.integers(1, 200))
def test_symmetry_property(x, y, k):
    a = z_function(k, x, y, 300, tail_correction=True).value
    b = z_function(k, x, -y, 300, tail_correction=True).value
    assert a == b


def test_scan_corners_match_standalone():
    trunc = TruncationSpec(K=500, N=500)
    summary = scan_condition(ScanGrid(StripWindow(0.05, 30), 1, 1), trunc)
    assert len(summary.reports) == 4
    for rep in summary.reports:
        alone = alternating_z_sum(rep.point.x, rep.point.y, trunc)
        assert rep.condition_value == alone.condition_value
    assert summary.max_value == max(r.condition_value for r in summary.reports)


def test_scan_deterministic_across_workers():
    trunc = TruncationSpec(K=300, N=300)
    grid = ScanGrid(StripWindow(0.05, 30), 3, 3)
    a = scan_condition(grid, trunc, workers=1)
    b = scan_condition(grid, trunc, workers=3)
    assert [r.condition_value for r in a.reports] == [r.condition_value for r in b.reports]
    assert a.argmax == b.argmax


def test_values_rise_towards_line_near_zeros():
    for y in locate_critical_zeros(26.0):
        near = alternating_z_sum(0.55, y).condition_value
        far = alternating_z_sum(0.7, y).condition_value
        assert far < near < 0.5


def test_log_square_constant():
    res = log_square_check(20_000, 20_000, passes=1)
    assert res.target == pytest.approx(math.log(2) ** 2 - math.pi ** 2 / 6)
    assert res.error <= 5e-3
