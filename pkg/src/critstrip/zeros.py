"""Zeros' functions Z_{k+1}, the alternating condition and the identities around it.

Z_{k+1}(x, y) = (1/zeta(2x)) sum_n cos(y log(1 + k/n)) / (n(n+k))^x.  The
alternating sum over k equals 1/2 - |eta(s)|^2 / (2 zeta(2x)), which is what
the scan compares against the 1/2 threshold.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from ._numerics import averaged_tail
from .errors import DomainError, DomainProximity, OutsideRegionA
from .pringsheim import (alternating_kernel, diagonal_schedule, dirichlet_pair_kernel,
                         folded_sum_detail, inner_cosine_sums, inner_tail,
                         partial_sum_rect, pringsheim_limit)
from .types import CPoint, ScanGrid, TruncationSpec, grid_points
from .zeta import (_check_zeta_denominator, dirichlet_tail_bound, eta, zeta_dirichlet,
                   zeta_from_eta, zeta_real)

PROXIMITY = 1e-3


@dataclass(frozen=True)
class ZValue:
    """Z_{k+1}(x, y) truncated at N inner terms (k is the outer index)."""

    k: int
    value: float
    inner_terms: int
    tail_estimate: float


@dataclass(frozen=True)
class ConditionReport:
    point: CPoint
    condition_value: float
    deviation: float
    trunc: TruncationSpec
    error_estimate: float

    @classmethod
    def build(cls, point, value, trunc, err):
        return cls(point, float(value), abs(float(value) - 0.5), trunc, float(err))


def _check_x(x: float):
    if not x > 0.5:
        raise DomainError(f"zeta(2x) normaliser needs x > 1/2, got x = {x}")


def z_function(k: int, x: float, y: float, N: int, *, tail_correction: bool = False) -> ZValue:
    """Z_{k+1}(x, y) by direct summation over n <= N.

    The plain truncation is the default; ``tail_correction`` adds an
    Euler-Maclaurin estimate of the n > N tail.  The summand only sees y through cos(y * log(1 + k/n)), and the tail is an
    even function of y, so Z(x, y) and Z(x, -y) agree bit for bit.
    """
    _check_x(x)
    if k < 1 or N < 1:
        raise ValueError("k and N must be >= 1")
    z2x = zeta_real(2 * x)
    n = np.arange(1, N + 1, dtype=np.float64)
    head = math.fsum(np.cos(y * np.log1p(k / n)) / (n * (n + k)) ** x)
    if tail_correction:
        tail, err = inner_tail(x, y, np.array([k]), N)
        head += float(tail[0])
        err = float(err[0])
    else:
        err = N ** (1.0 - 2 * x) / (2 * x - 1)
    return ZValue(k, head / z2x, N, err / z2x)


def z_values(x: float, y: float, K: int, N: int, *, tail_correction: bool = True,
             method: str = "fft") -> Tuple[np.ndarray, np.ndarray]:
    """Z_{k+1} for k = 1..K and their tail errors, by the bulk FFT route."""
    _check_x(x)
    z2x = zeta_real(2 * x)
    c, err = inner_cosine_sums(x, y, K, N, method=method, tail_correction=tail_correction)
    return c / z2x, err / z2x


def alternating_z_sum(x: float, y: float, trunc: TruncationSpec = TruncationSpec(), *,
                      tail_correction: bool = True) -> ConditionReport:
    """sum_{k<=K} (-1)^(k+1) Z_{k+1} with the outer partial sums averaged.

    ``trunc.passes`` rounds of neighbour averaging are applied (1 is the plain
    Cesaro step).  The error estimate adds the change of the last averaging
    round to the inner-tail error of the first two Z's (later ones are
    damped by the alternation).
    """
    _check_x(x)
    if x - 0.5 < PROXIMITY:
        raise DomainProximity(f"x = {x} is within {PROXIMITY:g} of 1/2")
    z, err = z_values(x, y, trunc.K, trunc.N, tail_correction=tail_correction)
    sign = np.where(np.arange(1, trunc.K + 1) % 2 == 1, 1.0, -1.0)
    partials = np.concatenate(([0.0], np.cumsum(sign * z)))
    passes = min(trunc.passes, trunc.K)
    value, change = averaged_tail(partials, passes)
    inner = float(np.max(err)) if tail_correction else float(np.sum(err[:2]))
    return ConditionReport.build(CPoint(x, y), value, trunc, change + inner)


def condition_closed_form(s, tol: float = 1e-13) -> float:
    """1/2 - |eta(s)|^2 / (2 zeta(2x)); an independent route to the condition."""
    s = s if isinstance(s, CPoint) else CPoint(complex(s).real, complex(s).imag)
    _check_x(s.x)
    e = eta(s, tol).value
    return 0.5 - (e.real ** 2 + e.imag ** 2) / (2.0 * zeta_real(2 * s.x))


@dataclass(frozen=True)
class IdentityCheck:
    residual: float
    double_series: float
    z_side: float
    error_bound: float


def double_series_identity(s, trunc: TruncationSpec = TruncationSpec(), *, raw: bool = False) -> IdentityCheck:
    """Double series versus -2 zeta(2x) times the alternating Z-sum.

    The double series comes from rectangle sums of the lattice kernel; the
    Z-side from the folded inner sums.  ``raw`` uses the bare side-N rectangle
    and the plain truncated Z-sum with no smoothing or tail terms.
    """
    s = s if isinstance(s, CPoint) else CPoint(complex(s).real, complex(s).imag)
    _check_x(s.x)
    z2x = zeta_real(2 * s.x)
    kernel = alternating_kernel(s)
    if raw:
        double = partial_sum_rect(kernel, trunc.N, trunc.N).real
        raw_trunc = TruncationSpec(N=trunc.N, K=trunc.K, passes=0, tol=trunc.tol)
        rep = alternating_z_sum(s.x, s.y, raw_trunc, tail_correction=False)
        bound = float("nan")
    else:
        verdict = pringsheim_limit(kernel, diagonal_schedule(trunc.N), trunc.tol)
        double = verdict.extrapolated.real
        rep = alternating_z_sum(s.x, s.y, trunc)
        bound = verdict.extrapolation_error + 2.0 * z2x * rep.error_estimate
    z_side = -2.0 * z2x * rep.condition_value
    return IdentityCheck(abs(double - z_side), double, z_side, bound)


def double_series_identity_residual(s, trunc: TruncationSpec = TruncationSpec(), *, raw: bool = False) -> float:
    return double_series_identity(s, trunc, raw=raw).residual


@dataclass(frozen=True)
class RegionACheck:
    residual: float
    tail_bound: float


def fe_residual_region_a(s1, s2, trunc: TruncationSpec = TruncationSpec(), *,
                         exact_zeta: bool = False) -> RegionACheck:
    """|zeta(s1) zeta(s2) - zeta(s1+s2) - sum_{n1 != n2 <= N} n1^-s1 n2^-s2|.

    With matched cutoffs (the default) all three zetas are partial Dirichlet
    sums over n <= N and the identity is exact algebra.  With ``exact_zeta``
    the converged values are used and the residual must stay below the
    returned tail bound.
    """
    s1 = s1 if isinstance(s1, CPoint) else CPoint(complex(s1).real, complex(s1).imag)
    s2 = s2 if isinstance(s2, CPoint) else CPoint(complex(s2).real, complex(s2).imag)
    if s1.x <= 1 or s2.x <= 1:
        raise OutsideRegionA(f"need Re(s1), Re(s2) > 1, got {s1}, {s2}")
    N = trunc.N
    s12 = CPoint(s1.x + s2.x, s1.y + s2.y)
    z1, z2, z12 = (zeta_dirichlet(p, N) for p in (s1, s2, s12))
    b1, b2, b12 = (dirichlet_tail_bound(p.x, N) for p in (s1, s2, s12))
    off = partial_sum_rect(dirichlet_pair_kernel(s1.s, s2.s), N, N)
    bound = b1 * abs(z2) + b2 * abs(z1) + b1 * b2 + b12
    if exact_zeta:
        z1, z2, z12 = (zeta_from_eta(p, 1e-12) for p in (s1, s2, s12))
    return RegionACheck(abs(z1 * z2 - z12 - off), bound)


def fe_residual_strip(s, trunc: TruncationSpec = TruncationSpec(), *,
                      tail_correction: bool = True) -> float:
    """|(1-2^(1-s))(1-2^(1-conj s)) zeta(s) zeta(conj s) - zeta(2x) - D(s)|.

    D is the folded double series with ``trunc.passes`` rounds of averaging.
    """
    s = s if isinstance(s, CPoint) else CPoint(complex(s).real, complex(s).imag)
    _check_x(s.x)
    if s.x - 0.5 < PROXIMITY:
        raise DomainProximity(f"x = {s.x} is within {PROXIMITY:g} of 1/2; zeta(2x) ~ 1/(2x-1)")
    den = _check_zeta_denominator(s)
    zs = zeta_from_eta(s, 1e-12)
    zc = zeta_from_eta(s.conj(), 1e-12)
    lhs = (den * den.conjugate() * zs * zc).real
    d = folded_sum_detail(s.x, s.y, trunc.K, trunc.N, passes=trunc.passes,
                          tail_correction=tail_correction).value
    return abs(lhs - zeta_real(2 * s.x) - d)


# name used by external callers
identity_3_10_residual = double_series_identity_residual


def symmetry_check(x: float, y: float, k: int, N: int) -> float:
    """|Z(x, y) - Z(x, -y)|; zero to the last bit."""
    return abs(z_function(k, x, y, N).value - z_function(k, x, -y, N).value)


@dataclass(frozen=True)
class ScanSummary:
    reports: List[ConditionReport]
    max_value: float
    argmax: CPoint


def _scan_one(args):
    point, trunc = args
    return alternating_z_sum(point.x, point.y, trunc)


def scan_condition(grid: ScanGrid, trunc: TruncationSpec = TruncationSpec(),
                   workers: int = 1) -> ScanSummary:
    """Evaluate the condition at every grid point, in grid order.

    Each point is computed independently by the same code path, so results
    do not depend on ``workers``.  Ties for the maximum go to the first point.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    points = grid_points(grid)
    jobs = [(p, trunc) for p in points]
    if workers == 1:
        reports = [_scan_one(j) for j in jobs]
    else:
        chunk = max(1, len(jobs) // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_scan_one, jobs, chunksize=chunk))
    best = max(range(len(reports)), key=lambda i: (reports[i].condition_value, -i))
    return ScanSummary(reports, reports[best].condition_value, reports[best].point)


@dataclass(frozen=True)
class LogSquareCheck:
    value: float
    target: float
    error: float
    K: int
    N: int
    passes: int


def log_square_check(K: int = 20_000, N: int = 20_000, passes: int = 1) -> LogSquareCheck:
    """Folded double series at s = 1 against (log 2)^2 - pi^2/6."""
    value = folded_sum_detail(1.0, 0.0, K, N, passes=passes).value
    target = math.log(2.0) ** 2 - math.pi ** 2 / 6.0
    return LogSquareCheck(value, target, abs(value - target), K, N, passes)
