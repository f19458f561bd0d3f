"""Evaluators for eta(s) and zeta(s).

Three routes to zeta are kept deliberately independent so they can check one
another: the accelerated alternating series (valid for Re(s) > 0), the plain
Dirichlet series and the Euler product over primes (both only for Re(s) > 1).
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import List

import numpy as np

from ._numerics import alternating_signs, averaged_tail, neg_powers
from .errors import (DegenerateDenominator, DomainError, NonConvergence,
                     OutsideDomain, OutsideRegionA, PoleAt1)
from .types import CPoint

POLE_RADIUS = 1e-12
DEGENERATE_THRESHOLD = 1e-8
MAX_SIEVE = 100_000_000

_CHUNK = 1 << 20
_EPS = float(np.finfo(np.float64).eps)


@dataclass(frozen=True)
class EtaEvaluation:
    value: complex
    terms_used: int
    error_estimate: float


def _as_point(s) -> CPoint:
    if isinstance(s, CPoint):
        return s
    s = complex(s)
    return CPoint(s.real, s.imag)


def eta_partial(s, N: int) -> complex:
    """sum_{n=1}^{N} (-1)**(n-1) n**(-s), summed in chunks."""
    s = _as_point(s)
    if N < 1:
        raise ValueError("N must be >= 1")
    re_parts, im_parts = [], []
    for lo in range(1, N + 1, _CHUNK):
        hi = min(N + 1, lo + _CHUNK)
        re, im = neg_powers(s.x, s.y, lo, hi)
        sign = -alternating_signs(lo, hi)
        re_parts.append(np.dot(sign, re))
        im_parts.append(np.dot(sign, im))
    return complex(math.fsum(re_parts), math.fsum(im_parts))


def _eta_stage(x: float, y: float, n: int, passes: int):
    """Averaged estimate from n terms, plus the rounding floor of the terms.

    Term m carries a rounding error of roughly eps (1 + |y| log m) |a_m|;
    these add like independent errors.
    """
    re, im = neg_powers(x, y, 1, n + 1)
    sign = -alternating_signs(1, n + 1)
    terms = sign * (re + 1j * im)
    head = n - passes
    base = complex(math.fsum(terms[:head].real), math.fsum(terms[:head].imag))
    partials = base + np.concatenate(([0.0], np.cumsum(terms[head:])))
    value, _ = averaged_tail(partials, passes)
    weight = (1.0 + abs(y) * np.log(np.arange(1, n + 1))) * np.hypot(re, im)
    floor = 0.5 * _EPS * math.sqrt(float(np.dot(weight, weight)))
    return complex(value), floor


def eta(s, tol: float = 1e-12, *, passes: int = 24, max_stages: int = 14) -> EtaEvaluation:
    """Dirichlet eta via Euler-transformed (repeatedly averaged) partial sums.

    The number of terms starts at a multiple of |s| and doubles until two
    consecutive stages agree to ``tol``.
    """
    s = _as_point(s)
    if not tol > 0:
        raise ValueError("tol must be positive")
    if s.x <= 0:
        raise DomainError(f"eta series needs Re(s) > 0, got {s}")
    n = max(64, passes + 8, 8 * int(math.ceil(abs(s.s))))
    prev, _ = _eta_stage(s.x, s.y, n, passes)
    for _ in range(max_stages):
        n *= 2
        cur, floor = _eta_stage(s.x, s.y, n, passes)
        err = max(abs(cur - prev), floor)
        if err <= tol:
            return EtaEvaluation(cur, n, float(err))
        if floor > tol:
            break
        prev = cur
    raise NonConvergence(f"eta({s}) did not reach tol={tol:g} within {n} terms (last change {err:.3g})")


def _check_zeta_denominator(s: CPoint) -> complex:
    if abs(s.s - 1.0) < POLE_RADIUS:
        raise PoleAt1(f"zeta has a pole at s = 1 (got {s})")
    denom = 1.0 - 2.0 ** (1.0 - s.s)
    if abs(denom) < DEGENERATE_THRESHOLD:
        raise DegenerateDenominator(f"1 - 2^(1-s) = {abs(denom):.3g} at s = {s}")
    return denom


def zeta_from_eta(s, tol: float = 1e-12) -> complex:
    """zeta(s) = eta(s) / (1 - 2**(1-s)) for Re(s) > 0."""
    s = _as_point(s)
    denom = _check_zeta_denominator(s)
    return eta(s, tol).value / denom


def zeta_dirichlet(s, N: int) -> complex:
    """Partial Dirichlet series sum_{n<=N} n**(-s); tail <= N**(1-x)/(x-1)."""
    s = _as_point(s)
    if s.x <= 1.0:
        raise OutsideRegionA(f"Dirichlet series needs Re(s) > 1, got {s}")
    if N < 1:
        raise ValueError("N must be >= 1")
    re_parts, im_parts = [], []
    # smallest terms first
    for hi in range(N + 1, 1, -_CHUNK):
        lo = max(1, hi - _CHUNK)
        re, im = neg_powers(s.x, s.y, lo, hi)
        re_parts.append(math.fsum(re))
        im_parts.append(math.fsum(im))
    return complex(math.fsum(re_parts), math.fsum(im_parts))


def dirichlet_tail_bound(x: float, N: int) -> float:
    """Upper bound on |zeta(s) - zeta_dirichlet(s, N)| for Re(s) = x > 1."""
    return N ** (1.0 - x) / (x - 1.0)


_sieve_lock = threading.Lock()
_sieve_cache: dict = {}


def primes_up_to(P: int) -> np.ndarray:
    """Primes <= P by the sieve of Eratosthenes (memoised)."""
    if P > MAX_SIEVE:
        raise ValueError(f"prime bound {P} exceeds configured cap {MAX_SIEVE}")
    with _sieve_lock:
        for bound, primes in _sieve_cache.items():
            if bound >= P:
                return primes[primes <= P]
        is_prime = np.ones(P + 1, dtype=bool)
        is_prime[:2] = False
        for p in range(2, int(math.isqrt(P)) + 1):
            if is_prime[p]:
                is_prime[p * p::p] = False
        primes = np.flatnonzero(is_prime)
        _sieve_cache.clear()
        _sieve_cache[P] = primes
        return primes


def zeta_euler_product(s, P: int) -> complex:
    """prod_{p<=P} (1 - p**(-s))**(-1), accumulated in log space."""
    s = _as_point(s)
    if s.x <= 1.0:
        raise OutsideRegionA(f"Euler product needs Re(s) > 1, got {s}")
    if P < 2:
        raise ValueError("P must be >= 2")
    primes = primes_up_to(P).astype(np.float64)
    logp = np.log(primes)
    mag = np.exp(-s.x * logp)
    ps = mag * np.cos(s.y * logp) - 1j * mag * np.sin(s.y * logp)
    logs = -np.log1p(-ps)
    total = complex(math.fsum(logs[::-1].real), math.fsum(logs[::-1].imag))
    return complex(np.exp(total))


def euler_product_tail_bound(x: float, P: int, value: complex) -> float:
    """Bound on |zeta(s) - euler_product(s, P)| given the product value.

    |log zeta - log prod| <= sum_{n>P} n**-x / (1 - P**-x) = b, so the
    absolute error is at most |value| (e**b - 1).
    """
    b = P ** (1.0 - x) / ((x - 1.0) * (1.0 - P ** (-x)))
    return abs(value) * math.expm1(b)


# Bernoulli numbers B_2 .. B_12 for the Euler-Maclaurin tail
_BERNOULLI = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730)


def zeta_real(u: float, tol: float = 1e-13) -> float:
    """zeta(u) for real u > 1: head sum plus Euler-Maclaurin tail correction."""
    if not u > 1.0:
        raise OutsideDomain(f"zeta_real needs u > 1, got {u}")
    N = 16
    while True:
        head = math.fsum(float(n) ** (-u) for n in range(1, N))
        tail = N ** (1.0 - u) / (u - 1.0) + 0.5 * N ** (-u)
        # derivative factors of n**-u: (-u)(-u-1)...(-u-2j+2) n**(-u-2j+1)
        poch = u
        err = 0.0
        for j, b in enumerate(_BERNOULLI, start=1):
            order = 2 * j - 1
            if j > 1:
                poch *= (u + order - 2) * (u + order - 1)
            term = b / math.factorial(2 * j) * poch * N ** (-u - order)
            tail += term
            err = abs(term)
        if err <= tol or N > 1 << 16:
            if err > tol:
                raise NonConvergence(f"zeta_real({u}) tail term {err:.3g} above tol")
            return head + tail
        N *= 2


def eta_critical_line(y: float, tol: float = 1e-14) -> complex:
    return eta(CPoint(0.5, y), tol).value


def _abs2_eta(y: float, tol: float) -> float:
    v = eta_critical_line(y, tol)
    return v.real * v.real + v.imag * v.imag


def locate_critical_zeros(T: float, coarse_step: float = 0.05, tol: float = 1e-8, *,
                          y_tol: float = 1e-11) -> List[float]:
    """Zeros of eta(1/2 + iy) for 0 < y <= T.

    Coarse scan of |eta| at ``coarse_step``; every interior local minimum is
    refined by bisection on the sign of d|eta|^2/dy (central differences)
    until the bracket is narrower than ``y_tol``.  Minima whose refined
    |eta| stays at or above ``tol`` are discarded.
    """
    if not T > 0:
        raise ValueError("T must be positive")
    if not 0 < coarse_step < 1:
        raise ValueError("coarse_step must lie in (0, 1)")
    count = int(math.floor(T / coarse_step))
    ys = [coarse_step * (i + 1) for i in range(count)]
    if not ys or ys[-1] < T:
        ys.append(T)
    eval_tol = min(1e-13, tol * 1e-3)
    vals = [_abs2_eta(y, eval_tol) for y in ys]
    zeros = []
    for i in range(1, len(ys) - 1):
        if vals[i] <= vals[i - 1] and vals[i] < vals[i + 1]:
            y0 = _refine_minimum(ys[i - 1], ys[i + 1], y_tol, eval_tol)
            if abs(eta_critical_line(y0, eval_tol)) < tol:
                zeros.append(y0)
    # a zero may sit in the final coarse cell
    if len(ys) >= 2 and vals[-1] < vals[-2]:
        lo, hi = ys[-2], ys[-1]
        y0 = _refine_minimum(lo, hi, y_tol, eval_tol)
        if hi - y0 > y_tol and abs(eta_critical_line(y0, eval_tol)) < tol:
            zeros.append(y0)
    return zeros


def _refine_minimum(lo: float, hi: float, y_tol: float, eval_tol: float) -> float:
    def slope(y):
        h = max(1e-7, 64 * y_tol)
        return _abs2_eta(y + h, eval_tol) - _abs2_eta(y - h, eval_tol)

    while hi - lo > y_tol:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if slope(mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
