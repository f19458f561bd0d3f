"""Finite-difference operators, Cesaro means and the sine basis on [1, A].

Functions are sampled on the uniform mesh t_j = 1 + j/D.  A step h = 1/n is
usable when n divides D, which turns every shift into an index offset; the
operators are then exact up to a single rounding per sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from ._numerics import sinpi
from .errors import DomainError, DomainExceeded, MeshMismatch
from .zeta import zeta_real

A_MIN = 1.0 + 1.0 / (2.0 * math.pi)
ABEL_SLACK = 0.1


@dataclass(frozen=True)
class Mesh:
    """Uniform mesh 1, 1 + 1/D, ..., A on [1, A]; (A - 1) D must be an integer.

    A = 1 is allowed: shifting can shrink a domain down to the single point t = 1.
    """

    A: float
    D: int

    def __post_init__(self):
        if not self.A >= 1.0:
            raise DomainError(f"A must be at least 1, got {self.A}")
        if int(self.D) != self.D or self.D < 1:
            raise ValueError(f"D must be a positive integer, got {self.D}")
        steps = (self.A - 1.0) * self.D
        if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
            raise MeshMismatch(f"mesh 1/{self.D} does not divide [1, {self.A}]")

    @property
    def size(self) -> int:
        return int(round((self.A - 1.0) * self.D)) + 1

    @property
    def step(self) -> float:
        return 1.0 / self.D

    @property
    def t(self) -> np.ndarray:
        return 1.0 + np.arange(self.size) / self.D

    def offset(self, h: float) -> int:
        """Index offset for a shift of h; MeshMismatch if h is off the mesh."""
        j = h * self.D
        if abs(j - round(j)) > 1e-9 * max(1.0, j):
            raise MeshMismatch(f"shift {h} is not a multiple of the mesh 1/{self.D}")
        return int(round(j))


@dataclass(frozen=True)
class SampledFunction:
    """Values of a function at the points of ``mesh`` (t strictly increasing)."""

    mesh: Mesh
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (self.mesh.size,):
            raise ValueError(f"expected {self.mesh.size} samples, got {vals.shape}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def sample(cls, func: Callable[[np.ndarray], np.ndarray], A: float, D: int) -> "SampledFunction":
        mesh = Mesh(A, D)
        return cls(mesh, np.broadcast_to(func(mesh.t), (mesh.size,)).astype(np.float64))

    @property
    def t(self) -> np.ndarray:
        return self.mesh.t

    @property
    def samples(self):
        return list(zip(self.t.tolist(), self.values.tolist()))

    def at(self, t: float) -> float:
        return float(self.values[self.mesh.offset(t - 1.0)])

    def _shrunk(self, values: np.ndarray, j: int) -> "SampledFunction":
        return SampledFunction(Mesh(1.0 + (self.mesh.size - 1 - j) / self.mesh.D, self.mesh.D), values)


@dataclass(frozen=True)
class OperatorStep:
    """Shift h; ``OperatorStep.of(n)`` gives h = 1/n."""

    h: float
    n: Optional[int] = None

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError(f"h must be positive, got {self.h}")
        if self.n is not None and abs(self.h * self.n - 1.0) > 1e-12:
            raise ValueError(f"h = {self.h} is not 1/{self.n}")

    @classmethod
    def of(cls, n: int) -> "OperatorStep":
        if n < 1:
            raise ValueError("n must be >= 1")
        return cls(1.0 / n, n)


def _offset(f: SampledFunction, h: float, k: int = 1) -> int:
    j = f.mesh.offset(h) * k
    if j > f.mesh.size - 1:
        raise DomainExceeded(f"shift {k} x {h} leaves [1, {f.mesh.A}]")
    return j


def delta_op(f: SampledFunction, step: OperatorStep) -> SampledFunction:
    """(Delta_h f)(t) = f(t+h) - f(t) on [1, A-h]."""
    j = _offset(f, step.h)
    return f._shrunk(f.values[j:] - f.values[:f.values.size - j], j)


def shift_op(f: SampledFunction, step: OperatorStep, k: int = 1) -> SampledFunction:
    """(E_h^k f)(t) = f(t + k h) on [1, A - k h]."""
    if k < 0:
        raise ValueError("k must be >= 0")
    j = _offset(f, step.h, k)
    return f._shrunk(f.values[j:].copy(), j)


def mean_op(f: SampledFunction, step: OperatorStep) -> SampledFunction:
    """(M_h f)(t) = (f(t) + f(t+h)) / 2 on [1, A-h]."""
    j = _offset(f, step.h)
    return f._shrunk(0.5 * (f.values[:f.values.size - j] + f.values[j:]), j)


# ----------------------------------------------------------- phi_n

def _f(t, x: float, y: float):
    lt = np.log(t)
    return np.cos(y * lt) * np.exp(-x * lt)


def _smoothed_alternating(terms: np.ndarray, passes: int) -> Tuple[np.ndarray, np.ndarray]:
    """Averaged partial sums of sum_k (-1)^(k+1) terms[..., k] along the last axis."""
    K = terms.shape[-1]
    sign = np.where(np.arange(1, K + 1) % 2 == 1, 1.0, -1.0)
    partials = np.cumsum(sign * terms, axis=-1)
    partials = np.concatenate((np.zeros(terms.shape[:-1] + (1,)), partials), axis=-1)
    prev = partials[..., -1]
    seq = partials
    for _ in range(passes):
        prev = seq[..., -1]
        seq = 0.5 * (seq[..., 1:] + seq[..., :-1])
    value = seq[..., -1]
    change = np.abs(value - prev) if passes else np.abs(partials[..., -1] - partials[..., -2])
    return value, change


def phi_values(t: np.ndarray, n: int, x: float, y: float, K: int, passes: int = 8):
    """phi_n(t) = sum_{k<=K} (-1)^(k+1) f(t + k/n), f(t) = cos(y log t) / t^x.

    Returns (values, smoothing change) for an array of t.
    """
    if K < 1 or n < 1:
        raise ValueError("K and n must be >= 1")
    if passes > K:
        raise ValueError(f"{passes} passes need K >= {passes}")
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    k = np.arange(1, K + 1, dtype=np.float64)
    out = np.empty(t.size)
    err = np.empty(t.size)
    rows = max(1, (1 << 22) // K)
    for a in range(0, t.size, rows):
        u = t[a:a + rows, None] + k[None, :] / n
        out[a:a + rows], err[a:a + rows] = _smoothed_alternating(_f(u, x, y), passes)
    return out, err


def phi_n(mesh: Mesh, n: int, x: float, y: float, K: int, passes: int = 8) -> SampledFunction:
    """phi_n sampled on ``mesh`` with ``passes`` rounds of partial-sum averaging."""
    vals, _ = phi_values(mesh.t, n, x, y, K, passes)
    return SampledFunction(mesh, vals)


def phi_by_shifts(f: SampledFunction, n: int, K: int, passes: int = 8) -> SampledFunction:
    """The same series built from shifted copies E_{1/n}^k f of a sampled f."""
    step = OperatorStep.of(n)
    last = shift_op(f, step, K)
    width = last.mesh.size
    terms = np.stack([shift_op(f, step, k).values[:width] for k in range(1, K + 1)], axis=-1)
    vals, _ = _smoothed_alternating(terms, passes)
    return SampledFunction(last.mesh, vals)


@dataclass(frozen=True)
class MeanPhiBound:
    max_abs: float
    ok: bool
    value_at_1: float
    limit: float
    smoothing_error: float


def mean_phi_bound(n: int, x: float, y: float, K: int, mesh: Mesh, *, passes: int = 8,
                   window: int = 8, tol: float = 0.0) -> MeanPhiBound:
    """M_{1/n} phi_n near t = 1 against 1/2.

    ``max_abs`` is taken over the first ``window`` mesh points.  The limit
    at t = 1 is cos(y log(1 + 1/n)) / (2 (1 + 1/n)^x), since phi_n(t) +
    phi_n(t + 1/n) telescopes to f(t + 1/n).
    """
    phi = phi_n(mesh, n, x, y, K, passes)
    m = mean_op(phi, OperatorStep.of(n))
    _, err = phi_values(np.array([1.0, 1.0 + 1.0 / n]), n, x, y, K, passes)
    head = m.values[:window]
    limit = 0.5 * math.cos(y * math.log1p(1.0 / n)) / (1.0 + 1.0 / n) ** x
    v1 = float(m.values[0])
    return MeanPhiBound(float(np.max(np.abs(head))), v1 < 0.5 + tol, v1, limit, float(0.5 * err.sum()))


# ---------------------------------------------------------- Cesaro and S_{L,N}

def cesaro_average(seq: Sequence[float], M: int) -> float:
    """(C,1) mean of the first M entries."""
    if M < 1:
        raise ValueError("M must be >= 1")
    if len(seq) < M:
        raise ValueError(f"need at least {M} entries, got {len(seq)}")
    return math.fsum(seq[:M]) / M


def _check_strip_x(x: float):
    if not x > 0.5:
        raise DomainError(f"zeta(2x) normaliser needs x > 1/2, got x = {x}")


def b_k(t: float, ks, N: int, x: float, y: float) -> np.ndarray:
    """Column increments (1/zeta(2x)) sum_{n<=N} n^-2x f(t + k/n) for each k."""
    _check_strip_x(x)
    ks = np.atleast_1d(np.asarray(ks, dtype=np.float64))
    n = np.arange(1, N + 1, dtype=np.float64)
    w = n ** (-2 * x)
    out = np.empty(ks.size)
    rows = max(1, (1 << 22) // N)
    for a in range(0, ks.size, rows):
        u = t + ks[a:a + rows, None] / n[None, :]
        out[a:a + rows] = _f(u, x, y) @ w
    return out / zeta_real(2 * x)


def s_LN(t: float, L: int, N: int, x: float, y: float) -> float:
    """S_{L,N}(t) = sum_{k<=L} (-1)^(k+1) b_k(t)."""
    if L < 1 or N < 1:
        raise ValueError("L and N must be >= 1")
    if t < 1.0:
        raise DomainError(f"t must be >= 1, got {t}")
    b = b_k(t, np.arange(1, L + 1), N, x, y)
    sign = np.where(np.arange(1, L + 1) % 2 == 1, 1.0, -1.0)
    return math.fsum(sign * b)


@dataclass(frozen=True)
class CesaroDifference:
    lhs: float
    rhs: float
    ok: bool


def cesaro_difference_check(t: float, N: int, M: int, x: float, y: float) -> CesaroDifference:
    """|(1/M) sum_{L<=M} (S_{L+1,N} - S_{L,N})| against (y+x)/(2M) log(M/2)."""
    if M < 2:
        raise ValueError("M must be >= 2")
    b = b_k(t, np.arange(2, M + 2), N, x, y)
    sign = np.where(np.arange(1, M + 1) % 2 == 0, 1.0, -1.0)   # (-1)^L
    lhs = abs(cesaro_average(sign * b, M))
    rhs = (y + x) / (2.0 * M) * math.log(M / 2.0)
    return CesaroDifference(lhs, rhs, lhs <= rhs)


@dataclass(frozen=True)
class AbelCheck:
    lhs: float
    rhs: float
    ok: bool


def abel_column_bound_check(N: int, L: int, x: float, y: float, t: float) -> AbelCheck:
    """Scaled consecutive-pair difference at k = L against its asymptotic size.

    lhs = k^2x |f(t + (2k-1)/(N+1)) - f(t + 2k/(N+1))|,
    rhs = y k^x (N+1)^x / (t(N+1) + 2k); ok allows 10% slack.
    """
    k = float(L)
    m = N + 1.0
    pair = _f(np.array([t + (2 * k - 1) / m, t + 2 * k / m]), x, y)
    lhs = k ** (2 * x) * abs(pair[0] - pair[1])
    rhs = y * k ** x * m ** x / (t * m + 2 * k)
    return AbelCheck(float(lhs), float(rhs), bool(lhs <= rhs * (1.0 + ABEL_SLACK)))


# --------------------------------------------------------------- sine basis

def basis_norm(n: int, m: int, A: float) -> float:
    """a_nm = sqrt(2) / sqrt(A - 1 - sin(2 A m n pi) / (2 m n pi))."""
    if not A > A_MIN:
        raise DomainError(f"A must exceed 1 + 1/(2 pi), got {A}")
    if n < 1 or m < 1:
        raise ValueError("n and m must be >= 1")
    w = m * n
    return math.sqrt(2.0) / math.sqrt(A - 1.0 - float(sinpi(2.0 * A * w)) / (2.0 * w * math.pi))


@dataclass(frozen=True)
class BasisFunction(SampledFunction):
    n: int = 1
    m: int = 1
    a_nm: float = 1.0

    @property
    def anti_periodic(self) -> bool:
        """sin(nm pi (t + 1/n)) = (-1)^m sin(nm pi t): only odd m flip sign."""
        return self.m % 2 == 1


def chi_basis(n: int, m: int, A: float = 2.0, D: Optional[int] = None) -> BasisFunction:
    """a_nm sin(n m pi t) on [1, A]; the mesh defaults to 64 n m points per unit."""
    a = basis_norm(n, m, A)
    mesh = Mesh(A, D if D is not None else 64 * n * m)
    return BasisFunction(mesh, a * sinpi(n * m * mesh.t), n, m, a)


def antiperiodicity_residual(f: SampledFunction, n: int) -> float:
    """max |f(t) + f(t + 1/n)| over the mesh."""
    j = _offset(f, 1.0 / n)
    return float(np.max(np.abs(f.values[:f.values.size - j] + f.values[j:])))


@dataclass(frozen=True)
class ChiProbe:
    value_at_1: float
    nearest_value: float
    extrapolated: float
    curvature_bound: float
    antiperiodicity: float


def chi_limit_probe(n: int, coefficients: Dict[int, float], A: float = 2.0,
                    meshes: Sequence[int] = (256, 512, 1024, 2048)) -> ChiProbe:
    """chi_n = sum_m b_m a_nm sin(n m pi t) over odd m, probed as t -> 1+.

    ``meshes`` lists mesh denominators D (each a multiple of n), finest last.
    The extrapolated limit is the linear fit through t = 1 + 1/D of the two
    finest meshes; its size is compared with h1 h2 max|chi''| / 2.
    """
    if not coefficients:
        raise ValueError("need at least one coefficient")
    for m in coefficients:
        if m % 2 == 0:
            raise ValueError(f"m = {m} is even; only odd m give anti-periodic members")
    Ds = sorted(int(d) for d in meshes)
    if len(Ds) < 2:
        raise ValueError("need at least two meshes")

    def chi(t):
        t = np.asarray(t, dtype=np.float64)
        return sum(b * basis_norm(n, m, A) * sinpi(n * m * t) for m, b in coefficients.items())

    h1, h2 = 1.0 / Ds[-2], 1.0 / Ds[-1]
    v1, v2 = float(chi(1.0 + h1)), float(chi(1.0 + h2))
    extrap = (h1 * v2 - h2 * v1) / (h1 - h2)
    curv = sum(abs(b) * basis_norm(n, m, A) * (n * m * math.pi) ** 2 for m, b in coefficients.items())
    grid = SampledFunction.sample(chi, A, Ds[-1] if Ds[-1] % n == 0 else Ds[-1] * n)
    return ChiProbe(float(chi(1.0)), v2, extrap, 0.5 * h1 * h2 * curv,
                    antiperiodicity_residual(grid, n))
