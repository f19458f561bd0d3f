"""Double series over the positive lattice: partial sums and convergence verdicts.

Kernels are vectorised: ``kernel.block(i, j)`` receives a column of row indices
and a row of column indices and returns the broadcast matrix of terms.  The
alternating kernel is also available in folded single-series form, where the
inner n-sums are computed by FFT cross-correlation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import comb
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.fft import fft, ifft, next_fast_len
from scipy.special import roots_jacobi

from ._numerics import averaged_tail, neg_powers, richardson
from .errors import DomainError, NonConvergence
from .types import CPoint
from .zeta import eta

# entries per block when materialising lattice rectangles
_BLOCK_ENTRIES = 1 << 22


@dataclass(frozen=True)
class LatticeKernel:
    """Term rule a(i, j) for i, j >= 1.

    block
        vectorised rule; called with an (m, 1) and a (1, n) integer array.
    rates
        decay exponents of the rectangle error along diagonal schedules, used
        for Richardson extrapolation.  Empty means no extrapolation.
    """

    block: Callable[[np.ndarray, np.ndarray], np.ndarray]
    name: str = "kernel"
    rates: Tuple[float, ...] = ()

    def __call__(self, i: int, j: int) -> complex:
        if i < 1 or j < 1:
            raise ValueError("lattice indices start at 1")
        out = self.block(np.array([[i]]), np.array([[j]]))
        return complex(np.asarray(out).reshape(-1)[0])

    def rows(self, i0: int, i1: int, q: int) -> np.ndarray:
        """Terms for rows i0..i1-1 and columns 1..q as a complex matrix."""
        i = np.arange(i0, i1).reshape(-1, 1)
        j = np.arange(1, q + 1).reshape(1, -1)
        out = np.asarray(self.block(i, j), dtype=np.complex128)
        return np.broadcast_to(out, (i1 - i0, q))


@dataclass(frozen=True)
class ConvergenceVerdict:
    pringsheim_estimate: complex
    pringsheim_ok: bool
    row_ok: bool
    column_ok: bool
    residual: float
    tol: float
    extrapolated: complex
    extrapolation_error: float
    row_estimate: complex
    column_estimate: complex
    schedule: Tuple[Tuple[int, int], ...] = field(default=())


# ---------------------------------------------------------------- kernels

def zero_kernel() -> LatticeKernel:
    return LatticeKernel(lambda i, j: np.zeros(np.broadcast_shapes(i.shape, j.shape)), "zero")


def inverse_square_kernel() -> LatticeKernel:
    """a(i, j) = 1 / (i^2 j^2); the rectangle error has rates 1, 2, 3."""
    def block(i, j):
        fi = i.astype(np.float64)
        fj = j.astype(np.float64)
        return 1.0 / (fi * fi) / (fj * fj)
    return LatticeKernel(block, "inverse_square", (1.0, 2.0))


def grandi_kernel() -> LatticeKernel:
    """a(i, j) = (-1)^(i+j); rectangles oscillate between 0 and 1."""
    def block(i, j):
        return np.where((i + j) % 2 == 0, 1.0, -1.0)
    return LatticeKernel(block, "grandi")


def _signed_powers(x: float, y: float, idx: np.ndarray) -> np.ndarray:
    """(-1)^m m^(-s) for integer array idx."""
    logm = np.log(idx.astype(np.float64))
    mag = np.exp(-x * logm)
    phase = y * logm
    sign = np.where(idx % 2 == 0, 1.0, -1.0)
    return sign * mag * np.cos(phase) - 1j * (sign * mag * np.sin(phase))


def alternating_kernel(s) -> LatticeKernel:
    """a(n1, n2) = (-1)^(n1+n2) n1^(-s) n2^(-conj s), zero on the diagonal."""
    s = s if isinstance(s, CPoint) else CPoint(complex(s).real, complex(s).imag)
    if not s.x > 0.5:
        raise DomainError(f"alternating kernel needs Re(s) > 1/2, got {s}")
    x, y = s.x, s.y

    def block(i, j):
        out = _signed_powers(x, y, i) * np.conj(_signed_powers(x, y, j))
        return np.where(i == j, 0.0, out)
    # off-diagonal outer product converges like P^-x (oscillating, removed by
    # smoothing); the missing diagonal contributes P^(1-2x) and P^(-2x)
    return LatticeKernel(block, f"alternating({s})", (2 * x - 1, 2 * x))


def dirichlet_pair_kernel(s1, s2) -> LatticeKernel:
    """a(n1, n2) = n1^(-s1) n2^(-s2), zero on the diagonal."""
    s1 = complex(s1.s if isinstance(s1, CPoint) else s1)
    s2 = complex(s2.s if isinstance(s2, CPoint) else s2)

    def block(i, j):
        li = np.log(i.astype(np.float64))
        lj = np.log(j.astype(np.float64))
        out = np.exp(-s1 * li) * np.exp(-s2 * lj)
        return np.where(i == j, 0.0, out)
    return LatticeKernel(block, "dirichlet_pair")


# ------------------------------------------------------- rectangle sums

def _block_rows(q: int) -> int:
    return max(1, _BLOCK_ENTRIES // max(q, 1))


def _fsum(values) -> complex:
    v = np.asarray(values, dtype=np.complex128)
    return complex(math.fsum(v.real), math.fsum(v.imag))


def _row_partials(kernel: LatticeKernel, p: int, qs: Sequence[int]) -> Dict[int, np.ndarray]:
    """For each q in qs, the vector of row sums sum_{j<=q} a_ij, i = 1..p."""
    qmax = max(qs)
    out = {q: np.empty(p, dtype=np.complex128) for q in qs}
    step = _block_rows(qmax)
    for i0 in range(1, p + 1, step):
        i1 = min(p + 1, i0 + step)
        blk = kernel.rows(i0, i1, qmax)
        acc, prev = 0.0, 0
        for q in sorted(set(qs)):
            acc = acc + blk[:, prev:q].sum(axis=1)
            out[q][i0 - 1:i1 - 1] = acc
            prev = q
    return out


def _column_partials(kernel: LatticeKernel, ps: Sequence[int], q: int) -> Dict[int, np.ndarray]:
    """For each p in ps, the vector of column sums sum_{i<=p} a_ij, j = 1..q."""
    cuts = sorted(set(ps))
    out = {}
    running = np.zeros(q, dtype=np.complex128)
    comp = np.zeros(q, dtype=np.complex128)
    step = _block_rows(q)
    start = 1
    for cut in cuts:
        for i0 in range(start, cut + 1, step):
            i1 = min(cut + 1, i0 + step)
            # compensated merge of block column sums
            add = kernel.rows(i0, i1, q).sum(axis=0)
            t = running + add
            big = np.abs(running) >= np.abs(add)
            comp += np.where(big, (running - t) + add, (add - t) + running)
            running = t
        start = cut + 1
        out[cut] = running + comp
    return out


def partial_sum_rect(kernel: LatticeKernel, p: int, q: int) -> complex:
    """S_pq = sum over i <= p, j <= q; rows summed first, rows merged exactly."""
    if p < 1 or q < 1:
        raise ValueError("p and q must be >= 1")
    return _fsum(_row_partials(kernel, p, [q])[q])


def row_column_sums(kernel: LatticeKernel, fixed_index: int, limit: int, axis: str = "row") -> complex:
    """s_{i,limit} (row: first index fixed) or s_{limit,j} (column: second fixed)."""
    if limit < 1 or fixed_index < 1:
        raise ValueError("indices must be >= 1")
    if axis == "row":
        vals = kernel.rows(fixed_index, fixed_index + 1, limit)[0]
    elif axis == "column":
        i = np.arange(1, limit + 1).reshape(-1, 1)
        vals = np.broadcast_to(kernel.block(i, np.array([[fixed_index]])), (limit, 1))[:, 0]
    else:
        raise ValueError(f"axis must be 'row' or 'column', got {axis!r}")
    return _fsum(vals)


def _smoothed(values: Dict[Tuple[int, int], complex], p: int, q: int, m: int) -> complex:
    return sum(comb(m, j) * values[(p + j, q + j)] for j in range(m + 1)) / 2 ** m


def pringsheim_limit(kernel: LatticeKernel, schedule: Sequence[Tuple[int, int]], tol: float,
                     *, smoothing: int = 3) -> ConvergenceVerdict:
    """Cauchy test of rectangle sums over the last three schedule entries.

    Besides consecutive schedule entries, each rectangle is compared with its
    one-step neighbours (p+1, q), (p, q+1), (p+1, q+1); without them an
    oscillating kernel sampled at even sides would look convergent.

    The extrapolated value applies binomial smoothing of order ``smoothing``
    along the diagonal and Richardson extrapolation with the kernel's rates.
    Row and column estimates extrapolate the inner index first, then the outer.
    """
    sched = [(int(p), int(q)) for p, q in schedule]
    if len(sched) < 3:
        raise ValueError("schedule needs at least 3 entries")
    for (p0, q0), (p1, q1) in zip(sched, sched[1:]):
        if not (p1 > p0 and q1 > q0):
            raise ValueError("schedule must increase strictly in both coordinates")
    if sched[0][0] < 1 or sched[0][1] < 1:
        raise ValueError("schedule entries must be >= 1")
    if not tol > 0:
        raise ValueError("tol must be positive")
    last = sched[-3:]
    m = max(1, smoothing)
    ps = sorted({p + d for p, _ in last for d in range(m + 1)})
    qs = sorted({q + d for _, q in last for d in range(m + 1)})
    rows = _row_partials(kernel, max(ps), qs)
    values = {(p, q): _fsum(rows[q][:p]) for p in ps for q in qs}

    diffs = [abs(values[b] - values[a]) for a, b in zip(last, last[1:])]
    ahead = [max(abs(values[(p + dp, q + dq)] - values[(p, q)])
                 for dp, dq in ((1, 0), (0, 1), (1, 1))) for p, q in last]
    pringsheim_ok = max(diffs) <= tol and max(ahead) <= tol
    residual = max(diffs[-1], ahead[-1])

    # row i: sum over j, tested at the q's of the schedule for every i <= p_last
    p_last, q_last = last[-1]
    row_vals = [rows[q][:p_last] for _, q in last] + [rows[q_last + 1][:p_last]]
    row_res = max(float(np.max(np.abs(b - a))) for a, b in zip(row_vals, row_vals[1:]))
    cols = _column_partials(kernel, [p for p, _ in last] + [p_last + 1], q_last)
    col_vals = [cols[p] for p, _ in last] + [cols[p_last + 1]]
    col_res = max(float(np.max(np.abs(b - a))) for a, b in zip(col_vals, col_vals[1:]))

    rates = kernel.rates
    if rates:
        diag = [_smoothed(values, p, q, smoothing) for p, q in last]
        sizes = [math.sqrt(p * q) for p, q in last]
        extrap, gap = richardson(diag, sizes, rates)
        row_est = _iterated(kernel, last, m, rates, inner="q")
        col_est = _iterated(kernel, last, m, rates, inner="p")
    else:
        extrap, gap = values[last[-1]], float(residual)
        row_est = col_est = values[last[-1]]
    return ConvergenceVerdict(
        pringsheim_estimate=values[last[-1]], pringsheim_ok=bool(pringsheim_ok),
        row_ok=bool(row_res <= tol), column_ok=bool(col_res <= tol), residual=float(residual),
        tol=tol, extrapolated=complex(extrap), extrapolation_error=float(gap),
        row_estimate=complex(row_est), column_estimate=complex(col_est), schedule=tuple(sched))


def _iterated(kernel: LatticeKernel, last, m: int, rates, inner: str) -> complex:
    """Extrapolate the inner index at each outer size, then the outer index.

    The inner sizes start at the largest outer size, so every row (or
    column) being summed already has its missing diagonal entry behind it.
    """
    outer_sizes = [p for p, _ in last] if inner == "q" else [q for _, q in last]
    top = outer_sizes[-1]
    inner_sizes = [top, 2 * top, 4 * top]
    outs = sorted({o + d for o in outer_sizes for d in range(m + 1)})
    ins = sorted({n + d for n in inner_sizes for d in range(m + 1)})
    if inner == "q":
        sums = _row_partials(kernel, max(outs), ins)
        value = {(o, n): _fsum(sums[n][:o]) for o in outs for n in ins}
    else:
        sums = _column_partials(kernel, ins, max(outs))
        value = {(o, n): _fsum(sums[n][:o]) for o in outs for n in ins}

    def smoothed(o, n):
        return sum(comb(m, j) * value[(o, n + j)] for j in range(m + 1)) / 2 ** m

    limits = {o: richardson([smoothed(o, n) for n in inner_sizes], inner_sizes, rates)[0]
              for o in outs}
    outer = [sum(comb(m, d) * limits[o + d] for d in range(m + 1)) / 2 ** m for o in outer_sizes]
    return richardson(outer, outer_sizes, rates)[0]


def exchange_check(kernel: LatticeKernel, p: int, q: int, tol: float):
    """Sum a finite rectangle by rows first and by columns first.

    Returns (ok, rows_first, columns_first).  Finite sums commute, so any gap
    is accumulated rounding.
    """
    if p < 1 or q < 1:
        raise ValueError("p and q must be >= 1")
    row_sums = _row_partials(kernel, p, [q])[q]
    rows_first = _fsum(row_sums)
    col_sums = _column_partials(kernel, [p], q)[p]
    cols_first = _fsum(col_sums)
    return abs(rows_first - cols_first) <= tol, rows_first, cols_first


# ------------------------------------------------------------ folded form

def _powers(x: float, y: float, count: int) -> np.ndarray:
    re, im = neg_powers(x, y, 1, count + 1)
    return re + 1j * im


def _inner_fft(x: float, y: float, K: int, N: int) -> np.ndarray:
    """c_k = sum_{n<=N} Re[n^(-s) (n+k)^(-conj s)] for k = 1..K."""
    p = _powers(x, y, N + K)
    size = next_fast_len(2 * (N + K))
    head = np.zeros(N + K, dtype=np.complex128)
    head[:N] = p[:N]
    corr = ifft(np.conj(fft(head, size)) * fft(p, size))
    return corr[1:K + 1].real.copy()


def _inner_direct(x: float, y: float, K: int, N: int) -> np.ndarray:
    n = np.arange(1, N + 1, dtype=np.float64)
    out = np.empty(K)
    for k in range(1, K + 1):
        out[k - 1] = np.sum(np.cos(y * np.log1p(k / n)) / (n * (n + k)) ** x)
    return out


_JACOBI_CACHE: Dict[float, Tuple[np.ndarray, np.ndarray]] = {}


def _jacobi_rule(beta: float, order: int = 48):
    key = (beta, order)
    if key not in _JACOBI_CACHE:
        xi, w = roots_jacobi(order, 0.0, beta)
        _JACOBI_CACHE[key] = ((1.0 + xi) / 2.0, w * 2.0 ** (-beta - 1.0))
    return _JACOBI_CACHE[key]


def inner_tail(x: float, y: float, ks: np.ndarray, N: int) -> Tuple[np.ndarray, np.ndarray]:
    """Euler-Maclaurin estimate of sum_{n>N} cos(y log(1+k/n)) / (n(n+k))^x.

    Returns (tail, size of the last correction term).  Built from real
    magnitudes and cos/sin so that the result is an even function of y
    bit-for-bit.
    """
    if not x > 0.5:
        raise DomainError(f"inner tail needs x > 1/2, got {x}")
    ks = np.asarray(ks, dtype=np.float64)
    w, W = _jacobi_rule(2 * x - 2)
    u = np.outer(ks / N, w)
    lu = np.log1p(u)
    h = np.exp(-x * lu) * np.cos(y * lu)
    integral = N ** (1.0 - 2 * x) * (h @ W)

    t = float(N)
    tk = t + ks
    theta = y * np.log1p(ks / t)
    mag = t ** (-x) * tk ** (-x)
    G = mag * np.cos(theta) + 1j * (mag * np.sin(theta))
    s = complex(x, y)
    sb = complex(x, -y)
    f1 = -s / t - sb / tk
    f2 = s / t ** 2 + sb / tk ** 2
    f3 = -2 * s / t ** 3 - 2 * sb / tk ** 3
    g1 = (G * f1).real
    g3 = (G * (f1 ** 3 + 3 * f1 * f2 + f3)).real
    last = g3 / 720.0
    return integral - G.real / 2 - g1 / 12 + last, np.abs(last)


def inner_cosine_sums(x: float, y: float, K: int, N: int, *, method: str = "fft",
                      tail_correction: bool = True) -> Tuple[np.ndarray, np.ndarray]:
    """Inner sums c_k for k = 1..K and a per-k error estimate.

    Without tail correction the error estimate is the integral bound
    N^(1-2x)/(2x-1); with it, the size of the last Euler-Maclaurin term.
    """
    if not x > 0.5:
        raise DomainError(f"inner sums need x > 1/2, got {x}")
    if K < 1 or N < 1:
        raise ValueError("K and N must be >= 1")
    if method == "fft":
        c = _inner_fft(x, y, K, N)
    elif method == "direct":
        c = _inner_direct(x, y, K, N)
    else:
        raise ValueError(f"unknown method {method!r}")
    if tail_correction:
        tail, err = inner_tail(x, y, np.arange(1, K + 1), N)
        return c + tail, err
    bound = N ** (1.0 - 2 * x) / (2 * x - 1)
    return c, np.full(K, bound)


@dataclass(frozen=True)
class FoldedSum:
    value: float
    outer_change: float
    inner_error: float
    K: int
    N: int


def folded_sum_detail(x: float, y: float, K: int, N: int, *, passes: int = 0,
                      tail_correction: bool = False, method: str = "fft") -> FoldedSum:
    """2 sum_k (-1)^k c_k, optionally smoothed and tail-corrected."""
    if not x > 0.5:
        raise DomainError(f"folded sum needs x > 1/2, got {x}")
    c, err = inner_cosine_sums(x, y, K, N, method=method, tail_correction=tail_correction)
    sign = np.where(np.arange(1, K + 1) % 2 == 0, 1.0, -1.0)
    partials = np.concatenate(([0.0], np.cumsum(sign * c)))
    if passes > K:
        raise ValueError(f"{passes} smoothing passes need K >= {passes}")
    value, change = averaged_tail(partials, passes)
    inner = float(np.max(err)) if tail_correction else float(np.sum(err[: min(K, 2)]))
    return FoldedSum(2.0 * float(value), 2.0 * change, 2.0 * inner, K, N)


def folded_sum(x: float, y: float, K: int, N: int, *, passes: int = 0,
               tail_correction: bool = False) -> float:
    """2 sum_{k<=K} (-1)^k sum_{n<=N} cos(y log(1+k/n)) / (n(n+k))^x.

    ``passes`` rounds of neighbour averaging are applied to the outer partial
    sums (0 is the plain truncation, 1 a single Cesaro step).
    """
    return folded_sum_detail(x, y, K, N, passes=passes, tail_correction=tail_correction).value


def folded_rectangle_sum(x: float, y: float, P: int) -> float:
    """Real part of the square rectangle sum of side P, via the folded form.

    Entries with |n1 - n2| = k and max(n1, n2) <= P pair into
    2 sum_n cos(...) / (n(n+k))^x with n <= P - k.
    """
    p = _powers(x, y, P)
    size = next_fast_len(2 * P)
    corr = ifft(np.conj(fft(p, size)) * fft(p, size))[1:P].real
    sign = np.where(np.arange(1, P) % 2 == 0, 1.0, -1.0)
    return 2.0 * math.fsum(sign * corr)


# -------------------------------------------------- auxiliary F and G series

def _fg_stage(x: float, y: float, n: int, passes: int):
    m = np.arange(1, n + 1, dtype=np.float64)
    logm = np.log(m)
    mag = np.exp(-x * logm) * np.where(np.arange(1, n + 1) % 2 == 0, 1.0, -1.0)
    out = []
    for trig in (np.cos, np.sin):
        terms = mag * trig(y * logm)
        head = math.fsum(terms[: n - passes])
        partials = head + np.concatenate(([0.0], np.cumsum(terms[n - passes:])))
        out.append(float(averaged_tail(partials, passes)[0]))
    return out


def auxiliary_FG(x: float, y: float, tol: float = 1e-10, *, passes: int = 16,
               max_stages: int = 14) -> Tuple[float, float]:
    """F = sum (-1)^n n^-x cos(y log n) and G = sum (-1)^n n^-x sin(y log n).

    Summed independently of eta(), then cross-checked against it
    (F = -Re eta, G = Im eta).  The majorant (y+x)/(2m+1)^(1+x) bounds the
    paired terms but is not used as the stopping rule.
    """
    if not x > 0:
        raise DomainError(f"F and G need x > 0, got {x}")
    if not tol > 0:
        raise ValueError("tol must be positive")
    n = max(64, passes + 8, 8 * int(math.ceil(abs(complex(x, y)))))
    prev = _fg_stage(x, y, n, passes)
    for _ in range(max_stages):
        n *= 2
        cur = _fg_stage(x, y, n, passes)
        change = max(abs(cur[0] - prev[0]), abs(cur[1] - prev[1]))
        if change <= tol:
            break
        prev = cur
    else:
        raise NonConvergence(f"F, G at x={x}, y={y} did not settle to {tol:g} (last change {change:.3g})")
    F, G = cur
    check = eta(CPoint(x, y), min(tol, 1e-12) if tol > 1e-13 else tol)
    slack = 10 * tol + check.error_estimate
    if abs(F + check.value.real) > slack or abs(G - check.value.imag) > slack:
        raise NonConvergence(f"F, G disagree with eta at x={x}, y={y}")
    return F, G


smyrlis_FG = auxiliary_FG


def row_column_closed_form(index: int, x: float, y: float, axis: str = "row",
                           tol: float = 1e-10) -> float:
    """r_n (or c_n) = (-1)^n n^-x [F cos(y log n) + G sin(y log n)].

    This is the full cosine row sum over the other index, diagonal included.
    Rows and columns share the formula because F and G do not depend on
    which index is summed.
    """
    if index < 1:
        raise ValueError("index must be >= 1")
    if axis not in ("row", "column"):
        raise ValueError(f"axis must be 'row' or 'column', got {axis!r}")
    F, G = auxiliary_FG(x, y, tol)
    ln = math.log(index)
    sign = -1.0 if index % 2 else 1.0
    return sign * index ** (-x) * (F * math.cos(y * ln) + G * math.sin(y * ln))


def diagonal_schedule(P: int, count: int = 3) -> List[Tuple[int, int]]:
    """Square sides P / 2^(count-1), ..., P / 2, P."""
    sides = [max(1, P >> (count - 1 - i)) for i in range(count)]
    return [(p, p) for p in sides]
