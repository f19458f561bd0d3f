"""Small numerical helpers shared across modules."""

from __future__ import annotations

import math
from typing import Sequence, Tuple

import numpy as np


def neg_powers(x: float, y: float, start: int, stop: int) -> Tuple[np.ndarray, np.ndarray]:
    """Real and imaginary parts of m**(-s) for m in [start, stop).

    Built from a real magnitude and cos/sin of the phase so that flipping the
    sign of y flips the imaginary part bit-for-bit.
    """
    m = np.arange(start, stop, dtype=np.float64)
    logm = np.log(m)
    mag = np.exp(-x * logm)
    phase = y * logm
    return mag * np.cos(phase), -mag * np.sin(phase)


def alternating_signs(start: int, stop: int) -> np.ndarray:
    """(-1)**m for m in [start, stop) as floats."""
    return np.where(np.arange(start, stop) % 2 == 0, 1.0, -1.0)


def averaged_tail(partials: np.ndarray, passes: int) -> Tuple[complex, float]:
    """Repeatedly average neighbouring partial sums of an alternating series.

    One pass is the (C,1)-style pairwise mean; further passes give the Euler
    (van Wijngaarden) transform of the tail.  Returns the final value and the
    change produced by the last pass, used as an error estimate.
    """
    seq = np.asarray(partials)
    if len(seq) < passes + 1:
        raise ValueError(f"need at least {passes + 1} partial sums for {passes} passes")
    prev = seq[-1]
    for _ in range(passes):
        prev = seq[-1]
        seq = 0.5 * (seq[1:] + seq[:-1])
    value = seq[-1]
    if passes == 0:
        # last increment of the raw series
        change = abs(partials[-1] - partials[-2]) if len(partials) > 1 else abs(partials[-1])
    else:
        change = abs(value - prev)
    return value, float(change)


def richardson(values: Sequence[complex], sizes: Sequence[float],
               rates: Sequence[float]) -> Tuple[complex, float]:
    """Richardson extrapolation of S(P) = S + c1 P**-r1 + c2 P**-r2 + ...

    ``values[i]`` is S at cutoff ``sizes[i]``.  Each rate eliminates one term;
    at most ``len(values) - 1`` rates are used.  Returns the extrapolated value
    and the absolute gap between the two highest-order estimates.
    """
    table = [complex(v) for v in values]
    sizes = [float(p) for p in sizes]
    if len(table) < 2:
        return table[-1], float("inf")
    last_gap = abs(table[-1] - table[-2])
    for level, rate in enumerate(rates[: len(values) - 1]):
        new = []
        for i in range(len(table) - 1):
            r = (sizes[i + 1 + level] / sizes[i + level]) ** rate
            new.append((r * table[i + 1] - table[i]) / (r - 1.0))
        if len(new) == 1:
            last_gap = abs(new[0] - table[-1])
        else:
            last_gap = abs(new[-1] - new[-2])
        table = new
    return table[-1], float(last_gap)


class Neumaier:
    """Compensated running sum (real or complex)."""

    __slots__ = ("total", "comp")

    def __init__(self, start=0.0):
        self.total = start
        self.comp = 0.0 * start

    def add(self, value):
        if isinstance(value, complex) or isinstance(self.total, complex):
            re, ce = _neumaier_step(self.total.real, self.comp.real, value.real)
            im, ci = _neumaier_step(self.total.imag, self.comp.imag, value.imag)
            self.total, self.comp = complex(re, im), complex(ce, ci)
        else:
            self.total, self.comp = _neumaier_step(self.total, self.comp, value)

    @property
    def value(self):
        return self.total + self.comp


def _neumaier_step(total: float, comp: float, value: float) -> Tuple[float, float]:
    t = total + value
    if abs(total) >= abs(value):
        comp += (total - t) + value
    else:
        comp += (value - t) + total
    return t, comp


def exact_sum(values: np.ndarray) -> complex:
    """Correctly rounded sum of a real or complex array."""
    values = np.asarray(values)
    if np.iscomplexobj(values):
        return complex(math.fsum(values.real), math.fsum(values.imag))
    return math.fsum(values)


def sinpi(z):
    """sin(pi * z) with exact zeros at the integers."""
    z = np.asarray(z, dtype=np.float64)
    r = np.fmod(z, 2.0)
    r = np.where(r < 0.0, r + 2.0, r)
    sign = np.where(r >= 1.0, -1.0, 1.0)
    r = np.where(r >= 1.0, r - 1.0, r)
    # fold (1/2, 1] onto [0, 1/2) so that r = 1 evaluates sin(0)
    r = np.where(r > 0.5, 1.0 - r, r)
    return sign * np.sin(np.pi * r)
