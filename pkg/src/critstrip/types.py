"""Value types for points, strip windows, truncation budgets and scan grids."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List


@dataclass(frozen=True)
class CPoint:
    """A point s = x + iy."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"CPoint coordinates must be finite, got ({self.x}, {self.y})")

    @classmethod
    def parse(cls, text: str) -> "CPoint":
        """Parse ``"x,y"``."""
        parts = text.split(",")
        if len(parts) != 2:
            raise ValueError(f"expected 'x,y', got {text!r}")
        return cls(float(parts[0]), float(parts[1]))

    @property
    def s(self) -> complex:
        return complex(self.x, self.y)

    def conj(self) -> "CPoint":
        return CPoint(self.x, -self.y)

    def __str__(self):
        return f"{self.x:g}{self.y:+g}i"


@dataclass(frozen=True)
class StripWindow:
    """Closed box 1/2 + eps <= x <= 1 - eps, 0 <= y <= T."""

    eps: float = 0.05
    T: float = 30.0

    def __post_init__(self):
        if not 0.0 < self.eps < 0.25:
            raise ValueError(f"eps must lie in (0, 1/4), got {self.eps}")
        if not self.T > 0.0:
            raise ValueError(f"T must be positive, got {self.T}")

    @property
    def x_min(self) -> float:
        return 0.5 + self.eps

    @property
    def x_max(self) -> float:
        return 1.0 - self.eps


def membership(window: StripWindow, s: CPoint) -> bool:
    return window.x_min <= s.x <= window.x_max and 0.0 <= s.y <= window.T


@dataclass(frozen=True)
class TruncationSpec:
    """Cutoffs for every truncated series.

    N, K
        inner (n) and outer (k) cutoffs of the folded double series.
    L, M
        sequence index cap and Cesaro window for the function sequences.
    P
        largest prime in Euler products.
    passes
        rounds of neighbour averaging applied to alternating partial sums
        (1 is a single Cesaro step).
    """

    N: int = 4000
    K: int = 4000
    L: int = 1000
    M: int = 256
    P: int = 1_000_000
    tol: float = 1e-10
    passes: int = 8

    def __post_init__(self):
        for name in ("N", "K", "L", "M", "P"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValueError(f"{name} must be an integer >= 1, got {value}")
        if self.passes < 0:
            raise ValueError(f"passes must be >= 0, got {self.passes}")
        if not self.tol > 0.0:
            raise ValueError(f"tol must be positive, got {self.tol}")


@dataclass(frozen=True)
class ScanGrid:
    window: StripWindow
    nx: int
    ny: int

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ValueError(f"nx and ny must be >= 1, got nx={self.nx}, ny={self.ny}")

    def xs(self) -> List[float]:
        w = self.window
        # endpoints are pinned exactly so they pass membership
        return [w.x_min if i == 0 else w.x_max if i == self.nx
                else w.x_min + (w.x_max - w.x_min) * i / self.nx
                for i in range(self.nx + 1)]

    def ys(self) -> List[float]:
        T = self.window.T
        return [T if j == self.ny else T * j / self.ny for j in range(self.ny + 1)]

    def __len__(self):
        return (self.nx + 1) * (self.ny + 1)


def grid_points(grid: ScanGrid) -> List[CPoint]:
    """Lattice points of the grid, x varying fastest, then y."""
    xs = grid.xs()
    return [CPoint(x, y) for y in grid.ys() for x in xs]
