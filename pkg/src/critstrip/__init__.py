"""Numerical checks of eta, zeta and related double series on the critical half-strip."""

__version__ = "0.1.0"

from .errors import (CritStripError, DegenerateDenominator, DomainError, DomainExceeded,
                     DomainProximity, MeshMismatch, NonConvergence, OutsideDomain,
                     OutsideRegionA, PoleAt1)
from .types import CPoint, ScanGrid, StripWindow, TruncationSpec, grid_points, membership
from .zeta import (EtaEvaluation, eta, eta_partial, locate_critical_zeros, zeta_dirichlet,
                   zeta_euler_product, zeta_from_eta, zeta_real)

__all__ = [
    "CPoint", "ScanGrid", "StripWindow", "TruncationSpec", "grid_points", "membership",
    "EtaEvaluation", "eta", "eta_partial", "locate_critical_zeros", "zeta_dirichlet",
    "zeta_euler_product", "zeta_from_eta", "zeta_real",
    "CritStripError", "DomainError", "NonConvergence", "PoleAt1", "DegenerateDenominator",
    "OutsideRegionA", "OutsideDomain", "DomainProximity", "MeshMismatch", "DomainExceeded",
]
