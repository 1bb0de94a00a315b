"""
Value objects
=============

Grids and samples, family specs, coverings, norm breakdowns, operator results
and verification reports.
"""

from .grid import BandSupport, Domain, GridSpec, SampledFunction, SampledSymbol, SymbolDomain
from .reports import BoundReport, TrialRow

__all__ = [
    "BandSupport",
    "BoundReport",
    "Domain",
    "GridSpec",
    "SampledFunction",
    "SampledSymbol",
    "SymbolDomain",
    "TrialRow",
]
