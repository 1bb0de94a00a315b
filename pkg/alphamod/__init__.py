"""
alphamod - Alpha-Modulation Spaces Toolkit
==========================================

Numerical toolkit for alpha-modulation spaces on a periodic lattice:
- alpha-coverings with smooth partitions of unity
- alpha-modulation norms of functions and product norms of symbols
- Kohn-Nirenberg quantisation, adjoints and commutators
- empirical verification of boundedness and commutator estimates
"""

__version__ = "1.0.0"

from .core.covering import build_covering
from .core.grid import make_grid
from .core.operators import operator_norm_estimate, quantize_apply
from .core.spaces import alpha_modulation_norm, product_symbol_norm
from .exceptions import AlphamodError
from .models.grid import GridSpec, SampledFunction, SampledSymbol

__all__ = [
    "AlphamodError",
    "GridSpec",
    "SampledFunction",
    "SampledSymbol",
    "alpha_modulation_norm",
    "build_covering",
    "make_grid",
    "operator_norm_estimate",
    "product_symbol_norm",
    "quantize_apply",
]
