"""
Verification suites
===================

Ratio-based checks of the boundedness and commutator estimates, with
refinement stability as the acceptance criterion.
"""

from .checks import run_verification

__all__ = ["run_verification"]
