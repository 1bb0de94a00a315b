"""
Exception hierarchy
===================

Every precondition failure raised by the toolkit derives from ``AlphamodError``
so the command-line front end can map it to a usage/config exit code.
"""


class AlphamodError(Exception):
    """Base class for all toolkit errors."""


class GridError(AlphamodError, ValueError):
    """Invalid grid parameters or mismatched grids."""


class DomainTagError(AlphamodError, ValueError):
    """A sampled object is in the wrong domain for the requested operation."""


class BandViolationError(AlphamodError, ValueError):
    """Spectral content outside the truncation band (strict mode only)."""


class CoveringError(AlphamodError, RuntimeError):
    """The covering construction could not satisfy its own requirements."""


class UnsupportedParameterError(AlphamodError, ValueError):
    """A parameter outside the supported set (p, q, multi-index order, epsilon...)."""
