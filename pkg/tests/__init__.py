"""
alphamod - Test Suite
=====================

- Unit tests for grids, coverings, norms, operators and the verification checks
- Integration tests for the command line

Run tests with: pytest -v
Skip the long trial runs with: pytest -m "not slow"
"""
