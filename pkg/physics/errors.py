"""Exception hierarchy shared by the engine and the CLI.

Exit codes:
- 2 domain error (energy below threshold, branch point hit)
- 3 numerical failure (quadrature, eigensolver, classification, grid, size)
- 4 configuration error
"""

from __future__ import annotations


class BicwaveError(Exception):
    """Base class. ``exit_code`` is what the CLI returns."""

    exit_code = 3


class DomainError(BicwaveError, ValueError):
    exit_code = 2


class BranchPointError(DomainError):
    """Evaluation requested at κ = ±im."""


class QuadratureError(BicwaveError):
    pass


class EigensolverError(BicwaveError):
    pass


class ClassificationError(BicwaveError):
    pass


class ParityError(BicwaveError):
    """Vector is neither mirror-symmetric nor mirror-antisymmetric."""


class GridError(BicwaveError):
    pass


class NotFoundError(BicwaveError):
    pass


class SizeError(BicwaveError):
    pass


class ConfigError(BicwaveError, ValueError):
    exit_code = 4
