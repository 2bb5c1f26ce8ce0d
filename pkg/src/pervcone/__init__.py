"""Exact models of perverse sheaves on a two-strata cone with finite monodromy group."""

from .field import GF, QQ, Field
from .matrix import Matrix

__all__ = ["Field", "GF", "QQ", "Matrix"]
__version__ = "0.1.0"
