"""Minimum colorable derived designs of Steiner quadruple systems."""
from __future__ import annotations

from .model import (
    CertificationError, CertifiedDesign, ClassScope, ColorClass, Coloring, Design, ModelError,
    PreconditionError,
)

__version__ = "0.1.0"
