"""Combinatorial trusses: posets, truss bundles, stratifications, manifold
diagrams, tangles and their perturbations."""

from __future__ import annotations

from .errors import TrussError
from .poset import Poset, Verdict
from .strat import StratTruss, normalize
from .tangle import TanglePresentation, is_tangle
from .truss import TrussBundle

__version__ = "0.1.0"

__all__ = ["Poset", "Verdict", "TrussBundle", "StratTruss", "TanglePresentation", "TrussError", "normalize", "is_tangle"]
