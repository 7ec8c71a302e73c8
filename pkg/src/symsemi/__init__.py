"""Classification of symplectic semifield subspaces of PG(9,q) under PGL(4,q)."""

from .gf import Field, UnsupportedOrder, make_field
from .geom import SymPoint, Subspace, is_semifield_subspace, span
from .group import GroupElement, act_subspace, lift
from .classify import ClassificationResult, classify, load_result, save_result

__version__ = "0.1.0"

__all__ = [
    "Field", "UnsupportedOrder", "make_field", "SymPoint", "Subspace", "is_semifield_subspace",
    "span", "GroupElement", "act_subspace", "lift", "ClassificationResult", "classify",
    "load_result", "save_result",
]
