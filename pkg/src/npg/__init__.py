"""Newton polygons of p-divisible groups through Dieudonne displays.

Witt vectors over finite fields, displays and their semilinear F-modules,
Newton polygons (an exact oracle and a fast characteristic-polynomial route),
normal forms, and explicit deformations realizing specializations.
"""
from .errors import NPGError, UsageError, VerificationError
from .fields import FieldDesc, make_field
from .witt import WittRing, WittVector, make_ring
from .newton import (NewtonPolygon, enumerate_np, is_above, np_dim, np_sdim,
                     parse_np, symmetric_nps)
from .semilinear import FModule, MatrixW, np_oracle
from .display import DisplayMatrix, GramForm, a_number, p_rank, standard_gram
from .cayley import np_fast, np_hull
from .normalform import normal_form, symplectic_normal_form
from .deform import chain, manin, realize, realize_symmetric

__version__ = "0.1.0"

__all__ = [
    "NPGError", "UsageError", "VerificationError",
    "FieldDesc", "make_field", "WittRing", "WittVector", "make_ring",
    "NewtonPolygon", "enumerate_np", "is_above", "np_dim", "np_sdim", "parse_np", "symmetric_nps",
    "FModule", "MatrixW", "np_oracle",
    "DisplayMatrix", "GramForm", "a_number", "p_rank", "standard_gram",
    "np_fast", "np_hull", "normal_form", "symplectic_normal_form",
    "chain", "manin", "realize", "realize_symmetric",
]
