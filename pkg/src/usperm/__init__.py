"""Perturbed power-map permutations over F_2^n and their cryptographic profile.

Polynomials over F_2 and vectors of F_2^n are plain Python integers: bit i
holds the coefficient of X^i (equivalently, the i-th vector coordinate).
"""

from usperm.poly2 import enumerate_irreducibles, is_irreducible
from usperm.field import FieldCtx
from usperm.permeng import PermSpec, apply_composition, cycle_structure, trace_rounds
from usperm.anf import classify
from usperm.spectra import Histogram, ddt, lat
from usperm.search import scan

__all__ = [
    "FieldCtx",
    "Histogram",
    "PermSpec",
    "apply_composition",
    "classify",
    "cycle_structure",
    "ddt",
    "enumerate_irreducibles",
    "is_irreducible",
    "lat",
    "scan",
    "trace_rounds",
]

__version__ = "0.1.0"
