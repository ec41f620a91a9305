"""Graph cobordisms between finite sets: composition, determinant-line signs,
the spine at small rank, and Frobenius-algebra evaluation."""
from __future__ import annotations

from .exact_linalg import IntMatrix, SNFResult, snf
from .graph_core import Gaf, MarkedGaf, canonical_form, euler_char_rel, validate
from .gr_cat import compose, identity, op1, op2, op3, tensor
from .det_coeff import xi_compose_sign, xi_iso_action, xi_object, xi_tensor_sign
from .collapse_spine import collapse_forest, enumerate_spine_objects, minimize, reduce, spine_chain_complex
from .frobenius_eval import FrobeniusAlgebra, evaluate, load_algebra

__version__ = "0.1.0"

__all__ = [
    "IntMatrix",
    "SNFResult",
    "snf",
    "Gaf",
    "MarkedGaf",
    "canonical_form",
    "euler_char_rel",
    "validate",
    "compose",
    "identity",
    "op1",
    "op2",
    "op3",
    "tensor",
    "xi_compose_sign",
    "xi_iso_action",
    "xi_object",
    "xi_tensor_sign",
    "collapse_forest",
    "enumerate_spine_objects",
    "minimize",
    "reduce",
    "spine_chain_complex",
    "FrobeniusAlgebra",
    "evaluate",
    "load_algebra",
]
