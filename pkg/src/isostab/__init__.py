"""Isotropic unimodular sequences and stabilizers in split orthogonal groups
over finite local rings Z/p^k."""

__version__ = "0.1.0"

from .complex import Chain, apply_d, bound, bound_cycle, bound_cycle_linear, enumerate_iu, homology
from .forms import HyperbolicSpace, IsotropicSequence, check_orthogonal, check_similitude, inner, psi
from .kernels import BACKEND
from .ring import Ring, make_ring
from .stabilizer import StabilizerParams, build_stabilizer_element, read_stabilizer_params
from .witt import find_general_position, hyperbolic_complete, transitivity_witness

__all__ = [
    "BACKEND",
    "Chain",
    "HyperbolicSpace",
    "IsotropicSequence",
    "Ring",
    "StabilizerParams",
    "apply_d",
    "bound",
    "bound_cycle",
    "bound_cycle_linear",
    "build_stabilizer_element",
    "check_orthogonal",
    "check_similitude",
    "enumerate_iu",
    "find_general_position",
    "homology",
    "hyperbolic_complete",
    "inner",
    "make_ring",
    "psi",
    "read_stabilizer_params",
    "transitivity_witness",
]
