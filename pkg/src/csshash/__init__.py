"""Hashing-protocol yields and simulation for multipartite CSS states."""

from .gf2 import BitMatrix, BitVector, SingularMatrix, TooLarge
from .stabilizer import CssState, css_canonicalize, is_separable
from .permcliff import PermClifford, sample_perm_clifford, verify_permutation
from .yieldlp import DiagonalMixture, YieldResult, compute_yield
from .channels import PauliChannel, cat_state, cat4_mixture, depolarizing, example_8q
from .simulator import SimConfig, run_protocol, survival_experiment

__all__ = [
    "BitMatrix",
    "BitVector",
    "SingularMatrix",
    "TooLarge",
    "CssState",
    "css_canonicalize",
    "is_separable",
    "PermClifford",
    "sample_perm_clifford",
    "verify_permutation",
    "DiagonalMixture",
    "YieldResult",
    "compute_yield",
    "PauliChannel",
    "cat_state",
    "cat4_mixture",
    "depolarizing",
    "example_8q",
    "SimConfig",
    "run_protocol",
    "survival_experiment",
]
