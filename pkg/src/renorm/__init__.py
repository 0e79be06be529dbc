"""Exact Hopf-algebraic renormalization for phi^4 graphs.

Graph combinatorics, the Connes-Kreimer Hopf algebra, the regulator algebra
with minimal subtraction, Birkhoff decomposition, renormalization group
flows, beta functions and their inverse, and the connection identities.
"""
from .birkhoff import BirkhoffResult, birkhoff_decompose, check_locality, prepare
from .characters import (
    LinMap,
    character_from_generators,
    convolution_inverse,
    convolve,
    delta,
    is_character,
    is_infinitesimal,
    lie_bracket,
    unit_character,
)
from .connection import connection_of, equivariance_check, gauge_check, log_derivative_D
from .graphs import (
    Graph,
    Subgraph,
    admissible_subgraphs,
    canonical_form,
    contract,
    is_one_particle_irreducible,
    loop_number,
    superficial_degree,
)
from .hopf import HopfAlgebra, HopfElement, TensorElement
from .regalg import RegElement, pi_minus, pi_plus, split
from .rgflow import (
    FlowMap,
    FlowTerm,
    FlowValue,
    act_dr,
    act_mc,
    beta_dr,
    beta_mc,
    flow_integrate,
    limit_z0,
    rho,
)
from .toyrules import ToyRuleConfig, bubble_cutoff_value, bubble_dimreg_value, load_character

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
