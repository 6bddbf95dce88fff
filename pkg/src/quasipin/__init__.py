"""Quasipinning analysis of fermionic natural occupation numbers with
generalized Pauli constraints, plus exact re-derivation of their
constraint-class tables."""

__version__ = "0.1.0"

from .catalog import (  # noqa: E402
    ConstraintCatalog, FacetPair, GPConstraint, Setting, decode_pair_notation, load_setting,
)
from .geometry import dist_to_gpc_facet, dist_to_sigma_facet, q_overall, q_single  # noqa: E402
from .spectra import Spectrum, evaluate_gpc, evaluate_pc, validate_spectrum  # noqa: E402

__all__ = [
    "ConstraintCatalog", "FacetPair", "GPConstraint", "Setting", "Spectrum", "decode_pair_notation",
    "dist_to_gpc_facet", "dist_to_sigma_facet", "evaluate_gpc", "evaluate_pc", "load_setting",
    "q_overall", "q_single", "validate_spectrum",
]
