"""Exact-arithmetic invariants of glued graph-of-geometrics 3-manifold data.

The package computes average-distortion invariants of gluing data in
exact rational arithmetic, enumerates gluings below a distortion budget,
and evaluates the Seifert homology arithmetic used to cap candidate
targets of bounded-degree maps.
"""

from .exact_lattice import QForm, Sublattice, discriminant, dominates, enumerate_small_sublattices
from .torus_mapping_class import TorusAuto, dehn_twist, pullback_form, stabilizer_generators, double_coset_reps
from .decomposition_graph import DecompGraph, entire_double_cover, loopless_double_cover
from .geometric_pieces import HyperbolicPieceData, SeifertPieceData, boundary_form, del_h2_lattice, piece_double_cover
from .gluing_engine import PreglueGraph, Gluing, DistortionValue, build_qphi, is_nondegenerate, edge_distortion, vertex_distortion, primary_distortion
from .shearing_enumerator import FiberShearing, apply_shearing, shearing_index, canonical_shearing_form, index_bound, enumerate_gluings
from .seifert_arithmetic import SeifertInvariants, DominationBudget, normalize, chi, euler_number, torsion_order, torsion_bound, area_constant, distortion_budget, enumerate_targets

__all__ = [
    "QForm", "Sublattice", "discriminant", "dominates", "enumerate_small_sublattices",
    "TorusAuto", "dehn_twist", "pullback_form", "stabilizer_generators", "double_coset_reps",
    "DecompGraph", "entire_double_cover", "loopless_double_cover",
    "HyperbolicPieceData", "SeifertPieceData", "boundary_form", "del_h2_lattice", "piece_double_cover",
    "PreglueGraph", "Gluing", "DistortionValue", "build_qphi", "is_nondegenerate",
    "edge_distortion", "vertex_distortion", "primary_distortion",
    "FiberShearing", "apply_shearing", "shearing_index", "canonical_shearing_form",
    "index_bound", "enumerate_gluings",
    "SeifertInvariants", "DominationBudget", "normalize", "chi", "euler_number",
    "torsion_order", "torsion_bound", "area_constant", "distortion_budget", "enumerate_targets",
]
