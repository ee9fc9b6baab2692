"""Exact-arithmetic scattering diagrams over the extended tropical vertex group.

The package computes consistent completions of rank-2 scattering diagrams
whose wall automorphisms pair a torus-ring automorphism with a gauge matrix,
and uses them to verify and solve wall-crossing formulas of coupled 2d-4d
type.  Everything is exact: rational coefficients, truncated formal
parameter, no floating point in any decision.
"""

from .exceptions import ConventionError, SchemaError
from .lattice import (
    WallKind,
    angular_sort,
    dirac_pairing,
    pairing,
    primitive_decompose,
    primitive_normal,
)
from .series import SeriesElem, SeriesMatrix, TruncationContext
from .vertexlie import AutPair, LieElem, bch, bracket, compose, exp, log
from .scattering import Diagram, Wall, complete, is_consistent, merge_wall, new_rays, path_ordered_product
from .groupoid import (
    BpsProblem,
    GroupoidContext,
    GroupoidElem,
    KFactor,
    LGammaElem,
    SFactor,
    exp_k,
    exp_s,
    k_auto,
    k_gen,
    lgamma_bracket,
    s_auto,
    s_gen,
    solve_wcf,
    upsilon,
)
from .trees import enumerate_ribbon_trees, natural_tree_sum, ray_support_oracle

__all__ = [
    "AutPair",
    "BpsProblem",
    "ConventionError",
    "Diagram",
    "GroupoidContext",
    "GroupoidElem",
    "KFactor",
    "LGammaElem",
    "LieElem",
    "SFactor",
    "SchemaError",
    "SeriesElem",
    "SeriesMatrix",
    "TruncationContext",
    "Wall",
    "WallKind",
    "angular_sort",
    "bch",
    "bracket",
    "complete",
    "compose",
    "dirac_pairing",
    "enumerate_ribbon_trees",
    "exp",
    "exp_k",
    "exp_s",
    "is_consistent",
    "k_auto",
    "k_gen",
    "lgamma_bracket",
    "log",
    "merge_wall",
    "natural_tree_sum",
    "new_rays",
    "pairing",
    "path_ordered_product",
    "primitive_decompose",
    "primitive_normal",
    "ray_support_oracle",
    "s_auto",
    "s_gen",
    "solve_wcf",
    "upsilon",
]

__version__ = "0.1.0"
