"""Exact SO(3) Reshetikhin-Turaev operators of (p,q)-cable spaces.

The cable space operator acts on the torus vector space with basis
e_1, ..., e_m (r = 2m + 1).  Everything is built in the group ring of a
primitive 4r-th root of unity so that structural statements can be checked
exactly; floating point only enters for norms and numeric determinants.
"""

from rtcable.cabling import (
    CableParams,
    FactorTriple,
    RmMatrix,
    build_Rm,
    f_expansion,
    factor_matrices,
    inverse_factors,
    morton_column,
    rt_matrix_e_basis,
)
from rtcable.cyclotomic import CycElem, CycMatrix, Monomial, RootSystem
from rtcable.errors import (
    ConsistencyError,
    ConvergenceError,
    PreconditionError,
    StructureError,
)

__version__ = "0.1.0"

__all__ = [
    "CableParams",
    "ConsistencyError",
    "ConvergenceError",
    "CycElem",
    "CycMatrix",
    "FactorTriple",
    "Monomial",
    "PreconditionError",
    "RmMatrix",
    "RootSystem",
    "StructureError",
    "build_Rm",
    "f_expansion",
    "factor_matrices",
    "inverse_factors",
    "morton_column",
    "rt_matrix_e_basis",
]
