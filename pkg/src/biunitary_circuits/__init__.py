"""Exact desk-scale simulation and verification of biunitary quantum circuits."""

from .compiler import BiunitaryAssignment, GateCircuit, apply_layers, compile_circuit, contract_diagram, dictionary_residual, global_unitary
from .dims import DimSolution, solve_dimensions
from .dynamics import SiteOperator, brute_force_correlation, correlation_grid, lightcone_correlation, site_matrix
from .fills import fill_diagram, make_fill
from .lattice import IllegalDiagram, ShadedDiagram, VertexKind, build_diagram, classify_vertex
from .states import (
    SolvableTensor,
    brickwork_solvable,
    build_state,
    check_solvable,
    clockwork_solvable,
    entropies,
    evolve,
    growth_profile,
    hybrid_edge,
    hybrid_solvable,
    reduced_density,
)
from .structures import BiunitaryTensor, check_biunitary
from .tensor import Tensor

__version__ = "0.1.0"
