"""Simulation toolkit for 1D topological quantum walks."""

from .continuous import (
    DecoupledField,
    Generator,
    IntegrationError,
    boundary_generator_simple,
    boundary_generator_split,
    bulk_generator_simple,
    bulk_generator_split,
    decoupled_residual,
    evolve_continuous,
    extract_generator_oracle,
    phi_inverse,
    phi_transform,
)
from .discrete import build_dense_operator, coin_matrix, evolve_discrete, step_simple, step_split
from .lattice import (
    BoundaryCondition,
    DomainError,
    LatticeSpec,
    PhaseLabel,
    PhaseName,
    SimpleAngleProfile,
    SplitAngleProfile,
    Trajectory,
    WalkerState,
    make_packet,
    norm_squared,
    region_probability,
)
from .momentum import (
    DispersionPoint,
    PhaseBoundaryError,
    classify_split,
    dispersion,
    gc_matrix,
    phase_diagram,
    wc_matrix,
    winding_number,
)

__version__ = "0.1.0"
