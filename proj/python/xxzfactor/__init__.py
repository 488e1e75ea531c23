"""Exact ground-state factorization in finite XXZ spin arrays."""

from ._core import (
    InfeasibleAnisotropy,
    LoopInconsistency,
    BudgetExceeded,
    InvalidArgument,
    SpinGraph,
    build_chain,
    build_rectangular,
    build_spin_star,
    eta_ratio,
    separable_energy,
    factorizing_fields,
    propagate_angles,
    enumerate_sign_assignments,
    count_configurations,
    terrace_map,
    ground_scan,
    sector_ground_state,
    sector_dense_hamiltonian,
    projected_state,
    jacobi_q,
    pair_projected_state,
    reduced_pair_alternating,
    partial_trace,
    negativity_of,
    concurrence_of,
    boundary_h2,
    factorizing_crossing,
    w_state_package,
    mean_field,
    scan_diagram,
    local_field_spectrum,
)

__all__ = [
    "InfeasibleAnisotropy",
    "LoopInconsistency",
    "BudgetExceeded",
    "InvalidArgument",
    "SpinGraph",
    "build_chain",
    "build_rectangular",
    "build_spin_star",
    "eta_ratio",
    "separable_energy",
    "factorizing_fields",
    "propagate_angles",
    "enumerate_sign_assignments",
    "count_configurations",
    "terrace_map",
    "ground_scan",
    "sector_ground_state",
    "sector_dense_hamiltonian",
    "projected_state",
    "jacobi_q",
    "pair_projected_state",
    "reduced_pair_alternating",
    "partial_trace",
    "negativity_of",
    "concurrence_of",
    "boundary_h2",
    "factorizing_crossing",
    "w_state_package",
    "mean_field",
    "scan_diagram",
    "local_field_spectrum",
]

__version__ = "0.1.0"
