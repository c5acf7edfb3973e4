"""Edge-private estimation of mixed memberships in degree-corrected block models."""

from ._core import (
    NON_PRIVATE,
    PrimeError,
    build_omega,
    certify_ldp,
    compute_delta_n,
    compute_err_n,
    debias,
    estimate_memberships,
    flip_probability,
    lower_bound_integral,
    oracle_estimate,
    permutation_loss,
    planted_b,
    risk_bound_integral,
    run_sweep,
    sample_graph,
    sketched_vertex_search,
    symmetric_edge_flip,
)

__all__ = [
    "NON_PRIVATE",
    "PrimeError",
    "build_omega",
    "certify_ldp",
    "compute_delta_n",
    "compute_err_n",
    "debias",
    "estimate_memberships",
    "flip_probability",
    "lower_bound_integral",
    "oracle_estimate",
    "permutation_loss",
    "planted_b",
    "risk_bound_integral",
    "run_sweep",
    "sample_graph",
    "sketched_vertex_search",
    "symmetric_edge_flip",
]
