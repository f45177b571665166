"""Simulation of controlled two-way quantum state exchange (Alice, Bob, controller Charlie)."""
from .qstate import (
    MeasurementRecord,
    QuantumState,
    ZeroProbabilityBranch,
    apply_pauli,
    apply_string,
    basis_state,
    fidelity,
    make_state,
    measure_computational,
    random_state,
    reduced_density,
    tensor,
)
from .pauli import PauliString, build_gbs, compose, dagger, digits_of, gbs_measure, pauli_product
from .resource import (
    ChannelAssignment,
    Permutation,
    ResourceSpec,
    SharedResource,
    build_resource,
    build_security_variant,
    build_sse,
    channel_of,
)
from .protocol import (
    ExchangeTranscript,
    compute_corrections,
    enumerate_branches,
    run_exchange,
    verify_rewrite_identity,
)
from .security import (
    BypassStrategy,
    SecurityReport,
    bypass_success_exact,
    bypass_success_mc,
    insecurity_bound,
    security_sweep,
)

__version__ = "0.1.0"
