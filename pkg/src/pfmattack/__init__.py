"""Simulator for the imperfect-Faraday-mirror loophole in two-way plug-and-play QKD.

Builds the three-dimensional family of states leaked by a practical Faraday
mirror, constructs the eavesdropper's suboptimal discrimination POVM (and the
two-dimensional phase-remapping baseline), evaluates the induced QBER and
attack success probability, and cross-checks everything with a Monte Carlo
protocol oracle.
"""

__version__ = "0.1.0"

from .attack import (
    AttackReport,
    PovmStrategy,
    build_phase_remapping_povm,
    build_suboptimal_povm,
    evaluate,
    general_intercept_resend_qber,
    max_fiber_length_km,
)
from .errors import (
    DegenerateSpanError,
    DimensionMismatchError,
    DomainError,
    NegativeEigenvalueError,
    NegativeProbabilityError,
    NoConvergenceError,
    NonHermitianError,
    PfmAttackError,
    SingularEpsilonError,
    UnsupportedProbeError,
)
from .mcoracle import (
    OracleEstimate,
    TrialRecord,
    run_oracle,
    run_trial,
    sample_povm_outcome,
    simulate_bob,
    simulate_intercept_resend,
)
from .optics import (
    BirefringentChannel,
    FaradayMirror,
    ProbeState,
    channel_matrix,
    fm_matrix,
    ideal_fm_matrix,
    phase_modulator,
    round_trip,
    rotator_mirror_product,
    verify_compensation,
)
from .statespace import (
    AttackEnsemble,
    Bb84State,
    attack_state_vector,
    bb84_ensemble,
    bb84_state,
    build_ensemble,
    ensemble_from_states,
    span_dimension,
)

__all__ = [
    "__version__",
    "AttackEnsemble",
    "AttackReport",
    "Bb84State",
    "BirefringentChannel",
    "DegenerateSpanError",
    "DimensionMismatchError",
    "DomainError",
    "FaradayMirror",
    "NegativeEigenvalueError",
    "NegativeProbabilityError",
    "NoConvergenceError",
    "NonHermitianError",
    "OracleEstimate",
    "PfmAttackError",
    "PovmStrategy",
    "ProbeState",
    "SingularEpsilonError",
    "TrialRecord",
    "UnsupportedProbeError",
    "attack_state_vector",
    "bb84_ensemble",
    "bb84_state",
    "build_ensemble",
    "build_phase_remapping_povm",
    "build_suboptimal_povm",
    "channel_matrix",
    "ensemble_from_states",
    "evaluate",
    "fm_matrix",
    "general_intercept_resend_qber",
    "ideal_fm_matrix",
    "max_fiber_length_km",
    "phase_modulator",
    "round_trip",
    "rotator_mirror_product",
    "run_oracle",
    "run_trial",
    "sample_povm_outcome",
    "simulate_bob",
    "simulate_intercept_resend",
    "span_dimension",
    "verify_compensation",
]
