"""Attack-state family sent back by the station and the operators derived from it.

With an imperfect mirror the four returning states live in a 3-dimensional
space spanned by e_0 = |cH'>, e_1 = |cV'>, e_2 = |dV'> (a basis the
eavesdropper can reach with one unitary, because the |dH'> component vanishes
identically). This module builds those states, the standard two-mode BB84
states they degenerate to at epsilon = 0, and the density/error operators the
attack construction consumes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .numkernel import DEFAULT_RANK_TOL, outer
from .optics import EPSILON_MAX

_SQRT2 = np.sqrt(2.0)

#: Relative error weight of Eve's resend i when the station prepared k:
#: full error for the opposite state (k = i + 2), half for a basis-mismatched
#: neighbor (k = i +/- 1), none for a correct guess.
ERROR_WEIGHTS = (0.0, 0.5, 1.0, 0.5)


@dataclass(frozen=True)
class AttackEnsemble:
    """Four pure states with their density and error operators.

    states[k] is the unit vector prepared for phase index k; rho_k[k] its
    projector, rho the (trace-4) sum, and error_ops[i] the weighted mixture
    w_1 rho_{i+1} + w_2 rho_{i+2} + w_3 rho_{i+3} with weights ERROR_WEIGHTS
    that scores the sifted error caused by resending state i.
    """

    epsilon: float
    delta: float
    states: np.ndarray
    rho_k: np.ndarray
    rho: np.ndarray
    error_ops: np.ndarray

    def __post_init__(self):
        for arr in (self.states, self.rho_k, self.rho, self.error_ops):
            arr.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.states.shape[1]


@dataclass(frozen=True)
class Bb84State:
    """Standard two-mode phase-encoded state (e^{ik delta}|c> + |d>)/sqrt(2)."""

    k: int
    delta: float
    vector: np.ndarray

    def __post_init__(self):
        self.vector.setflags(write=False)


def bb84_state(k: int, delta: float = np.pi / 2) -> Bb84State:
    """Phase-encoded state with index k; delta = pi/2 gives the standard BB84 set."""
    if k not in (0, 1, 2, 3):
        raise DomainError(f"k must be in 0..3, got {k!r}")
    vector = np.array([np.exp(1j * k * delta), 1.0], dtype=complex) / _SQRT2
    return Bb84State(k=k, delta=delta, vector=vector)


def attack_state_vector(epsilon: float, delta: float, k: int) -> np.ndarray:
    """Unit vector of attack state k in the (e_0, e_1, e_2) basis.

    (1/sqrt(2)) [ sin(2e)cos(2e)(z^2 - z),  sin^2(2e) z^2 + cos^2(2e) z,  1 ]
    with z = e^{ik delta}; unit norm for every (epsilon, delta, k).
    """
    if k not in (0, 1, 2, 3):
        raise DomainError(f"k must be in 0..3, got {k!r}")
    s, c = np.sin(2 * epsilon), np.cos(2 * epsilon)
    z = np.exp(1j * k * delta)
    return np.array([s * c * (z * z - z), s * s * z * z + c * c * z, 1.0], dtype=complex) / _SQRT2


def ensemble_from_states(states: np.ndarray, epsilon: float, delta: float) -> AttackEnsemble:
    """Assemble rho_k, rho and the error operators from four given state vectors."""
    states = np.asarray(states, dtype=complex)
    if states.shape[0] != 4:
        raise DomainError(f"expected four states, got {states.shape[0]}")
    rho_k = np.stack([outer(v, v) for v in states])
    rho = rho_k.sum(axis=0)
    error_ops = np.stack(
        [sum(ERROR_WEIGHTS[j] * rho_k[(i + j) % 4] for j in range(1, 4)) for i in range(4)]
    )
    return AttackEnsemble(
        epsilon=epsilon, delta=delta, states=states, rho_k=rho_k, rho=rho, error_ops=error_ops
    )


def build_ensemble(epsilon: float, delta: float) -> AttackEnsemble:
    """Build the 3-dimensional attack ensemble for mirror deviation epsilon and phase step delta.

    Accepts epsilon = 0 and delta = 0 (the states are well defined there even
    though the span collapses); the attack construction itself rejects the
    collapsed cases.
    """
    if not abs(epsilon) <= EPSILON_MAX:
        raise DomainError(f"|epsilon| must be <= {EPSILON_MAX:.6f} rad, got {epsilon!r}")
    if not 0.0 <= delta <= np.pi / 2:
        raise DomainError(f"delta must lie in [0, pi/2], got {delta!r}")
    states = np.stack([attack_state_vector(epsilon, delta, k) for k in range(4)])
    return ensemble_from_states(states, epsilon, delta)


def bb84_ensemble(delta: float) -> AttackEnsemble:
    """Two-dimensional ensemble of the bare phase-encoded states (epsilon = 0 limit).

    This is the ensemble an eavesdropper faces with a perfect mirror, used as
    the baseline for the phase-remapping strategy.
    """
    if not 0.0 <= delta <= np.pi / 2:
        raise DomainError(f"delta must lie in [0, pi/2], got {delta!r}")
    states = np.stack([bb84_state(k, delta).vector for k in range(4)])
    return ensemble_from_states(states, epsilon=0.0, delta=delta)


def span_dimension(ens: AttackEnsemble, tol: float = DEFAULT_RANK_TOL) -> int:
    """Numerical rank of the state family: singular values above tol * sigma_max."""
    sigma = np.linalg.svd(ens.states.T, compute_uv=False)
    return int(np.count_nonzero(sigma > tol * sigma[0]))
