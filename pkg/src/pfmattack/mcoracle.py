"""Monte Carlo check of the closed-form QBER and success probability.

Simulates the sifted protocol end to end: the sender draws one of the four
states, the eavesdropper samples her POVM, resends a standard BB84 state on a
conclusive outcome (blocks otherwise), the receiver measures in a uniformly
random basis, and rounds are sifted on the sender/receiver basis match. The
estimates converge on the trace formulas evaluated by `attack.evaluate`, which
is the point: the two paths share no code beyond the POVM elements themselves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NegativeProbabilityError
from .attack import PovmStrategy
from .statespace import AttackEnsemble

#: Below this many trials the binomial error bars are too wide to be useful.
MIN_TRIALS = 10_000

_PROB_ATOL = 1e-9


@dataclass(frozen=True)
class TrialRecord:
    """One simulated round. error can only be set on a sifted round, and a
    sifted round requires a conclusive (non-vacuum) outcome."""

    alice_k: int
    eve_outcome: int | None
    bob_basis: int
    bob_bit: int | None
    sifted: bool
    error: bool


@dataclass(frozen=True)
class OracleEstimate:
    """Aggregated estimates with binomial standard errors."""

    n_trials: int
    qber_hat: float
    p_succ_hat: float
    stderr_qber: float
    stderr_p_succ: float
    rng_seed: int
    n_conclusive: int
    n_sifted: int
    n_errors: int


def outcome_probabilities(state: np.ndarray, strat: PovmStrategy) -> np.ndarray:
    """Probabilities (p_0, p_3, p_vac) of the three outcomes on a pure state."""
    state = np.asarray(state, dtype=complex)
    probs = np.array(
        [(state.conj() @ op @ state).real for op in (strat.m_0, strat.m_3, strat.m_vac)]
    )
    if probs.min() < -_PROB_ATOL:
        raise NegativeProbabilityError(f"outcome probability {probs.min():.3e} is negative")
    if abs(probs.sum() - 1.0) > _PROB_ATOL:
        raise DomainError(f"outcome probabilities sum to {probs.sum()!r}, expected 1")
    return np.clip(probs, 0.0, None)


def sample_povm_outcome(state: np.ndarray, strat: PovmStrategy, rng: np.random.Generator) -> int | None:
    """Draw one outcome: 0, 3, or None for the vacuum (blocking) element."""
    p_0, p_3, _ = outcome_probabilities(state, strat)
    u = rng.random()
    if u < p_0:
        return 0
    if u < p_0 + p_3:
        return 3
    return None


def simulate_bob(
    resend_k: int | None, bob_basis: int, rng: np.random.Generator
) -> tuple[int | None, bool]:
    """Receiver measurement of a resent standard BB84 state.

    bob_basis 0 holds states {0, 2}, basis 1 holds {1, 3}. When the resent
    state lies in the measured basis the bit is deterministic; otherwise it is
    uniform (and survives sifting only if the eavesdropper guessed the
    sender's basis wrongly but the receiver matched the sender). Returns
    (bit, basis_match); a blocked round (resend_k None) yields (None, False).
    """
    if bob_basis not in (0, 1):
        raise DomainError(f"bob_basis must be 0 or 1, got {bob_basis!r}")
    if resend_k is None:
        return None, False
    if resend_k not in (0, 1, 2, 3):
        raise DomainError(f"resend_k must be in 0..3 or None, got {resend_k!r}")
    if resend_k % 2 == bob_basis:
        return resend_k // 2, True
    return int(rng.integers(0, 2)), False


def run_trial(ens: AttackEnsemble, strat: PovmStrategy, rng: np.random.Generator) -> TrialRecord:
    """Simulate a single protocol round."""
    alice_k = int(rng.integers(0, 4))
    eve_outcome = sample_povm_outcome(ens.states[alice_k], strat, rng)
    bob_basis = int(rng.integers(0, 2))
    if eve_outcome is None:
        return TrialRecord(alice_k, None, bob_basis, None, sifted=False, error=False)
    bit, _ = simulate_bob(eve_outcome, bob_basis, rng)
    bob_index = bob_basis + 2 * bit
    sifted = bob_basis == alice_k % 2
    error = sifted and bob_index != alice_k
    return TrialRecord(alice_k, eve_outcome, bob_basis, bit, sifted=sifted, error=error)


def _estimate(n_trials, n_conclusive, n_sifted, n_errors, seed) -> OracleEstimate:
    p_hat = n_conclusive / n_trials
    if n_sifted > 0:
        e_hat = n_errors / n_sifted
        stderr_e = float(np.sqrt(e_hat * (1.0 - e_hat) / n_sifted))
    else:
        e_hat = float("nan")
        stderr_e = float("nan")
    stderr_p = float(np.sqrt(p_hat * (1.0 - p_hat) / n_trials))
    return OracleEstimate(
        n_trials=n_trials,
        qber_hat=e_hat,
        p_succ_hat=p_hat,
        stderr_qber=stderr_e,
        stderr_p_succ=stderr_p,
        rng_seed=seed,
        n_conclusive=int(n_conclusive),
        n_sifted=int(n_sifted),
        n_errors=int(n_errors),
    )


def run_oracle(ens: AttackEnsemble, strat: PovmStrategy, n_trials: int, seed: int) -> OracleEstimate:
    """Estimate QBER and success probability from n_trials simulated rounds.

    Vectorized batch version of `run_trial` with identical per-round law;
    reproducible for a fixed seed. QBER counts errors among sifted conclusive
    rounds, the success probability counts conclusive rounds over all trials.
    """
    if n_trials < MIN_TRIALS:
        raise DomainError(f"below minimum trial count: {n_trials} < {MIN_TRIALS}")
    prob_table = np.stack([outcome_probabilities(v, strat) for v in ens.states])
    rng = np.random.default_rng(seed)
    alice = rng.integers(0, 4, n_trials)
    u = rng.random(n_trials)
    bob_basis = rng.integers(0, 2, n_trials).astype(np.int8)
    uniform_bits = rng.integers(0, 2, n_trials).astype(np.int8)

    p_0 = prob_table[alice, 0]
    conclusive = u < p_0 + prob_table[alice, 1]
    resend = np.where(u < p_0, 0, 3).astype(np.int8)

    deterministic = (resend % 2) == bob_basis
    bit = np.where(deterministic, resend // 2, uniform_bits)
    bob_index = bob_basis + 2 * bit
    sifted = conclusive & ((alice % 2) == bob_basis)
    errors = sifted & (bob_index != alice)
    return _estimate(n_trials, conclusive.sum(), sifted.sum(), errors.sum(), seed)


def simulate_intercept_resend(n_trials: int, seed: int) -> OracleEstimate:
    """Oracle for the plain intercept-and-resend attack on ideal BB84.

    The eavesdropper measures every round in a uniformly random basis and
    resends her outcome state, so every round is conclusive and the sifted
    QBER converges on 1/4.
    """
    if n_trials < MIN_TRIALS:
        raise DomainError(f"below minimum trial count: {n_trials} < {MIN_TRIALS}")
    rng = np.random.default_rng(seed)
    alice = rng.integers(0, 4, n_trials)
    eve_basis = rng.integers(0, 2, n_trials).astype(np.int8)
    eve_bits = rng.integers(0, 2, n_trials).astype(np.int8)
    bob_basis = rng.integers(0, 2, n_trials).astype(np.int8)
    bob_bits = rng.integers(0, 2, n_trials).astype(np.int8)

    eve_match = (alice % 2) == eve_basis
    resend = np.where(eve_match, alice, eve_basis + 2 * eve_bits)
    deterministic = (resend % 2) == bob_basis
    bit = np.where(deterministic, resend // 2, bob_bits)
    bob_index = bob_basis + 2 * bit
    sifted = (alice % 2) == bob_basis
    errors = sifted & (bob_index != alice)
    return _estimate(n_trials, n_trials, sifted.sum(), errors.sum(), seed)
