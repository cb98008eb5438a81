"""Physical-layer simulation: downlink reception, sign decisions, target echo."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .designer import FeedbackMatrix
from .numerics import sample_cgauss, steering_vector
from .scenario import TargetScene, UserPopulation


@dataclass(frozen=True)
class EchoObservation:
    y_e: np.ndarray  # (M, L) complex


@dataclass(frozen=True)
class DecisionOutcome:
    s_true: int   # +1 decoded, -1 failed
    s_hat: int
    margin: float  # realized Re(y p^H)


def receive_downlink(v: FeedbackMatrix, h_true: np.ndarray,
                     rng: np.random.Generator, sigma_c2: float) -> np.ndarray:
    """One user's received feedback: y = h^T V + z, z i.i.d. CN(0, sigma_c^2)."""
    m_ant, l_len = v.v.shape
    if h_true.shape != (m_ant,):
        raise ValueError(f"h_true: expected shape ({m_ant},), got {h_true.shape}")
    return h_true @ v.v + sample_cgauss(rng, l_len, sigma_c2)


def decide(y: np.ndarray, hash_vec: np.ndarray) -> int:
    """Acknowledgment decision: +1 iff Re(y p^H) >= 0, else -1."""
    if y.shape != hash_vec.shape:
        raise ValueError(f"length mismatch: y {y.shape} vs hash {hash_vec.shape}")
    return 1 if np.real(y @ hash_vec.conj()) >= 0 else -1


def echo(v: FeedbackMatrix, scene: TargetScene, rng: np.random.Generator,
         sigma_e2: float, rho0: float, alpha_t: float) -> EchoObservation:
    """Echo at the BS: sum over targets of sqrt(rho0 d^-2a) a a^T V, plus AWGN."""
    m_ant, l_len = v.v.shape
    signal = np.zeros((m_ant, l_len), dtype=complex)
    for theta, dist in zip(scene.angles, scene.distances):
        a = steering_vector(theta, m_ant)
        signal += np.sqrt(rho0 * dist ** (-2.0 * alpha_t)) * np.outer(a, a @ v.v)
    noise = sample_cgauss(rng, m_ant * l_len, sigma_e2).reshape(m_ant, l_len)
    return EchoObservation(y_e=signal + noise)


def simulate_decisions(v: FeedbackMatrix, pop: UserPopulation,
                       rng: np.random.Generator, sigma_c2: float) -> list:
    """Downlink pass for every user, in index order, against true channels."""
    m_ant, l_len = v.v.shape
    if pop.h_true.shape[1] != m_ant or pop.hashes.shape[1] != l_len:
        raise ValueError(
            f"matrix shape {v.v.shape} does not match population "
            f"(M={pop.h_true.shape[1]}, L={pop.hashes.shape[1]})")
    noise = sample_cgauss(rng, pop.n_users * l_len, sigma_c2).reshape(pop.n_users, l_len)
    received = pop.h_true @ v.v + noise
    margins = np.real((received * pop.hashes.conj()).sum(axis=1))
    outcomes = []
    for i in range(pop.n_users):
        s_true = 1 if pop.decoded[i] else -1
        s_hat = 1 if margins[i] >= 0 else -1
        outcomes.append(DecisionOutcome(s_true=s_true, s_hat=s_hat,
                                        margin=float(margins[i])))
    return outcomes


def empirical_comm_error(outcomes: list) -> float:
    """Fraction of users whose decision disagrees with their decode status."""
    if not outcomes:
        raise ValueError("no decision outcomes")
    wrong = sum(1 for o in outcomes if o.s_hat != o.s_true)
    return wrong / len(outcomes)
