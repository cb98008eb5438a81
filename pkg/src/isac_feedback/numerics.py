"""Scalar and vector primitives shared by every other module.

Angles are plain floats in radians everywhere inside the library; degrees
appear only at configuration and reporting boundaries. Powers are handled
as dBm at the boundary and linear milliwatts internally.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np


def dbm_to_mw(x: float) -> float:
    """Convert a dBm level to linear milliwatts. -inf maps to exactly 0."""
    if math.isinf(x) and x < 0:
        return 0.0
    return 10.0 ** (x / 10.0)


def mw_to_dbm(x: float) -> float:
    """Convert linear milliwatts to dBm. 0 maps to -inf."""
    if x < 0:
        raise ValueError(f"negative power: {x}")
    if x == 0.0:
        return -math.inf
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class PowerLevel:
    """A power expressed both in dBm and in linear milliwatts."""

    dbm: float

    @property
    def linear_mw(self) -> float:
        return dbm_to_mw(self.dbm)

    @classmethod
    def from_mw(cls, mw: float) -> "PowerLevel":
        return cls(dbm=mw_to_dbm(mw))


def steering_vector(theta: float, m: int) -> np.ndarray:
    """ULA array response at angle theta (radians), half-wavelength spacing.

    Entry k is exp(j*pi*k*cos(theta)) for k = 0..m-1; all entries have unit
    modulus and entry 0 is exactly 1.
    """
    if m < 1:
        raise ValueError(f"antenna count must be >= 1, got {m}")
    return np.exp(1j * np.pi * np.arange(m) * np.cos(theta))


def steering_derivative(theta: float, m: int) -> np.ndarray:
    """Entrywise derivative of steering_vector with respect to theta."""
    if m < 1:
        raise ValueError(f"antenna count must be >= 1, got {m}")
    k = np.arange(m)
    return -1j * np.pi * k * np.sin(theta) * np.exp(1j * np.pi * k * np.cos(theta))


def q_function(x):
    """Standard normal tail probability P(N(0,1) > x), via erfc."""
    from scipy.special import erfc

    out = 0.5 * erfc(np.asarray(x, dtype=float) / np.sqrt(2.0))
    if np.isscalar(x) or np.ndim(x) == 0:
        return float(out)
    return out


def sample_cgauss(rng: np.random.Generator, n: int, variance: float) -> np.ndarray:
    """n i.i.d. circularly-symmetric complex Gaussian draws, CN(0, variance).

    Real and imaginary parts are each N(0, variance/2). A zero variance
    yields exact zeros without consuming generator state.
    """
    if variance < 0:
        raise ValueError(f"variance must be >= 0, got {variance}")
    if variance == 0.0:
        return np.zeros(n, dtype=complex)
    z = rng.standard_normal((2, n))
    return np.sqrt(variance / 2.0) * (z[0] + 1j * z[1])


def _label_key(label: str) -> int:
    digest = hashlib.blake2b(label.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def derive_seed(seed: int, label: str) -> int:
    """Stable 64-bit sub-seed from (seed, label); used for named components."""
    digest = hashlib.blake2b(
        seed.to_bytes(8, "big", signed=False) + label.encode("utf-8"),
        digest_size=8,
    ).digest()
    return int.from_bytes(digest, "big")


def substream(seed: int, trial_index: int, label: str) -> np.random.Generator:
    """Deterministic per-(seed, trial, label) random stream.

    Identical arguments yield bit-identical draw sequences across runs and
    platforms; distinct labels or trial indices give independent streams.
    """
    if seed < 0 or trial_index < 0:
        raise ValueError("seed and trial_index must be non-negative")
    ss = np.random.SeedSequence(entropy=(seed, trial_index, _label_key(label)))
    return np.random.default_rng(ss)


def check_shape(arr: np.ndarray, shape: tuple, name: str) -> None:
    """Raise on dimension mismatch; broadcasting is never silently allowed."""
    if arr.shape != shape:
        raise ValueError(f"{name}: expected shape {shape}, got {arr.shape}")
