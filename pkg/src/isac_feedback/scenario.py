"""Simulation world: system parameters, user population, targets, angle grid.

All randomness flows through an explicit generator so that a world is a pure
function of (config, rng). Values are immutable after creation.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .hashing import HashCodebook
from .numerics import derive_seed, dbm_to_mw, sample_cgauss


class ConfigError(ValueError):
    """Malformed configuration document or invalid parameter combination."""


_INIT_SIGNS = ("paper", "negated")


@dataclass(frozen=True)
class SystemConfig:
    """Physical and algorithmic parameters of one experiment.

    Power-like fields (p_tx, sigma_c2, sigma_e2, sigma_h2) are dBm; rho0 is a
    path gain in dB (dimensionless once linear); angles are degrees in the
    config document and converted to radians on access.
    """

    m: int = 20                 # BS antennas
    l: int = 32                 # feedback length in channel uses
    k_users: int = 50           # detected pilots
    n_decoded: int = 45         # users with successfully decoded messages
    p_tx: float = 13.0          # dBm
    sigma_c2: float = -100.0    # dBm, downlink AWGN at each user
    sigma_e2: float = -100.0    # dBm, echo AWGN at the BS
    sigma_h2: float = -math.inf # dBm, channel-estimation noise
    rho0: float = -30.0         # dB path gain at unit distance
    n_paths: int = 5
    alpha_u: float = 3.0
    alpha_t: float = 2.2
    user_dist_range: tuple = (1000.0, 1500.0)   # meters
    target_dist: float = 300.0                  # meters
    target_angle_range: tuple = (80.0, 100.0)   # degrees
    sense_grid_size: int = 20
    mu: float = 0.5             # comm/sensing trade-off weight
    eta: float = 0.1            # gradient step size
    n_stp: int = 30             # iteration count
    b_p: int = 16               # hash input bits
    q_o: float = 0.01           # retained error-probability threshold (unused by the designer)
    seed: int = 12345
    init_sign: str = "paper"    # sign convention of the initial matrix

    def __post_init__(self):
        if self.m < 2:
            raise ConfigError(f"m must be >= 2, got {self.m}")
        if self.l < 1:
            raise ConfigError(f"l must be >= 1, got {self.l}")
        if not 0 <= self.n_decoded <= self.k_users:
            raise ConfigError(
                f"need 0 <= n_decoded <= k_users, got {self.n_decoded}/{self.k_users}")
        if not 0.0 <= self.mu <= 1.0:
            raise ConfigError(f"mu must lie in [0, 1], got {self.mu}")
        if self.eta <= 0:
            raise ConfigError(f"eta must be > 0, got {self.eta}")
        if self.n_stp < 1:
            raise ConfigError(f"n_stp must be >= 1, got {self.n_stp}")
        if self.sense_grid_size < 2:
            raise ConfigError(f"sense_grid_size must be >= 2, got {self.sense_grid_size}")
        lo, hi = self.user_dist_range
        if not 0 < lo <= hi:
            raise ConfigError(f"bad user_dist_range: {self.user_dist_range}")
        if self.target_dist <= 0:
            raise ConfigError(f"target_dist must be > 0, got {self.target_dist}")
        alo, ahi = self.target_angle_range
        if not 0.0 < alo < ahi < 180.0:
            raise ConfigError(
                f"target_angle_range must lie strictly inside (0, 180) deg: "
                f"{self.target_angle_range}")
        if self.b_p < 1:
            raise ConfigError(f"b_p must be >= 1, got {self.b_p}")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.init_sign not in _INIT_SIGNS:
            raise ConfigError(f"init_sign must be one of {_INIT_SIGNS}, got {self.init_sign!r}")
        # normalize list inputs from JSON to tuples so the config hashes stably
        object.__setattr__(self, "user_dist_range", tuple(float(x) for x in self.user_dist_range))
        object.__setattr__(self, "target_angle_range",
                           tuple(float(x) for x in self.target_angle_range))

    # --- derived quantities ---

    @property
    def p_tx_mw(self) -> float:
        return dbm_to_mw(self.p_tx)

    @property
    def sigma_c2_mw(self) -> float:
        return dbm_to_mw(self.sigma_c2)

    @property
    def sigma_e2_mw(self) -> float:
        return dbm_to_mw(self.sigma_e2)

    @property
    def sigma_h2_mw(self) -> float:
        return dbm_to_mw(self.sigma_h2)

    @property
    def rho0_linear(self) -> float:
        return dbm_to_mw(self.rho0)  # dB ratio -> linear gain, same 10^(x/10) map

    @property
    def power_budget(self) -> float:
        """Total signal energy budget: P * L in mW * channel uses."""
        return self.p_tx_mw * self.l

    @property
    def decision_noise_var(self) -> float:
        """Variance of the real decision noise: 0.5*(P*L*sigma_h^2 + sigma_c^2)."""
        return 0.5 * (self.p_tx_mw * self.l * self.sigma_h2_mw + self.sigma_c2_mw)

    @property
    def sector_rad(self) -> tuple:
        lo, hi = self.target_angle_range
        return (math.radians(lo), math.radians(hi))

    @property
    def codebook_seed(self) -> int:
        return derive_seed(self.seed, "hash-codebook")

    def codebook(self) -> HashCodebook:
        return HashCodebook(b_p=self.b_p, l=self.l, codebook_seed=self.codebook_seed)

    # --- serialization ---

    def to_json_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["user_dist_range"] = list(self.user_dist_range)
        d["target_angle_range"] = list(self.target_angle_range)
        return d

    @classmethod
    def from_json_dict(cls, doc: dict) -> "SystemConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        doc = dict(doc)
        for key in ("sigma_h2", "p_tx", "sigma_c2", "sigma_e2", "rho0"):
            if key in doc and isinstance(doc[key], str):
                doc[key] = float(doc[key])  # accept "-inf" spelled as a string
        return cls(**doc)

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "SystemConfig":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))

    def config_hash(self) -> str:
        canon = json.dumps(self.to_json_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:12]


@dataclass(frozen=True)
class UserPopulation:
    """Per-user channels, estimates, hashes, and decode status."""

    h_true: np.ndarray     # (K, M) complex
    h_est: np.ndarray      # (K, M) complex
    hashes: np.ndarray     # (K, L) complex, real-valued +-1/sqrt(L)
    hash_index: np.ndarray # (K,) int
    decoded: np.ndarray    # (K,) bool
    distances: np.ndarray  # (K,) meters

    @property
    def n_users(self) -> int:
        return self.h_true.shape[0]

    def to_dict(self) -> dict:
        return {
            "h_true_re": self.h_true.real.tolist(),
            "h_true_im": self.h_true.imag.tolist(),
            "h_est_re": self.h_est.real.tolist(),
            "h_est_im": self.h_est.imag.tolist(),
            "hashes_re": self.hashes.real.tolist(),
            "hash_index": self.hash_index.tolist(),
            "decoded": self.decoded.tolist(),
            "distances": self.distances.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "UserPopulation":
        h_true = np.asarray(d["h_true_re"]) + 1j * np.asarray(d["h_true_im"])
        h_est = np.asarray(d["h_est_re"]) + 1j * np.asarray(d["h_est_im"])
        return cls(
            h_true=h_true,
            h_est=h_est,
            hashes=np.asarray(d["hashes_re"], dtype=float).astype(complex),
            hash_index=np.asarray(d["hash_index"], dtype=np.int64),
            decoded=np.asarray(d["decoded"], dtype=bool),
            distances=np.asarray(d["distances"], dtype=float),
        )


@dataclass(frozen=True)
class TargetScene:
    angles: np.ndarray     # (T,) radians, inside the sensing sector
    distances: np.ndarray  # (T,) meters

    @property
    def n_targets(self) -> int:
        return self.angles.shape[0]


@dataclass(frozen=True)
class SenseGrid:
    """Equally spaced angles spanning the sensing sector, endpoints included."""

    angles: np.ndarray  # (G,) radians

    @property
    def size(self) -> int:
        return self.angles.shape[0]


def make_user_channel(cfg: SystemConfig, rng: np.random.Generator,
                      distance: float) -> np.ndarray:
    """One user's channel: sum of n_paths scaled steering vectors.

    Path amplitudes are CN(0,1); per-path arrival angles are uniform over
    (0, 180) degrees. Expected squared norm is n_paths * rho0 * d^-alpha_u * m.
    """
    if distance <= 0:
        raise ValueError(f"distance must be > 0, got {distance}")
    angles = rng.uniform(0.0, np.pi, cfg.n_paths)
    taus = sample_cgauss(rng, cfg.n_paths, 1.0)
    gain = np.sqrt(cfg.rho0_linear * distance ** (-cfg.alpha_u))
    steer = np.exp(1j * np.pi * np.outer(np.cos(angles), np.arange(cfg.m)))
    return gain * (taus[:, None] * steer).sum(axis=0)


def make_population(cfg: SystemConfig, rng: np.random.Generator) -> UserPopulation:
    """Draw K users: distances, channels, noisy estimates, hashes, decode flags."""
    k = cfg.k_users
    distances = rng.uniform(cfg.user_dist_range[0], cfg.user_dist_range[1], k)
    h_true = np.zeros((k, cfg.m), dtype=complex)
    for i in range(k):
        h_true[i] = make_user_channel(cfg, rng, distances[i])
    h_est = h_true.copy()
    if cfg.sigma_h2_mw > 0:
        for i in range(k):
            h_est[i] = h_true[i] + sample_cgauss(rng, cfg.m, cfg.sigma_h2_mw)
    cb = cfg.codebook()
    hash_index = rng.integers(0, cb.n_rows, size=k)
    hashes = np.vstack([cb.row(int(ix)) for ix in hash_index])
    decoded = np.zeros(k, dtype=bool)
    decoded[: cfg.n_decoded] = True
    decoded = decoded[rng.permutation(k)]
    return UserPopulation(h_true=h_true, h_est=h_est, hashes=hashes,
                          hash_index=hash_index, decoded=decoded,
                          distances=distances)


def make_targets(cfg: SystemConfig, rng: np.random.Generator,
                 n_targets: int = 1) -> TargetScene:
    """Targets at the configured distance with uniform angles in the sector."""
    lo, hi = cfg.sector_rad
    angles = rng.uniform(lo, hi, n_targets)
    return TargetScene(angles=angles, distances=np.full(n_targets, cfg.target_dist))


def make_grid(cfg: SystemConfig) -> SenseGrid:
    lo, hi = cfg.sector_rad
    return SenseGrid(angles=np.linspace(lo, hi, cfg.sense_grid_size))
