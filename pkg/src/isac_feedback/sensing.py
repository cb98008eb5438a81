"""Angle estimation from the echo and RMSE scoring.

The estimator is MUSIC on the raw echo: sample covariance over channel uses,
noise subspace from the smallest eigenvalues, pseudospectrum scanned on a
fine grid across the sensing sector, peaks refined by local quadratic
interpolation. The target count is assumed known.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .airlink import EchoObservation


class EstimationError(RuntimeError):
    """The pseudospectrum did not expose enough peaks."""


@functools.lru_cache(maxsize=8)
def _scan_grid(m_ant: int, lo_deg: float, hi_deg: float, step_deg: float) -> tuple:
    n_pts = int(round((hi_deg - lo_deg) / step_deg)) + 1
    thetas_deg = lo_deg + step_deg * np.arange(n_pts)
    steer = np.exp(1j * np.pi * np.outer(np.arange(m_ant),
                                         np.cos(np.deg2rad(thetas_deg))))
    thetas_deg.setflags(write=False)
    steer.setflags(write=False)
    return thetas_deg, steer


@dataclass(frozen=True)
class AngleEstimate:
    theta_hat: float       # radians, inside the searched sector
    spectrum_peak: float   # pseudospectrum value at the (refined) peak


def estimate_angles(obs: EchoObservation, t_count: int, sector: tuple,
                    grid_step_deg: float = 0.01) -> list:
    """MUSIC angle estimates: the t_count largest refined pseudospectrum peaks."""
    m_ant, l_len = obs.y_e.shape
    if t_count < 1:
        raise ValueError(f"t_count must be >= 1, got {t_count}")
    if t_count >= m_ant:
        raise ValueError(f"need t_count < M, got T={t_count}, M={m_ant}")
    lo_deg, hi_deg = math.degrees(sector[0]), math.degrees(sector[1])
    if not lo_deg < hi_deg:
        raise ValueError(f"empty sector: {sector}")

    cov = obs.y_e @ obs.y_e.conj().T / l_len
    _, vecs = np.linalg.eigh(cov)  # ascending eigenvalues
    noise_basis = vecs[:, : m_ant - t_count]

    thetas_deg, steer = _scan_grid(m_ant, lo_deg, hi_deg, grid_step_deg)
    n_pts = thetas_deg.shape[0]
    denom = (np.abs(noise_basis.conj().T @ steer) ** 2).sum(axis=0)
    spectrum = 1.0 / denom

    # local maxima; endpoints qualify against their single neighbor
    peaks = []
    for i in range(n_pts):
        left_ok = i == 0 or spectrum[i] > spectrum[i - 1]
        right_ok = i == n_pts - 1 or spectrum[i] > spectrum[i + 1]
        if left_ok and right_ok:
            peaks.append(i)
    if len(peaks) < t_count:
        raise EstimationError(
            f"found {len(peaks)} pseudospectrum peaks, need {t_count}")
    peaks.sort(key=lambda i: spectrum[i], reverse=True)

    estimates = []
    for i in peaks[:t_count]:
        if 0 < i < n_pts - 1:
            y_l, y_0, y_r = spectrum[i - 1], spectrum[i], spectrum[i + 1]
            curv = y_l - 2.0 * y_0 + y_r
            offset = 0.0 if curv == 0 else 0.5 * (y_l - y_r) / curv
            offset = float(np.clip(offset, -0.5, 0.5))
            theta_deg = thetas_deg[i] + offset * grid_step_deg
            peak_val = y_0 - 0.25 * (y_l - y_r) * offset
        else:
            theta_deg = thetas_deg[i]
            peak_val = spectrum[i]
        theta_deg = float(np.clip(theta_deg, lo_deg, hi_deg))
        estimates.append(AngleEstimate(theta_hat=math.radians(theta_deg),
                                       spectrum_peak=float(peak_val)))
    return estimates


def rmse(true_angles, estimates) -> float:
    """Root mean squared angle error in degrees, nearest-pair assignment.

    For one-dimensional angles the squared-error-optimal matching pairs the
    sorted lists elementwise.
    """
    t = np.sort(np.asarray(true_angles, dtype=float))
    e = np.sort(np.asarray(estimates, dtype=float))
    if t.shape != e.shape:
        raise ValueError(f"length mismatch: {t.shape} vs {e.shape}")
    diff_deg = np.rad2deg(t - e)
    return float(np.sqrt(np.mean(diff_deg ** 2)))
