"""Pilot-based MMSE channel estimation and its Gauss-Markov error model.

The downlink channel estimate and the true channel are tied by

    h = sqrt(1 - tau^2) * h_hat + tau * e

with tau^2 the estimation MSE and e an independent error vector.  The
simulator draws the true channel first (reciprocity fixes it), so the
estimate is obtained by inverting that identity for a drawn error; the
identity then holds exactly on every realization at the cost of a
slightly inflated marginal estimate variance, a factor (1+tau^2)/(1-tau^2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def mmse_estimate(y_pilot: np.ndarray, pilots: np.ndarray) -> np.ndarray:
    """MMSE estimate of the uplink channel from received pilot symbols.

    Parameters
    ----------
    y_pilot : (n_b, T) received baseband samples, one column per symbol.
    pilots : (T,) transmitted training symbols, not all zero.

    Returns
    -------
    (n_b,) channel estimate (1 + s^H s)^{-1} Y s*.
    """
    y_pilot = np.asarray(y_pilot)
    pilots = np.asarray(pilots).ravel()
    if y_pilot.ndim != 2 or y_pilot.shape[1] != pilots.shape[0]:
        raise ValueError(
            f"shape mismatch: y_pilot {y_pilot.shape} vs {pilots.shape[0]} pilots"
        )
    energy = float(np.real(np.vdot(pilots, pilots)))
    if energy == 0.0:
        raise ValueError("pilot sequence must not be all-zero")
    return (y_pilot @ np.conj(pilots)) / (1.0 + energy)


def tau_sq_fd(
    p_u: float,
    h_ub: np.ndarray,
    sigma_b_sq: float,
    sigma_rb_sq: float,
    t: int,
) -> float:
    """Estimation MSE for full-duplex training over a whole packet.

    tau^2 = (1 + T * P_u ||h||^2 / (sigma_b^2 + sigma_rb^2))^{-1}; the
    residual self-interference left after cancellation raises the
    effective noise seen by the pilots.
    """
    snr = t * p_u * float(np.sum(np.abs(h_ub) ** 2)) / (sigma_b_sq + sigma_rb_sq)
    return 1.0 / (1.0 + snr)


def tau_sq_hd(p_u: float, h_bu: np.ndarray, sigma_b_sq: float, t_hd: int) -> float:
    """Estimation MSE for half-duplex training over t_hd pilot symbols.

    No residual-interference term: the HD node does not transmit while
    sounding.  t_hd = 0 is allowed and yields tau^2 = 1 (no estimate).
    """
    snr = t_hd * p_u * float(np.sum(np.abs(h_bu) ** 2)) / sigma_b_sq
    return 1.0 / (1.0 + snr)


@dataclass(frozen=True)
class EstimationResult:
    """Channel estimate, its error power and the error realization."""

    h_ub_hat: np.ndarray
    tau_sq: float
    e_ub: np.ndarray


def draw_error_vector(
    n: int, rng: np.random.Generator, pathloss_dl: float
) -> np.ndarray:
    """IID CN(0, pathloss_dl) estimation-error vector of length n."""
    return np.sqrt(pathloss_dl / 2.0) * (
        rng.standard_normal(n) + 1j * rng.standard_normal(n)
    )


def couple_with_error(
    h_ub_true: np.ndarray, tau_sq: float, e_ub: np.ndarray
) -> EstimationResult:
    """Solve the Gauss-Markov identity for the estimate.

        h_hat = (h - sqrt(tau_sq) * e) / sqrt(1 - tau_sq)

    so that sqrt(1-tau_sq)*h_hat + sqrt(tau_sq)*e reconstructs the true
    channel exactly.  tau_sq = 1 is rejected (estimate undefined).
    """
    if not 0.0 <= tau_sq < 1.0:
        raise ValueError(f"tau_sq must be in [0, 1), got {tau_sq}")
    if tau_sq == 0.0:
        return EstimationResult(h_ub_hat=h_ub_true.copy(), tau_sq=0.0, e_ub=e_ub)
    h_ub_hat = (h_ub_true - np.sqrt(tau_sq) * e_ub) / np.sqrt(1.0 - tau_sq)
    return EstimationResult(h_ub_hat=h_ub_hat, tau_sq=tau_sq, e_ub=e_ub)


def couple_estimate(
    h_ub_true: np.ndarray,
    tau_sq: float,
    rng: np.random.Generator,
    pathloss_dl: float,
) -> EstimationResult:
    """Draw an error vector and derive the consistent channel estimate."""
    e_ub = draw_error_vector(h_ub_true.shape[0], rng, pathloss_dl)
    return couple_with_error(h_ub_true, tau_sq, e_ub)
