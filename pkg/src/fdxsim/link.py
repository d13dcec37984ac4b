"""Achievable downlink rates for the FD and HD transmission schemes."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RateSample:
    """Per-realization rates and estimation MSEs for both schemes.

    ``rate_hd_effective`` is the per-symbol HD rate scaled by the data
    share of the packet, (T - T_HD)/T, which is the throughput actually
    delivered by the time-split scheme.
    """

    rate_fd_bps_hz: float
    rate_hd_bps_hz: float
    rate_hd_effective: float
    mse_fd: float
    mse_hd: float


def rate_fd(
    p_b: float,
    h_ub_hat: np.ndarray,
    v_b: np.ndarray,
    tau_sq: float,
    sigma_u_sq: float,
    sigma_ru_sq: float,
    pathloss_dl: float,
) -> float:
    """Downlink rate with imperfect CSI and residual UE self-interference.

    log2(1 + (1-tau^2) P_b |h_hat v|^2
              / (sigma_u^2 + sigma_ru^2 + tau^2 P_b g_dl ||v||^2))

    The ||v||^2 factor is kept explicit even though designed precoders
    are unit norm, so the expression stays correct under power loading.
    """
    signal = (1.0 - tau_sq) * p_b * abs(np.dot(h_ub_hat, v_b)) ** 2
    interference = tau_sq * p_b * pathloss_dl * float(np.sum(np.abs(v_b) ** 2))
    return math.log2(1.0 + signal / (sigma_u_sq + sigma_ru_sq + interference))


def rate_hd(
    p_b: float,
    h_ub_hat: np.ndarray,
    v_b: np.ndarray,
    tau_sq_hd: float,
    sigma_u_sq: float,
    pathloss_dl: float,
) -> float:
    """Per-symbol downlink rate of the half-duplex baseline.

    Same expression as the FD rate with no self-interference term; the
    HD node never transmits while receiving.
    """
    return rate_fd(p_b, h_ub_hat, v_b, tau_sq_hd, sigma_u_sq, 0.0, pathloss_dl)
