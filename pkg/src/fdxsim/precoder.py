"""Joint precoder / canceller design under RX saturation constraints.

The downlink precoder is searched over nested subspaces spanned by the
right-singular vectors of the post-analog-cancellation SI matrix,
starting from the full space and shedding the strongest interference
directions until every BS receive chain stays below its saturation
threshold.  Within the accepted subspace the precoder is the matched
filter for the estimated downlink channel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cancellation import (
    CancellerConfig,
    PlacementStrategy,
    build_canceller,
    residual_si_power_bs,
    residual_si_power_ue,
)
from .channel import ChannelSet
from .params import SystemParams


def right_singular_basis(m: np.ndarray) -> np.ndarray:
    """Right-singular vectors of m as columns, descending singular value.

    The returned basis is orthonormal; for degenerate singular values
    any valid orthonormal completion may be produced.
    """
    if not np.all(np.isfinite(m.view(float))):
        raise ValueError("matrix entries must be finite")
    _, _, vh = np.linalg.svd(m)
    return vh.conj().T


@dataclass(frozen=True)
class DesignOutput:
    """Accepted precoder and canceller set for one realization.

    ``alpha_used`` is the subspace dimension at which the constraints
    were met; the sentinel n_b + 1 means the search fell through to the
    single weakest-direction column (whether or not that final try was
    feasible).  ``sigma_rb_sq``/``sigma_ru_sq`` are the residual SI
    powers after both cancellation stages at the BS and UE.
    """

    v_b: np.ndarray
    canceller: CancellerConfig
    alpha_used: int
    feasible: bool
    sigma_rb_sq: float
    sigma_ru_sq: float


def _subspace_matched_filter(q_b: np.ndarray, h_ub_hat: np.ndarray, alpha: int) -> np.ndarray:
    """Matched filter restricted to the alpha weakest singular directions."""
    n_b = q_b.shape[0]
    f_b = q_b[:, n_b - alpha:]
    g_b = (h_ub_hat @ f_b).conj()
    norm = np.linalg.norm(g_b)
    if norm == 0.0:
        # estimate orthogonal to the subspace; any unit vector inside it
        # is rate-equivalent, take the weakest direction
        return q_b[:, -1].copy()
    return f_b @ (g_b / norm)


def design(
    channels: ChannelSet,
    h_ub_hat: np.ndarray,
    params: SystemParams,
    strategy: PlacementStrategy,
) -> DesignOutput:
    """Run the full design for one channel realization.

    Builds the canceller from the SI estimates, then walks the subspace
    dimension alpha from n_b down to 2, accepting the first matched
    filter whose per-chain residual at the BS respects the saturation
    threshold.  If no alpha passes, the weakest right-singular direction
    is tried as a last resort.  The UE threshold does not depend on the
    precoder, so it is checked once up front; infeasibility is reported
    in the output, never raised.
    """
    canceller = build_canceller(channels.h_bb_hat, channels.h_uu_hat, params, strategy)
    residual_matrix = channels.h_bb_hat + canceller.c_b
    q_b = right_singular_basis(residual_matrix)

    p_b = params.p_b_mw
    lambda_b = params.lambda_b_mw
    ue_ok = (
        params.p_u_mw * abs(channels.h_uu_hat + canceller.c_u) ** 2
        <= params.lambda_u_mw
    )

    v_b = None
    alpha_used = params.n_b + 1
    feasible = False
    if ue_ok:
        for alpha in range(params.n_b, 1, -1):
            candidate = _subspace_matched_filter(q_b, h_ub_hat, alpha)
            per_chain = p_b * np.abs(residual_matrix @ candidate) ** 2
            if np.all(per_chain <= lambda_b):
                v_b = candidate
                alpha_used = alpha
                feasible = True
                break
    if v_b is None:
        # last resort: the single weakest singular direction
        v_b = q_b[:, -1].copy()
        if ue_ok:
            per_chain = p_b * np.abs(residual_matrix @ v_b) ** 2
            feasible = bool(np.all(per_chain <= lambda_b))

    # physical residuals use the true channels; they coincide with the
    # estimate-based ones under perfect SI CSI
    _, sigma_rb_sq = residual_si_power_bs(
        channels.h_bb, canceller.c_b, canceller.d_b, v_b,
        p_b, params.digital_cancellation_db,
    )
    _, sigma_ru_sq = residual_si_power_ue(
        channels.h_uu, canceller.c_u, canceller.d_u,
        params.p_u_mw, params.digital_cancellation_db,
    )
    return DesignOutput(
        v_b=v_b,
        canceller=canceller,
        alpha_used=alpha_used,
        feasible=feasible,
        sigma_rb_sq=sigma_rb_sq,
        sigma_ru_sq=sigma_ru_sq,
    )
