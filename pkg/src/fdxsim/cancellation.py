"""Analog and digital self-interference cancellers.

The analog canceller at the BS is a budget of N hardware taps placed
inside an n_b x n_b matrix; each tap realizes the negated estimated SI
entry, quantized to the attenuator/phase-shifter lattice.  The digital
canceller subtracts whatever the analog stage left behind, limited to a
finite suppression.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .params import SystemParams, db_to_linear


class PlacementStrategy(str, enum.Enum):
    """How the N analog taps are assigned to matrix positions."""

    LARGEST_AMPLITUDE = "largest_amplitude"
    ROW_WISE = "row_wise"
    COLUMN_WISE = "column_wise"


@dataclass(frozen=True)
class CancellerConfig:
    """Analog taps, digital cancellers and the placement that built them."""

    c_b: np.ndarray     # (n_b, n_b), exactly n_taps nonzero entries
    c_u: complex
    d_b: np.ndarray     # (n_b, n_b)
    d_u: complex
    strategy: PlacementStrategy
    n_taps: int


def place_taps(
    h_bb_hat: np.ndarray, n_taps: int, strategy: PlacementStrategy
) -> list[tuple[int, int]]:
    """Choose the matrix positions that receive the N analog taps.

    LARGEST_AMPLITUDE takes the n_taps largest |entry| positions, ties
    broken by row-major order.  ROW_WISE/COLUMN_WISE fill whole rows or
    columns from the first onward and therefore require n_taps to be a
    multiple of the antenna count.
    """
    rows, cols = h_bb_hat.shape
    if not 1 <= n_taps <= rows * cols:
        raise ValueError(f"n_taps must be in [1, {rows * cols}], got {n_taps}")

    if strategy is PlacementStrategy.LARGEST_AMPLITUDE:
        flat = -np.abs(h_bb_hat).ravel()
        order = np.argsort(flat, kind="stable")  # stable keeps row-major tie order
        return [divmod(int(i), cols) for i in order[:n_taps]]
    if strategy is PlacementStrategy.ROW_WISE:
        if n_taps % cols != 0:
            raise ValueError(
                f"row-wise placement needs n_taps divisible by {cols}, got {n_taps}"
            )
        return [divmod(i, cols) for i in range(n_taps)]
    if strategy is PlacementStrategy.COLUMN_WISE:
        if n_taps % rows != 0:
            raise ValueError(
                f"column-wise placement needs n_taps divisible by {rows}, got {n_taps}"
            )
        return [(i % rows, i // rows) for i in range(n_taps)]
    raise ValueError(f"unknown strategy {strategy!r}")


def _round_half_away(x: float) -> float:
    # np.round / builtin round are banker's rounding; hardware grids snap
    # half-steps away from zero.
    return math.copysign(math.floor(abs(x) + 0.5), x)


def quantize_tap(ideal: complex, atten_step_db: float, phase_step_deg: float) -> complex:
    """Snap a tap value onto the attenuation/phase hardware lattice.

    Magnitude is rounded in the 20*log10 domain to the nearest multiple
    of ``atten_step_db``; phase to the nearest multiple of
    ``phase_step_deg``.  A step of 0 leaves that component untouched.
    Zero input is rejected: zero entries come from placement, never from
    a tap.
    """
    if ideal == 0:
        raise ValueError("cannot quantize a zero tap value")
    if atten_step_db <= 0.0 and phase_step_deg <= 0.0:
        return complex(ideal)  # ideal hardware: keep the value bit-exact
    mag_db = 20.0 * math.log10(abs(ideal))
    if atten_step_db > 0.0:
        mag_db = _round_half_away(mag_db / atten_step_db) * atten_step_db
    phase_deg = math.degrees(math.atan2(ideal.imag, ideal.real))
    if phase_step_deg > 0.0:
        phase_deg = _round_half_away(phase_deg / phase_step_deg) * phase_step_deg
    mag = 10.0 ** (mag_db / 20.0)
    phase = math.radians(phase_deg)
    return complex(mag * math.cos(phase), mag * math.sin(phase))


def build_canceller(
    h_bb_hat: np.ndarray,
    h_uu_hat: complex,
    params: SystemParams,
    strategy: PlacementStrategy,
) -> CancellerConfig:
    """Construct analog taps and digital cancellers from the SI estimates.

    Each placed tap holds the quantized negative of the estimated entry;
    the digital cancellers subtract the full remaining estimated SI.
    """
    positions = place_taps(h_bb_hat, params.n_taps, strategy)
    c_b = np.zeros_like(h_bb_hat)
    for r, c in positions:
        c_b[r, c] = quantize_tap(
            -h_bb_hat[r, c], params.atten_step_db, params.phase_step_deg
        )
    c_u = quantize_tap(-h_uu_hat, params.atten_step_db, params.phase_step_deg)
    d_b = -(h_bb_hat + c_b)
    d_u = -(h_uu_hat + c_u)
    return CancellerConfig(
        c_b=c_b, c_u=c_u, d_b=d_b, d_u=d_u, strategy=strategy, n_taps=params.n_taps
    )


def canceller_record(cc: CancellerConfig, run_index: int) -> dict:
    """Flatten a canceller set into the regression dump-record layout.

    Same convention as the channel dump: complex entries become (re, im)
    pairs in row-major order, one record per realization.
    """
    def flat(a):
        out = []
        for z in np.asarray(a, dtype=complex).ravel():
            out.extend((float(z.real), float(z.imag)))
        return out

    return {
        "run": int(run_index),
        "strategy": cc.strategy.value,
        "n_taps": cc.n_taps,
        "c_b": flat(cc.c_b),
        "c_u": flat([cc.c_u]),
        "d_b": flat(cc.d_b),
        "d_u": flat([cc.d_u]),
    }


def residual_si_power_bs(
    h_bb: np.ndarray,
    c_b: np.ndarray,
    d_b: np.ndarray,
    v_b: np.ndarray,
    p_b: float,
    digital_db: float,
) -> tuple[np.ndarray, float]:
    """Residual SI powers at the BS receiver for a given precoder.

    Returns the per-chain powers after the analog stage (these face the
    saturation threshold) and the total power after digital cancellation.
    Digital subtraction is ideal in structure but its total suppression
    is capped at ``digital_db`` below the after-analog power, so the
    after-digital figure never falls under that floor.
    """
    after_analog_vec = (h_bb + c_b) @ v_b
    per_chain = p_b * np.abs(after_analog_vec) ** 2
    total_analog = float(np.sum(per_chain))
    subtracted = p_b * float(np.sum(np.abs((h_bb + c_b + d_b) @ v_b) ** 2))
    floor = total_analog / db_to_linear(digital_db)
    return per_chain, max(subtracted, floor)


def residual_si_power_ue(
    h_uu: complex,
    c_u: complex,
    d_u: complex,
    p_u: float,
    digital_db: float,
) -> tuple[float, float]:
    """Residual SI powers at the UE receiver (after analog, after digital)."""
    after_analog = p_u * abs(h_uu + c_u) ** 2
    subtracted = p_u * abs(h_uu + c_u + d_u) ** 2
    floor = after_analog / db_to_linear(digital_db)
    return after_analog, max(subtracted, floor)
