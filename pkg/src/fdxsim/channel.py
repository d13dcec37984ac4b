"""Fading channel generation for one packet.

One :class:`ChannelSet` holds a single block-fading realization of all
four channels: the BS self-interference matrix, the UE self-interference
scalar, the uplink vector and the reciprocal downlink vector.  Draws are
pure functions of the supplied generator, so identical seeds reproduce
identical channel sets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import SystemParams, db_to_linear


def draw_rayleigh(
    rows: int, cols: int, pathloss_db: float, rng: np.random.Generator
) -> np.ndarray:
    """IID circularly-symmetric complex Gaussian entries.

    Each entry has zero mean and power 10**(-pathloss_db/10).
    """
    if rows < 1 or cols < 1:
        raise ValueError("dimensions must be >= 1")
    gain = db_to_linear(-pathloss_db)
    scale = np.sqrt(gain / 2.0)
    re = rng.standard_normal((rows, cols))
    im = rng.standard_normal((rows, cols))
    return scale * (re + 1j * im)


def draw_rician(
    rows: int,
    cols: int,
    pathloss_db: float,
    k_db: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Rician fading with an all-ones line-of-sight component.

    Entries are sqrt(g*K/(K+1)) * 1 + sqrt(g/(K+1)) * CN(0, 1) with
    g = 10**(-pathloss_db/10) and K = 10**(k_db/10), so the total
    per-entry power is g regardless of K.  The unit-modulus all-ones
    LOS matrix is the simplest reproducible choice; nothing downstream
    depends on its specific phases.
    """
    gain = db_to_linear(-pathloss_db)
    k = db_to_linear(k_db)
    los = np.sqrt(gain * k / (k + 1.0)) * np.ones((rows, cols), dtype=complex)
    scatter = draw_rayleigh(rows, cols, pathloss_db, rng) / np.sqrt(k + 1.0)
    return los + scatter


@dataclass(frozen=True)
class ChannelSet:
    """One realization of all four channels plus the SI-channel estimates.

    ``h_bu`` is the uplink vector and ``h_ub`` the downlink vector; the
    two are tied by reciprocity, entry for entry.  SI estimates equal
    the true channels unless an estimation-error knob was applied.
    """

    h_bb: np.ndarray   # (n_b, n_b) BS self-interference
    h_uu: complex      # UE self-interference
    h_bu: np.ndarray   # (n_b,) uplink
    h_ub: np.ndarray   # (n_b,) downlink, reciprocal to h_bu
    h_bb_hat: np.ndarray
    h_uu_hat: complex


def draw_channel_set(
    params: SystemParams,
    rng: np.random.Generator,
    si_error: float = 0.0,
) -> ChannelSet:
    """Draw one block-fading realization.

    ``si_error`` adds an independent complex-Gaussian perturbation of
    variance si_error * (SI pathloss gain) per entry to the SI-channel
    estimates, for sensitivity studies; the default is perfect SI CSI.
    Draw order is fixed (h_bb, h_uu, h_bu, then perturbations) so that
    scheme variants sharing a seed see identical channels.
    """
    n_b = params.n_b
    h_bb = draw_rician(n_b, n_b, params.pathloss_si_bs_db, params.rician_k_db, rng)
    h_uu = complex(
        draw_rician(1, 1, params.pathloss_si_ue_db, params.rician_k_db, rng)[0, 0]
    )
    h_bu = draw_rayleigh(n_b, 1, params.pathloss_ul_db, rng)[:, 0]
    h_ub = h_bu.copy()

    if si_error > 0.0:
        err_bb = draw_rayleigh(n_b, n_b, params.pathloss_si_bs_db, rng)
        err_uu = draw_rayleigh(1, 1, params.pathloss_si_ue_db, rng)[0, 0]
        h_bb_hat = h_bb + np.sqrt(si_error) * err_bb
        h_uu_hat = h_uu + complex(np.sqrt(si_error) * err_uu)
    else:
        h_bb_hat = h_bb.copy()
        h_uu_hat = h_uu

    return ChannelSet(
        h_bb=h_bb, h_uu=h_uu, h_bu=h_bu, h_ub=h_ub,
        h_bb_hat=h_bb_hat, h_uu_hat=h_uu_hat,
    )


def _flatten_complex(a: np.ndarray) -> list[float]:
    out: list[float] = []
    for z in np.asarray(a, dtype=complex).ravel():
        out.extend((float(z.real), float(z.imag)))
    return out


def channel_record(cs: ChannelSet, run_index: int) -> dict:
    """Flatten a realization into a plain dict for regression dumps.

    Complex entries appear as (re, im) pairs in row-major order, one
    record per realization.
    """
    return {
        "run": int(run_index),
        "h_bb": _flatten_complex(cs.h_bb),
        "h_uu": _flatten_complex(np.array([cs.h_uu])),
        "h_bu": _flatten_complex(cs.h_bu),
        "h_ub": _flatten_complex(cs.h_ub),
    }
