"""System parameters and unit conversions.

Single source of truth for the experiment configuration.  Everything
downstream works in linear units (milliwatts for powers, linear field
amplitudes for channels); dB/dBm appear only here and in reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace


class ParamsError(ValueError):
    """Raised when a parameter set violates one or more invariants."""


def dbm_to_mw(x: float) -> float:
    """Convert dBm to linear power in milliwatts."""
    return 10.0 ** (x / 10.0)


def mw_to_dbm(p: float) -> float:
    """Convert linear power in milliwatts to dBm. Requires p > 0."""
    if p <= 0.0:
        raise ValueError("power must be positive to express in dBm")
    return 10.0 * math.log10(p)


def db_to_linear(x: float) -> float:
    """Convert a dB ratio to a linear power ratio."""
    return 10.0 ** (x / 10.0)


def linear_to_db(r: float) -> float:
    """Convert a linear power ratio to dB. Requires r > 0."""
    if r <= 0.0:
        raise ValueError("ratio must be positive to express in dB")
    return 10.0 * math.log10(r)


def dynamic_range(adc_bits: int, papr_db: float) -> float:
    """Effective receiver dynamic range in dB for a given ADC.

    Uses 6.02 dB per effective bit with two bits lost to converter
    non-idealities, minus the signal PAPR headroom:

        DR = 6.02 * (adc_bits - 2) - papr_db

    A practical 14-bit converter driven by a 10 dB PAPR waveform then
    retains 62.24 dB of usable range.  The residual self-interference
    admissible at an RX chain input is the noise floor plus this range.
    """
    if adc_bits < 1:
        raise ValueError("adc_bits must be >= 1")
    return 6.02 * (adc_bits - 2) - papr_db


@dataclass(frozen=True)
class SystemParams:
    """Physical-layer constants for one experiment.

    Defaults are the reference operating point: a 4x4 full-duplex BS
    serving a single-antenna FD UE, 110 dB link pathloss, 40 dB
    self-interference pathloss with a 35 dB Rician K-factor, -110 dBm
    noise floors, a 14-bit ADC at 10 dB PAPR, 0.02 dB / 0.13 degree
    canceller tap steps and 50 dB digital cancellation.

    ``lambda_b_dbm``/``lambda_u_dbm`` are the RX saturation thresholds
    after analog cancellation.  Leave them ``None`` to derive both from
    the ADC dynamic range at validation time; explicit values are kept
    as given.
    """

    n_b: int = 4
    p_b_dbm: float = 40.0
    p_u_dbm: float = 5.0
    pathloss_dl_db: float = 110.0
    pathloss_ul_db: float = 110.0
    pathloss_si_bs_db: float = 40.0
    pathloss_si_ue_db: float = 40.0
    rician_k_db: float = 35.0
    noise_floor_dbm: float = -110.0
    adc_bits: int = 14
    papr_db: float = 10.0
    lambda_b_dbm: float | None = None
    lambda_u_dbm: float | None = None
    atten_step_db: float = 0.02
    phase_step_deg: float = 0.13
    digital_cancellation_db: float = 50.0
    t_packet: int = 400
    t_hd_pilots: int = 40
    n_taps: int = 16

    # -- linear-unit views ------------------------------------------------

    @property
    def p_b_mw(self) -> float:
        return dbm_to_mw(self.p_b_dbm)

    @property
    def p_u_mw(self) -> float:
        return dbm_to_mw(self.p_u_dbm)

    @property
    def noise_mw(self) -> float:
        return dbm_to_mw(self.noise_floor_dbm)

    @property
    def lambda_b_mw(self) -> float:
        if self.lambda_b_dbm is None:
            raise ParamsError("lambda_b_dbm unset; validate() derives it")
        return dbm_to_mw(self.lambda_b_dbm)

    @property
    def lambda_u_mw(self) -> float:
        if self.lambda_u_dbm is None:
            raise ParamsError("lambda_u_dbm unset; validate() derives it")
        return dbm_to_mw(self.lambda_u_dbm)

    @property
    def gain_dl(self) -> float:
        """Linear per-entry power gain of the DL channel."""
        return db_to_linear(-self.pathloss_dl_db)

    @property
    def gain_ul(self) -> float:
        return db_to_linear(-self.pathloss_ul_db)

    @property
    def gain_si_bs(self) -> float:
        return db_to_linear(-self.pathloss_si_bs_db)

    @property
    def gain_si_ue(self) -> float:
        return db_to_linear(-self.pathloss_si_ue_db)


_INT_FIELDS = ("n_b", "adc_bits", "t_packet", "t_hd_pilots", "n_taps")
_FLOAT_FIELDS = (
    "p_b_dbm", "p_u_dbm", "pathloss_dl_db", "pathloss_ul_db",
    "pathloss_si_bs_db", "pathloss_si_ue_db", "rician_k_db",
    "noise_floor_dbm", "papr_db", "atten_step_db", "phase_step_deg",
    "digital_cancellation_db",
)


def validate(params: SystemParams) -> SystemParams:
    """Check every invariant; return a fully-populated parameter set.

    Unset saturation thresholds are derived from the ADC dynamic range
    (threshold = noise floor + dynamic range, with the UE mirroring the
    BS hardware).  Raises :class:`ParamsError` naming each violated
    invariant otherwise.  Idempotent on its own output.
    """
    errors = []

    for name in _INT_FIELDS:
        value = getattr(params, name)
        if not isinstance(value, int) or isinstance(value, bool) or value < 1:
            errors.append(f"{name} must be a positive integer, got {value!r}")
    for name in _FLOAT_FIELDS:
        value = getattr(params, name)
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            errors.append(f"{name} must be finite, got {value!r}")
    for name in ("lambda_b_dbm", "lambda_u_dbm"):
        value = getattr(params, name)
        if value is not None and not (
            isinstance(value, (int, float)) and math.isfinite(value)
        ):
            errors.append(f"{name} must be finite or unset, got {value!r}")

    if not errors:
        if params.atten_step_db < 0.0:
            errors.append("atten_step_db must be >= 0")
        if params.phase_step_deg < 0.0:
            errors.append("phase_step_deg must be >= 0")
        if params.t_hd_pilots >= params.t_packet:
            errors.append(
                "HD pilots must leave data symbols "
                f"(t_hd_pilots={params.t_hd_pilots} >= t_packet={params.t_packet})"
            )
        if params.n_taps > params.n_b ** 2:
            errors.append(
                f"tap budget exceeds n_b**2 (n_taps={params.n_taps} > {params.n_b ** 2})"
            )

    if errors:
        raise ParamsError("invalid parameters:\n  " + "\n  ".join(errors))

    updates = {}
    if params.lambda_b_dbm is None:
        updates["lambda_b_dbm"] = params.noise_floor_dbm + dynamic_range(
            params.adc_bits, params.papr_db
        )
    if params.lambda_u_dbm is None:
        # same ADC assumption at the UE unless configured otherwise
        updates["lambda_u_dbm"] = updates.get("lambda_b_dbm", params.lambda_b_dbm)
    return replace(params, **updates) if updates else params


_FIELD_NAMES = frozenset(f.name for f in fields(SystemParams))


def from_mapping(mapping: dict) -> SystemParams:
    """Build validated params from a config mapping.

    Keys mirror :class:`SystemParams` field names exactly; unknown keys
    are an error so typos cannot silently fall back to defaults.
    """
    unknown = sorted(set(mapping) - _FIELD_NAMES)
    if unknown:
        raise ParamsError(f"unknown parameter keys: {', '.join(unknown)}")
    return validate(SystemParams(**mapping))
