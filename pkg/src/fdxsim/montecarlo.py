"""Seeded Monte Carlo sweeps over power and tap-count grids.

Every (sweep point, run) pair owns an independent generator derived from
``(master seed, point index, run index)``, so results are a pure
function of the sweep specification: execution order and worker count
cannot change a single byte of the output.  Within a run the draw order
is fixed (channels, FD estimation error, HD estimation error), so all
schemes and tap budgets sharing a seed see identical fading.
"""

from __future__ import annotations

import enum
import json
import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np

from .cancellation import PlacementStrategy
from .channel import draw_channel_set
from .estimation import couple_with_error, draw_error_vector, tau_sq_fd, tau_sq_hd
from .link import RateSample, rate_fd, rate_hd
from .params import SystemParams, validate
from .precoder import DesignOutput, design

CSV_SCHEMA = "fdxsim sweep schema v1"
CSV_COLUMNS = (
    "variable", "value", "scheme", "mean_rate", "stderr_rate",
    "mean_mse", "stderr_mse", "feasible_frac", "n_runs",
)


class SweepVariable(str, enum.Enum):
    DL_POWER_DBM = "dl_power_dbm"
    UL_POWER_DBM = "ul_power_dbm"
    TAP_COUNT = "n_taps"


class Scheme(str, enum.Enum):
    FD = "fd"
    FD_IDEAL_CSI = "fd_ideal"
    HD = "hd"


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: a variable, its grid, and the schemes to aggregate."""

    variable: SweepVariable
    values: tuple
    n_runs: int
    base: SystemParams
    strategy: PlacementStrategy
    schemes: tuple
    seed: int

    def point_params(self, value) -> SystemParams:
        if self.variable is SweepVariable.DL_POWER_DBM:
            return replace(self.base, p_b_dbm=float(value))
        if self.variable is SweepVariable.UL_POWER_DBM:
            return replace(self.base, p_u_dbm=float(value))
        return validate(replace(self.base, n_taps=int(value)))


def check_spec(spec: SweepSpec) -> SweepSpec:
    if len(spec.values) == 0:
        raise ValueError("sweep values must be non-empty")
    if any(b <= a for a, b in zip(spec.values, spec.values[1:])):
        raise ValueError("sweep values must be strictly increasing")
    if spec.n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    if not 0 <= spec.seed < 2 ** 64:
        raise ValueError("seed must fit in 64 unsigned bits")
    if not spec.schemes:
        raise ValueError("at least one scheme is required")
    validate(spec.base)
    for value in spec.values:
        spec.point_params(value)
    return spec


def scheme_label(scheme: Scheme, spec: SweepSpec) -> str:
    """Series name used in the CSV scheme column.

    FD-family series carry the tap budget (fd_n16, fd_ideal_n16) except
    on tap-count sweeps, where the budget is the x-axis itself.  The HD
    baseline has no taps and keeps its bare name.
    """
    if scheme is Scheme.HD or spec.variable is SweepVariable.TAP_COUNT:
        return scheme.value
    return f"{scheme.value}_n{spec.base.n_taps}"


@dataclass(frozen=True)
class PacketSample:
    """All per-realization outcomes needed by any scheme."""

    rate_fd: float
    rate_fd_ideal: float
    rate_hd: float
    rate_hd_effective: float
    mse_fd: float
    mse_hd: float
    feasible_fd: bool
    feasible_ideal: bool
    sigma_rb_sq: float
    sigma_ru_sq: float
    alpha_used: int


def simulate_packet(
    params: SystemParams,
    strategy: PlacementStrategy,
    rng: np.random.Generator,
) -> tuple[PacketSample, DesignOutput]:
    """One end-to-end packet: channels, design, estimation, rates.

    The estimation error power depends on the residual SI, which depends
    on the precoder, which needs the channel estimate.  The loop is
    broken in two passes: pass 1 designs on the true downlink channel
    purely to fix the residual SI and the error power; pass 2 redesigns
    on the coupled noisy estimate and is the design actually reported,
    with its residual recomputed.  Pass 1 doubles as the ideal-CSI
    scheme.  A realization whose design violates the saturation
    thresholds transmits nothing: rate 0, estimation MSE 1.
    """
    cs = draw_channel_set(params, rng)
    e_fd = draw_error_vector(params.n_b, rng, params.gain_dl)
    e_hd = draw_error_vector(params.n_b, rng, params.gain_dl)

    noise = params.noise_mw
    pass1 = design(cs, cs.h_ub, params, strategy)

    if pass1.feasible:
        ideal_rate = rate_fd(
            params.p_b_mw, cs.h_ub, pass1.v_b, 0.0,
            noise, pass1.sigma_ru_sq, params.gain_dl,
        )
    else:
        ideal_rate = 0.0

    tau2 = tau_sq_fd(
        params.p_u_mw, cs.h_ub, noise, pass1.sigma_rb_sq, params.t_packet
    )
    reported = pass1
    fd_rate_val = 0.0
    mse_fd = 1.0
    if pass1.feasible and tau2 < 1.0:
        est = couple_with_error(cs.h_ub, tau2, e_fd)
        pass2 = design(cs, est.h_ub_hat, params, strategy)
        reported = pass2
        if pass2.feasible:
            fd_rate_val = rate_fd(
                params.p_b_mw, est.h_ub_hat, pass2.v_b, tau2,
                noise, pass2.sigma_ru_sq, params.gain_dl,
            )
            mse_fd = tau2

    tau2_hd = tau_sq_hd(params.p_u_mw, cs.h_bu, noise, params.t_hd_pilots)
    if tau2_hd < 1.0:
        est_hd = couple_with_error(cs.h_ub, tau2_hd, e_hd)
        v_hd = est_hd.h_ub_hat.conj() / np.linalg.norm(est_hd.h_ub_hat)
        hd_rate_val = rate_hd(
            params.p_b_mw, est_hd.h_ub_hat, v_hd, tau2_hd, noise, params.gain_dl
        )
    else:
        hd_rate_val = 0.0
    duty = (params.t_packet - params.t_hd_pilots) / params.t_packet

    sample = PacketSample(
        rate_fd=fd_rate_val,
        rate_fd_ideal=ideal_rate,
        rate_hd=hd_rate_val,
        rate_hd_effective=duty * hd_rate_val,
        mse_fd=mse_fd,
        mse_hd=tau2_hd,
        feasible_fd=reported.feasible,
        feasible_ideal=pass1.feasible,
        sigma_rb_sq=reported.sigma_rb_sq,
        sigma_ru_sq=reported.sigma_ru_sq,
        alpha_used=reported.alpha_used,
    )
    return sample, reported


def run_single(
    params: SystemParams,
    strategy: PlacementStrategy,
    rng: np.random.Generator,
) -> tuple[RateSample, DesignOutput]:
    """Spec-level view of one realization (FD plus HD baseline)."""
    sample, design_out = simulate_packet(params, strategy, rng)
    rates = RateSample(
        rate_fd_bps_hz=sample.rate_fd,
        rate_hd_bps_hz=sample.rate_hd,
        rate_hd_effective=sample.rate_hd_effective,
        mse_fd=sample.mse_fd,
        mse_hd=sample.mse_hd,
    )
    return rates, design_out


def run_rng(seed: int, point_index: int, run_index: int) -> np.random.Generator:
    """Independent substream for one (point, run) pair."""
    return np.random.default_rng([seed, point_index, run_index])


@dataclass(frozen=True)
class PointStats:
    """Aggregated statistics for one sweep point and scheme."""

    value: float
    scheme: str
    mean_rate: float
    stderr_rate: float
    mean_mse: float
    stderr_mse: float
    feasible_frac: float
    n_runs: int
    mean_rate_feasible: float | None
    mean_rate_per_symbol: float


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    rows: tuple


def _mean_stderr(x: np.ndarray) -> tuple[float, float]:
    mean = float(np.mean(x))
    if x.size < 2:
        return mean, 0.0
    return mean, float(np.std(x, ddof=1) / math.sqrt(x.size))


def _aggregate_point(
    spec: SweepSpec, value, samples: list[PacketSample]
) -> list[PointStats]:
    rows = []
    n = len(samples)
    for scheme in spec.schemes:
        if scheme is Scheme.FD:
            rates = np.array([s.rate_fd for s in samples])
            mses = np.array([s.mse_fd for s in samples])
            feas = np.array([s.feasible_fd for s in samples])
        elif scheme is Scheme.FD_IDEAL_CSI:
            rates = np.array([s.rate_fd_ideal for s in samples])
            mses = np.zeros(n)
            feas = np.array([s.feasible_ideal for s in samples])
        else:
            rates = np.array([s.rate_hd_effective for s in samples])
            mses = np.array([s.mse_hd for s in samples])
            feas = np.ones(n, dtype=bool)

        mean_rate, stderr_rate = _mean_stderr(rates)
        mean_mse, stderr_mse = _mean_stderr(mses)
        feasible_only = (
            float(np.mean(rates[feas])) if np.any(feas) else None
        )
        per_symbol = (
            float(np.mean([s.rate_hd for s in samples]))
            if scheme is Scheme.HD
            else mean_rate
        )
        rows.append(
            PointStats(
                value=value,
                scheme=scheme_label(scheme, spec),
                mean_rate=mean_rate,
                stderr_rate=stderr_rate,
                mean_mse=mean_mse,
                stderr_mse=stderr_mse,
                feasible_frac=float(np.mean(feas)),
                n_runs=n,
                mean_rate_feasible=feasible_only,
                mean_rate_per_symbol=per_symbol,
            )
        )
    return rows


def _run_block(spec: SweepSpec, point_index: int, start: int, stop: int):
    params = spec.point_params(spec.values[point_index])
    out = []
    for run_index in range(start, stop):
        rng = run_rng(spec.seed, point_index, run_index)
        sample, _ = simulate_packet(params, spec.strategy, rng)
        out.append(sample)
    return point_index, start, out


def resolve_workers(workers: int | None) -> int:
    """Worker count, capped by the FDXSIM_THREADS environment variable."""
    cap = int(os.environ.get("FDXSIM_THREADS", "1"))
    if workers is None:
        workers = cap
    return max(1, min(workers, cap) if cap >= 1 else workers)


def run_sweep(spec: SweepSpec, workers: int | None = None) -> SweepResult:
    """Run every (point, run) realization and aggregate per scheme.

    Aggregation accumulates per-run samples keyed by explicit indices,
    so the result is byte-identical for any worker count.  Infeasible
    runs enter the mean as rate 0 / MSE 1; the feasible-only mean is
    kept alongside so either averaging convention can be inspected.
    """
    check_spec(spec)
    workers = resolve_workers(workers)

    per_point: dict[int, dict[int, list[PacketSample]]] = {
        i: {} for i in range(len(spec.values))
    }
    blocks = []
    chunk = max(1, math.ceil(spec.n_runs / max(1, workers * 4)))
    for point_index in range(len(spec.values)):
        for start in range(0, spec.n_runs, chunk):
            blocks.append((point_index, start, min(start + chunk, spec.n_runs)))

    if workers > 1 and len(blocks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_run_block, spec, p, a, b) for p, a, b in blocks
            ]
            for fut in futures:
                point_index, start, samples = fut.result()
                per_point[point_index][start] = samples
    else:
        for p, a, b in blocks:
            point_index, start, samples = _run_block(spec, p, a, b)
            per_point[point_index][start] = samples

    rows = []
    for point_index, value in enumerate(spec.values):
        samples: list[PacketSample] = []
        for start in sorted(per_point[point_index]):
            samples.extend(per_point[point_index][start])
        rows.extend(_aggregate_point(spec, value, samples))
    return SweepResult(spec=spec, rows=tuple(rows))


# -- output files ---------------------------------------------------------


def _atomic_write(path: str, text: str) -> None:
    # never leave a half-written file behind on failure
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".fdxsim-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _format_number(x) -> str:
    if isinstance(x, bool):
        raise TypeError("no boolean columns")
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def results_to_csv(results: list[SweepResult]) -> str:
    """Render one or more sweeps over the same variable as CSV text."""
    variables = {r.spec.variable for r in results}
    if len(variables) != 1:
        raise ValueError("cannot mix sweep variables in one CSV")
    variable = variables.pop().value
    lines = [f"# {CSV_SCHEMA}", ",".join(CSV_COLUMNS)]
    for result in results:
        for row in result.rows:
            lines.append(
                ",".join(
                    (
                        variable,
                        _format_number(row.value),
                        row.scheme,
                        _format_number(row.mean_rate),
                        _format_number(row.stderr_rate),
                        _format_number(row.mean_mse),
                        _format_number(row.stderr_mse),
                        _format_number(row.feasible_frac),
                        str(row.n_runs),
                    )
                )
            )
    return "\n".join(lines) + "\n"


def _spec_payload(spec: SweepSpec) -> dict:
    return {
        "variable": spec.variable.value,
        "values": list(spec.values),
        "n_runs": spec.n_runs,
        "seed": spec.seed,
        "strategy": spec.strategy.value,
        "schemes": [s.value for s in spec.schemes],
        "base": asdict(spec.base),
    }


def results_to_json(results: list[SweepResult]) -> str:
    """Full-provenance JSON: every sweep spec plus extended statistics."""
    payload = {
        "schema": CSV_SCHEMA,
        "sweeps": [
            {
                "spec": _spec_payload(result.spec),
                "rows": [asdict(row) for row in result.rows],
            }
            for result in results
        ],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def write_csv(results: list[SweepResult], path: str) -> None:
    _atomic_write(path, results_to_csv(results))


def write_json(results: list[SweepResult], path: str) -> None:
    _atomic_write(path, results_to_json(results))
