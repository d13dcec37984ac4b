import math
from dataclasses import replace

import numpy as np
import pytest

from fdxsim.cancellation import (
    PlacementStrategy,
    build_canceller,
    canceller_record,
    place_taps,
    quantize_tap,
    residual_si_power_bs,
    residual_si_power_ue,
)
from fdxsim.params import SystemParams, validate

PAPER = validate(SystemParams())
IDEAL_TAPS = validate(SystemParams(atten_step_db=0.0, phase_step_deg=0.0))


def brute_force_largest(h, n_taps):
    # independent oracle: sort every position by amplitude, row-major on ties
    entries = sorted(
        ((r, c) for r in range(h.shape[0]) for c in range(h.shape[1])),
        key=lambda rc: (-abs(h[rc]), rc[0] * h.shape[1] + rc[1]),
    )
    return entries[:n_taps]


def test_largest_amplitude_matches_brute_force_exhaustively():
    rng = np.random.default_rng(21)
    for size in (1, 2, 3, 4):
        for _ in range(30):
            h = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
            for n in range(1, size * size + 1):
                assert place_taps(h, n, PlacementStrategy.LARGEST_AMPLITUDE) == \
                    brute_force_largest(h, n)


def test_largest_amplitude_tie_break_row_major():
    h = np.array([[4.0, 1.0], [3.0, 2.0]], dtype=complex)
    assert place_taps(h, 2, PlacementStrategy.LARGEST_AMPLITUDE) == [(0, 0), (1, 0)]
    # exact ties resolve in row-major order
    ones = np.ones((2, 2), dtype=complex)
    assert place_taps(ones, 3, PlacementStrategy.LARGEST_AMPLITUDE) == \
        [(0, 0), (0, 1), (1, 0)]


def test_full_budget_covers_all_positions():
    h = np.arange(16, dtype=float).reshape(4, 4) + 0j
    for strategy in PlacementStrategy:
        positions = place_taps(h, 16, strategy)
        assert sorted(positions) == [(r, c) for r in range(4) for c in range(4)]


def test_row_wise_fills_first_row():
    h = np.ones((4, 4), dtype=complex)
    assert place_taps(h, 4, PlacementStrategy.ROW_WISE) == \
        [(0, 0), (0, 1), (0, 2), (0, 3)]


def test_column_wise_fills_first_column():
    h = np.ones((4, 4), dtype=complex)
    assert place_taps(h, 4, PlacementStrategy.COLUMN_WISE) == \
        [(0, 0), (1, 0), (2, 0), (3, 0)]


def test_structured_placement_requires_divisibility():
    h = np.ones((4, 4), dtype=complex)
    with pytest.raises(ValueError, match="divisible"):
        place_taps(h, 6, PlacementStrategy.ROW_WISE)
    with pytest.raises(ValueError, match="divisible"):
        place_taps(h, 6, PlacementStrategy.COLUMN_WISE)


def test_place_taps_budget_bounds():
    h = np.ones((2, 2), dtype=complex)
    with pytest.raises(ValueError):
        place_taps(h, 0, PlacementStrategy.LARGEST_AMPLITUDE)
    with pytest.raises(ValueError):
        place_taps(h, 5, PlacementStrategy.LARGEST_AMPLITUDE)


def test_quantize_lattice_fixed_point():
    # magnitude -40.00 dB and phase 1.30 deg sit exactly on the lattice
    mag = 10.0 ** (-40.0 / 20.0)
    z = mag * np.exp(1j * math.radians(1.30))
    q = quantize_tap(complex(z), 0.02, 0.13)
    assert q == pytest.approx(complex(z), rel=1e-12)


def test_quantize_error_bounds_random():
    rng = np.random.default_rng(33)
    zs = (rng.standard_normal(100000) + 1j * rng.standard_normal(100000)) * 1e-2
    mags_db_err = []
    phase_deg_err = []
    for z in zs:
        q = quantize_tap(complex(z), 0.02, 0.13)
        mags_db_err.append(20 * math.log10(abs(q) / abs(z)))
        d = math.degrees(math.atan2(q.imag, q.real) - math.atan2(z.imag, z.real))
        phase_deg_err.append((d + 180.0) % 360.0 - 180.0)
    assert np.max(np.abs(mags_db_err)) <= 0.01 + 1e-9
    assert np.max(np.abs(phase_deg_err)) <= 0.065 + 1e-9


def test_quantize_zero_steps_identity():
    z = 0.123 - 0.456j
    assert quantize_tap(z, 0.0, 0.0) == pytest.approx(z, rel=1e-15)


def test_quantize_rejects_zero():
    with pytest.raises(ValueError):
        quantize_tap(0j, 0.02, 0.13)


def test_build_canceller_ideal_full_budget():
    rng = np.random.default_rng(4)
    h = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    cc = build_canceller(h, 1.0 + 1.0j, IDEAL_TAPS, PlacementStrategy.LARGEST_AMPLITUDE)
    np.testing.assert_allclose(cc.c_b, -h, rtol=1e-12)
    np.testing.assert_allclose(cc.d_b, 0.0, atol=1e-18)
    assert cc.c_u == pytest.approx(-(1.0 + 1.0j), rel=1e-12)
    assert cc.d_u == pytest.approx(0.0, abs=1e-15)


def test_build_canceller_siso_single_tap():
    p = validate(SystemParams(n_b=1, n_taps=1, atten_step_db=0.0, phase_step_deg=0.0))
    h = np.array([[0.3 - 0.7j]])
    cc = build_canceller(h, 0.1j, p, PlacementStrategy.LARGEST_AMPLITUDE)
    assert cc.c_b[0, 0] == pytest.approx(-h[0, 0], rel=1e-12)
    per_chain, total = residual_si_power_bs(
        h, cc.c_b, cc.d_b, np.array([1.0 + 0j]), 1.0, 50.0
    )
    assert per_chain[0] == pytest.approx(0.0, abs=1e-30)
    assert total == pytest.approx(0.0, abs=1e-30)


def test_build_canceller_row_wise_structure():
    p = validate(SystemParams(n_b=2, n_taps=2))
    rng = np.random.default_rng(10)
    h = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) * 1e-2
    cc = build_canceller(h, 1e-2 + 0j, p, PlacementStrategy.ROW_WISE)
    expected_row0 = [
        quantize_tap(-h[0, c], p.atten_step_db, p.phase_step_deg) for c in (0, 1)
    ]
    np.testing.assert_allclose(cc.c_b[0], expected_row0, rtol=1e-12)
    np.testing.assert_array_equal(cc.c_b[1], [0.0, 0.0])


def test_tap_count_matches_budget_for_every_strategy():
    rng = np.random.default_rng(15)
    for strategy in PlacementStrategy:
        for n in (4, 8, 12, 16):
            p = validate(SystemParams(n_taps=n))
            h = draw_si_like(rng)
            cc = build_canceller(h, 1e-2 + 0j, p, strategy)
            assert np.count_nonzero(cc.c_b) == n


def draw_si_like(rng):
    scatter = (rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    return 1e-2 * (np.ones((4, 4)) + 0.018 * scatter)


def test_quantized_taps_sit_on_lattice():
    rng = np.random.default_rng(16)
    cc = build_canceller(
        draw_si_like(rng), 1e-2 + 2e-3j, PAPER, PlacementStrategy.LARGEST_AMPLITUDE
    )
    taps = cc.c_b[np.nonzero(cc.c_b)]
    for t in taps:
        mag_db = 20 * math.log10(abs(t))
        phase_deg = math.degrees(math.atan2(t.imag, t.real))
        assert abs(mag_db / 0.02 - round(mag_db / 0.02)) < 1e-6
        assert abs(phase_deg / 0.13 - round(phase_deg / 0.13)) < 1e-6


def test_residual_bs_identity_channel():
    h = np.eye(4, dtype=complex)
    zero = np.zeros((4, 4), dtype=complex)
    v = np.array([1.0, 0, 0, 0], dtype=complex)
    per_chain, total = residual_si_power_bs(h, zero, zero, v, 1.0, 50.0)
    np.testing.assert_allclose(per_chain, [1.0, 0, 0, 0], atol=1e-30)
    assert total == pytest.approx(1.0)


def test_residual_bs_floor_binds_with_perfect_digital():
    rng = np.random.default_rng(2)
    h = draw_si_like(rng)
    cc = build_canceller(h, 1e-2 + 0j, PAPER, PlacementStrategy.ROW_WISE)
    v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    v /= np.linalg.norm(v)
    per_chain, total = residual_si_power_bs(h, cc.c_b, cc.d_b, v, 1e4, 50.0)
    after_analog = float(np.sum(per_chain))
    # perfect subtraction would leave zero; the floor keeps 1e-5 of it
    assert total == pytest.approx(after_analog * 1e-5, rel=1e-9)


def test_residual_floor_is_lower_bound():
    rng = np.random.default_rng(14)
    h = draw_si_like(rng)
    zero = np.zeros((4, 4), dtype=complex)
    for _ in range(50):
        v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        v /= np.linalg.norm(v)
        d = -(h * rng.uniform(0.0, 1.0))  # imperfect digital canceller
        per_chain, total = residual_si_power_bs(h, zero, d, v, 1e4, 50.0)
        assert total >= float(np.sum(per_chain)) / 1e5 - 1e-30


def test_residual_ue_ideal_tap():
    h_uu = 5e-3 - 2e-3j
    after_analog, after_digital = residual_si_power_ue(h_uu, -h_uu, 0j, 3.16, 50.0)
    assert after_analog == 0.0
    assert after_digital == 0.0


def test_residual_ue_quantized_tap_bound():
    rng = np.random.default_rng(19)
    rel_bound = (10 ** (0.01 / 20) - 1) ** 2 + math.radians(0.065) ** 2
    for _ in range(200):
        h_uu = complex(*rng.standard_normal(2)) * 1e-2
        c_u = quantize_tap(-h_uu, 0.02, 0.13)
        after_analog, _ = residual_si_power_ue(h_uu, c_u, -(h_uu + c_u), 3.16, 50.0)
        assert after_analog <= 3.16 * abs(h_uu) ** 2 * rel_bound * 1.01


def test_residual_ue_floor():
    after_analog, after_digital = residual_si_power_ue(1e-2 + 0j, 0j, -1e-2 + 0j, 1.0, 50.0)
    assert after_analog == pytest.approx(1e-4)
    assert after_digital >= after_analog * 1e-5 - 1e-30


def test_exact_zero_residual_full_budget_no_quantization():
    rng = np.random.default_rng(23)
    h = draw_si_like(rng)
    cc = build_canceller(h, 1e-2 + 0j, IDEAL_TAPS, PlacementStrategy.LARGEST_AMPLITUDE)
    v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    v /= np.linalg.norm(v)
    per_chain, total = residual_si_power_bs(h, cc.c_b, cc.d_b, v, 1e4, 50.0)
    assert float(np.sum(per_chain)) <= 1e-20 * 1e4
    assert total <= 1e-20 * 1e4


def test_canceller_record_layout():
    rng = np.random.default_rng(27)
    cc = build_canceller(
        draw_si_like(rng), 1e-2 + 0j, PAPER, PlacementStrategy.ROW_WISE
    )
    rec = canceller_record(cc, run_index=3)
    assert rec["run"] == 3
    assert rec["strategy"] == "row_wise"
    assert rec["n_taps"] == 16
    assert len(rec["c_b"]) == 32 and len(rec["d_b"]) == 32
    assert rec["c_b"][0] == cc.c_b[0, 0].real
    assert rec["c_u"] == [cc.c_u.real, cc.c_u.imag]


def test_mean_residual_monotone_in_tap_count():
    rng = np.random.default_rng(31)
    totals = {n: [] for n in range(1, 17)}
    for _ in range(500):
        h = draw_si_like(rng)
        v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        v /= np.linalg.norm(v)
        for n in range(1, 17):
            p = validate(SystemParams(n_taps=n))
            cc = build_canceller(h, 1e-2 + 0j, p, PlacementStrategy.LARGEST_AMPLITUDE)
            per_chain, _ = residual_si_power_bs(h, cc.c_b, cc.d_b, v, 1.0, 50.0)
            totals[n].append(float(np.sum(per_chain)))
    means = [np.mean(totals[n]) for n in range(1, 17)]
    for a, b in zip(means, means[1:]):
        assert b <= a * 1.0000001
