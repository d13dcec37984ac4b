import time
import numpy as np
from collections import Counter
from fdxsim.params import SystemParams, validate
from fdxsim.cancellation import PlacementStrategy
from fdxsim.montecarlo import simulate_packet, run_rng

base = validate(SystemParams())
print("lambda_b_dbm", base.lambda_b_dbm)

def stats(n_taps, p_b=40.0, p_u=5.0, runs=1000, strategy=PlacementStrategy.ROW_WISE):
    from dataclasses import replace
    p = validate(replace(base, n_taps=n_taps, p_b_dbm=p_b, p_u_dbm=p_u))
    recs = []
    alphas = Counter()
    t0 = time.time()
    for r in range(runs):
        s, d = simulate_packet(p, strategy, run_rng(1234, 0, r))
        recs.append(s)
        alphas[s.alpha_used] += 1
    dt = time.time() - t0
    fd = np.mean([s.rate_fd for s in recs])
    ideal = np.mean([s.rate_fd_ideal for s in recs])
    hd = np.mean([s.rate_hd_effective for s in recs])
    hd_raw = np.mean([s.rate_hd for s in recs])
    mse_fd = np.mean([s.mse_fd for s in recs])
    mse_hd = np.mean([s.mse_hd for s in recs])
    feas = np.mean([s.feasible_fd for s in recs])
    srb = np.mean([s.sigma_rb_sq for s in recs])
    return dict(n=n_taps, p_b=p_b, p_u=p_u, fd=fd, ideal=ideal, hd=hd, hd_raw=hd_raw,
                mse_fd=mse_fd, mse_hd=mse_hd, feas=feas, srb_over_noise=srb/p.noise_mw,
                alphas=dict(alphas), dt=dt)

print("=== P_b=40, P_u=5 (fig2 operating point) ===")
for n in (4, 8, 16):
    print(stats(n))

print("=== C5 region: P_b=40, P_u=15 and 20, N=8 and 16 ===")
for pu in (15.0, 20.0):
    for n in (8, 16):
        print(stats(n, p_u=pu, runs=600))

print("=== low power check P_b=10,20 N=16 ===")
for pb in (10.0, 20.0):
    print(stats(16, p_b=pb, runs=400))

print("=== MSE vs UL power at P_b=40 (fig3): N=4,8,16 at P_u=0,10,20 ===")
for pu in (0.0, 10.0, 20.0):
    row = {n: stats(n, p_u=pu, runs=600)["mse_fd"] for n in (4, 8, 16)}
    hd = stats(16, p_u=pu, runs=600)["mse_hd"]
    spread_db = 10*np.log10(max(row.values())/min(row.values()))
    print(pu, row, "hd", hd, "spread_dB", round(spread_db, 2))
