"""Expected local time from the density series, checked by simulation."""

import math

import numpy as np

from risklt import (
    ExponentialClaims,
    ModelParams,
    compound_cdf,
    compound_density,
    expected_local_time,
    integrate_against_expected_local_time,
    mc_expected_local_time_grid,
)

params = ModelParams(x0=4.0, c=1.1, alpha=1.0, claims=ExponentialClaims(beta=1.0))

# Density of the aggregate claim amount at t = 1.
u = np.array([0.1, 0.5, 1.0, 2.0, 4.0])
print("f(u, 1)     :", np.round(compound_density(u, 1.0, 1.0, 1.0), 6))
print("P(S_1 <= u) :", [round(compound_cdf(v, 1.0, 1.0, 1.0), 6) for v in u])

# Only claim-containing paths enter the density part; the no-claim branch
# adds the rest of the occupation time.
cont = integrate_against_expected_local_time(params, 1.0).value
full = integrate_against_expected_local_time(params, 1.0, include_singular=True).value
print(f"\nint E[L_1] dx: {cont:.10f} (e^-1 = {math.exp(-1):.10f}), with no-claim branch {full:.10f}")

xs = [2.0, 3.0, 3.9, 4.5, 5.0]
mc = mc_expected_local_time_grid(params, 1.0, xs, n_paths=20_000, master_seed=1, threads=4)
print("\n    x   analytic    MC mean    MC s.e.")
for x, est in zip(xs, mc):
    ref = expected_local_time(params, 1.0, x, include_singular=True).value
    print(f"{x:5.1f} {ref:10.6f} {est.mean:10.6f} {est.std_error:10.6f}")

# Exactly at x0 a path sits on the level at time 0, and the pathwise value is
# the average of the two one-sided limits of the curve above.
lo = expected_local_time(params, 1.0, 4.0, include_singular=True).value
hi = lo + 1.0 / params.c
at_x0 = mc_expected_local_time_grid(params, 1.0, [4.0], n_paths=20_000, master_seed=1, threads=4)[0]
print(f"\nat x0: MC {at_x0.mean:.4f} +- {at_x0.std_error:.4f}, one-sided mean {(lo + hi) / 2:.4f}")
