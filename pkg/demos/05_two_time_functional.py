"""Expected time the surplus is nonnegative now and does not fall over the next eps."""

import math

from risklt import (
    FIVE_TERM_CONFIG,
    ExponentialClaims,
    FixedSeries,
    ModelParams,
    NumericConfig,
    ProductIndicator,
    compound_cdf,
    mc_theorem2_lhs,
    theorem2_functional,
)

params = ModelParams(x0=4.0, c=1.1, alpha=1.0, claims=ExponentialClaims(beta=1.0))
t, eps = 1.0, 12.0
g = ProductIndicator.rectangle((0.0, math.inf), [(0.0, math.inf)])

five = theorem2_functional(params, t, eps, g, FIVE_TERM_CONFIG)
print(f"5-term series, claim paths only : {five.value:.6e}")

# Five terms cover only a small part of the Poisson(12) claim count, which is
# why the full series gives a much larger increment probability.
for n in (5, 20, 60):
    print(f"  P(X_eps - x0 >= 0) with {n:2d} terms: {compound_cdf(1.1 * eps, eps, 1.0, 1.0, NumericConfig(series=FixedSeries(n))):.6f}")

full = theorem2_functional(params, t, eps, g, NumericConfig(quad_rel_tol=1e-10), include_singular=True)
print(f"full series, all paths           : {full.value:.6f} (+-{full.err_estimate:.1e})")

est = mc_theorem2_lhs(params, t, eps, g, n_paths=20_000, master_seed=3, threads=4)
print(f"Monte Carlo, 20000 paths         : {est.mean:.6f} +- {est.std_error:.6f}")
