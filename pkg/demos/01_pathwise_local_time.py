"""Local time and level crossings of one simulated surplus path."""

import numpy as np

from risklt import (
    ExponentialClaims,
    ModelParams,
    crossing_count,
    crossing_count_geometric,
    endpoint_levels,
    local_time_at,
    segments,
    simulate,
)

params = ModelParams(x0=4.0, c=1.1, alpha=1.0, claims=ExponentialClaims(beta=1.0))
path = simulate(params, horizon=5.0, seed=2024)

print(f"{path.n_jumps} claims on [0, 5]")
for seg in segments(path, 5.0):
    print(f"  t in ({seg.t_start:.3f}, {seg.t_end:.3f}]   X rises {seg.v_start:.3f} -> {seg.v_end:.3f}")

# Between claims the path rises with slope c, so L_t(x) counts upward passes,
# each worth 1/c.
levels = np.linspace(0.0, 8.0, 9)
print("\n     x     L_5(x)   c*L   C(jump identity)   C(segments)")
for x in levels:
    if x in endpoint_levels(path, 5.0):
        continue
    lt = local_time_at(path, 5.0, x)
    print(f"{x:6.2f} {lt:9.4f} {lt * params.c:5.1f} {crossing_count(path, 5.0, x):10d}"
          f" {crossing_count_geometric(path, 5.0, x):14d}")

# At the start level and the final value the half-weights show up.
print("\nL_5(x0)  =", local_time_at(path, 5.0, params.x0))
print("path.json:", path.to_json()[:80], "...")
