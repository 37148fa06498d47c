"""Time spent in a set of levels, computed two ways."""

import numpy as np

from risklt import (
    ExponentialClaims,
    ModelParams,
    StepFunction,
    local_time_profile,
    occupation_integral,
    occupation_measure,
    random_step_function,
    simulate,
    time_integral,
)

params = ModelParams(x0=4.0, c=1.1, alpha=1.0, claims=ExponentialClaims(beta=1.0))
path = simulate(params, horizon=3.0, seed=11)
profile = local_time_profile(path, 3.0)

print("local-time profile (level interval, value):")
for a, b, v in profile.step.pieces():
    if v:
        print(f"  ({a:7.3f}, {b:7.3f}]  {v:.4f}")
print("atoms:", profile.atoms)

# Total mass of the profile is the elapsed time.
print("\nint L_3(y) dy =", occupation_integral(profile, StepFunction.constant(1.0)))
print("time in (3, 5] =", occupation_measure(path, 3.0, (3.0, 5.0)))

# A weighted occupation time from the time side and from the level side.
g = random_step_function(np.random.default_rng(0), 10, 0.0, 8.0)
lhs = time_integral(path, 3.0, g)
rhs = occupation_integral(profile, g)
print(f"\nint g(X_s) ds = {lhs:.15f}")
print(f"int g L dy    = {rhs:.15f}")
print(f"difference    = {abs(lhs - rhs):.1e}")

print("\nprofile as CSV:\n" + profile.step.to_csv())
