"""Smoothed local times L^n settle on the exact value after finitely many n."""

from risklt import (
    ExponentialClaims,
    ModelParams,
    approx_local_time,
    approx_local_time_direct,
    exactness_threshold,
    local_time_at,
    simulate,
)

params = ModelParams(x0=4.0, c=1.1, alpha=1.0, claims=ExponentialClaims(beta=1.0))
path = simulate(params, horizon=5.0, seed=5)
x = 4.37

exact = local_time_at(path, 5.0, x)
n_star = exactness_threshold(path, 5.0, x)
print(f"L_5({x}) = {exact!r}; window free of path endpoints from n = {n_star}")

print("\n     n        L^n (time form)      L^n (defining form)     |L^n - L|")
for j in range(12):
    n = 2**j
    a = approx_local_time(path, 5.0, x, n)
    b = approx_local_time_direct(path, 5.0, x, n)
    print(f"{n:6d}  {a:20.15f}  {b:20.15f}  {abs(a - exact):10.2e}")
