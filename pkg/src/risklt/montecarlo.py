"""Monte Carlo estimators with standard errors.

Path ``i`` is simulated from ``path_seed(master_seed, i)`` and its value is
stored at slot ``i`` of a result array; means and variances are taken over that
array in index order. The output is therefore the same for any number of
worker threads.
"""

from __future__ import annotations

import json
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Any

import numpy as np

from .analytics import ProductIndicator
from .localtime import local_time_levels
from .occupation import StepFunction, local_time_profile, occupation_integral, time_integral
from .process import ModelParams, SamplePath, evaluate, path_seed, simulate


@dataclass(frozen=True)
class Estimate:
    """Sample mean with ``std_error = sample_std / sqrt(n_paths)`` (unbiased variance)."""

    mean: float
    std_error: float
    n_paths: int
    master_seed: int

    @classmethod
    def from_samples(cls, samples: np.ndarray, master_seed: int) -> Estimate:
        n = samples.shape[0]
        return cls(
            mean=float(np.mean(samples)),
            std_error=float(np.std(samples, ddof=1) / math.sqrt(n)),
            n_paths=int(n),
            master_seed=int(master_seed),
        )

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def contains(self, value: float, k: float = 3.0) -> bool:
        return abs(self.mean - value) <= k * self.std_error


def run_paths(per_path: Callable[[SamplePath], Any], params: ModelParams, horizon: float, n_paths: int,
              master_seed: int, threads: int = 1, width: int | None = None) -> np.ndarray:
    """Evaluate ``per_path`` on ``n_paths`` seeded paths; row ``i`` belongs to path ``i``."""
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    shape = (n_paths,) if width is None else (n_paths, width)
    out = np.empty(shape, dtype=float)

    def work(lo: int, hi: int) -> None:
        for i in range(lo, hi):
            out[i] = per_path(simulate(params, horizon, path_seed(master_seed, i)))

    threads = max(1, int(threads))
    if threads == 1:
        work(0, n_paths)
    else:
        bounds = np.linspace(0, n_paths, threads + 1).astype(int)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, bounds[:-1], bounds[1:]))
    return out


def _need_two(n_paths: int) -> None:
    if n_paths < 2:
        raise ValueError("need at least two paths for a standard error")


def mc_expected_local_time_grid(params: ModelParams, t: float, levels: Sequence[float], n_paths: int,
                                master_seed: int, threads: int = 1) -> list[Estimate]:
    """One :class:`Estimate` of ``E[L_t(x)]`` per level, all from the same paths."""
    _need_two(n_paths)
    xs = np.asarray(levels, dtype=float).reshape(-1)
    samples = run_paths(lambda p: local_time_levels(p, t, xs), params, t, n_paths, master_seed, threads,
                        width=xs.size)
    return [Estimate.from_samples(samples[:, j], master_seed) for j in range(xs.size)]


def mc_expected_local_time(params: ModelParams, t: float, x: float, n_paths: int, master_seed: int,
                           threads: int = 1) -> Estimate:
    """Monte Carlo estimate of ``E[L_t(x)]`` over paths simulated on ``[0, t]``."""
    return mc_expected_local_time_grid(params, t, [x], n_paths, master_seed, threads)[0]


def _pieces_overlap(weight: StepFunction, v0: np.ndarray, v1: np.ndarray) -> np.ndarray:
    # sum over pieces of weight * |(v0, v1] intersected with the piece|
    total = np.zeros_like(v0)
    for a, b, w in weight.pieces():
        if w != 0:
            total += w * np.clip(np.minimum(b, v1) - np.maximum(a, v0), 0.0, None)
    return total


def two_time_occupation(path: SamplePath, t: float, epsilon: float, g: ProductIndicator) -> float:
    """Exact ``int_0^t A(X_s) 1_B(X_{s+eps} - X_s) ds`` on one path with horizon ``>= t + eps``.

    On each piece between consecutive points of ``{T_i} u {T_i - eps}`` the
    increment ``c eps - (claims in (s, s+eps])`` is constant and ``X_s`` is
    linear, so each piece reduces to an overlap of value ranges.
    """
    if path.horizon < t + epsilon:
        raise ValueError("path horizon must cover t + epsilon")
    jt = path.jump_times
    cuts = np.concatenate((jt, jt - epsilon))
    grid = np.unique(np.concatenate(([0.0, t], cuts[(cuts > 0) & (cuts < t)])))
    p, q = grid[:-1], grid[1:]
    mid = 0.5 * (p + q)
    cum = np.concatenate(([0.0], np.cumsum(path.claim_sizes)))
    lo = np.searchsorted(jt, mid, side="right")
    hi = np.searchsorted(jt, mid + epsilon, side="right")
    increment = path.params.c * epsilon - (cum[hi] - cum[lo])
    keep = g.y_indicator(increment)
    if not np.any(keep):
        return 0.0
    p, q = p[keep], q[keep]
    xp = evaluate(path, p)
    xq = xp + path.params.c * (q - p)
    return float(np.sum(_pieces_overlap(g.x_weight, xp, xq))) / path.params.c


def _midpoint_two_time(path: SamplePath, t: float, epsilon: float, g: Callable, n_steps: int) -> float:
    s = (np.arange(n_steps) + 0.5) * (t / n_steps)
    xs = evaluate(path, s)
    return float(np.sum(np.asarray(g(xs, evaluate(path, s + epsilon) - xs), dtype=float))) * (t / n_steps)


def mc_theorem2_lhs(params: ModelParams, t: float, epsilon: float, g: ProductIndicator | Callable,
                    n_paths: int, master_seed: int, threads: int = 1, n_steps: int = 1000) -> Estimate:
    """Estimate ``E[int_0^t g(X_s, X_{s+eps} - X_s) ds]`` from paths on ``[0, t + eps]``.

    A :class:`ProductIndicator` is integrated exactly per path. Any other
    vectorized callable ``g(x, y)`` uses the composite midpoint rule with
    ``n_steps`` points in ``s``.
    """
    _need_two(n_paths)
    if isinstance(g, ProductIndicator):
        per_path = lambda p: two_time_occupation(p, t, epsilon, g)  # noqa: E731
    else:
        per_path = lambda p: _midpoint_two_time(p, t, epsilon, g, n_steps)  # noqa: E731
    samples = run_paths(per_path, params, t + epsilon, n_paths, master_seed, threads)
    return Estimate.from_samples(samples, master_seed)


def mc_occupation_identity(params: ModelParams, t: float, n_paths: int, master_seed: int,
                           g: StepFunction, threads: int = 1) -> float:
    """Largest per-path gap between ``int_0^t g(X_s) ds`` and ``int g L_t``."""

    def gap(path: SamplePath) -> float:
        lhs = time_integral(path, t, g)
        rhs = occupation_integral(local_time_profile(path, t), g)
        return abs(lhs - rhs)

    return float(np.max(run_paths(gap, params, t, n_paths, master_seed, threads)))
