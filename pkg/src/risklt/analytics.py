"""Expectations for exponential claims: compound-Poisson density and CDF,
expected local time, and the two-time occupation functional

    E[int_0^t g(X_s, X_{s+eps} - X_s) ds] = int E[g(x, X_eps - x0)] E[L_t(x)] dx.

With ``S_t`` the claim total up to ``t`` and exponential(beta) claims, the
law of ``S_t`` is an atom ``e^{-alpha t}`` at 0 plus the density

    f(u, t) = e^{-alpha t - beta u} sum_{n>=1} (beta alpha t)^n u^{n-1} / (n! (n-1)!),  u > 0.

``E[L_t(x)] = int_{lo}^{t} f(x0 + c s - x, s) ds`` with
``lo = max(0, min((x - x0)/c, t))`` covers only the density part. The no-jump
event adds ``(1/c) exp(-alpha (x - x0)/c)`` on ``(x0, x0 + c t]``; every
function here takes ``include_singular`` to choose between the two.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Any, Union

import numpy as np

from .errors import ConvergenceError, DomainError, UnsupportedModelError
from .occupation import StepFunction
from .process import ExponentialClaims, ModelParams
from .quadrature import adaptive_quadrature


@dataclass(frozen=True)
class FixedSeries:
    """Keep exactly ``n`` terms of every series."""

    n: int

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"series length must be a positive integer, got {self.n!r}")

    def to_dict(self) -> dict[str, Any]:
        return {"mode": "fixed", "n": self.n}


@dataclass(frozen=True)
class AdaptiveSeries:
    """Add terms until a rigorous tail bound is below ``rel_tol`` of the partial sum."""

    rel_tol: float = 1e-14
    n_max: int = 2000

    def __post_init__(self) -> None:
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValueError("n_max must be a positive integer")

    def to_dict(self) -> dict[str, Any]:
        return {"mode": "adaptive", "rel_tol": self.rel_tol, "n_max": self.n_max}


SeriesMode = Union[FixedSeries, AdaptiveSeries]


@dataclass(frozen=True)
class NumericConfig:
    series: SeriesMode = field(default_factory=AdaptiveSeries)
    quad_rel_tol: float = 1e-8
    quad_max_depth: int = 40

    def __post_init__(self) -> None:
        if not self.quad_rel_tol > 0:
            raise ValueError("quad_rel_tol must be positive")
        if self.quad_max_depth < 1:
            raise ValueError("quad_max_depth must be >= 1")

    def to_dict(self) -> dict[str, Any]:
        return {
            "series": self.series.to_dict(),
            "quad_rel_tol": self.quad_rel_tol,
            "quad_max_depth": self.quad_max_depth,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> NumericConfig:
        unknown = set(data) - {"series", "quad_rel_tol", "quad_max_depth"}
        if unknown:
            raise ValueError(f"unknown numeric config keys: {sorted(unknown)}")
        kwargs: dict[str, Any] = {}
        if "series" in data:
            s = dict(data["series"])
            mode = s.pop("mode", None)
            if mode == "fixed":
                kwargs["series"] = FixedSeries(**s)
            elif mode == "adaptive":
                kwargs["series"] = AdaptiveSeries(**s)
            else:
                raise ValueError(f"unknown series mode {mode!r}")
        for key in ("quad_rel_tol", "quad_max_depth"):
            if key in data:
                kwargs[key] = data[key]
        return cls(**kwargs)


FIVE_TERM_CONFIG = NumericConfig(series=FixedSeries(5))


@dataclass(frozen=True)
class ExpectedLocalTime:
    value: float
    err_estimate: float
    includes_singular: bool


@dataclass(frozen=True)
class AnalyticValue:
    value: float
    err_estimate: float


def result_record(quantity: str, params: ModelParams, cfg: NumericConfig, value: float,
                  err_estimate: float, **extra: Any) -> dict[str, Any]:
    """JSON-ready record ``{quantity, params, cfg, value, err_estimate}``."""
    rec = {
        "quantity": quantity,
        "params": params.to_dict(),
        "cfg": cfg.to_dict(),
        "value": value,
        "err_estimate": err_estimate,
    }
    rec.update(extra)
    return rec


# --- compound Poisson density -------------------------------------------------

def _check_rates(t, alpha: float, beta: float) -> None:
    if not (alpha > 0 and beta > 0):
        raise DomainError("alpha and beta must be positive")
    if np.any(np.asarray(t) <= 0):
        raise DomainError("t must be positive")


def _series_density(u: np.ndarray, t: np.ndarray, alpha: float, beta: float, series: SeriesMode) -> np.ndarray:
    """Series value for ``u >= 0`` (``u = 0`` gives the right limit ``beta alpha t e^{-alpha t}``).

    Terms follow ``term_{n+1} = term_n * z / ((n+1) n)`` with ``z = beta alpha t u``,
    carried in log form so neither factorials nor the exponential prefactor
    can overflow.
    """
    u, t = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(t, dtype=float))
    with np.errstate(divide="ignore"):
        log_z = np.log(beta * alpha * t) + np.log(u)
    log_term = np.log(beta * alpha * t) - alpha * t - beta * u
    total = np.exp(log_term)
    if isinstance(series, FixedSeries):
        for n in range(1, series.n):
            log_term = log_term + log_z - math.log(n + 1) - math.log(n)
            total = total + np.exp(log_term)
        return total
    z = np.exp(log_z)
    active = np.ones(total.shape, dtype=bool)
    for n in range(1, series.n_max + 1):
        # tail after term n is bounded by term_n * r / (1 - r) once r = z / ((n+1) n) < 1
        r = z / ((n + 1) * n)
        term = np.exp(log_term)
        with np.errstate(divide="ignore", invalid="ignore"):
            bound = np.where(r < 1, term * r / (1 - r), np.inf)
        active &= ~(bound <= series.rel_tol * total)
        if not np.any(active):
            return total
        log_term = log_term + log_z - math.log(n + 1) - math.log(n)
        total = np.where(active, total + np.exp(log_term), total)
    partial = float(total) if total.ndim == 0 else float("nan")
    raise ConvergenceError(f"density series did not converge within {series.n_max} terms", partial)


def compound_density(u, t: float, alpha: float, beta: float, cfg: NumericConfig | None = None):
    """Density of the claim total ``S_t`` on ``(0, inf)``; 0 for ``u <= 0``.

    Accepts scalar or array ``u`` (and ``t``, broadcast against ``u``).

    Raises:
        ConvergenceError: adaptive series not converged within ``n_max`` terms.
    """
    cfg = cfg or NumericConfig()
    _check_rates(t, alpha, beta)
    u = np.asarray(u, dtype=float)
    vals = _series_density(np.maximum(u, 0.0), t, alpha, beta, cfg.series)
    out = np.where(u > 0, vals, 0.0)
    return float(out) if out.ndim == 0 else out


# --- Erlang mixture CDF -------------------------------------------------------

def _poisson_log_pmf(k: np.ndarray, mean: float) -> np.ndarray:
    # log(e^{-mean} mean^k / k!) by cumulative sums of log(mean / j)
    if mean == 0:
        return np.where(k == 0, 0.0, -np.inf)
    steps = math.log(mean) - np.log(np.arange(1, int(k.max()) + 1, dtype=float)) if k.max() > 0 else np.array([])
    table = np.concatenate(([-mean], -mean + np.cumsum(steps)))
    return table[k]


def regularized_lower_gamma(n, z: float) -> np.ndarray:
    """``gamma(n, z) / (n-1)!`` for integer orders ``n >= 1`` and ``z >= 0``.

    This is the Erlang(n) CDF at ``z``, equal to the Poisson tail
    ``sum_{k >= n} e^{-z} z^k / k!``. Tails are accumulated from the far end,
    so only positive terms are added and nothing cancels.
    """
    n = np.atleast_1d(np.asarray(n, dtype=np.int64))
    if np.any(n < 1):
        raise ValueError("orders must be >= 1")
    if z < 0:
        raise DomainError("z must be >= 0")
    if z == 0:
        return np.zeros(n.shape)
    if math.isinf(z):
        return np.ones(n.shape)
    n_top = int(n.max())
    mode = int(math.floor(z))
    k_hi = max(n_top, mode) + 1
    # extend until the geometric tail bound is negligible next to pmf(n_top)
    while True:
        log_pmf = _poisson_log_pmf(np.arange(k_hi + 1), z)
        r = z / (k_hi + 1)
        if r < 1:
            log_tail = log_pmf[-1] + math.log(r / (1 - r))
            # smallest tail we need is P(n_top) >= pmf at max(n_top, mode)
            if log_tail < log_pmf[min(max(n_top, mode), k_hi)] + math.log(1e-18):
                break
        k_hi = 2 * k_hi + 16
    pmf = np.exp(log_pmf)
    tails = np.cumsum(pmf[::-1])[::-1]
    return np.minimum(tails[n], 1.0)


def compound_cdf(u: float, t: float, alpha: float, beta: float, cfg: NumericConfig | None = None) -> float:
    """``P(S_t <= u)``: the atom ``e^{-alpha t}`` plus an Erlang mixture.

    ``e^{-alpha t} 1{u >= 0} + sum_{n=1}^{N} P(N_t = n) gamma(n, beta u) / (n-1)!``.
    Adaptive mode stops once the Poisson weights left out are below
    ``rel_tol`` of the total.

    Raises:
        ConvergenceError: adaptive series not converged within ``n_max`` terms.
    """
    cfg = cfg or NumericConfig()
    _check_rates(t, alpha, beta)
    u = float(u)
    if u < 0:
        return 0.0
    mean = alpha * t
    series = cfg.series
    if isinstance(series, FixedSeries):
        n_terms = series.n
    else:
        n_terms = None
        log_w = _poisson_log_pmf(np.arange(series.n_max + 2), mean)
        w = np.exp(log_w)
        partial = np.cumsum(w)
        for n in range(max(1, math.ceil(mean)), series.n_max + 1):
            r = mean / (n + 2)
            if r < 1 and w[n + 1] / (1 - r) <= series.rel_tol * partial[n]:
                n_terms = n
                break
        if n_terms is None:
            raise ConvergenceError(f"CDF series did not converge within {series.n_max} terms", float(partial[-1]))
    orders = np.arange(1, n_terms + 1)
    weights = np.exp(_poisson_log_pmf(np.arange(n_terms + 1), mean))
    erlang = regularized_lower_gamma(orders, beta * u)
    return float(weights[0] + np.sum(weights[1:] * erlang))


# --- expected local time ------------------------------------------------------

def _require_exponential(params: ModelParams) -> float:
    if not isinstance(params.claims, ExponentialClaims):
        raise UnsupportedModelError(f"analytic formulas need exponential claims, got {params.claims!r}")
    return params.claims.beta


def singular_local_time(params: ModelParams, t: float, x):
    """Expected local time carried by the no-claim branch ``X_s = x0 + c s``."""
    x = np.asarray(x, dtype=float)
    d = x - params.x0
    inside = (d > 0) & (d <= params.c * t)
    out = np.where(inside, np.exp(-params.alpha * np.where(inside, d, 0.0) / params.c) / params.c, 0.0)
    return float(out) if out.ndim == 0 else out


def _elt_continuous(params: ModelParams, t: float, x: float, cfg: NumericConfig) -> tuple[float, float]:
    beta = _require_exponential(params)
    x0, c, alpha = params.x0, params.c, params.alpha
    lower = max(0.0, min((x - x0) / c, t))
    if lower >= t:
        return 0.0, 0.0

    def integrand(s: np.ndarray) -> np.ndarray:
        out = np.zeros_like(s)
        pos = s > 0
        if np.any(pos):
            sp = s[pos]
            out[pos] = _series_density(np.maximum(x0 + c * sp - x, 0.0), sp, alpha, beta, cfg.series)
        return out

    return adaptive_quadrature(integrand, lower, t, cfg.quad_rel_tol, cfg.quad_max_depth, vectorized=True)


def expected_local_time(params: ModelParams, t: float, x: float, cfg: NumericConfig | None = None,
                        include_singular: bool = False) -> ExpectedLocalTime:
    """``E[L_t(x)]`` by quadrature of the density series along the drift line.

    Args:
        params: model with exponential claims.
        t: time horizon, ``> 0``.
        x: level.
        cfg: series and quadrature settings.
        include_singular: add the no-claim contribution
            ``(1/c) e^{-alpha (x - x0)/c}`` on ``(x0, x0 + c t]``.

    This is the density version of the expectation. At the two levels ``x0``
    and ``x0 + c t`` the mean of the pathwise local time uses half-weights
    and differs from it (at ``x0`` it is the average of the one-sided limits).

    Raises:
        UnsupportedModelError: for non-exponential claims.
        ConvergenceError: quadrature or series failure.
    """
    cfg = cfg or NumericConfig()
    if not t > 0:
        raise DomainError("t must be positive")
    value, err = _elt_continuous(params, t, float(x), cfg)
    if include_singular:
        value += singular_local_time(params, t, x)
    return ExpectedLocalTime(value=value, err_estimate=err, includes_singular=include_singular)


def _integrate_left_tail(h: Callable[[float], float], upper: float, scale: float, rel_tol: float,
                         max_depth: int, reference: float, max_chunks: int = 80) -> tuple[float, float]:
    """``int_{-inf}^{upper} h`` for ``h`` decaying to the left, chunk by chunk.

    Stops when a chunk adds at most ``rel_tol`` of the running total and ``h``
    at the chunk's left end is below ``rel_tol`` times the largest value seen.
    The last chunk doubles as the truncation error estimate.
    """
    total, err = 0.0, 0.0
    hmax = abs(h(upper))
    right, width = upper, scale
    for _ in range(max_chunks):
        left = right - width
        floor = rel_tol * max(abs(total), abs(reference)) * 1e-2
        chunk, chunk_err = adaptive_quadrature(h, left, right, rel_tol, max_depth, abs_tol=floor)
        total += chunk
        err += chunk_err
        h_left = abs(h(left))
        hmax = max(hmax, h_left)
        if abs(chunk) <= rel_tol * abs(total) and h_left <= rel_tol * hmax:
            return total, err + abs(chunk)
        right, width = left, width * 2.0
    raise ConvergenceError("left tail did not decay", total, err)


def _x_splits(params: ModelParams, t: float, weight: StepFunction | None) -> tuple[float, list[float]]:
    top = params.x0 + params.c * t
    pts = {params.x0, top}
    if weight is not None:
        pts.update(float(b) for b in weight.breakpoints if b < top)
    return top, sorted(pts)


def integrate_against_expected_local_time(
    params: ModelParams,
    t: float,
    weight: StepFunction | Callable[[float], float] | None = None,
    cfg: NumericConfig | None = None,
    include_singular: bool = False,
) -> AnalyticValue:
    """``int w(x) E[L_t(x)] dx`` over the real line (``w = 1`` if ``weight`` is None).

    ``E[L_t(x)]`` vanishes above ``x0 + c t``; the unbounded lower side is
    integrated chunk-wise until negligible. The singular part is integrated in
    closed form for step weights and by quadrature for callables.
    """
    cfg = cfg or NumericConfig()
    beta = _require_exponential(params)
    x0, c, alpha = params.x0, params.c, params.alpha
    step = weight if isinstance(weight, StepFunction) or weight is None else None
    top, splits = _x_splits(params, t, step)
    rel, depth = cfg.quad_rel_tol, cfg.quad_max_depth

    def elt(x: float) -> float:
        return _elt_continuous(params, t, x, cfg)[0]

    if step is None and weight is not None:
        def h(x: float) -> float:
            wx = weight(x)
            return 0.0 if wx == 0 else wx * elt(x)
    else:
        h = elt

    def piece_weight(a: float, b: float) -> float:
        # step weights are constant on each piece; apply them outside the quadrature
        if step is None:
            return 1.0
        return step(0.5 * (a + b)) if math.isfinite(a) else float(step.values[0])

    # rough magnitude for absolute floors: mass of the density part
    reference = t - (1.0 - math.exp(-alpha * t)) / alpha

    value, err = 0.0, 0.0
    for a, b in zip(splits[:-1], splits[1:]):
        wv = piece_weight(a, b)
        if wv == 0:
            continue
        v, e = adaptive_quadrature(h, a, b, rel, depth, abs_tol=rel * reference * 1e-2)
        value += wv * v
        err += abs(wv) * e
    wv = piece_weight(-math.inf, splits[0])
    if wv != 0:
        scale = max(c * t, 1.0 / beta, 1.0)
        v, e = _integrate_left_tail(h, splits[0], scale, rel, depth, reference)
        value += wv * v
        err += abs(wv) * e

    if include_singular:
        if step is not None:
            for a, b, wv in step.pieces():
                lo, hi = max(a, x0), min(b, top)
                if wv != 0 and hi > lo:
                    value += wv / alpha * (math.exp(-alpha * (lo - x0) / c) - math.exp(-alpha * (hi - x0) / c))
        else:
            w = weight if weight is not None else (lambda x: 1.0)
            v, e = adaptive_quadrature(lambda x: w(x) * math.exp(-alpha * (x - x0) / c) / c, x0, top, rel, depth)
            value += v
            err += e
    return AnalyticValue(value=value, err_estimate=err)


# --- occupation functional ----------------------------------------------------

@dataclass(frozen=True)
class ProductIndicator:
    """``g(x, y) = A(x) * 1_B(y)`` with ``A`` a step function and ``B`` a union of closed intervals."""

    x_weight: StepFunction
    y_set: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        ys = tuple(sorted((float(lo), float(hi)) for lo, hi in self.y_set))
        for lo, hi in ys:
            if not lo <= hi:
                raise ValueError(f"bad interval [{lo}, {hi}]")
        for (_, h1), (l2, _) in zip(ys[:-1], ys[1:]):
            if l2 <= h1:
                raise ValueError("y intervals must be disjoint")
        object.__setattr__(self, "y_set", ys)

    @classmethod
    def rectangle(cls, x_interval: tuple[float, float], y_intervals: Sequence[tuple[float, float]]) -> ProductIndicator:
        return cls(StepFunction.indicator(*x_interval), tuple(y_intervals))

    @classmethod
    def one(cls) -> ProductIndicator:
        return cls(StepFunction.constant(1.0), ((-math.inf, math.inf),))

    def y_indicator(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        out = np.zeros(y.shape, dtype=bool)
        for lo, hi in self.y_set:
            out |= (y >= lo) & (y <= hi)
        return out


def increment_probability(y_set: Sequence[tuple[float, float]], params: ModelParams, epsilon: float,
                          cfg: NumericConfig | None = None) -> float:
    """``P(X_eps - x0 in B)`` for ``B`` a union of disjoint closed intervals.

    ``X_eps - x0 = c eps - S_eps``, so ``[lo, hi]`` maps to
    ``P(c eps - hi <= S_eps <= c eps - lo)``; the atom of ``S_eps`` at 0 is
    counted iff ``lo <= c eps <= hi``.
    """
    cfg = cfg or NumericConfig()
    beta = _require_exponential(params)
    shift = params.c * epsilon
    total = 0.0
    for lo, hi in y_set:
        upper = compound_cdf(shift - lo, epsilon, params.alpha, beta, cfg)
        v = shift - hi
        lower = compound_cdf(v, epsilon, params.alpha, beta, cfg) if v > 0 else 0.0
        total += upper - lower
    return total


def _inner_expectation(g: Callable, x: float, params: ModelParams, epsilon: float, cfg: NumericConfig,
                       upper: float) -> float:
    beta = _require_exponential(params)
    shift = params.c * epsilon
    atom = math.exp(-params.alpha * epsilon) * float(g(x, np.asarray(shift)))

    def integrand(u: np.ndarray) -> np.ndarray:
        dens = _series_density(u, epsilon, params.alpha, beta, cfg.series)
        return np.asarray(g(x, shift - u), dtype=float) * dens

    v, _ = adaptive_quadrature(integrand, 0.0, upper, cfg.quad_rel_tol, cfg.quad_max_depth, vectorized=True,
                               abs_tol=cfg.quad_rel_tol * 1e-3)
    return atom + v


def _claim_total_quantile(params: ModelParams, epsilon: float, cfg: NumericConfig) -> float:
    beta = _require_exponential(params)
    u = max(1.0, (params.alpha * epsilon + 1.0) / beta)
    while 1.0 - compound_cdf(u, epsilon, params.alpha, beta, NumericConfig()) > cfg.quad_rel_tol * 1e-2:
        u *= 1.5
    return u


def theorem2_functional(
    params: ModelParams,
    t: float,
    epsilon: float,
    g: ProductIndicator | Callable,
    cfg: NumericConfig | None = None,
    include_singular: bool = False,
) -> AnalyticValue:
    """Right-hand side ``int E[g(x, X_eps - x0)] E[L_t(x)] dx``.

    For a :class:`ProductIndicator` the inner factor is
    ``A(x) * P(X_eps - x0 in B)``. A callable ``g(x, y)`` must be bounded and
    accept an ndarray ``y``; its inner expectation is the claims-free atom
    ``e^{-alpha eps} g(x, c eps)`` plus a quadrature of ``g(x, c eps - u) f(u, eps)``
    over ``u`` up to the ``1 - quad_rel_tol/100`` quantile of the claim total.
    Discontinuities of a callable ``g`` are resolved only by bisection and may
    raise :class:`ConvergenceError` at tight tolerances.
    """
    cfg = cfg or NumericConfig()
    _require_exponential(params)
    if not (t > 0 and epsilon > 0):
        raise DomainError("t and epsilon must be positive")
    if isinstance(g, ProductIndicator):
        factor = increment_probability(g.y_set, params, epsilon, cfg)
        mass = integrate_against_expected_local_time(params, t, g.x_weight, cfg, include_singular)
        return AnalyticValue(value=factor * mass.value, err_estimate=abs(factor) * mass.err_estimate)
    upper = _claim_total_quantile(params, epsilon, cfg)
    weight = lambda x: _inner_expectation(g, x, params, epsilon, cfg, upper)  # noqa: E731
    return integrate_against_expected_local_time(params, t, weight, cfg, include_singular)


__all__ = [
    "AdaptiveSeries",
    "AnalyticValue",
    "ExpectedLocalTime",
    "FixedSeries",
    "NumericConfig",
    "FIVE_TERM_CONFIG",
    "ProductIndicator",
    "adaptive_quadrature",
    "compound_cdf",
    "compound_density",
    "expected_local_time",
    "increment_probability",
    "integrate_against_expected_local_time",
    "regularized_lower_gamma",
    "result_record",
    "singular_local_time",
    "theorem2_functional",
]
