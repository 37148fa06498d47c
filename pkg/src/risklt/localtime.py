"""Exact pathwise local time, crossing counts and the approximating fields ``L^n``.

Everything here is a finite computation over the jumps and linear pieces of a
single path; nothing is discretized in time. Point indicators such as
``1{X_t = x}`` use exact float equality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import IntegrityError, PreconditionError
from .process import SamplePath, evaluate, jumps_upto, segment_arrays


@dataclass(frozen=True)
class MollifiedStep:
    """Linear ramp from 0 to 1 across ``[x - 1/n, x + 1/n]``."""

    x: float
    n: int

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")

    @property
    def lower(self) -> float:
        return self.x - 1.0 / self.n

    @property
    def upper(self) -> float:
        return self.x + 1.0 / self.n

    def value(self, y):
        y = np.asarray(y, dtype=float)
        ramp = (self.n * (y - self.x) + 1.0) / 2.0
        out = np.where(y < self.lower, 0.0, np.where(y > self.upper, 1.0, ramp))
        return float(out) if out.ndim == 0 else out

    def derivative(self, y):
        """``n/2`` strictly inside the window, 0 elsewhere (also at both corners)."""
        y = np.asarray(y, dtype=float)
        out = np.where((y > self.lower) & (y < self.upper), self.n / 2.0, 0.0)
        return float(out) if out.ndim == 0 else out


def _jumps(path: SamplePath, t: float) -> tuple[np.ndarray, np.ndarray]:
    # (post-jump values, pre-jump values) of the jumps in (0, t]
    k = jumps_upto(path, t)
    return path.post[1 : k + 1], path.pre[:k]


def scaled_local_time(path: SamplePath, t: float, x: float) -> float:
    """``c * L_t(x)``: a half-integer, computed without rounding."""
    xt = evaluate(path, t)
    x0 = path.params.x0
    post, pre = _jumps(path, t)
    jump_sum = int(np.count_nonzero(pre > x)) - int(np.count_nonzero(post > x))
    return 0.5 * (xt == x) + (xt > x) - 0.5 * (x0 == x) - (x0 > x) + jump_sum


def local_time_at(path: SamplePath, t: float, x: float) -> float:
    """Local time ``L_t(x)`` of the path at level ``x`` up to time ``t``.

    Uses the explicit representation

        L_t(x) = (1/c) [ 1/2 1{X_t = x} + 1{X_t > x} - 1/2 1{x0 = x} - 1{x0 > x}
                         - sum_{0 < s <= t} (1{X_s > x} - 1{X_{s-} > x}) ].

    Raises:
        DomainError: if ``t`` is outside ``[0, horizon]``.
    """
    return scaled_local_time(path, t, x) / path.params.c


def local_time_levels(path: SamplePath, t: float, levels) -> np.ndarray:
    """:func:`local_time_at` for many levels at once; bitwise equal to the scalar version."""
    xs = np.asarray(levels, dtype=float).reshape(-1)
    xt = evaluate(path, t)
    x0 = path.params.x0
    post, pre = _jumps(path, t)
    jump_sum = np.sum(pre[:, None] > xs, axis=0) - np.sum(post[:, None] > xs, axis=0)
    scaled = 0.5 * (xt == xs) + (xt > xs) - 0.5 * (x0 == xs) - (x0 > xs) + jump_sum
    return scaled / path.params.c


def crossing_count(path: SamplePath, t: float, x: float) -> int:
    """Number of continuous passages through ``x`` on ``(0, t]``, from the jump identity.

    ``1{x < X_t} - 1{x < x0} + #{jumps with X_s < x < X_{s-}}``.

    Raises:
        IntegrityError: if the identity goes negative, which only happens on
            hand-built paths landing exactly on ``x`` at a jump.
    """
    xt = evaluate(path, t)
    post, pre = _jumps(path, t)
    count = int(x < xt) - int(x < path.params.x0) + int(np.count_nonzero((post < x) & (x < pre)))
    if count < 0:
        raise IntegrityError(f"negative crossing count {count} at level {x!r}")
    return count


def endpoint_levels(path: SamplePath, t: float) -> np.ndarray:
    """Sorted distinct values at which pieces of the path on ``(0, t]`` start or end, plus ``x0`` and ``X_t``."""
    _, _, v0, v1 = segment_arrays(path, t)
    return np.unique(np.concatenate((v0, v1, [path.params.x0, evaluate(path, t)])))


def crossing_count_geometric(path: SamplePath, t: float, x: float) -> int:
    """Count linear pieces whose open value range contains ``x``.

    Independent of :func:`crossing_count`; the level must avoid every piece
    endpoint (see :func:`endpoint_levels`).

    Raises:
        PreconditionError: if ``x`` equals an endpoint value.
    """
    _, _, v0, v1 = segment_arrays(path, t)
    if np.any(endpoint_levels(path, t) == x):
        raise PreconditionError(f"level {x!r} coincides with an endpoint value of the path")
    return int(np.count_nonzero((v0 < x) & (x < v1)))


def tanaka_kernel(x: float, post, pre):
    """``1{post < x < pre} / (post - pre)`` for a jump ``pre -> post``, and 0 for a null jump."""
    post = np.asarray(post, dtype=float)
    pre = np.asarray(pre, dtype=float)
    jump = post - pre
    inside = (post < x) & (x < pre) & (jump != 0)
    out = np.divide(1.0, jump, out=np.zeros_like(jump), where=inside)
    return float(out) if out.ndim == 0 else out


def tanaka_jump_sum(path: SamplePath, t: float, x: float) -> float:
    """``int_{(0,t]} f(x, X_s) dX_s`` for the Tanaka kernel ``f``.

    Only jumps contribute, each with ``f * dX = 1{X_s < x < X_{s-}}``. The
    cancelled form is summed so the result is an exact integer.
    """
    post, pre = _jumps(path, t)
    return float(np.count_nonzero((post < x) & (x < pre) & (post != pre)))


def local_time_tanaka(path: SamplePath, t: float, x: float) -> float:
    """Local time assembled from the Tanaka-like representation.

    Agrees with :func:`local_time_at` except at levels hit exactly by a
    post-jump value, a null set under any continuous claim law.
    """
    xt = evaluate(path, t)
    x0 = path.params.x0
    scaled = 0.5 * (xt == x) - 0.5 * (x0 == x) + (x < xt) - (x < x0) + tanaka_jump_sum(path, t, x)
    return scaled / path.params.c


def approx_local_time(path: SamplePath, t: float, x: float, n: int) -> float:
    """Approximating field ``L^n_t(x)`` in its time-integral form.

    ``int_0^t phi'(X_{s-}) ds + (1/c) sum_{s <= t} phi'(X_{s-}) dX_s`` with
    ``phi`` the ramp :class:`MollifiedStep` ``(x, n)``. The time integral is
    exact: a piece rising through the window spends ``overlap / c`` time in
    it, and ``phi' = n/2`` is applied as division by the realized window width
    so that a full traversal contributes exactly ``1 / c``.
    """
    phi = MollifiedStep(x, n)
    lo, hi = phi.lower, phi.upper
    _, _, v0, v1 = segment_arrays(path, t)
    overlap = np.clip(np.minimum(hi, v1) - np.maximum(lo, v0), 0.0, None)
    drift = float(np.sum(overlap / (hi - lo)))
    post, pre = _jumps(path, t)
    jump = float(np.sum(phi.derivative(pre) * (post - pre))) if pre.size else 0.0
    return (drift + jump) / path.params.c


def approx_local_time_direct(path: SamplePath, t: float, x: float, n: int) -> float:
    """``L^n_t(x)`` from its defining jump-correction formula.

    ``(1/c) [phi(X_t) - phi(x0) - sum_{s <= t} (phi(X_s) - phi(X_{s-}) - phi'(X_{s-}) dX_s)]``.
    Equals :func:`approx_local_time` up to rounding whenever no pre-jump
    value sits on a window corner.
    """
    phi = MollifiedStep(x, n)
    post, pre = _jumps(path, t)
    corr = 0.0
    if pre.size:
        corr = float(np.sum(phi.value(post) - phi.value(pre) - phi.derivative(pre) * (post - pre)))
    return (phi.value(evaluate(path, t)) - phi.value(path.params.x0) - corr) / path.params.c


def _window_is_free(levels: np.ndarray, x: float, n: int) -> bool:
    phi = MollifiedStep(x, n)
    i = np.searchsorted(levels, phi.lower, side="right")
    return i == levels.size or not levels[i] < phi.upper


def exactness_threshold(path: SamplePath, t: float, x: float) -> int:
    """Smallest ``n`` whose window ``(x - 1/n, x + 1/n)`` holds no endpoint level.

    From this ``n`` on, :func:`approx_local_time` equals :func:`local_time_at`
    bit for bit.

    Raises:
        PreconditionError: if ``x`` is itself an endpoint level.
    """
    levels = endpoint_levels(path, t)
    gap = float(np.min(np.abs(levels - x)))
    if gap == 0.0:
        raise PreconditionError(f"level {x!r} coincides with an endpoint value of the path")
    n = max(1, math.floor(1.0 / gap))
    # step back in case rounding made floor(1/gap) already free, then forward
    while n > 1 and _window_is_free(levels, x, n - 1):
        n -= 1
    while not _window_is_free(levels, x, n):
        n += 1
    return n
