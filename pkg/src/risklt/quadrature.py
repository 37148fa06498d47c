"""Adaptive Simpson quadrature.

Panels are refined level by level so that a vectorized integrand is called
once per level with every new abscissa. A panel ``[l, r]`` is accepted when

    |S_fine - S_coarse| / 15 <= rel_tol * |S| * (r - l) / (b - a)

with ``S`` the current estimate of the whole integral, which keeps the summed
error below ``rel_tol * |S|``. Accepted panels contribute the Richardson value
``S_fine + (S_fine - S_coarse) / 15``. The refinement order is fixed, so
results are deterministic.
"""

from __future__ import annotations

from collections.abc import Callable

import numpy as np

from .errors import ConvergenceError


def adaptive_quadrature(
    f: Callable,
    a: float,
    b: float,
    rel_tol: float = 1e-8,
    max_depth: int = 40,
    *,
    abs_tol: float = 0.0,
    min_depth: int = 2,
    vectorized: bool = False,
) -> tuple[float, float]:
    """Integrate ``f`` over ``[a, b]``.

    Args:
        f: integrand; called with an ndarray if ``vectorized`` else with floats.
        a: lower limit.
        b: upper limit, ``b >= a``.
        rel_tol: relative tolerance on the whole integral.
        max_depth: bisection levels allowed below the initial ``2**min_depth`` panels.
        abs_tol: absolute floor for the tolerance, for integrals close to zero.
        min_depth: initial uniform bisection levels.
        vectorized: whether ``f`` maps arrays to arrays.

    Returns:
        ``(value, error_estimate)``.

    Raises:
        ConvergenceError: if panels remain unresolved after ``max_depth`` levels;
            carries the best estimate.
    """
    if not b >= a:
        raise ValueError(f"need a <= b, got [{a!r}, {b!r}]")
    if a == b:
        return 0.0, 0.0
    if not (rel_tol > 0 or abs_tol > 0):
        raise ValueError("need a positive tolerance")

    if vectorized:
        def feval(x: np.ndarray) -> np.ndarray:
            return np.asarray(f(x), dtype=float).reshape(x.shape)
    else:
        def feval(x: np.ndarray) -> np.ndarray:
            return np.fromiter((f(float(v)) for v in x), dtype=float, count=x.size)

    width = b - a
    n0 = 2 ** min_depth
    edges = np.linspace(a, b, n0 + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    fv = feval(np.concatenate((edges, mids)))
    left, right = edges[:-1], edges[1:]
    fl, fr, fm = fv[:n0], fv[1 : n0 + 1], fv[n0 + 1 :]
    coarse = (right - left) / 6.0 * (fl + 4.0 * fm + fr)

    accepted = 0.0
    accepted_err = 0.0
    for _ in range(max_depth + 1):
        ql = 0.5 * (left + mids)
        qr = 0.5 * (mids + right)
        fq = feval(np.concatenate((ql, qr)))
        fql, fqr = fq[: left.size], fq[left.size :]
        half = (right - left) / 12.0
        s_left = half * (fl + 4.0 * fql + fm)
        s_right = half * (fm + 4.0 * fqr + fr)
        fine = s_left + s_right
        diff = fine - coarse
        err = np.abs(diff) / 15.0
        if not np.all(np.isfinite(fine)):
            raise ConvergenceError("integrand is not finite on the interval", float("nan"))
        estimate = accepted + float(np.sum(fine + diff / 15.0))
        tol = np.maximum(rel_tol * abs(estimate), abs_tol) * (right - left) / width
        done = err <= tol
        accepted += float(np.sum((fine + diff / 15.0)[done]))
        accepted_err += float(np.sum(err[done]))
        keep = ~done
        if not np.any(keep):
            return accepted, accepted_err
        # split unresolved panels; reuse the five known values of each
        l, m, r = left[keep], mids[keep], right[keep]
        left = np.concatenate((l, m))
        right = np.concatenate((m, r))
        mids = np.concatenate((ql[keep], qr[keep]))
        fl_new = np.concatenate((fl[keep], fm[keep]))
        fr_new = np.concatenate((fm[keep], fr[keep]))
        fm = np.concatenate((fql[keep], fqr[keep]))
        coarse = np.concatenate((s_left[keep], s_right[keep]))
        fl, fr = fl_new, fr_new

    remaining = float(np.sum(coarse))
    raise ConvergenceError(
        f"adaptive Simpson did not converge within depth {max_depth} on [{a}, {b}]",
        accepted + remaining,
        accepted_err + float(np.sum(err[keep])),
    )
