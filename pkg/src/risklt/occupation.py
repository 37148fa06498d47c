"""Occupation measure, the local-time profile ``y -> L_t(y)`` and both sides of

    int_0^t g(X_s) ds = int g(y) L_t(y) dy

for piecewise-constant ``g``. All value intervals are left-open, right-closed.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import DomainError
from .process import SamplePath, evaluate, segment_arrays


def _readonly(values) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StepFunction:
    """Piecewise-constant function on the real line.

    ``values[0]`` holds on ``(-inf, b_1]``, ``values[i]`` on ``(b_i, b_{i+1}]``
    and ``values[-1]`` on ``(b_m, inf)``.
    """

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "breakpoints", _readonly(self.breakpoints))
        object.__setattr__(self, "values", _readonly(self.values))
        b, v = self.breakpoints, self.values
        if v.size != b.size + 1:
            raise ValueError(f"need len(values) == len(breakpoints) + 1, got {v.size} and {b.size}")
        if not np.all(np.isfinite(b)) or np.any(np.diff(b) <= 0):
            raise ValueError("breakpoints must be finite and strictly increasing")
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite")

    @classmethod
    def constant(cls, value: float) -> StepFunction:
        return cls([], [value])

    @classmethod
    def indicator(cls, a: float, b: float, height: float = 1.0) -> StepFunction:
        """``height * 1_{(a, b]}``; either end may be infinite."""
        if not a < b:
            raise ValueError("indicator needs a < b")
        if math.isinf(a) and math.isinf(b):
            return cls.constant(height)
        if math.isinf(a):
            return cls([b], [height, 0.0])
        if math.isinf(b):
            return cls([a], [0.0, height])
        return cls([a, b], [0.0, height, 0.0])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StepFunction):
            return NotImplemented
        return np.array_equal(self.breakpoints, other.breakpoints) and np.array_equal(self.values, other.values)

    __hash__ = None  # type: ignore[assignment]

    def __call__(self, y):
        idx = np.searchsorted(self.breakpoints, y, side="left")
        out = self.values[idx]
        return float(out) if np.ndim(out) == 0 else out

    def pieces(self) -> list[tuple[float, float, float]]:
        """``(left, right, value)`` for every piece, with infinite outer ends."""
        edges = np.concatenate(([-np.inf], self.breakpoints, [np.inf]))
        return [(float(edges[i]), float(edges[i + 1]), float(v)) for i, v in enumerate(self.values)]

    def scaled(self, factor: float) -> StepFunction:
        return StepFunction(self.breakpoints, self.values * factor)

    def to_dict(self) -> dict[str, Any]:
        return {"breakpoints": self.breakpoints.tolist(), "values": self.values.tolist()}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> StepFunction:
        if set(data) != {"breakpoints", "values"}:
            raise ValueError("step function JSON needs exactly 'breakpoints' and 'values'")
        return cls(data["breakpoints"], data["values"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> StepFunction:
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        """Two columns ``breakpoint,value``; each row gives the value from that breakpoint up
        to the next one. The first row has breakpoint ``-inf``."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["breakpoint", "value"])
        for left, v in zip(np.concatenate(([-np.inf], self.breakpoints)), self.values):
            writer.writerow([repr(float(left)), repr(float(v))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> StepFunction:
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0] != ["breakpoint", "value"]:
            raise ValueError("missing 'breakpoint,value' header")
        body = [(float(a), float(b)) for a, b in rows[1:] if a or b]
        if not body or body[0][0] != -math.inf:
            raise ValueError("first row must start at -inf")
        return cls([r[0] for r in body[1:]], [r[1] for r in body])


def integrate_product(f: StepFunction, g: StepFunction) -> float:
    """Exact ``int f(y) g(y) dy`` over merged breakpoints.

    Raises:
        ValueError: if the product is nonzero on an unbounded piece.
    """
    edges = np.union1d(f.breakpoints, g.breakpoints)
    if edges.size == 0:
        if f.values[0] * g.values[0] != 0:
            raise ValueError("product does not vanish at infinity")
        return 0.0
    if f.values[0] * g.values[0] != 0 or f.values[-1] * g.values[-1] != 0:
        raise ValueError("product does not vanish at infinity")
    mids = 0.5 * (edges[:-1] + edges[1:])
    return float(np.sum(f(mids) * g(mids) * np.diff(edges)))


@dataclass(frozen=True)
class LocalTimeProfile:
    """``y -> L_t(y)`` as a step function plus its point masses.

    ``atoms`` holds ``(level, weight)`` for the half-indicator terms of the
    explicit local-time formula: ``+1/(2c)`` at ``X_t`` and ``-1/(2c)`` at
    ``x0``. They are Lebesgue-null and never enter the step values.
    """

    step: StepFunction
    atoms: tuple[tuple[float, float], ...]

    def to_dict(self) -> dict[str, Any]:
        return {"profile": self.step.to_dict(), "atoms": [list(a) for a in self.atoms]}


def _check_t(path: SamplePath, t: float) -> None:
    if not (0 <= t <= path.horizon):
        raise DomainError(f"t must lie in [0, {path.horizon}], got {t!r}")


def occupation_measure(path: SamplePath, t: float, interval: tuple[float, float]) -> float:
    """Time spent in ``(a, b]`` during ``(0, t]``; ``a`` may be ``-inf`` and ``b`` ``inf``.

    Each rising piece contributes ``(min(b, v_end) - max(a, v_start))^+ / c``.
    """
    a, b = interval
    if not a < b:
        raise DomainError(f"need a < b, got ({a!r}, {b!r}]")
    _check_t(path, t)
    _, _, v0, v1 = segment_arrays(path, t)
    overlap = np.clip(np.minimum(b, v1) - np.maximum(a, v0), 0.0, None)
    return float(np.sum(overlap)) / path.params.c


def local_time_profile(path: SamplePath, t: float) -> LocalTimeProfile:
    """Local time at every level, as a step function with out-of-band atoms.

    The value on ``(b_j, b_{j+1}]`` is ``1/c`` times the number of linear
    pieces whose range ``(v_start, v_end]`` covers it.
    """
    _check_t(path, t)
    c = path.params.c
    _, _, v0, v1 = segment_arrays(path, t)
    half = 0.5 / c
    atoms = ((evaluate(path, t), half), (path.params.x0, -half))
    if v0.size == 0:
        return LocalTimeProfile(StepFunction.constant(0.0), atoms)
    levels = np.unique(np.concatenate((v0, v1)))
    delta = np.zeros(levels.size, dtype=np.int64)
    np.add.at(delta, np.searchsorted(levels, v0), 1)
    np.add.at(delta, np.searchsorted(levels, v1), -1)
    counts = np.cumsum(delta)
    values = np.concatenate(([0.0], counts[:-1] / c, [0.0]))
    return LocalTimeProfile(StepFunction(levels, values), atoms)


def occupation_integral(profile: StepFunction | LocalTimeProfile, g: StepFunction) -> float:
    """``int g(y) L_t(y) dy``; atoms carry no Lebesgue mass and are ignored."""
    step = profile.step if isinstance(profile, LocalTimeProfile) else profile
    return integrate_product(step, g)


def time_integral(path: SamplePath, t: float, g: StepFunction) -> float:
    """``int_0^t g(X_s) ds`` as the sum over pieces of ``g`` of value times occupation time."""
    _check_t(path, t)
    _, _, v0, v1 = segment_arrays(path, t)
    if v0.size == 0:
        return 0.0
    total = 0.0
    for a, b, value in g.pieces():
        if value == 0.0:
            continue
        overlap = np.clip(np.minimum(b, v1) - np.maximum(a, v0), 0.0, None)
        total += value * float(np.sum(overlap))
    return total / path.params.c


def random_step_function(rng: np.random.Generator, n_pieces: int, lo: float, hi: float) -> StepFunction:
    """Step function with ``n_pieces`` random pieces on ``(lo, hi]``, zero outside.

    Breakpoints are sorted uniforms on ``[lo, hi]`` (plus the two ends); piece
    values are standard normal.
    """
    if n_pieces < 1 or not lo < hi:
        raise ValueError("need n_pieces >= 1 and lo < hi")
    inner = np.sort(rng.uniform(lo, hi, size=n_pieces - 1))
    breaks = np.unique(np.concatenate(([lo], inner, [hi])))
    values = np.concatenate(([0.0], rng.standard_normal(breaks.size - 1), [0.0]))
    return StepFunction(breaks, values)
