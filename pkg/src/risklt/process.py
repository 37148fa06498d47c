"""Classical risk process: parameters, sample paths, exact evaluation and simulation.

A path is stored through its jump times and claim sizes only. Every value the
rest of the package uses (post-jump values, pre-jump values, linear pieces) is
derived from two cached arrays so that all modules see bit-identical numbers:

* ``post[i]`` is ``X_{T_i}`` with ``post[0] = x0`` (``T_0 = 0``),
* ``pre[i]`` is ``X_{T_{i+1}-} = post[i] + c * (T_{i+1} - T_i)``.

Random numbers come from numpy's ``PCG64`` bit generator via
``numpy.random.default_rng(seed)``. Path ``i`` of a Monte Carlo run uses
``path_seed(master_seed, i)``, a 64-bit word drawn from
``SeedSequence(master_seed, spawn_key=(i,))``. Golden values in the test suite
are pinned to numpy 2.x, whose ``PCG64`` and ``SeedSequence`` streams are
stable across releases.
"""

from __future__ import annotations

import json
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Any, ClassVar

import numpy as np

from .errors import DomainError

# Chunk size of exponential gaps drawn per call in ``simulate``. Part of the
# reproducibility contract: changing it changes every simulated path.
_CHUNK_SIGMAS = 4.0
_CHUNK_EXTRA = 8


class ClaimModel(ABC):
    """Law of a single claim size ``R_k``: nonnegative and absolutely continuous."""

    kind: ClassVar[str]
    _registry: ClassVar[dict[str, type[ClaimModel]]] = {}

    def __init_subclass__(cls, **kwargs: Any) -> None:
        super().__init_subclass__(**kwargs)
        if "kind" in cls.__dict__:
            ClaimModel._registry[cls.kind] = cls

    @abstractmethod
    def density(self, y): ...

    @abstractmethod
    def cdf(self, y): ...

    @abstractmethod
    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray: ...

    @property
    @abstractmethod
    def mean(self) -> float: ...

    @abstractmethod
    def to_dict(self) -> dict[str, Any]: ...

    @staticmethod
    def from_dict(data: dict[str, Any]) -> ClaimModel:
        data = dict(data)
        try:
            kind = data.pop("kind")
            cls = ClaimModel._registry[kind]
        except KeyError as exc:
            raise ValueError(f"unknown claim model: {data!r}") from exc
        return cls(**data)


@dataclass(frozen=True)
class ExponentialClaims(ClaimModel):
    """Exponential claims with rate ``beta`` (mean ``1 / beta``)."""

    beta: float
    kind: ClassVar[str] = "exponential"

    def __post_init__(self) -> None:
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise ValueError(f"beta must be positive and finite, got {self.beta!r}")

    def density(self, y):
        y = np.asarray(y, dtype=float)
        return np.where(y > 0, self.beta * np.exp(-self.beta * np.maximum(y, 0.0)), 0.0)

    def cdf(self, y):
        y = np.asarray(y, dtype=float)
        return np.where(y > 0, -np.expm1(-self.beta * np.maximum(y, 0.0)), 0.0)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.exponential(1.0 / self.beta, size)

    @property
    def mean(self) -> float:
        return 1.0 / self.beta

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "beta": self.beta}


@dataclass(frozen=True)
class ModelParams:
    """Parameters of ``X_t = x0 + c t - sum_{k <= N_t} R_k``.

    Args:
        x0: initial capital, ``>= 0``.
        c: premium rate, ``> 0``.
        alpha: claim arrival rate, ``> 0``.
        claims: claim size law.
    """

    x0: float
    c: float
    alpha: float
    claims: ClaimModel

    def __post_init__(self) -> None:
        if not (self.x0 >= 0 and math.isfinite(self.x0)):
            raise ValueError(f"x0 must be finite and >= 0, got {self.x0!r}")
        if not (self.c > 0 and math.isfinite(self.c)):
            raise ValueError(f"c must be finite and > 0, got {self.c!r}")
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be finite and > 0, got {self.alpha!r}")
        if not isinstance(self.claims, ClaimModel):
            raise TypeError("claims must be a ClaimModel")

    def to_dict(self) -> dict[str, Any]:
        return {"x0": self.x0, "c": self.c, "alpha": self.alpha, "claims": self.claims.to_dict()}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ModelParams:
        return cls(
            x0=float(data["x0"]),
            c=float(data["c"]),
            alpha=float(data["alpha"]),
            claims=ClaimModel.from_dict(data["claims"]),
        )


@dataclass(frozen=True)
class Segment:
    """One linear piece of a path: value rises from ``v_start`` to ``v_end``."""

    t_start: float
    t_end: float
    v_start: float
    v_end: float


def _frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SamplePath:
    """One realization of the risk process on ``[0, horizon]``.

    ``jump_times`` must be strictly increasing inside ``(0, horizon]`` and
    ``claim_sizes`` nonnegative with matching length. Arrays are copied and
    made read-only.
    """

    params: ModelParams
    jump_times: np.ndarray
    claim_sizes: np.ndarray
    horizon: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "jump_times", _frozen_array(self.jump_times))
        object.__setattr__(self, "claim_sizes", _frozen_array(self.claim_sizes))
        object.__setattr__(self, "horizon", float(self.horizon))
        jt, cs = self.jump_times, self.claim_sizes
        if not (self.horizon >= 0 and math.isfinite(self.horizon)):
            raise ValueError(f"horizon must be finite and >= 0, got {self.horizon!r}")
        if jt.shape != cs.shape:
            raise ValueError("jump_times and claim_sizes must have the same length")
        if jt.size:
            if not (jt[0] > 0 and jt[-1] <= self.horizon):
                raise ValueError("jump times must lie in (0, horizon]")
            if np.any(np.diff(jt) <= 0):
                raise ValueError("jump times must be strictly increasing")
            if not np.all(np.isfinite(cs)) or np.any(cs < 0):
                raise ValueError("claim sizes must be finite and >= 0")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SamplePath):
            return NotImplemented
        return (
            self.params == other.params
            and self.horizon == other.horizon
            and np.array_equal(self.jump_times, other.jump_times)
            and np.array_equal(self.claim_sizes, other.claim_sizes)
        )

    __hash__ = None  # type: ignore[assignment]

    @property
    def n_jumps(self) -> int:
        return int(self.jump_times.size)

    @cached_property
    def _starts(self) -> np.ndarray:
        # start times of the linear pieces: 0, T_1, ..., T_k
        return _frozen_array(np.concatenate(([0.0], self.jump_times)))

    @cached_property
    def post(self) -> np.ndarray:
        """``X_{T_i}`` for ``i = 0..k`` (``X_{T_0} = x0``)."""
        c = self.params.c
        steps = c * np.diff(self._starts) - self.claim_sizes
        return _frozen_array(_post_values(self.params.x0, steps))

    @cached_property
    def pre(self) -> np.ndarray:
        """``X_{T_i -}`` for ``i = 1..k``."""
        return _frozen_array(self.post[:-1] + self.params.c * np.diff(self._starts))

    def to_dict(self) -> dict[str, Any]:
        out = self.params.to_dict()
        out["horizon"] = self.horizon
        out["jump_times"] = self.jump_times.tolist()
        out["claim_sizes"] = self.claim_sizes.tolist()
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> SamplePath:
        expected = {"x0", "c", "alpha", "claims", "horizon", "jump_times", "claim_sizes"}
        if set(data) != expected:
            raise ValueError(f"path JSON must have exactly the keys {sorted(expected)}")
        return cls(
            params=ModelParams.from_dict(data),
            jump_times=data["jump_times"],
            claim_sizes=data["claim_sizes"],
            horizon=data["horizon"],
        )

    def to_json(self, **kwargs: Any) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text: str) -> SamplePath:
        return cls.from_dict(json.loads(text))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(indent=2) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> SamplePath:
        return cls.from_json(Path(path).read_text())


def _post_values(x0: float, steps: np.ndarray) -> np.ndarray:
    # sequential left-to-right accumulation; np.cumsum is not pairwise
    return np.concatenate(([x0], x0 + np.cumsum(steps)))


def _check_time(path: SamplePath, t) -> None:
    t = np.asarray(t, dtype=float)
    if np.any(~(t >= 0)) or np.any(t > path.horizon):
        raise DomainError(f"t must lie in [0, {path.horizon}], got {t}")


def jumps_upto(path: SamplePath, t: float) -> int:
    """Number of jumps in ``(0, t]``."""
    return int(np.searchsorted(path.jump_times, t, side="right"))


def evaluate(path: SamplePath, t):
    """Right-continuous value ``X_t``; accepts scalars or arrays."""
    _check_time(path, t)
    k = np.searchsorted(path.jump_times, t, side="right")
    out = path.post[k] + path.params.c * (np.asarray(t, dtype=float) - path._starts[k])
    return float(out) if np.ndim(out) == 0 else out


def evaluate_left(path: SamplePath, t):
    """Left limit ``X_{t-}`` (``X_{0-} = x0``); accepts scalars or arrays."""
    _check_time(path, t)
    k = np.searchsorted(path.jump_times, t, side="left")
    out = path.post[k] + path.params.c * (np.asarray(t, dtype=float) - path._starts[k])
    return float(out) if np.ndim(out) == 0 else out


def segment_arrays(path: SamplePath, t: float) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Linear pieces covering ``(0, t]`` as four arrays ``(t_start, t_end, v_start, v_end)``.

    Zero-length pieces (``t = 0``, or ``t`` exactly at a jump time) are dropped.
    """
    _check_time(path, t)
    k = jumps_upto(path, t)
    t0 = path._starts[: k + 1]
    t1 = np.append(path.jump_times[:k], t)
    v0 = path.post[: k + 1]
    v1 = np.append(path.pre[:k], path.post[k] + path.params.c * (t - path._starts[k]))
    if t1[-1] <= t0[-1]:
        t0, t1, v0, v1 = t0[:-1], t1[:-1], v0[:-1], v1[:-1]
    return t0, t1, v0, v1


def segments(path: SamplePath, t: float) -> list[Segment]:
    """Ordered maximal linear pieces of the path on ``(0, t]``."""
    return [Segment(*map(float, row)) for row in zip(*segment_arrays(path, t))]


def path_seed(master_seed: int, index: int) -> int:
    """64-bit seed of path ``index`` in a run keyed by ``master_seed``."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(index),))
    return int(ss.generate_state(1, np.uint64)[0])


def simulate(params: ModelParams, horizon: float, seed: int) -> SamplePath:
    """Draw one path on ``[0, horizon]``.

    Inter-arrival gaps are drawn first, in chunks of
    ``ceil(alpha*horizon + 4*sqrt(alpha*horizon)) + 8`` until the horizon is
    passed; claim sizes are drawn afterwards from the same generator.
    """
    if not (horizon >= 0 and math.isfinite(horizon)):
        raise DomainError(f"horizon must be finite and >= 0, got {horizon!r}")
    rng = np.random.default_rng(seed)
    mean_count = params.alpha * horizon
    chunk = int(math.ceil(mean_count + _CHUNK_SIGMAS * math.sqrt(mean_count))) + _CHUNK_EXTRA
    scale = 1.0 / params.alpha
    parts = []
    last = 0.0
    while True:
        arrivals = last + np.cumsum(rng.exponential(scale, chunk))
        parts.append(arrivals)
        if arrivals[-1] > horizon:
            break
        last = float(arrivals[-1])
    times = np.concatenate(parts) if len(parts) > 1 else parts[0]
    times = times[times <= horizon]
    claims = params.claims.sample(rng, times.size)
    return SamplePath(params=params, jump_times=times, claim_sizes=claims, horizon=horizon)
