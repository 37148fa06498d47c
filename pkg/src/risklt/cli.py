"""Command-line front end: ``risklt <subcommand> [options]``.

Options can also come from ``--config FILE`` (JSON with the keys of
:class:`RunConfig`); flags given on the command line win over the file.
Every CSV/JSON output carries the effective configuration and the library
version. Exit codes: 0 ok, 2 usage or bad input, 3 numerical non-convergence,
4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import shlex
import sys
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Any

import numpy as np

from . import __version__
from .analytics import (
    AdaptiveSeries,
    FixedSeries,
    NumericConfig,
    ProductIndicator,
    expected_local_time,
    result_record,
    theorem2_functional,
)
from .errors import ConvergenceError, DomainError, IntegrityError, PreconditionError
from .localtime import crossing_count, local_time_at
from .montecarlo import mc_expected_local_time_grid, mc_occupation_identity, mc_theorem2_lhs
from .occupation import StepFunction, local_time_profile, random_step_function
from .process import ClaimModel, ModelParams, SamplePath, simulate

REFERENCE_VALUE = 7.251e-3

EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    """Every setting any subcommand reads. ``None`` means "subcommand default"."""

    x0: float = 4.0
    c: float = 1.1
    alpha: float = 1.0
    claims: dict = field(default_factory=lambda: {"kind": "exponential", "beta": 1.0})
    horizon: float = 1.0
    t: float | None = None
    epsilon: float = 12.0
    x: list = field(default_factory=list)
    path: str | None = None
    seed: int | None = None
    n_paths: int = 1000
    mc: int = 0
    threads: int = 1
    series: dict | None = None
    quad_rel_tol: float = 1e-8
    quad_max_depth: int = 40
    include_singular: bool = False
    g: str | None = None
    pieces: int = 10
    format: str | None = None
    out: str | None = None

    def params(self) -> ModelParams:
        return ModelParams(x0=self.x0, c=self.c, alpha=self.alpha, claims=ClaimModel.from_dict(self.claims))

    def numeric(self) -> NumericConfig:
        return NumericConfig.from_dict(
            {"series": self.series, "quad_rel_tol": self.quad_rel_tol, "quad_max_depth": self.quad_max_depth}
        )

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


_CONFIG_KEYS = {f.name for f in fields(RunConfig)}


def _parse_series(text: str) -> dict:
    parts = text.split(":")
    if parts[0] == "fixed":
        return {"mode": "fixed", "n": int(parts[1]) if len(parts) > 1 else 5}
    if parts[0] == "adaptive":
        out: dict[str, Any] = {"mode": "adaptive"}
        if len(parts) > 1:
            out["rel_tol"] = float(parts[1])
        if len(parts) > 2:
            out["n_max"] = int(parts[2])
        return out
    raise argparse.ArgumentTypeError(f"series must be fixed[:N] or adaptive[:rel_tol[:n_max]], got {text!r}")


def _parse_levels(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad level list {text!r}") from exc


def _parse_grid(text: str) -> list[float]:
    try:
        start, stop, num = text.split(",")
        return np.linspace(float(start), float(stop), int(num)).tolist()
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"grid must be start,stop,num, got {text!r}") from exc


def _add_common(p: argparse.ArgumentParser, *, model: bool = True) -> None:
    S = argparse.SUPPRESS
    p.add_argument("--config", default=S, help="JSON file with RunConfig keys")
    if model:
        p.add_argument("--x0", type=float, default=S)
        p.add_argument("--c", type=float, default=S)
        p.add_argument("--alpha", type=float, default=S)
        p.add_argument("--beta", type=float, default=S, help="exponential claim rate")
    p.add_argument("--out", default=S, help="output file (default: stdout)")


def _add_numeric(p: argparse.ArgumentParser) -> None:
    S = argparse.SUPPRESS
    p.add_argument("--series", type=_parse_series, default=S, help="fixed[:N] or adaptive[:rel_tol[:n_max]]")
    p.add_argument("--quad-rel-tol", dest="quad_rel_tol", type=float, default=S)
    p.add_argument("--quad-max-depth", dest="quad_max_depth", type=int, default=S)
    p.add_argument("--include-singular", dest="include_singular", action="store_true", default=S)


def _add_levels(p: argparse.ArgumentParser) -> None:
    S = argparse.SUPPRESS
    p.add_argument("--x", type=_parse_levels, action="append", default=S, help="comma-separated levels")
    p.add_argument("--x-grid", dest="x_grid", type=_parse_grid, default=S, help="start,stop,num")


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    parser = argparse.ArgumentParser(prog="risklt", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"risklt {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="write a path fixture")
    _add_common(p)
    p.add_argument("--horizon", type=float, default=S)
    p.add_argument("--seed", type=int, default=S)

    for name, helptext in (("local-time", "L_t(x) and crossing counts on one path"),
                           ("profile", "local-time profile of one path")):
        p = sub.add_parser(name, help=helptext)
        _add_common(p)
        p.add_argument("--path", default=S, help="path fixture (otherwise simulate inline)")
        p.add_argument("--horizon", type=float, default=S)
        p.add_argument("--seed", type=int, default=S)
        p.add_argument("--t", type=float, default=S)
        p.add_argument("--format", choices=["csv", "json"], default=S)
        if name == "local-time":
            _add_levels(p)

    p = sub.add_parser("occupation-check", help="max pathwise gap in the occupation-density identity")
    _add_common(p)
    p.add_argument("--t", type=float, default=S)
    p.add_argument("--n-paths", dest="n_paths", type=int, default=S)
    p.add_argument("--seed", type=int, default=S)
    p.add_argument("--g", choices=["random", "one", "zero"], default=S)
    p.add_argument("--pieces", type=int, default=S)
    p.add_argument("--threads", type=int, default=S)

    p = sub.add_parser("expected-local-time", help="E[L_t(x)] on a level grid, optionally with Monte Carlo")
    _add_common(p)
    _add_numeric(p)
    _add_levels(p)
    p.add_argument("--t", type=float, default=S)
    p.add_argument("--mc", type=int, default=S, help="Monte Carlo paths (0 = off)")
    p.add_argument("--seed", type=int, default=S)
    p.add_argument("--threads", type=int, default=S)
    p.add_argument("--format", choices=["csv", "json"], default=S)

    for name, helptext in (("paper-example", "two-time occupation functional at the worked-example parameters"),
                           ("two-time-mc", "Monte Carlo estimate of the two-time occupation functional")):
        p = sub.add_parser(name, help=helptext)
        _add_common(p)
        p.add_argument("--t", type=float, default=S)
        p.add_argument("--epsilon", type=float, default=S)
        p.add_argument("--g", choices=["delta", "one"], default=S, help="delta = [0,inf)^2 indicator")
        if name == "paper-example":
            _add_numeric(p)
        else:
            p.add_argument("--n-paths", dest="n_paths", type=int, default=S)
            p.add_argument("--seed", type=int, default=S)
            p.add_argument("--threads", type=int, default=S)
    return parser


def _command_defaults(command: str) -> dict[str, Any]:
    seed = int(os.environ.get("RISKLT_SEED", "0"))
    base: dict[str, Any] = {"seed": seed}
    if command == "paper-example":
        base.update(series={"mode": "fixed", "n": 5}, g="delta", t=1.0, format="json")
    elif command == "two-time-mc":
        base.update(g="delta", t=1.0, n_paths=100_000, format="json")
    elif command == "expected-local-time":
        base.update(series={"mode": "adaptive"}, t=1.0, format="csv")
    elif command == "occupation-check":
        base.update(g="random", t=1.0, format="json")
    elif command in ("local-time", "profile"):
        base.update(format="csv")
    else:
        base.update(format="json")
    return base


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then the config file, then explicit flags."""
    merged: dict[str, Any] = _command_defaults(args.command)
    given = vars(args).copy()
    given.pop("command")
    if "config" in given:
        path = given.pop("config")
        try:
            with open(path) as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise UsageError(f"config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        unknown = set(data) - _CONFIG_KEYS
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        merged.update(data)
    if "beta" in given:
        merged["claims"] = {"kind": "exponential", "beta": given.pop("beta")}
    levels: list[float] = []
    for chunk in given.pop("x", []):
        levels.extend(chunk)
    levels.extend(given.pop("x_grid", []))
    if levels:
        merged["x"] = levels
    merged.update(given)
    try:
        cfg = RunConfig(**merged)
    except TypeError as exc:
        raise UsageError(str(exc)) from exc
    if cfg.t is None and cfg.path is None:
        cfg = replace(cfg, t=cfg.horizon)
    return cfg


def _fmt(v: Any) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _csv(header: list[str], rows: list[list[Any]], cfg: RunConfig) -> str:
    buf = io.StringIO()
    buf.write(f"# risklt {__version__} config={json.dumps(cfg.to_dict(), sort_keys=True)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _json(payload: dict[str, Any], cfg: RunConfig) -> str:
    payload = dict(payload)
    payload["config"] = cfg.to_dict()
    payload["version"] = __version__
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _load_or_simulate(cfg: RunConfig) -> tuple[SamplePath, RunConfig]:
    """The path to analyse, and ``cfg`` updated to describe it (``t`` defaults to its horizon)."""
    if cfg.path:
        path = SamplePath.load(cfg.path)
        pd = path.params.to_dict()
        cfg = replace(cfg, x0=pd["x0"], c=pd["c"], alpha=pd["alpha"], claims=pd["claims"], horizon=path.horizon)
    else:
        path = simulate(cfg.params(), cfg.horizon, cfg.seed)
    if cfg.t is None:
        cfg = replace(cfg, t=path.horizon)
    return path, cfg


def cmd_simulate(cfg: RunConfig) -> str:
    return simulate(cfg.params(), cfg.horizon, cfg.seed).to_json(indent=2) + "\n"


def cmd_local_time(cfg: RunConfig) -> str:
    if not cfg.x:
        raise UsageError("local-time needs levels (--x or --x-grid)")
    path, cfg = _load_or_simulate(cfg)
    rows = [[x, local_time_at(path, cfg.t, x), crossing_count(path, cfg.t, x)] for x in cfg.x]
    if cfg.format == "json":
        return _json({"rows": [dict(zip(("x", "local_time", "crossings"), r)) for r in rows]}, cfg)
    return _csv(["x", "local_time", "crossings"], rows, cfg)


def cmd_profile(cfg: RunConfig) -> str:
    path, cfg = _load_or_simulate(cfg)
    prof = local_time_profile(path, cfg.t)
    if cfg.format == "json":
        return _json(prof.to_dict(), cfg)
    body = prof.step.to_csv()
    atoms = "".join(f"# atom,{_fmt(level)},{_fmt(w)}\n" for level, w in prof.atoms)
    return f"# risklt {__version__} config={json.dumps(cfg.to_dict(), sort_keys=True)}\n" + atoms + body


def cmd_occupation_check(cfg: RunConfig) -> str:
    params = cfg.params()
    if cfg.g == "one":
        g = StepFunction.constant(1.0)
    elif cfg.g == "zero":
        g = StepFunction.constant(0.0)
    else:
        lo = params.x0 - 5.0 * (params.alpha * cfg.t * params.claims.mean + 1.0)
        g = random_step_function(np.random.default_rng(cfg.seed), cfg.pieces, lo, params.x0 + params.c * cfg.t)
    gap = mc_occupation_identity(params, cfg.t, cfg.n_paths, cfg.seed, g, cfg.threads)
    return _json({"quantity": "occupation_identity_max_gap", "max_discrepancy": gap, "g": g.to_dict()}, cfg)


def cmd_expected_local_time(cfg: RunConfig) -> str:
    if not cfg.x:
        raise UsageError("expected-local-time needs levels (--x or --x-grid)")
    params, ncfg = cfg.params(), cfg.numeric()
    analytic = [expected_local_time(params, cfg.t, x, ncfg, cfg.include_singular) for x in cfg.x]
    mc = mc_expected_local_time_grid(params, cfg.t, cfg.x, cfg.mc, cfg.seed, cfg.threads) if cfg.mc else None
    rows = []
    for j, x in enumerate(cfg.x):
        row: list[Any] = [x, analytic[j].value]
        row += [mc[j].mean, mc[j].std_error] if mc else ["", ""]
        rows.append(row)
    if cfg.format == "json":
        recs = []
        for j, x in enumerate(cfg.x):
            rec = result_record("expected_local_time", params, ncfg, analytic[j].value, analytic[j].err_estimate,
                                x=x, include_singular=cfg.include_singular)
            if mc:
                rec["mc"] = mc[j].to_dict()
            recs.append(rec)
        return _json({"records": recs}, cfg)
    return _csv(["x", "analytic", "mc_mean", "mc_se"], rows, cfg)


def _two_time_g(name: str) -> ProductIndicator:
    if name == "one":
        return ProductIndicator.one()
    return ProductIndicator.rectangle((0.0, math.inf), [(0.0, math.inf)])


def cmd_paper_example(cfg: RunConfig) -> str:
    params, ncfg = cfg.params(), cfg.numeric()
    g = _two_time_g(cfg.g)
    res = theorem2_functional(params, cfg.t, cfg.epsilon, g, ncfg, cfg.include_singular)
    tight_cfg = NumericConfig(series=AdaptiveSeries(), quad_rel_tol=1e-10, quad_max_depth=cfg.quad_max_depth)
    tight = theorem2_functional(params, cfg.t, cfg.epsilon, g, tight_cfg, cfg.include_singular)
    payload = result_record("theorem2_functional", params, ncfg, res.value, res.err_estimate,
                            t=cfg.t, epsilon=cfg.epsilon, g=cfg.g, include_singular=cfg.include_singular)
    payload["reference"] = REFERENCE_VALUE
    payload["rel_deviation"] = (res.value - REFERENCE_VALUE) / REFERENCE_VALUE
    payload["tight"] = {"cfg": tight_cfg.to_dict(), "value": tight.value, "err_estimate": tight.err_estimate}
    if cfg.include_singular:
        cmd = ["risklt", "two-time-mc", "--x0", cfg.x0, "--c", cfg.c, "--alpha", cfg.alpha,
               "--beta", params.claims.to_dict().get("beta"), "--t", cfg.t, "--epsilon", cfg.epsilon,
               "--g", cfg.g, "--n-paths", 100000, "--seed", cfg.seed]
        payload["mc_check_command"] = " ".join(shlex.quote(_fmt(v)) for v in cmd)
    return _json(payload, cfg)


def cmd_two_time_mc(cfg: RunConfig) -> str:
    params = cfg.params()
    est = mc_theorem2_lhs(params, cfg.t, cfg.epsilon, _two_time_g(cfg.g), cfg.n_paths, cfg.seed, cfg.threads)
    return _json({"quantity": "two_time_occupation_mc", "estimate": est.to_dict()}, cfg)


COMMANDS = {
    "simulate": cmd_simulate,
    "local-time": cmd_local_time,
    "profile": cmd_profile,
    "occupation-check": cmd_occupation_check,
    "expected-local-time": cmd_expected_local_time,
    "paper-example": cmd_paper_example,
    "two-time-mc": cmd_two_time_mc,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        text = COMMANDS[args.command](cfg)
    except (UsageError, ValueError, TypeError, KeyError, DomainError, PreconditionError, IntegrityError) as exc:
        if isinstance(exc, ConvergenceError):
            raise
        print(f"risklt {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"risklt {args.command}: non-convergence: {exc} (partial={exc.partial!r})", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"risklt {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        if cfg.out:
            with open(cfg.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"risklt {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
