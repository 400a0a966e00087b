"""Command-line front end.

Three subcommands:

* ``run``      simulate each requested schedule and write one CSV per schedule
* ``speedup``  sweep worker counts with growing schedules of R = n rounds
* ``bound``    print the admissibility report and bound values for a config

Configuration is a flat ``key = value`` file (``#`` starts a comment line);
every key has a default, unknown and duplicate keys are rejected with their
line numbers.  Values can be overridden by environment variables named
``LOCALSGD_<KEY>`` and then by command-line flags, in that order.

Schedule specs: ``sync``, ``oneshot``, ``fixed:H``, ``growing:R`` (optionally
``growing:R:a`` to force the interval coefficient), and ``custom:t1,t2,...``
with a strictly increasing list ending at T.

Emitted CSVs embed the experiment-defining config and the seed as ``#``
comment lines, so a run is reconstructible from its output.  Output-location
and execution keys (``out``, ``threads``) are not echoed; results do not
depend on them, and files stay byte-identical across thread counts.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
from pathlib import Path

import numpy as np

from .bounds import bound_fixed, bound_general, bound_growing, lag_sum
from .core import NoiseParams, ProblemParams, Schedule
from .engine import run_trials
from .objectives import (
    LogisticL2,
    Objective,
    QuadraticStrongGrowth,
    bundled_sample_path,
    load_libsvm,
)
from .schedules import fixed_interval, growing, min_beta, one_shot, synchronous, validate


class ConfigError(ValueError):
    """Invalid configuration (unknown key, bad value, malformed line)."""


def _conv_int(s: str) -> int:
    return int(s)


def _conv_float(s: str) -> float:
    return float(s)


def _conv_objective(s: str) -> str:
    if s not in ("quadratic", "logistic"):
        raise ValueError(f"must be 'quadratic' or 'logistic', got {s!r}")
    return s


def _conv_beta(s: str):
    if s == "auto":
        return "auto"
    v = float(s)
    if not v > 0:
        raise ValueError(f"beta must be positive or 'auto', got {s!r}")
    return v


def _conv_x0(s: str) -> str:
    if s in ("default", "zeros", "ones"):
        return s
    float(s)  # raises ValueError if not numeric
    return s


# key -> (converter, default, help); defaults are the noisy-quadratic preset
CONFIG_SCHEMA = {
    "objective": (_conv_objective, "quadratic", "quadratic | logistic"),
    "d": (_conv_int, 3, "quadratic dimension"),
    "c1": (_conv_float, 9.0, "quadratic multiplicative noise variance"),
    "c2": (_conv_float, 0.25, "quadratic additive noise variance per coordinate"),
    "data": (str, "", "LIBSVM file for the logistic objective (empty: bundled sample)"),
    "lambda": (_conv_float, 0.05, "logistic L2 regularization strength"),
    "batch": (_conv_int, 1, "logistic minibatch size"),
    "T": (_conv_int, 1000, "number of local steps"),
    "n": (_conv_int, 20, "number of workers"),
    "beta": (_conv_beta, 1.0, "step-size offset, or 'auto' for the minimal admissible value"),
    "trials": (_conv_int, 500, "independent trials to aggregate"),
    "seed": (_conv_int, 0, "master seed"),
    "schedules": (str, "sync fixed:5 fixed:25 growing:26 oneshot",
                  "space-separated schedule specs"),
    "stride": (_conv_int, 0, "metric recording stride (0: automatic)"),
    "threads": (_conv_int, 1, "worker threads across trials"),
    "x0": (_conv_x0, "default", "start point: default | zeros | ones | a number (constant fill)"),
    "out": (str, "out", "output directory"),
    "n_list": (str, "5,10,20,40", "worker counts for the speedup sweep"),
    "mu": (_conv_float, 1.0, "strong convexity constant (bound subcommand)"),
    "L": (_conv_float, 1.0, "smoothness constant (bound subcommand)"),
    "c": (_conv_float, 9.0, "multiplicative noise coefficient (bound subcommand)"),
    "sigma2": (_conv_float, 0.75, "additive noise floor (bound subcommand)"),
    "xi0": (_conv_float, 1.5, "initial suboptimality (bound subcommand)"),
}

# run results do not depend on these, so they are left out of the CSV echo
_NO_ECHO = ("out", "threads")

ENV_PREFIX = "LOCALSGD_"


def _convert(key: str, raw: str, where: str):
    conv = CONFIG_SCHEMA[key][0]
    try:
        return conv(raw)
    except ValueError as e:
        raise ConfigError(f"invalid value for '{key}' ({where}): {e}") from None


def parse_config(text: str, source: str = "config") -> dict:
    """Parse ``key = value`` lines into typed values, rejecting unknown keys."""
    out: dict = {}
    first_line: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"malformed line {lineno} in {source}: {raw!r} (expected 'key = value')")
        key = key.strip()
        value = value.strip()
        if key not in CONFIG_SCHEMA:
            raise ConfigError(f"unknown config key '{key}' (line {lineno} in {source})")
        if key in first_line:
            raise ConfigError(
                f"duplicate key '{key}' (lines {first_line[key]} and {lineno} in {source})"
            )
        first_line[key] = lineno
        out[key] = _convert(key, value, f"line {lineno} in {source}")
    return out


def effective_config(args: argparse.Namespace) -> tuple[dict, set]:
    """Defaults, then config file, then LOCALSGD_* env vars, then flags."""
    cfg = {k: default for k, (_, default, _) in CONFIG_SCHEMA.items()}
    explicit: set[str] = set()
    if args.config is not None:
        text = Path(args.config).read_text(encoding="utf-8")
        file_cfg = parse_config(text, source=args.config)
        cfg.update(file_cfg)
        explicit.update(file_cfg)
    for key in CONFIG_SCHEMA:
        var = ENV_PREFIX + key.upper()
        if var in os.environ:
            cfg[key] = _convert(key, os.environ[var], f"environment variable {var}")
            explicit.add(key)
    flag_map = {
        "seed": args.seed,
        "trials": args.trials,
        "out": args.out,
        "data": args.data,
    }
    for key, val in flag_map.items():
        if val is not None:
            cfg[key] = _convert(key, str(val), f"flag --{key}")
            explicit.add(key)
    if args.schedule:
        cfg["schedules"] = " ".join(args.schedule)
        explicit.add("schedules")
    return cfg, explicit


def parse_schedule_spec(spec: str, T: int) -> Schedule:
    """Build a Schedule from a spec string (see module docstring for the grammar)."""
    name, _, rest = spec.partition(":")
    try:
        if name == "sync" and not rest:
            return synchronous(T)
        if name == "oneshot" and not rest:
            return one_shot(T)
        if name == "fixed":
            return fixed_interval(T, int(rest))
        if name == "growing":
            parts = rest.split(":")
            if len(parts) == 1:
                return growing(T, int(parts[0]))
            if len(parts) == 2:
                return growing(T, int(parts[0]), a=int(parts[1]))
        if name == "custom":
            times = tuple(int(tok) for tok in rest.split(","))
            return Schedule(T, times)
    except ValueError as e:
        raise ConfigError(f"bad schedule spec '{spec}': {e}") from None
    raise ConfigError(
        f"unknown schedule spec '{spec}' (expected sync, oneshot, fixed:H, "
        f"growing:R[:a], or custom:t1,t2,...)"
    )


def _growing_rounds(spec: str) -> int | None:
    """R of a growing:R[:a] spec, None for other schedule kinds."""
    name, _, rest = spec.partition(":")
    if name != "growing":
        return None
    return int(rest.split(":")[0])


def _slug(spec: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "_", spec)


def _fmt(v: float) -> str:
    return repr(float(v))


def build_objective(cfg: dict) -> Objective:
    if cfg["objective"] == "quadratic":
        return QuadraticStrongGrowth(d=cfg["d"], c1=cfg["c1"], c2=cfg["c2"])
    path = cfg["data"] if cfg["data"] else bundled_sample_path()
    data = load_libsvm(path)
    return LogisticL2(data, lam=cfg["lambda"], batch=cfg["batch"])


def _resolve_x0(cfg: dict, obj: Objective) -> np.ndarray | None:
    v = cfg["x0"]
    if v == "default":
        return None
    if v == "zeros":
        return np.zeros(obj.dim)
    if v == "ones":
        return np.ones(obj.dim)
    return np.full(obj.dim, float(v))


def _resolve_beta(cfg: dict, mu: float, L: float, nz: NoiseParams, spec: str) -> float:
    if cfg["beta"] != "auto":
        return cfg["beta"]
    return min_beta(mu, L, cfg["n"], nz, cfg["T"], R=_growing_rounds(spec))


def _config_echo(cfg: dict) -> list[str]:
    return [f"# config: {k} = {cfg[k]}" for k in sorted(CONFIG_SCHEMA) if k not in _NO_ECHO]


def _write_csv(path: Path, comment_lines: list[str], header: str, rows: list[str]):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for line in comment_lines:
            fh.write(line + "\n")
        fh.write(header + "\n")
        for row in rows:
            fh.write(row + "\n")


def cmd_run(cfg: dict) -> int:
    obj = build_objective(cfg)
    x0 = _resolve_x0(cfg, obj)
    out_dir = Path(cfg["out"])
    specs = cfg["schedules"].split()
    if not specs:
        raise ConfigError("no schedules given")
    for spec in specs:
        sched = parse_schedule_spec(spec, cfg["T"])
        beta = _resolve_beta(cfg, obj.mu, obj.L, obj.noise, spec)
        p = ProblemParams(mu=obj.mu, L=obj.L, n=cfg["n"], T=cfg["T"], beta=beta)
        agg = run_trials(obj, sched, p, cfg["seed"], cfg["trials"], x0=x0,
                         stride=cfg["stride"] or None, threads=cfg["threads"])
        comments = _config_echo(cfg)
        comments.append(f"# seed: {cfg['seed']}")
        comments.append(f"# schedule: {spec}")
        rows = [
            f"{int(t)},{_fmt(ms)},{_fmt(ss)},{_fmt(mc)},{int(cc)}"
            for t, ms, ss, mc, cc in zip(
                agg.t, agg.mean_subopt, agg.std_subopt, agg.mean_consensus, agg.comms
            )
        ]
        path = out_dir / f"{_slug(spec)}.csv"
        _write_csv(path, comments, "t,mean_subopt,std_subopt,mean_consensus,comm_count", rows)
        print(f"{spec}: rounds={sched.rounds} beta={beta:g} "
              f"final mean subopt={agg.mean_subopt[-1]:.6g} -> {path}")
    return 0


def cmd_speedup(cfg: dict) -> int:
    obj = build_objective(cfg)
    x0 = _resolve_x0(cfg, obj)
    try:
        ns = [int(tok) for tok in cfg["n_list"].split(",")]
    except ValueError as e:
        raise ConfigError(f"bad n_list: {e}") from None
    rows = []
    for n in ns:
        spec = f"growing:{n}"
        sched = parse_schedule_spec(spec, cfg["T"])
        beta = _resolve_beta(dict(cfg, n=n), obj.mu, obj.L, obj.noise, spec)
        p = ProblemParams(mu=obj.mu, L=obj.L, n=n, T=cfg["T"], beta=beta)
        agg = run_trials(obj, sched, p, cfg["seed"], cfg["trials"], x0=x0,
                         stride=cfg["stride"] or None, threads=cfg["threads"])
        reference = obj.noise.sigma2 / (obj.mu * n * cfg["T"])
        rows.append(f"{n},{_fmt(agg.mean_subopt[-1])},{_fmt(agg.std_subopt[-1])},{_fmt(reference)}")
        print(f"n={n}: final mean subopt={agg.mean_subopt[-1]:.6g} reference={reference:.6g}")
    comments = _config_echo(cfg)
    comments.append(f"# seed: {cfg['seed']}")
    path = Path(cfg["out"]) / "speedup.csv"
    _write_csv(path, comments, "n,mean_final_subopt,std_final_subopt,reference", rows)
    print(f"-> {path}")
    return 0


def cmd_bound(cfg: dict, explicit: set) -> int:
    nz = NoiseParams(c=cfg["c"], sigma2=cfg["sigma2"])
    specs = cfg["schedules"].split()
    if not specs:
        raise ConfigError("no schedules given")
    for spec in specs:
        sched = parse_schedule_spec(spec, cfg["T"])
        beta = _resolve_beta(cfg, cfg["mu"], cfg["L"], nz, spec)
        p = ProblemParams(mu=cfg["mu"], L=cfg["L"], n=cfg["n"], T=cfg["T"], beta=beta)
        report = validate(sched, p, nz)
        print(f"schedule: {spec} (rounds={sched.rounds}, T={p.T})")
        print(f"beta = {beta!r}" + (" (auto)" if cfg["beta"] == "auto" else ""))
        print(f"beta >= 2*kappa^2: {'yes' if report.beta_ok else 'no'}")
        print("interval  start  length  condition  admissible")
        for iv in report.intervals:
            print(f"{iv.index:8d}  {iv.start:5d}  {iv.length:6d}  {iv.lhs:9.4g}  {'yes' if iv.ok else 'no'}")
        print(f"admissible: {'yes' if report.overall else 'no'}")
        ls = lag_sum(sched, p.beta)
        bg = bound_general(cfg["xi0"], sched, p, nz, check=False)
        print(f"lag_sum = {ls!r}")
        print(f"bound_general = {bg!r}")
        extra_rows = []
        name, _, rest = spec.partition(":")
        if name in ("sync", "fixed", "oneshot") and p.beta > 1:
            H = 1 if name == "sync" else (p.T if name == "oneshot" else int(rest))
            bf = bound_fixed(cfg["xi0"], H, p, nz)
            print(f"bound_fixed (H={H}) = {bf!r}")
            extra_rows.append(("bound_fixed", bf))
        if name == "growing":
            R = _growing_rounds(spec)
            bgr = bound_growing(cfg["xi0"], R, p, nz)
            print(f"bound_growing (R={R}) = {bgr!r}")
            extra_rows.append(("bound_growing", bgr))
        print()
        if "out" in explicit:
            comments = _config_echo(cfg) + [f"# schedule: {spec}"]
            rows = [
                f"{iv.index},{iv.start},{iv.length},{_fmt(iv.lhs)},{int(iv.ok)}"
                for iv in report.intervals
            ]
            rows.append(f"summary,lag_sum,,{_fmt(ls)},")
            rows.append(f"summary,bound_general,,{_fmt(bg)},{int(report.overall)}")
            for label, val in extra_rows:
                rows.append(f"summary,{label},,{_fmt(val)},")
            path = Path(cfg["out"]) / f"bound_{_slug(spec)}.csv"
            _write_csv(path, comments, "interval,start,length,condition,admissible", rows)
            print(f"-> {path}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    key_help = "\n".join(
        f"  {k:<10} default {default!r:<40} {h}"
        for k, (_, default, h) in CONFIG_SCHEMA.items()
    )
    parser = argparse.ArgumentParser(
        prog="localsgd",
        description="Local SGD simulation lab: run schedules, sweep worker counts, evaluate bounds.",
        epilog=(
            "config file keys (flat 'key = value' lines, '#' comments):\n"
            f"{key_help}\n\n"
            f"Environment variables {ENV_PREFIX}<KEY> override file values; "
            "flags override both.\n"
            "Schedule specs: sync | oneshot | fixed:H | growing:R[:a] | custom:t1,t2,..."
        ),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("run", "simulate schedules, one CSV per schedule"),
        ("speedup", "sweep worker counts with growing schedules of R = n"),
        ("bound", "admissibility report and bound values"),
    ):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--config", metavar="PATH", help="config file")
        sp.add_argument("--schedule", metavar="SPEC", action="append",
                        help="schedule spec (repeatable; overrides 'schedules')")
        sp.add_argument("--seed", metavar="U64", type=int, help="master seed")
        sp.add_argument("--trials", metavar="N", type=int, help="number of trials")
        sp.add_argument("--out", metavar="PATH", help="output directory")
        sp.add_argument("--data", metavar="PATH", help="LIBSVM data file")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg, explicit = effective_config(args)
        if args.command == "run":
            return cmd_run(cfg)
        if args.command == "speedup":
            return cmd_speedup(cfg)
        return cmd_bound(cfg, explicit)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
