"""Command-line front end: configs, figure presets, CSV/JSON emission.

Config files are flat ``key = value`` text; ``#`` starts a comment.
Recognized keys (all others are rejected by name):

    n           environment size (int, required)
    delta       detuning mu - nu (default 0.0)
    h           base vertical coupling, or a semicolon list of N values
                (required)
    delta_h     dispersion: h_j = h + (j-1)*delta_h/n (default 0.0;
                only with scalar h)
    beta        inverse bath temperature (default 0.0)
    alpha_up_sq initial up weight |a_up|^2 (default 0.5)
    phase       relative phase of the down amplitude (default 0.0)
    epsilon     classicality error threshold (default 1e-3)
    t_start, t_end, steps
                time grid; points sit half a step off the ends so exact
                node times are avoided by construction
                (defaults 0.0, 400.0, 600)
    method      auto | exact | binomial | sampled | exact-universe
                (auto picks exact for n <= 16, binomial for constant
                couplings, sampled otherwise)
    samples     draws per grid point for the sampled method (default 100000)
    seed        base RNG seed (default 0)
    workers     worker threads for sampling (default 1)
    hist_times  optional semicolon list of times at which to export P(u)
                histograms
    label       optional record label used in output file names
    out         output directory (default "results")

Outputs are deterministic: the same config and seed produce
byte-identical files for any worker count.  Wall-clock timing is kept
on the in-memory record and reported on stderr, never serialized.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import observables, selfcheck
from .core import ModelParams, SystemAmplitudes, dispersed_couplings
from .engine import DegenerateOutcomeError
from .observables import (
    DEFAULT_EPSILON,
    ObservableSeries,
    ProjectionHistogram,
    distribution_at,
    first_collapse_time,
    histogram,
    point_seed,
)

PRESET_NAMES = ("fig1", "fig2_top", "fig2_bottom", "fig3")
CSV_COLUMNS = "t,p_up,p_down,p_q,method,n_samples,seed,N,delta,h_spec,epsilon"


class ConfigError(ValueError):
    """A config document failed validation; message names the key."""


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    h: tuple[float, ...]
    delta: float = 0.0
    delta_h: float = 0.0
    beta: float = 0.0
    alpha_up_sq: float = 0.5
    phase: float = 0.0
    epsilon: float = DEFAULT_EPSILON
    t_start: float = 0.0
    t_end: float = 400.0
    steps: int = 600
    method: str = "auto"
    samples: int = 100_000
    seed: int = 0
    workers: int = 1
    hist_times: tuple[float, ...] = ()
    label: str = ""
    out: str = "results"
    preset: str = ""

    def validate(self) -> "ExperimentConfig":
        if self.n < 1:
            raise ConfigError("n: need at least one environment spin")
        if len(self.h) not in (1, self.n):
            raise ConfigError(f"h: expected 1 or {self.n} values, got {len(self.h)}")
        if len(self.h) > 1 and self.delta_h != 0.0:
            raise ConfigError("delta_h: dispersion applies to a scalar h only")
        if not 0.0 <= self.alpha_up_sq <= 1.0:
            raise ConfigError(f"alpha_up_sq: must lie in [0, 1], got {self.alpha_up_sq}")
        if not 0.0 < self.epsilon < 0.5:
            raise ConfigError(f"epsilon: must lie in (0, 0.5), got {self.epsilon}")
        if self.beta < 0:
            raise ConfigError("beta: must be non-negative")
        if self.steps < 1:
            raise ConfigError("steps: need at least one grid point")
        if not self.t_end > self.t_start:
            raise ConfigError("t_end: must exceed t_start")
        if self.samples < 1:
            raise ConfigError("samples: must be positive")
        if self.workers < 1:
            raise ConfigError("workers: must be positive")
        if self.method not in ("auto",) + observables.METHODS:
            raise ConfigError(f"method: unknown method {self.method!r}")
        return self

    def couplings(self) -> tuple[float, ...]:
        if len(self.h) == self.n:
            return self.h
        return dispersed_couplings(self.h[0], self.delta_h, self.n)

    def params(self) -> ModelParams:
        return ModelParams(delta=self.delta, h=self.couplings(), beta=self.beta)

    def alphas(self) -> SystemAmplitudes:
        return SystemAmplitudes.from_up_weight(self.alpha_up_sq, self.phase)

    def grid(self) -> np.ndarray:
        step = (self.t_end - self.t_start) / self.steps
        return self.t_start + (np.arange(self.steps) + 0.5) * step

    def resolved_method(self) -> str:
        if self.method != "auto":
            return self.method
        if self.n <= 16:
            return "exact"
        if len(set(self.couplings())) == 1:
            return "binomial"
        return "sampled"

    def h_spec(self) -> str:
        if len(self.h) == self.n and self.n > 1:
            return ";".join(repr(v) for v in self.h)
        if self.delta_h != 0.0:
            return f"{self.h[0]!r}:{self.delta_h!r}"
        return repr(self.h[0])

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            if f.name == "preset":
                continue
            value = getattr(self, f.name)
            if f.name in ("h", "hist_times"):
                if f.name == "hist_times" and not value:
                    continue
                value = ";".join(repr(v) for v in value)
            elif f.name == "label" and not value:
                continue
            lines.append(f"{f.name} = {value}")
        return "\n".join(lines) + "\n"


_INT_KEYS = {"n", "steps", "samples", "seed", "workers"}
_FLOAT_KEYS = {"delta", "delta_h", "beta", "alpha_up_sq", "phase", "epsilon", "t_start", "t_end"}
_LIST_KEYS = {"h", "hist_times"}
_STR_KEYS = {"method", "label", "out"}
_ALL_KEYS = _INT_KEYS | _FLOAT_KEYS | _LIST_KEYS | _STR_KEYS


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a flat key-value config document."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _ALL_KEYS:
            raise ConfigError(f"unknown key {key!r} on line {lineno}")
        if key in values:
            raise ConfigError(f"duplicate key {key!r} on line {lineno}")
        try:
            if key in _INT_KEYS:
                values[key] = int(value)
            elif key in _FLOAT_KEYS:
                values[key] = float(value)
            elif key in _LIST_KEYS:
                values[key] = tuple(float(v) for v in value.replace(",", ";").split(";") if v.strip())
            else:
                values[key] = value
        except ValueError as err:
            raise ConfigError(f"{key}: {err}") from None
    if "n" not in values:
        raise ConfigError("n: required key missing")
    if "h" not in values or not values["h"]:
        raise ConfigError("h: required key missing")
    return ExperimentConfig(**values).validate()


@dataclass
class ResultRecord:
    """One experiment run: resolved config, series, optional histograms."""

    config: ExperimentConfig
    series: ObservableSeries
    histograms: list[tuple[float, ProjectionHistogram]] = field(default_factory=list)
    wall_clock: float = 0.0
    diagnostics: dict = field(default_factory=dict)


def run_config(config: ExperimentConfig) -> ResultRecord:
    """Evaluate one config over its grid, with degenerate-node retry.

    If a grid point hits a degenerate outcome (both branch weights
    exactly zero), the point is re-evaluated one float ulp later and
    the event is logged in the diagnostics.
    """
    config.validate()
    params = config.params()
    alphas = config.alphas()
    method = config.resolved_method()
    times = config.grid()
    start = time.perf_counter()

    retries: list[tuple[float, float]] = []
    dropped = 0
    p_up = np.empty(times.size)
    p_down = np.empty(times.size)
    p_q = np.empty(times.size)
    for i, t in enumerate(times):
        t_eval = float(t)
        try:
            dist = distribution_at(
                params, alphas, t_eval, method, config.samples, point_seed(config.seed, i),
                config.workers,
            )
        except DegenerateOutcomeError:
            bumped = float(np.nextafter(t_eval, np.inf))
            retries.append((t_eval, bumped))
            dist = distribution_at(
                params, alphas, bumped, method, config.samples, point_seed(config.seed, i),
                config.workers,
            )
        dropped += dist.dropped
        p_up[i], p_down[i], p_q[i] = observables.class_probabilities(dist, config.epsilon)
    series = ObservableSeries(
        times, p_up, p_down, p_q, config.epsilon, method, params, alphas,
        config.samples if method == "sampled" else None,
        config.seed if method == "sampled" else None,
    )

    histograms = []
    for k, t in enumerate(config.hist_times):
        dist = distribution_at(
            params, alphas, float(t), method, config.samples,
            point_seed(config.seed, 1_000_000 + k), config.workers,
        )
        histograms.append((float(t), histogram(dist)))

    diagnostics = {
        "dropped_atoms": dropped,
        "degenerate_retries": retries,
        "collapse_time_grid": first_collapse_time(series),
        "collapse_time_note": "first grid time with P_q < 0.01 (operational definition)",
    }
    return ResultRecord(
        config=config,
        series=series,
        histograms=histograms,
        wall_clock=time.perf_counter() - start,
        diagnostics=diagnostics,
    )


def _preset_configs(name: str) -> list[ExperimentConfig]:
    base = dict(alpha_up_sq=0.4, epsilon=1e-3, seed=0)
    if name == "fig1":
        return [
            ExperimentConfig(n=n, h=(0.01,), delta=0.0, label=f"N{n}", preset=name, **base)
            for n in (2, 10, 80)
        ]
    if name == "fig2_top":
        # Grid extended past the dispersed revival near t ~ 1571 (five
        # times the constant-coupling period); same step as the default grid.
        long_grid = dict(t_start=0.0, t_end=1800.0, steps=2700)
        return [
            ExperimentConfig(
                n=10, h=(0.01,), delta=0.0, delta_h=0.0, label="const_h", preset=name,
                **base, **long_grid,
            ),
            ExperimentConfig(
                n=10, h=(0.01,), delta=0.0, delta_h=0.02, label="dispersed_h", preset=name,
                **base, **long_grid,
            ),
        ]
    if name == "fig2_bottom":
        return [
            ExperimentConfig(
                n=10, h=(h,), delta=0.0, delta_h=0.02, label=f"h{h}", preset=name, **base
            )
            for h in (0.01, 0.5, 10.0)
        ]
    if name == "fig3":
        return [
            ExperimentConfig(
                n=10, h=(0.01,), delta=d, delta_h=0.02, label=f"delta{d}", preset=name, **base
            )
            for d in (0.002, 0.01, 0.02, 0.05, 0.1)
        ]
    raise ConfigError(f"unknown preset {name!r}; expected one of {PRESET_NAMES}")


def run_preset(name: str, configs: list[ExperimentConfig] | None = None) -> list[ResultRecord]:
    """Run one figure preset; sweep values beyond the quoted endpoints,
    grids and sample counts are package defaults and labeled as such."""
    records = []
    for config in configs if configs is not None else _preset_configs(name):
        record = run_config(config)
        record.diagnostics["preset_defaults_note"] = (
            "time grid, sample count and intermediate sweep values are package defaults"
        )
        records.append(record)
    return records


def _record_name(record: ResultRecord) -> str:
    cfg = record.config
    parts = [p for p in (cfg.preset, cfg.label) if p]
    return "_".join(parts) if parts else "run"


def _series_csv(record: ResultRecord) -> str:
    cfg = record.config
    s = record.series
    n_samples = cfg.samples if s.method == "sampled" else 0
    fixed = (
        f"{s.method},{n_samples},{cfg.seed},{cfg.n},{cfg.delta!r},"
        f"{cfg.h_spec()},{cfg.epsilon!r}"
    )
    lines = [CSV_COLUMNS]
    for i in range(s.times.size):
        lines.append(
            f"{float(s.times[i])!r},{float(s.p_up[i])!r},"
            f"{float(s.p_down[i])!r},{float(s.p_q[i])!r},{fixed}"
        )
    return "\n".join(lines) + "\n"


def _record_json(record: ResultRecord) -> str:
    cfg = record.config
    payload = {
        "config": {
            f.name: (list(v) if isinstance(v := getattr(cfg, f.name), tuple) else v)
            for f in fields(cfg)
        },
        "resolved_method": record.series.method,
        "series": {
            "times": record.series.times.tolist(),
            "p_up": record.series.p_up.tolist(),
            "p_down": record.series.p_down.tolist(),
            "p_q": record.series.p_q.tolist(),
        },
        "histograms": [
            {
                "t": t,
                "mass_zero": h.mass_zero,
                "mass_one": h.mass_one,
                "bin_edges": h.bin_edges.tolist(),
                "bin_mass": h.bin_mass.tolist(),
            }
            for t, h in record.histograms
        ],
        "diagnostics": record.diagnostics,
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def emit_results(records: list[ResultRecord], out_dir, fmt: str = "csv") -> list[Path]:
    """Write one file per record; identical config and seed give identical bytes.

    An empty record set still produces one header-only file.
    """
    if fmt not in ("csv", "json"):
        raise ConfigError(f"format: expected csv or json, got {fmt!r}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if not records:
        path = out / f"results.{fmt}"
        path.write_text(CSV_COLUMNS + "\n" if fmt == "csv" else "[]\n")
        return [path]
    paths = []
    for record in records:
        path = out / f"{_record_name(record)}.{fmt}"
        text = _series_csv(record) if fmt == "csv" else _record_json(record)
        path.write_text(text)
        paths.append(path)
    return paths


def _apply_overrides(config: ExperimentConfig, args) -> ExperimentConfig:
    updates = {}
    for key in ("seed", "samples", "workers", "out"):
        value = getattr(args, key, None)
        if value is not None:
            updates[key] = value
    return replace(config, **updates).validate() if updates else config


def _add_common_flags(sub):
    sub.add_argument("--seed", type=int, default=None, help="override the base RNG seed")
    sub.add_argument("--samples", type=int, default=None, help="override draws per grid point")
    sub.add_argument("--workers", type=int, default=None, help="override sampling worker count")
    sub.add_argument("--out", default=None, help="override the output directory")
    sub.add_argument("--format", choices=("csv", "json"), default="csv")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="centralspin",
        description="Trajectory statistics of a central spin in a spin bath",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run_cmd = commands.add_parser("run", help="run one experiment config file")
    run_cmd.add_argument("config", help="path to a key-value config document")
    _add_common_flags(run_cmd)

    preset_cmd = commands.add_parser("preset", help="run a built-in figure preset")
    preset_cmd.add_argument("name", choices=PRESET_NAMES)
    _add_common_flags(preset_cmd)

    validate_cmd = commands.add_parser("validate", help="check a config without running it")
    validate_cmd.add_argument("config")

    check_cmd = commands.add_parser(
        "oracle-check", help="run the oracle-equivalence suite and report"
    )
    check_cmd.add_argument("--samples", type=int, default=20_000)
    check_cmd.add_argument("--seed", type=int, default=20260809)

    args = parser.parse_args(argv)
    try:
        if args.command == "validate":
            parse_config(Path(args.config).read_text())
            print("OK")
            return 0
        if args.command == "oracle-check":
            results = selfcheck.run_all(seed=args.seed, samples=args.samples)
            ok = True
            for r in results:
                print(f"{'PASS' if r.ok else 'FAIL'}  {r.name}: {r.detail}")
                ok &= r.ok
            return 0 if ok else 2
        if args.command == "run":
            config = _apply_overrides(parse_config(Path(args.config).read_text()), args)
            records = [run_config(config)]
        else:
            configs = [_apply_overrides(c, args) for c in _preset_configs(args.name)]
            records = run_preset(args.name, configs)
        out_dir = args.out or records[0].config.out
        paths = emit_results(records, out_dir, args.format)
        for record, path in zip(records, paths):
            print(
                f"wrote {path} ({record.series.times.size} points, "
                f"{record.wall_clock:.2f}s)",
                file=sys.stderr,
            )
        return 0
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 1
    except Exception as err:  # noqa: BLE001 - CLI boundary
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
