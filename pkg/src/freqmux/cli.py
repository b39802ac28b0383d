"""Command-line front end: ``freqmux {analyze,optimize,simulate,sweep}``.

Configuration is a ``key = value`` text file with ``#`` comments and
unit-bearing values, e.g. ``G = 8000 ps^2``.  Missing keys take the
defaults below (the standard 8000 ps^2 dispersion-module design point).

Exit codes: 0 success, 2 configuration or usage error, 3 parameter out of
physical range.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import design
from .pulses import dump_envelope_csv, heralded_photon
from .quantities import (
    ANGULAR_FREQUENCY,
    DECIBEL,
    DIMENSIONLESS,
    DISPERSION,
    TIME,
    ParameterError,
    UnitError,
    parse_quantity,
)
from .simulator import HardwareParams, run_campaign, write_trace_csv
from .stats import SourceParams

EXIT_CONFIG = 2
EXIT_PHYSICS = 3


class ConfigError(ValueError):
    pass


# key -> (dimension, default)
FIELDS: dict[str, tuple[str, str]] = {
    "lambda": (DIMENSIONLESS, "0.031"),
    "eta_i": (DIMENSIONLESS, "0.3"),
    "eta_s": (DIMENSIONLESS, "0.85"),
    "eta_c": (DIMENSIONLESS, "1"),
    "n_bins": (DIMENSIONLESS, "500"),
    "G": (DISPERSION, "8000 ps^2"),
    "delta_omega": (ANGULAR_FREQUENCY, "1 THz"),
    "dt_d": (TIME, "10 ps"),
    "tau": (TIME, "10 ps"),
    "dt_e": (TIME, "80 ps"),
    "omega_e": (ANGULAR_FREQUENCY, "386.85 THz"),
    "omega_p": (ANGULAR_FREQUENCY, "193.41 THz"),
    "required_eta": (DIMENSIONLESS, "0.8"),
    "switch_loss": (DECIBEL, "0.5 dB"),
    "cw_threshold": (DIMENSIONLESS, "10"),
    "n_cycles": (DIMENSIONLESS, "100000"),
    "seed": (DIMENSIONLESS, "0"),
    "shards": (DIMENSIONLESS, "1"),
}
INTEGER_FIELDS = {"n_bins", "n_cycles", "seed", "shards"}
PATH_FIELDS = {"conversion_table"}

SWEEP_COLUMNS = [
    "axis", "value", "lambda", "n_bins", "p_click", "p_trig", "p_trig_approx", "p_single",
    "p1", "lambda_star", "p1_star", "visibility", "dt_h_ps", "dt_pump_ps", "cw_ratio",
    "n_max_dispersive", "n_from_excitation",
]


@dataclass
class RunConfig:
    values: dict[str, float]
    conversion_table: Optional[str] = None

    @classmethod
    def parse(cls, text: str = "") -> "RunConfig":
        raw = {k: d for k, (_, d) in FIELDS.items()}
        table = None
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            if key in PATH_FIELDS:
                table = value
            elif key in FIELDS:
                raw[key] = value
            else:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
        cfg = cls({}, table)
        for key, text_value in raw.items():
            cfg.set(key, text_value)
        return cfg

    def set(self, key: str, text_value: str) -> None:
        if key not in FIELDS:
            raise ConfigError(f"unknown key {key!r}")
        dim = FIELDS[key][0]
        try:
            q = parse_quantity(text_value)
        except UnitError as exc:
            raise ConfigError(f"{key}: {exc}") from None
        if q.dimension != dim:
            raise ConfigError(f"{key}: expected a {dim} quantity, got {text_value!r} ({q.dimension})")
        if key in INTEGER_FIELDS and q.value != int(q.value):
            raise ConfigError(f"{key}: expected an integer, got {text_value!r}")
        self.values[key] = q.value

    def __getitem__(self, key):
        v = self.values[key]
        return int(v) if key in INTEGER_FIELDS else v

    def source(self) -> SourceParams:
        return SourceParams(self["lambda"], self["eta_i"], self["eta_s"], self["n_bins"])

    def hardware(self) -> HardwareParams:
        return HardwareParams(
            G=self["G"], delta_omega=self["delta_omega"], dt_d=self["dt_d"], tau=self["tau"],
            dt_e=self["dt_e"], omega_e=self["omega_e"], omega_p=self["omega_p"], eta_c=self["eta_c"],
        )

    def records(self):
        if self.conversion_table is None:
            return design.BUILTIN_RECORDS
        try:
            return design.load_conversion_records(self.conversion_table)
        except (OSError, KeyError, ValueError) as exc:
            raise ConfigError(f"conversion_table: {exc}") from None

    def report(self) -> design.DesignReport:
        return design.design_report(
            self.source(), self.hardware(),
            required_eta=self["required_eta"],
            loss_per_switch_db=self["switch_loss"],
            records=self.records(),
            cw_threshold=self["cw_threshold"],
        )


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def cmd_analyze(cfg: RunConfig, args) -> int:
    report = cfg.report()
    payload = report.to_dict()
    payload["conversion_records_version"] = design.RECORDS_VERSION
    _emit(_dumps(payload), args.out)
    if args.envelope:
        hw = cfg.hardware()
        dump_envelope_csv(heralded_photon(0.0, hw.dt_e, hw.tau, hw.G, hw.omega_e, hw.omega_p), args.envelope)
    return 0


def cmd_optimize(cfg: RunConfig, args) -> int:
    src = design.effective_source(cfg.source(), cfg.hardware())
    opt = design.optimize_squeezing(src.eta_i, src.eta_s, src.n_bins)
    _emit(_dumps({
        "eta_i": src.eta_i,
        "eta_s": src.eta_s,
        "n_bins": int(src.n_bins),
        "lambda_star": opt.lambda_star,
        "p1_star": opt.p1_star,
        "degenerate": opt.degenerate,
    }), args.out)
    return 0


def cmd_simulate(cfg: RunConfig, args) -> int:
    n_cycles, seed, shards = cfg["n_cycles"], cfg["seed"], cfg["shards"]
    if n_cycles < 1:
        raise ConfigError(f"n_cycles must be >= 1, got {n_cycles}")
    if shards < 1:
        raise ConfigError(f"shards must be >= 1, got {shards}")
    hw = cfg.hardware()
    src = cfg.source()
    stats = run_campaign(src, hw, n_cycles, seed, shards)
    _emit(stats.to_json(), args.out)
    if args.trace:
        write_trace_csv(src, hw, n_cycles, seed, args.trace)
    return 0


def _sweep_row(axis, value, cfg: RunConfig) -> list:
    r = cfg.report()

    def fmt(x):
        return "" if x is None else f"{x:.12g}"

    return [
        axis, fmt(value), fmt(r.lam), r.n_chosen, fmt(r.p_click), fmt(r.p_trig), fmt(r.p_trig_approx),
        fmt(r.p_single), fmt(r.p1), fmt(r.lambda_star), fmt(r.p1_star), fmt(r.visibility),
        fmt(r.dt_h), fmt(r.dt_pump), fmt(r.cw_ratio),
        "" if r.n_max_dispersive is None else r.n_max_dispersive, r.n_from_excitation,
    ]


def cmd_sweep(cfg: RunConfig, args) -> int:
    axis = args.axis
    if axis not in FIELDS or axis in {"n_cycles", "seed", "shards"}:
        raise ConfigError(f"unknown sweep axis {axis!r}")
    if args.start is None or args.stop is None:
        raise ConfigError("sweep needs --from and --to")
    if args.steps < 2:
        raise ConfigError(f"--steps must be >= 2, got {args.steps}")
    lo_cfg, hi_cfg = RunConfig(dict(cfg.values)), RunConfig(dict(cfg.values))
    lo_cfg.set(axis, args.start)
    hi_cfg.set(axis, args.stop)
    grid = np.linspace(lo_cfg.values[axis], hi_cfg.values[axis], args.steps)
    if axis in INTEGER_FIELDS:
        grid = np.unique(np.round(grid))

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for value in grid:
        point = RunConfig(dict(cfg.values), cfg.conversion_table)
        point.values[axis] = float(value)
        writer.writerow(_sweep_row(axis, value, point))
    _emit(buf.getvalue(), args.out)
    return 0


COMMANDS = {"analyze": cmd_analyze, "optimize": cmd_optimize, "simulate": cmd_simulate, "sweep": cmd_sweep}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="freqmux", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="key = value configuration file")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--cycles", type=int, help="Monte-Carlo clock cycles")
    parser.add_argument("--shards", type=int)
    parser.add_argument("--out", help="write JSON/CSV here instead of stdout")
    parser.add_argument("--trace", help="simulate: per-cycle trace CSV")
    parser.add_argument("--envelope", help="analyze: heralded-photon envelope CSV")
    parser.add_argument("--conversion-table", help="CSV (name, eta, bandwidth_thz) replacing the built-in table")
    parser.add_argument("--axis", help="sweep: config key to vary")
    parser.add_argument("--from", dest="start", help="sweep: first value, e.g. '0 ps'")
    parser.add_argument("--to", dest="stop", help="sweep: last value")
    parser.add_argument("--steps", type=int, default=50)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = Path(args.config).read_text() if args.config else ""
        cfg = RunConfig.parse(text)
        for key, flag in (("seed", args.seed), ("n_cycles", args.cycles), ("shards", args.shards)):
            if flag is not None:
                cfg.values[key] = float(flag)
        if args.conversion_table:
            cfg.conversion_table = args.conversion_table
        return COMMANDS[args.command](cfg, args)
    except (ConfigError, UnitError, OSError) as exc:
        print(f"freqmux: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ParameterError as exc:
        print(f"freqmux: invalid parameter: {exc}", file=sys.stderr)
        return EXIT_PHYSICS


if __name__ == "__main__":
    sys.exit(main())
