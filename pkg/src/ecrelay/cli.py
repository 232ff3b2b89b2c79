"""Command-line front end.

Examples::

    ecrelay --mode capacity --snr 0:30:5 --trials 10000 --cycles 10 --seed 7 --out capacity.csv
    ecrelay --mode outage --r1 1.5 --r2 1.5 --out outage.csv
    ecrelay --mode verify --instances 1000 --grid 4096 --seed 1

A configuration file holds ``key = value`` lines (``#`` starts a comment).
Keys are the flag names without dashes; flags given on the command line win.
Exit status: 0 on success, 1 when verification fails, 2 on bad arguments.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import logging
import sys

import numpy as np

from .model import CASE_ORDER, InvalidParameterError, SystemParams
from .outage import TargetRates
from .sim import SimConfig, SweepRow, run_sweep

log = logging.getLogger("ecrelay")

_PARAM_FIELDS = {f.name: f for f in dataclasses.fields(SystemParams)}

#: run-level settings: name -> (converter, default)
_RUN_KEYS = {
    "mode": (str, "capacity"),
    "snr": (str, "0:30:2"),
    "trials": (int, 10_000),
    "cycles": (int, 10),
    "seed": (int, 0),
    "r1": (float, 1.5),
    "r2": (float, 1.5),
    "grid": (int, 4096),
    "instances": (int, 1000),
    "oracle_grid": (int, 0),
    "workers": (int, 1),
    "out": (str, "-"),
}


class ConfigError(Exception):
    pass


def _bool(text):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def parse_snr(text: str) -> tuple:
    """``start:stop:step`` (inclusive) or a comma-separated list of dB values."""
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            if step <= 0:
                raise ValueError
            n = int(np.floor((stop - start) / step + 1e-9)) + 1
            return tuple(float(start + i * step) for i in range(n))
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise ConfigError(f"bad SNR specification: {text!r}") from None


def read_config(path: str) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            if key not in _PARAM_FIELDS and key not in _RUN_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = value
    return out


def get_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ecrelay",
        description="Two-hop energy-conferencing relay optimizer and Monte Carlo simulator.",
    )
    ap.add_argument("--config", help="key = value configuration file")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    for key in _RUN_KEYS:
        ap.add_argument(f"--{key}", default=None)
    for name in _PARAM_FIELDS:
        ap.add_argument(f"--{name}", default=None)
    return ap


def resolve(args) -> dict:
    """Merge defaults, config file and flags into typed settings."""
    raw = read_config(args.config) if args.config else {}
    for key in (*_RUN_KEYS, *_PARAM_FIELDS):
        value = getattr(args, key)
        if value is not None:
            raw[key] = value
    settings = {}
    try:
        for key, (conv, default) in _RUN_KEYS.items():
            settings[key] = conv(raw[key]) if key in raw else default
        kw = {}
        for name, f in _PARAM_FIELDS.items():
            if name in raw:
                kw[name] = _bool(raw[name]) if f.type in ("bool", bool) else float(raw[name])
        settings["params"] = SystemParams(**kw)
    except (ValueError, InvalidParameterError) as exc:
        raise ConfigError(str(exc)) from None
    if settings["mode"] not in ("capacity", "outage", "verify"):
        raise ConfigError(f"unknown mode {settings['mode']!r}")
    settings["snr"] = parse_snr(settings["snr"])
    return settings


def csv_header() -> list:
    names = [f.name for f in dataclasses.fields(SweepRow) if f.name != "case_pct"]
    return names + [f"pct_{lab.value}" for lab in CASE_ORDER]


def write_csv(rows, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(csv_header())
    for row in rows:
        vals = [getattr(row, n) for n in csv_header() if not n.startswith("pct_")]
        vals += [row.case_pct.get(lab, np.nan) for lab in CASE_ORDER]
        w.writerow([repr(float(v)) for v in vals])


def main(argv=None) -> int:
    parser = get_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        s = resolve(args)
        if s["mode"] == "verify":
            from .verify import run_verification

            report = run_verification(s["instances"], s["grid"], s["seed"], s["params"])
            failed = [k for k, (ok, _) in report.items() if not ok]
            for name, (ok, worst) in report.items():
                print(f"{name:20s} {'PASS' if ok else 'FAIL'}  worst={worst:.3g}")
            return 1 if failed else 0
        config = SimConfig(
            params=s["params"], mode=s["mode"], targets=TargetRates(s["r1"], s["r2"]),
            snr_points_db=s["snr"], trials=s["trials"], cycles_per_trial=s["cycles"],
            seed=s["seed"], grid_n_oracle=s["oracle_grid"], workers=s["workers"],
        )
    except (ConfigError, InvalidParameterError, OSError) as exc:
        print(f"ecrelay: error: {exc}", file=sys.stderr)
        return 2

    log.info("running %s sweep over %d SNR points", config.mode, len(config.snr_points_db))
    try:
        fh = sys.stdout if s["out"] == "-" else open(s["out"], "w", encoding="utf-8", newline="")
    except OSError as exc:
        print(f"ecrelay: error: {exc}", file=sys.stderr)
        return 2
    try:
        rows = run_sweep(config)
        write_csv(rows, fh)
    except InvalidParameterError as exc:
        print(f"ecrelay: error: {exc}", file=sys.stderr)
        return 2
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
