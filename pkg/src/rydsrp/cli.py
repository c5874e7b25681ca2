"""Command-line front end: ``run``, ``sweep``, ``check`` and ``list``.

Exit codes: 0 success, 1 invalid input or configuration, 2 numerical
failure, 3 one or more expected checks failed.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import logging
import math
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .dynamics import NumericalError
from .model import TWO_PI
from .scenarios import (
    ANGULAR_FIELDS,
    CATALOG,
    OverrideError,
    Report,
    ScenarioNotFoundError,
    SweepSpec,
    classify_key,
    get_scenario,
    list_scenarios,
    run_scenario,
    run_sweep,
    validate_sweep,
)

log = logging.getLogger("rydsrp")

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL, EXIT_CHECKS = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    scenario: str | None = None
    overrides: dict[str, object] = field(default_factory=dict)
    out_dir: Path = Path(".")
    csv: bool = True
    summary: bool = True
    plot_script: bool = False


# -- parsing helpers ------------------------------------------------------------------

def parse_value(text: str):
    """Number, boolean, comma-separated tuple, or the raw string."""
    s = text.strip()
    if "," in s:
        return tuple(parse_value(x) for x in s.split(",") if x.strip())
    low = s.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def parse_assignment(text: str) -> tuple[str, object]:
    key, sep, value = text.partition("=")
    if not sep or not key.strip():
        raise ConfigError(f"expected key=value, got {text!r}")
    return key.strip(), parse_value(value)


def parse_range(text: str) -> list[float]:
    """``a:b:step`` inclusive of ``b`` when it falls on the grid."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"--range expects a:b:step, got {text!r}")
    try:
        a, b, step = (float(x) for x in parts)
    except ValueError:
        raise ConfigError(f"--range expects numbers, got {text!r}") from None
    if step <= 0 or not all(math.isfinite(x) for x in (a, b, step)) or b < a:
        raise ConfigError("--range needs finite a <= b and step > 0")
    n = int(math.floor((b - a) / step + 1e-9)) + 1
    return [round(a + i * step, 12) for i in range(n)]


def parse_values(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"--values expects comma-separated numbers, got {text!r}") from None


def _bool(section, key, default):
    try:
        return section.getboolean(key, fallback=default)
    except ValueError:
        raise ConfigError(f"[{section.name}] {key} must be a boolean") from None


def load_config(path: str | Path) -> RunConfig:
    """Read an ini-style file with [scenario], [params], [integrator], [output]."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    known = {"scenario", "params", "integrator", "output"}
    extra = set(parser.sections()) - known
    if extra:
        raise ConfigError(f"unknown config sections: {sorted(extra)}")
    cfg = RunConfig()
    if parser.has_section("scenario"):
        sec = parser["scenario"]
        for key, value in sec.items():
            if key == "name":
                cfg.scenario = value.strip()
            else:
                cfg.overrides[f"scenario.{key}"] = parse_value(value)
    if parser.has_section("params"):
        for key, value in parser["params"].items():
            cfg.overrides[f"params.{key}"] = parse_value(value)
    if parser.has_section("integrator"):
        for key, value in parser["integrator"].items():
            cfg.overrides[f"integrator.{key}"] = parse_value(value)
    if parser.has_section("output"):
        sec = parser["output"]
        if "dir" in sec:
            cfg.out_dir = Path(sec["dir"])
        cfg.csv = _bool(sec, "csv", cfg.csv)
        cfg.summary = _bool(sec, "summary", cfg.summary)
        cfg.plot_script = _bool(sec, "plot_script", cfg.plot_script)
    return cfg


def _merge(args) -> RunConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    for text in getattr(args, "set", None) or []:
        key, value = parse_assignment(text)
        cfg.overrides[key] = value
    if getattr(args, "out", None):
        cfg.out_dir = Path(args.out)
    if getattr(args, "plot_script", False):
        cfg.plot_script = True
    if getattr(args, "no_csv", False):
        cfg.csv = False
    return cfg


# -- output ---------------------------------------------------------------------------

def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "nan" if math.isnan(x) else f"{float(x):.9g}"
    return str(x)


def write_csv(path: Path, columns, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([fmt(x) for x in r])


def summary_text(report: Report) -> str:
    sc = get_scenario(report.scenario)
    lines = [f"scenario = {report.scenario}", f"reference = {sc.reference}",
             f"variant = {sc.variant}", f"initial = {sc.initial}", "", "[overrides]"]
    for key, value in report.overrides.items():
        kind, target, scale = classify_key(sc, key)
        conv = ""
        if kind == "param" and scale != 1.0 and isinstance(value, (int, float)):
            conv = f"  -> {target} = {fmt(float(value) * scale)} rad/us"
        lines.append(f"{key} = {fmt(value) if not isinstance(value, tuple) else value}{conv}")
    lines += ["", "[params]"]
    for name, value in report.params.resolved().items():
        if isinstance(value, float) and name in ANGULAR_FIELDS:
            lines.append(f"{name} = {fmt(value)}  # rad/us; {name}/2pi = {fmt(value / TWO_PI)} MHz")
        elif isinstance(value, tuple):
            lines.append(f"{name} = {','.join(value)}")
        else:
            lines.append(f"{name} = {fmt(value) if value is not None else 'none'}")
    lines += ["", "[scenario]"]
    for key, value in report.knobs.items():
        shown = ",".join(fmt(v) for v in value) if isinstance(value, (tuple, list)) else fmt(value)
        lines.append(f"{key} = {shown}")
    lines += ["", "[integrator]"]
    for f in fields(report.integrator):
        v = getattr(report.integrator, f.name)
        lines.append(f"{f.name} = {fmt(v) if v is not None else 'auto'}")
    lines += ["", "[metrics]"]
    lines += [f"{k} = {fmt(v)}" for k, v in report.metrics.items()]
    lines += ["", "[checks]"]
    lines += [c.describe() for c in report.checks]
    return "\n".join(lines) + "\n"


PLOT_TEMPLATE = '''"""Plot {name}.csv: first column on x, remaining numeric columns on y."""
import csv
import sys

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "{name}.csv"
with open(path, newline="") as fh:
    rows = list(csv.reader(fh))
header, data = rows[0], rows[1:]
x = [float(r[0]) for r in data]
for j, name in enumerate(header[1:], start=1):
    try:
        plt.plot(x, [float(r[j]) for r in data], label=name)
    except ValueError:
        continue
plt.xlabel(header[0])
plt.legend()
plt.title("{name}")
plt.savefig(path.rsplit(".", 1)[0] + ".png", dpi=150)
'''


def write_outputs(report: Report, cfg: RunConfig) -> list[Path]:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if cfg.csv:
        p = cfg.out_dir / f"{report.scenario}.csv"
        write_csv(p, report.table.columns, report.table.rows)
        written.append(p)
    if cfg.summary:
        p = cfg.out_dir / f"{report.scenario}.summary.txt"
        p.write_text(summary_text(report), encoding="utf-8", newline="\n")
        written.append(p)
    if cfg.plot_script:
        p = cfg.out_dir / f"{report.scenario}_plot.py"
        p.write_text(PLOT_TEMPLATE.format(name=report.scenario), encoding="utf-8", newline="\n")
        written.append(p)
    return written


def print_checks(report: Report, stream=None) -> None:
    stream = stream or sys.stdout
    for c in report.checks:
        print(f"{report.scenario:30s} {c.describe()}", file=stream)


# -- commands -------------------------------------------------------------------------

def cmd_list(args) -> int:
    for name, desc, ref in list_scenarios():
        print(f"{name:30s} {ref:18s} {desc}")
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = _merge(args)
    name = args.scenario or cfg.scenario
    if not name:
        raise ConfigError("no scenario given")
    report = run_scenario(name, cfg.overrides)
    for p in write_outputs(report, cfg):
        log.info("wrote %s", p)
    print_checks(report)
    return EXIT_OK


def cmd_check(args) -> int:
    cfg = _merge(args)
    selection = args.scenarios or ([cfg.scenario] if cfg.scenario else ["all"])
    names = list(CATALOG) if selection == ["all"] else selection
    for n in names:
        get_scenario(n)
    failures = []
    for n in names:
        sc = get_scenario(n)
        # Overrides that do not apply to this scenario are skipped in a multi-run.
        ov = {}
        for k, v in cfg.overrides.items():
            try:
                classify_key(sc, k)
            except OverrideError:
                if len(names) == 1:
                    raise
                continue
            ov[k] = v
        report = run_scenario(n, ov)
        print_checks(report)
        failures += [(n, c) for c in report.failures]
    if failures:
        print(f"\n{len(failures)} check(s) failed:")
        for n, c in failures:
            print(f"  {n}: {c.metric} measured {c.measured:.6g} target {c.target:.6g} "
                  f"({c.relation}) tolerance {c.tolerance:.3g}")
        return EXIT_CHECKS
    print("\nall checks passed")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _merge(args)
    name = args.scenario or cfg.scenario
    if not name:
        raise ConfigError("no scenario given")
    if (args.values is None) == (args.range is None):
        raise ConfigError("give exactly one of --values or --range")
    values = parse_values(args.values) if args.values is not None else parse_range(args.range)
    if args.jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    spec = SweepSpec(name, args.param, tuple(values), args.metric)
    validate_sweep(spec, cfg.overrides)
    rows = run_sweep(spec, cfg.overrides, jobs=args.jobs)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    path = cfg.out_dir / f"{name}.sweep.csv"
    write_csv(path, [args.param, args.metric, "status"],
              [(r.value, r.metric, r.status) for r in rows])
    bad = sum(r.status != "ok" for r in rows)
    print(f"{len(rows)} rows written to {path}" + (f"; {bad} failed" if bad else ""))
    return EXIT_OK


# -- entry point ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rydsrp", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="ini file with [scenario]/[params]/[integrator]/[output]")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override (repeatable): params.X, X_MHz, X_rate_MHz, "
                            "scenario.knob, integrator.X, tolerance.metric")
        p.add_argument("--out", help="output directory")
        p.add_argument("--seedless", action="store_true",
                       help="deterministic mode (the default and only mode)")

    p = sub.add_parser("run", help="run one scenario and write its CSV and summary")
    p.add_argument("scenario", nargs="?")
    common(p)
    p.add_argument("--plot-script", action="store_true", help="also write a plotting script")
    p.add_argument("--no-csv", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("check", help="run expected checks (all or a list of scenarios)")
    p.add_argument("scenarios", nargs="*")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("sweep", help="evaluate one metric over values of one parameter")
    p.add_argument("scenario", nargs="?")
    common(p)
    p.add_argument("--param", required=True)
    p.add_argument("--values")
    p.add_argument("--range", metavar="A:B:STEP")
    p.add_argument("--metric", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("list", help="list the scenario catalog")
    p.set_defaults(func=cmd_list)
    return ap


def _glue_negative(argv: list[str]) -> list[str]:
    """Allow ``--range -4:4:1`` and ``--values -1,2`` (argparse reads them as flags)."""
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in ("--range", "--values") and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    argv = _glue_negative(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ScenarioNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigError, OverrideError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
