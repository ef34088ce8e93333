"""Command-line entry point.

Exit codes: 0 success, 1 runtime fault, 2 configuration error,
3 validation tolerance breached.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

from . import __version__
from . import analytic as an
from .channel import derive_stream
from .mc import Link, McConfig, estimate_outages, estimate_throughput
from .model import LognormalVariant, SystemParams, resolve_thresholds, validate
from .sweep import AXES, PRESETS, SweepSpec, grid, preset, run_sweep

log = logging.getLogger("dualirs")

EXIT_OK, EXIT_FAULT, EXIT_CONFIG, EXIT_VALIDATION = 0, 1, 2, 3

DEFAULT_SNR_GRID = grid(0.0, 40.0, 5.0)
LINKS = (Link.D1, Link.D2, Link.RC, Link.CR)


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    params: SystemParams = field(default_factory=SystemParams)
    mc: McConfig = field(default_factory=McConfig)
    tolerance: float = 0.02
    snr_grid_db: tuple[float, ...] = DEFAULT_SNR_GRID

    def to_dict(self) -> dict:
        mc = dataclasses.asdict(self.mc)
        mc.pop("workers")
        return {
            "params": self.params.to_dict(),
            "mc": mc,
            "tolerance": self.tolerance,
            "snr_grid_db": list(self.snr_grid_db),
        }


_CONFIG_KEYS = {"params", "snr_db", "mc", "tolerance", "snr_grid_db"}


def parse_range(text: str) -> tuple[float, ...]:
    try:
        start, stop, step = (float(x) for x in text.split(":"))
        return grid(start, stop, step)
    except ValueError as exc:
        raise ConfigError(f"bad range {text!r}: expected start:stop:step") from exc


def _int_like(text: str) -> int:
    v = float(text)
    if v != int(v):
        raise argparse.ArgumentTypeError(f"expected an integer, got {text}")
    return int(v)


def load_config(args: argparse.Namespace) -> RunConfig:
    """Merge the config file (if any) with command-line overrides."""
    doc: dict[str, Any] = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
    unknown = sorted(set(doc) - _CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")

    pdict = dict(doc.get("params", {}))
    if getattr(args, "variant", None):
        pdict["lognormal_variant"] = args.variant
    try:
        params = SystemParams.from_dict(pdict)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"params: {exc}") from exc
    snr_db = args.snr_db if getattr(args, "snr_db", None) is not None else doc.get("snr_db")
    if snr_db is not None:
        params = params.with_snr_db(float(snr_db))
    errs = validate(params)
    if errs:
        raise ConfigError("invalid parameters:\n  " + "\n  ".join(errs))

    mdict = dict(doc.get("mc", {}))
    for key, attr in (("trials", "trials"), ("seed", "seed"), ("channel_mode", "mode"),
                      ("workers", "workers")):
        v = getattr(args, attr, None)
        if v is not None:
            mdict[key] = v
    try:
        mc = McConfig(**mdict)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"mc: {exc}") from exc

    tol = getattr(args, "tolerance", None)
    tol = float(doc.get("tolerance", 0.02)) if tol is None else tol
    snr_grid = doc.get("snr_grid_db", DEFAULT_SNR_GRID)
    if isinstance(snr_grid, str):
        snr_grid = parse_range(snr_grid)
    if getattr(args, "snr_grid", None):
        snr_grid = parse_range(args.snr_grid)
    return RunConfig(params, mc, tol, tuple(float(x) for x in snr_grid))


def _emit_json(report: dict, path: Optional[str]) -> None:
    text = json.dumps(report, indent=2, sort_keys=True)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def point_report(cfg: RunConfig, with_mc: bool) -> dict:
    p = cfg.params
    thr = resolve_thresholds(p)
    d1, d2 = an.op_d1(p, thr), an.op_d2(p, thr)
    main, bs = an.op_main(p, thr), an.op_bs(p, thr)
    report: dict[str, Any] = {
        "version": __version__,
        "config": cfg.to_dict(),
        "snr_db": p.snr_db,
        "thresholds": dataclasses.asdict(thr),
        "analytic": {
            "op_d1": dataclasses.asdict(d1),
            "op_d2": dataclasses.asdict(d2),
            "op_main": dataclasses.asdict(main),
            "op_rc": an.op_rc(p, thr),
            "op_cr": an.op_cr(p, thr),
            "op_bs": dataclasses.asdict(bs),
            "tp_main": an.throughput_main(p, thr),
            "tp_bs": an.throughput_bs(p, thr),
            "tp_legacy": an.throughput_legacy(p, thr),
        },
        "flags": an.boundary_flags(p, thr),
    }
    if with_mc:
        out = estimate_outages(p, thr, cfg.mc)
        mc: dict[str, Any] = {}
        for link, r in out.items():
            mc[f"op_{link.value}"] = {"estimate": r.estimate, "ci": r.ci_halfwidth}
        mc["op_main"].update(raw=out[Link.MAIN].raw, joint_both=out[Link.MAIN].joint_both,
                             joint_any=out[Link.MAIN].joint_any)
        for system in ("main", "bs", "legacy"):
            t = estimate_throughput(p, thr, system, cfg.mc,
                                    outages=None if system == "legacy" else out)
            mc[f"tp_{system}"] = {"estimate": t.value, "ci": t.ci_halfwidth}
        report["mc"] = mc
    return report


def _analytic_link(p: SystemParams, thr, link: Link) -> float:
    if link is Link.D1:
        return an.op_d1(p, thr).total
    if link is Link.D2:
        return an.op_d2(p, thr).total
    if link is Link.RC:
        return an.op_rc(p, thr)
    return an.op_cr(p, thr)


def validation_report(cfg: RunConfig) -> dict:
    """Analytic vs simulated outage per link over the SNR grid, both variants."""
    variants = [v.value for v in LognormalVariant]
    points = []
    for i, snr in enumerate(cfg.snr_grid_db):
        p = cfg.params.with_snr_db(snr)
        thr = resolve_thresholds(p)
        sim = estimate_outages(p, thr, cfg.mc, derive_stream(cfg.mc.seed, i))
        for link in LINKS:
            r = sim[link]
            row = {"snr_db": snr, "link": link.value, "mc": r.estimate, "ci": r.ci_halfwidth}
            for v in variants:
                a = _analytic_link(p.replace(lognormal_variant=v), thr, link)
                row[v] = {"analytic": a, "deviation": abs(a - r.estimate)}
            points.append(row)

    selected = cfg.params.lognormal_variant.value
    summary: dict[str, Any] = {}
    passed = True
    for v in variants:
        summary[v] = {}
        for link in LINKS:
            rows = [r for r in points if r["link"] == link.value]
            dev = max(r[v]["deviation"] for r in rows)
            ok = all(r[v]["deviation"] <= max(cfg.tolerance, 3 * r["ci"]) for r in rows)
            summary[v][link.value] = {"max_abs_deviation": dev, "within_tolerance": ok}
            if v == selected:
                passed &= ok
    ci_max = max(r["ci"] for r in points)
    return {
        "version": __version__,
        "config": cfg.to_dict(),
        "selected_variant": selected,
        "tolerance": cfg.tolerance,
        "max_ci": ci_max,
        "ci_too_wide": 3 * ci_max > cfg.tolerance,
        "summary": summary,
        "points": points,
        "passed": passed,
    }


def cmd_point(args, cfg: RunConfig) -> int:
    _emit_json(point_report(cfg, args.mc), args.out)
    return EXIT_OK


def cmd_sweep(args, cfg: RunConfig) -> int:
    if args.preset and args.axis:
        raise ConfigError("use either --preset or --axis, not both")
    if args.preset:
        try:
            spec = preset(args.preset, cfg.mc)
        except KeyError as exc:
            raise ConfigError(str(exc)) from exc
        if args.config or args.variant or args.snr_db is not None:
            log.warning("--config/--variant/--snr-db are ignored with --preset")
    elif args.axis:
        name, rng = args.axis
        if name not in AXES:
            raise ConfigError(f"unknown axis {name!r}")
        outputs = tuple(args.outputs.split(",")) if args.outputs else (
            "op_d1", "op_d2", "op_main", "op_rc", "op_cr", "tp_main", "tp_bs")
        spec = SweepSpec(cfg.params, name, parse_range(rng), outputs, cfg.mc)
    else:
        raise ConfigError("sweep needs --preset or --axis")
    if args.no_mc:
        spec = dataclasses.replace(spec, include_mc=False)
    try:
        spec.check()
    except (KeyError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    table = run_sweep(spec)
    text = table.to_csv()
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        try:
            with open(args.out, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            log.error("cannot write %s: %s", args.out, exc)
            return EXIT_FAULT
        log.info("wrote %d rows to %s", len(table.rows), args.out)
    return EXIT_OK


def cmd_validate(args, cfg: RunConfig) -> int:
    rep = validation_report(cfg)
    print(f"tolerance {rep['tolerance']:g}, selected variant {rep['selected_variant']}, "
          f"{cfg.mc.trials} trials/point")
    for v, links in rep["summary"].items():
        for link, s in links.items():
            mark = "ok  " if s["within_tolerance"] else "FAIL"
            print(f"  {mark} {v:15s} {link:3s} max |analytic - mc| = {s['max_abs_deviation']:.4g}")
    if rep["ci_too_wide"]:
        print(f"  warning: 3*CI up to {3 * rep['max_ci']:.3g} exceeds the tolerance; "
              "increase --trials")
    if args.json:
        _emit_json(rep, args.json)
    return EXIT_OK if rep["passed"] else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--snr-db", type=float, help="set P_S so that P_S/N0 is this many dB")
    common.add_argument("--trials", type=_int_like)
    common.add_argument("--seed", type=int)
    common.add_argument("--mode", choices=("assumption", "physical"))
    common.add_argument("--variant", choices=[v.value for v in LognormalVariant])
    common.add_argument("--workers", type=int)
    common.add_argument("--print-config", action="store_true",
                        help="print the resolved configuration and exit")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="dualirs", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("point", parents=[common], help="evaluate one operating point")
    p.add_argument("--mc", action="store_true", help="add Monte Carlo estimates")
    p.add_argument("--out", help="write the JSON report here instead of stdout")

    s = sub.add_parser("sweep", parents=[common], help="run a parameter sweep to CSV")
    s.add_argument("--preset", choices=PRESETS)
    s.add_argument("--axis", nargs=2, metavar=("NAME", "START:STOP:STEP"))
    s.add_argument("--outputs", help="comma-separated outputs for --axis sweeps")
    s.add_argument("--no-mc", action="store_true", help="analytic columns only")
    s.add_argument("--out", help="CSV path (default stdout)")

    v = sub.add_parser("validate", parents=[common], help="compare analytic and MC outage")
    v.add_argument("--tolerance", type=float)
    v.add_argument("--snr-grid", help="start:stop:step in dB (default 0:40:5)")
    v.add_argument("--json", help="write the JSON report here")
    return parser


COMMANDS = {"point": cmd_point, "sweep": cmd_sweep, "validate": cmd_validate}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        cfg = load_config(args)
        if args.print_config:
            print(json.dumps(cfg.to_dict(), indent=2, sort_keys=True))
            return EXIT_OK
        return COMMANDS[args.command](args, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_FAULT


if __name__ == "__main__":
    sys.exit(main())
