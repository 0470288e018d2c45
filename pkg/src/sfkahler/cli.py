"""Command line: ``verify``, ``scan`` and ``self-test``."""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .report import (
    ALL_CHECKS,
    FORMATS,
    ConfigError,
    Report,
    RunConfig,
    apply_settings,
    load_config,
    run,
    summarise,
    write_outputs,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

SELF_TEST_RUNS = (
    ("flat_c2", {}, -2.0, -1.0, 2, ("laplacian_value", "closed_form", "euler_numbers", "area_growth", "volume_forms")),
    ("lebrun_instanton", {"k": 1, "m": 1.0}, -3.0, -0.5, 2, ("closed_form", "euler_numbers", "area_growth", "chi_evolution")),
    ("lebrun_instanton", {"k": 2, "m": 1.0}, -3.0, -0.5, 2, ("closed_form", "euler_numbers", "area_growth")),
    ("lebrun_instanton", {"k": 3, "m": 1.0}, -3.0, -0.5, 2, ("closed_form", "euler_numbers", "area_growth", "cgb_evolution")),
)


def _add_overrides(p: argparse.ArgumentParser) -> None:
    p.add_argument("config", nargs="?", help="INI run configuration")
    p.add_argument("--family", help="family name")
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE", help="family parameter")
    p.add_argument("--z-min", type=float)
    p.add_argument("--z-max", type=float)
    p.add_argument("--z-count", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--checks", help=f"comma list or 'all'; known: {', '.join(ALL_CHECKS)}")
    p.add_argument("--tol", action="append", default=[], metavar="KEY=VALUE", help="tolerance override")
    p.add_argument("--format", dest="formats", help=f"comma list of {', '.join(FORMATS)}")
    p.add_argument("--out", help="output path prefix ('-' for stdout)")
    p.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE", help="any config setting")


def _pairs(items, prefix=""):
    out = {}
    for item in items:
        if "=" not in item:
            raise ConfigError(f"expected KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        out[prefix + k.strip()] = v.strip()
    return out


def build_config(args) -> RunConfig:
    """Config file first, then flags in a fixed order."""
    cfg = load_config(Path(args.config).read_text()) if args.config else RunConfig()
    s = {}
    if args.family:
        s["family.name"] = args.family
    s.update(_pairs(args.param, "family."))
    for flag, key in (("z_min", "grid.z_min"), ("z_max", "grid.z_max"), ("z_count", "grid.count"), ("samples", "sample.count"), ("seed", "sample.seed")):
        if getattr(args, flag) is not None:
            s[key] = getattr(args, flag)
    if args.checks:
        s["checks.select"] = args.checks
    s.update(_pairs(args.tol, "tolerances."))
    if args.formats:
        s["output.formats"] = args.formats
    if args.out:
        s["output.path"] = args.out
    s.update(_pairs(args.set))
    if args.family and args.config:
        # a new family on the command line discards the file's parameters
        cfg.params = {}
    return apply_settings(cfg, s)


def self_test(formats=("table",), out=None) -> tuple:
    records, configs, errors = [], [], 0
    start = time.perf_counter()
    for fam, params, lo, hi, n, checks in SELF_TEST_RUNS:
        cfg = RunConfig(family=fam, params=dict(params), z_min=lo, z_max=hi, z_count=n, samples=8, checks=checks)
        rep = run(cfg)
        records += rep.records
        errors += rep.summary["errors"]
        configs.append(cfg.as_dict())
    summary = summarise(records)
    summary["errors"] = errors
    report = Report(config={"suite": "self-test", "runs": configs}, records=records, summary=summary, wall_time=time.perf_counter() - start)
    return report, RunConfig(formats=formats, output=out)


def scan(cfg: RunConfig, key: str, values) -> Report:
    """Run ``cfg`` once per value of the dotted setting ``key``; records are concatenated."""
    records, errors = [], 0
    start = time.perf_counter()
    for v in values:
        c = RunConfig.from_dict(cfg.as_dict())
        apply_settings(c, {key: v})
        rep = run(c)
        records += rep.records
        errors += rep.summary["errors"]
    summary = summarise(records)
    summary["errors"] = errors
    echo = cfg.as_dict()
    echo["scan"] = {"key": key, "values": list(values)}
    return Report(config=echo, records=records, summary=summary, wall_time=time.perf_counter() - start)


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sfkahler", description="Verify identities of scalar-flat Kahler surfaces with symmetry.")
    p.add_argument("--self-test", action="store_true", help="run the built-in golden suite and exit")
    sub = p.add_subparsers(dest="command")
    _add_overrides(sub.add_parser("verify", help="run a configuration"))
    sp = sub.add_parser("scan", help="sweep one setting and emit csv")
    _add_overrides(sp)
    sp.add_argument("--sweep", required=True, metavar="SECTION.KEY", help="setting to vary, e.g. family.m")
    sp.add_argument("--values", required=True, help="comma list of values")
    st = sub.add_parser("self-test", help="run the built-in golden suite")
    st.add_argument("--format", dest="formats", default="table")
    st.add_argument("--out")
    return p


def main(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        if args.self_test or args.command == "self-test":
            fmts = tuple(f.strip() for f in getattr(args, "formats", "table").split(","))
            report, out_cfg = self_test(fmts, getattr(args, "out", None))
            out_cfg.validate()
        elif args.command == "verify":
            out_cfg = build_config(args)
            report = run(out_cfg)
        elif args.command == "scan":
            out_cfg = build_config(args)
            if not args.formats and "output.formats" not in _pairs(args.set):
                out_cfg.formats = ("csv",)
            values = [v.strip() for v in args.values.split(",") if v.strip()]
            report = scan(out_cfg, args.sweep, values)
        else:
            parser.print_help(stdout)
            return EXIT_USAGE
        write_outputs(report, out_cfg, stdout)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK if report.ok else EXIT_FAIL
