"""Run configurations, batch execution and report serialisation."""

from __future__ import annotations

import ast
import configparser
import csv
import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from . import identities as ids
from .families import UnsupportedFamily, build_family

THREADS_ENV = "SFKAHLER_THREADS"
FORMATS = ("table", "csv", "json")
CSV_COLUMNS = ("check", "family", "z_or_point", "lhs", "rhs", "residual", "tolerance", "pass")

# check name -> tolerance category
POINT_CATEGORY = {name: "pointwise" for name in ids.POINT_CHECKS}
POINT_CATEGORY.update(p_ric="p_ric", laplacian_value="closed_form")
Z_CATEGORY = {name: "evolution" for name in ids.Z_CHECKS}
Z_CATEGORY.update(volume_linear="volume_linear")
EXTRA_CHECKS = {
    "lebrun_pde": "lebrun_pde",
    "closed_form": "closed_form",
    "euler_numbers": "closed_form",
    "integration_lemma": "closed_form",
    "constancy": "constancy",
    "ricci_flat_relation": "ricci_flat",
    "holder": "inequality",
    "signs": "inequality",
}
ALL_CHECKS = tuple(POINT_CATEGORY) + tuple(Z_CATEGORY) + tuple(EXTRA_CHECKS)


class ConfigError(ValueError):
    """Invalid run configuration (unknown family or check, bad grid, bad output path)."""


def _literal(text: str):
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        return text


@dataclass
class RunConfig:
    family: str = "flat_c2"
    params: dict = field(default_factory=dict)
    z_min: float = -2.0
    z_max: float = -1.0
    z_count: int = 3
    samples: int = 50
    seed: int = 0
    checks: tuple = ("all",)
    tolerances: dict = field(default_factory=dict)
    formats: tuple = ("table",)
    output: Optional[str] = None

    def __post_init__(self):
        self.z_min, self.z_max = float(self.z_min), float(self.z_max)
        self.z_count, self.samples, self.seed = int(self.z_count), int(self.samples), int(self.seed)
        self.checks = tuple(self.checks)
        self.formats = tuple(self.formats)
        self.tolerances = {k: float(v) for k, v in self.tolerances.items()}

    def z_grid(self) -> list:
        if self.z_count == 1:
            return [self.z_min]
        return [float(z) for z in np.linspace(self.z_min, self.z_max, self.z_count)]

    def as_dict(self) -> dict:
        return {
            "family": self.family,
            "params": dict(self.params),
            "z_min": self.z_min,
            "z_max": self.z_max,
            "z_count": self.z_count,
            "samples": self.samples,
            "seed": self.seed,
            "checks": list(self.checks),
            "tolerances": dict(sorted(self.tolerances.items())),
            "formats": list(self.formats),
            "output": self.output,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        return cls(**d)

    def validate(self) -> None:
        if self.z_count < 1:
            raise ConfigError("z count must be at least 1")
        if self.z_min > self.z_max:
            raise ConfigError("z_min exceeds z_max")
        if self.samples < 1:
            raise ConfigError("sample count must be at least 1")
        for c in self.checks:
            if c != "all" and c not in ALL_CHECKS:
                raise ConfigError(f"unknown check {c!r}")
        for f in self.formats:
            if f not in FORMATS:
                raise ConfigError(f"unknown format {f!r}")
        for k in self.tolerances:
            if k not in ids.TOLERANCES and k not in ALL_CHECKS:
                raise ConfigError(f"unknown tolerance key {k!r}")
        if self.output is not None:
            parent = Path(self.output).resolve().parent
            if not parent.is_dir() or not os.access(parent, os.W_OK):
                raise ConfigError(f"output path {self.output!r} is not writable")


def load_config(text: str) -> RunConfig:
    """Parse an INI-style configuration.

    Sections: ``[family]`` (``name`` plus constructor parameters), ``[grid]``
    (``z_min``, ``z_max``, ``count``), ``[sample]`` (``count``, ``seed``),
    ``[checks]`` (``select``), ``[tolerances]``, ``[output]`` (``formats``,
    ``path``).
    """
    cp = configparser.ConfigParser()
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    cfg = RunConfig()
    apply_settings(cfg, {f"{s}.{k}": v for s in cp.sections() for k, v in cp.items(s)})
    return cfg


def _split(v: str) -> tuple:
    return tuple(p.strip() for p in str(v).split(",") if p.strip())


def apply_settings(cfg: RunConfig, settings: dict) -> RunConfig:
    """Apply dotted ``section.key`` overrides in place."""
    for key, value in settings.items():
        if "." not in key:
            raise ConfigError(f"setting {key!r} needs a section prefix")
        sec, name = key.split(".", 1)
        if sec == "family":
            if name == "name":
                cfg.family = str(value)
            else:
                cfg.params[name] = _literal(value) if isinstance(value, str) else value
        elif sec == "grid" and name in ("z_min", "z_max", "count"):
            attr = {"count": "z_count"}.get(name, name)
            setattr(cfg, attr, value)
        elif sec == "sample" and name in ("count", "seed"):
            setattr(cfg, {"count": "samples"}.get(name, name), value)
        elif sec == "checks" and name == "select":
            cfg.checks = _split(value)
        elif sec == "tolerances":
            cfg.tolerances[name] = float(value)
        elif sec == "output" and name == "formats":
            cfg.formats = _split(value)
        elif sec == "output" and name == "path":
            cfg.output = None if str(value) in ("", "-") else str(value)
        else:
            raise ConfigError(f"unknown setting {key!r}")
    cfg.__post_init__()
    return cfg


@dataclass
class Report:
    config: dict
    records: list
    summary: dict
    engine_version: str = __version__
    wall_time: float = field(default=0.0, compare=False)

    @property
    def ok(self) -> bool:
        return self.summary["failed"] == 0 and self.summary["errors"] == 0

    def as_dict(self) -> dict:
        return {
            "engine_version": self.engine_version,
            "config": self.config,
            "summary": self.summary,
            "records": [r.as_dict() for r in self.records],
        }


def summarise(records) -> dict:
    by_kind = {}
    for r in records:
        k = by_kind.setdefault(r.kind, {"passed": 0, "failed": 0})
        k["passed" if r.passed else "failed"] += 1
    passed = sum(1 for r in records if r.passed)
    return {
        "total": len(records),
        "passed": passed,
        "failed": len(records) - passed,
        "errors": 0,
        "by_kind": dict(sorted(by_kind.items())),
    }


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    return max(1, n)


def _selected(cfg: RunConfig, bundle) -> list:
    if "all" not in cfg.checks:
        return list(dict.fromkeys(cfg.checks))
    app = ids.applicable_checks(bundle)
    names = list(app.point)
    if bundle.isothermal_grad is not None:
        names.append("lebrun_pde")
    if bundle.reduction_chart is not None:
        names += list(app.z) + ["closed_form", "euler_numbers", "constancy", "holder", "signs"]
        if bundle.level_set_chart is not None:
            names.append("integration_lemma")
        if "ricci_flat" in bundle.notes and "flat" not in bundle.notes:
            names.append("ricci_flat_relation")
    return names


def _tolerance(cfg: RunConfig, name: str) -> float:
    if name in cfg.tolerances:
        return cfg.tolerances[name]
    cat = POINT_CATEGORY.get(name) or Z_CATEGORY.get(name) or EXTRA_CHECKS.get(name)
    return cfg.tolerances.get(cat, ids.TOLERANCES[cat])


def _tasks(cfg: RunConfig, bundle, names) -> list:
    """Deterministically ordered zero-argument callables, each returning a list of records."""
    zs = cfg.z_grid()
    est = ids.ZDerivativeEstimator.for_range(cfg.z_min, cfg.z_max)
    needs_z = [n for n in names if n in Z_CATEGORY or n in ("closed_form", "euler_numbers", "constancy", "holder", "signs", "integration_lemma", "ricci_flat_relation")]
    if needs_z:
        for z in zs:
            margin = est.span() if any(n in Z_CATEGORY for n in names) else 0.0
            try:
                ids._require_regular(bundle, z, margin)
            except ids.CheckDomainError as exc:
                raise ConfigError(str(exc)) from None
    P = bundle.sample(cfg.samples, cfg.seed)
    tasks = []
    for name in names:
        tol = _tolerance(cfg, name)
        if name in POINT_CATEGORY:
            f = ids.POINT_CHECKS[name]
            tasks.append(lambda f=f, tol=tol: [f(bundle, P, tol)])
        elif name == "lebrun_pde":
            tasks.append(lambda tol=tol: [ids.check_lebrun_pde(bundle, ids.lebrun_sample(bundle, cfg.samples, cfg.seed), tol)])
        elif name == "constancy":
            tasks.append(lambda tol=tol: ids.check_topological_constancy(bundle, zs, tol))
        else:
            for z in zs:
                tasks.append(_z_task(name, bundle, z, est, tol, cfg))
    return tasks


def _z_task(name, bundle, z, est, tol, cfg):
    if name in Z_CATEGORY:
        f = ids.Z_CHECKS[name]
        return lambda: [f(bundle, z, est, tol)]
    if name == "closed_form":

        def run_closed():
            out = []
            for q in ids.QUANTITIES:
                if ids._DECLARED_KEYS[q] not in bundle.declared:
                    continue
                out.append(ids.check_closed_form(bundle, z, q, "analytic", cfg.tolerances.get("closed_form", tol)))
                out.append(ids.check_closed_form(bundle, z, q, "fd", cfg.tolerances.get("closed_form_fd", ids.TOLERANCES["closed_form_fd"])))
            return out

        return run_closed
    if name == "euler_numbers":
        return lambda: ids.check_euler_numbers(bundle, z, tol)
    if name == "integration_lemma":
        return lambda: [ids.check_integration_lemma(bundle, z, tol)]
    if name == "ricci_flat_relation":
        return lambda: [ids.check_ricci_flat_relation(bundle, z, tol)]
    if name == "holder":
        return lambda: [ids.check_holder(bundle, z, tol)]
    if name == "signs":
        return lambda: ids.check_sign_constraints(bundle, z)
    raise ConfigError(f"unknown check {name!r}")


def _error_record(bundle, exc) -> ids.IdentityCheck:
    return ids.make_check("error", ids.CLOSED_FORM, bundle, "n/a", math.nan, math.nan, math.inf, 0.0, f"{type(exc).__name__}: {exc}")


def run(cfg: RunConfig) -> Report:
    """Execute every selected check; output order is independent of the thread count."""
    cfg.validate()
    start = time.perf_counter()
    try:
        bundle = build_family(cfg.family, **cfg.params)
    except (UnsupportedFamily, TypeError) as exc:
        raise ConfigError(str(exc)) from None
    names = _selected(cfg, bundle)
    tasks = _tasks(cfg, bundle, names)

    def guarded(task):
        try:
            return task(), 0
        except (ids.CheckDomainError, UnsupportedFamily, ArithmeticError, ValueError) as exc:
            return [_error_record(bundle, exc)], 1

    n = thread_count()
    if n == 1:
        results = [guarded(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            results = list(pool.map(guarded, tasks))
    records = [r for recs, _ in results for r in recs]
    summary = summarise(records)
    summary["errors"] = sum(e for _, e in results)
    return Report(config=cfg.as_dict(), records=records, summary=summary, wall_time=time.perf_counter() - start)


# ------------------------------------------------------------------ emitting


def _num(x: float) -> str:
    return repr(float(x))


def emit(report: Report, fmt: str) -> bytes:
    if fmt == "json":
        return (json.dumps(report.as_dict(), indent=2, sort_keys=True) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in report.records:
            w.writerow([r.name, r.family, r.where, _num(r.lhs), _num(r.rhs), _num(r.residual), _num(r.tolerance), "true" if r.passed else "false"])
        return buf.getvalue().encode()
    if fmt == "table":
        return _table(report).encode()
    raise ConfigError(f"unknown format {fmt!r}")


def _table(report: Report) -> str:
    rows = [("check", "family", "where", "lhs", "rhs", "residual", "tol", "")]
    for r in report.records:
        rows.append((r.name, r.family, r.where, f"{r.lhs:.10g}", f"{r.rhs:.10g}", f"{r.residual:.2e}", f"{r.tolerance:.0e}", "ok" if r.passed else "FAIL"))
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in rows]
    s = report.summary
    lines.append("")
    lines.append(f"{s['passed']}/{s['total']} passed, {s['failed']} failed, {s['errors']} errors; engine {report.engine_version}; {report.wall_time:.1f}s")
    return "\n".join(lines) + "\n"


def parse(data: bytes) -> Report:
    """Inverse of ``emit(report, "json")``."""
    d = json.loads(data.decode() if isinstance(data, bytes) else data)
    return Report(
        config=d["config"],
        records=[ids.IdentityCheck.from_dict(r) for r in d["records"]],
        summary=d["summary"],
        engine_version=d["engine_version"],
    )


def write_outputs(report: Report, cfg: RunConfig, stdout) -> None:
    """Write each format to ``<output>.<ext>``, or to ``stdout`` if no path is set."""
    for fmt in cfg.formats:
        data = emit(report, fmt)
        if cfg.output is None:
            stdout.write(data.decode())
        else:
            ext = {"table": "txt"}.get(fmt, fmt)
            Path(f"{cfg.output}.{ext}").write_bytes(data)
