"""Config validation, experiment execution and report files."""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, is_dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from ..errors import ConfigError, LabError
from ..graph import DEFAULT_MAX_VERTICES, HalfInt
from ..groups import Isometry
from .suites import SUITES, Context

REPORT_VERSION = 1


def schema() -> dict:
    return json.loads(resources.files("horolab.cli").joinpath("schema.json").read_text())


def load_config(path) -> dict:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON", [f"line {e.lineno}, column {e.colno}: {e.msg}"]) from None


def diagnostics(cfg) -> list[str]:
    """Schema and catalogue errors as 'field/path: message' lines; empty when valid."""
    import jsonschema

    v = jsonschema.Draft202012Validator(schema())
    out = []
    for err in sorted(v.iter_errors(cfg), key=lambda e: list(map(str, e.absolute_path))):
        where = "/".join(str(p) for p in err.absolute_path) or "(root)"
        out.append(f"{where}: {err.message}")
    if out:
        return out
    for i, exp in enumerate(cfg.get("experiments", [])):
        s = SUITES.get(exp["suite"])
        if s is None:
            out.append(f"experiments/{i}/suite: unknown suite {exp['suite']!r}")
            continue
        if s.seeded and "seed" not in cfg:
            out.append(f"experiments/{i}: suite {s.name!r} samples at random and needs a seed")
    ids = [e.get("id", f"{i}-{e['suite']}") for i, e in enumerate(cfg.get("experiments", []))]
    for x in sorted({x for x in ids if ids.count(x) > 1}):
        out.append(f"experiments: duplicate id {x!r}")
    return out


def validate(cfg) -> dict:
    d = diagnostics(cfg)
    if d:
        raise ConfigError("config does not validate", d)
    return cfg


def suite_config(names, seed=None) -> dict:
    cfg = {"experiments": [{"suite": n} for n in names]}
    if seed is not None:
        cfg["seed"] = seed
    return cfg


def plain(x):
    """JSON-ready copy with exact numbers rendered deterministically."""
    if isinstance(x, bool) or x is None or isinstance(x, (str, int)):
        return x
    if isinstance(x, float):
        return x
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else str(x)
    if isinstance(x, HalfInt):
        return x.to_json()
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return [plain(v) for v in x.tolist()]
    if isinstance(x, Isometry):
        return x.word
    if isinstance(x, dict):
        return {str(k): plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = [plain(v) for v in x]
        return sorted(items, key=repr) if isinstance(x, (set, frozenset)) else items
    if is_dataclass(x):
        return plain(asdict(x))
    return str(x)


def _effective(exp):
    """Instance, radius and params after suite defaults; pins apply only to the default instance."""
    s = SUITES[exp["suite"]]
    params = dict(exp.get("params", {}))
    if "instance" not in exp:
        params = {**s.pins, **params}
    return exp.get("instance", s.instance), exp.get("radius", s.radius), params


def _run_one(job):
    i, exp, seed, max_vertices = job
    s = SUITES[exp["suite"]]
    ctx = Context(*_effective(exp), seed, max_vertices)
    t = time.perf_counter()
    try:
        res = s.run(ctx)
        error = None
    except LabError as e:
        res, error = None, {"type": type(e).__name__, "message": str(e), "witness": plain(getattr(e, "witness", None))}
    return i, res, error, time.perf_counter() - t


def run_config(cfg, seed=None, jobs: int = 1, max_vertices=None):
    """Run every experiment; returns (report, timing, artifacts) with artifacts keyed by experiment id."""
    validate(cfg)
    if seed is None:
        seed = cfg.get("seed")
    max_vertices = max_vertices or cfg.get("max_vertices", DEFAULT_MAX_VERTICES)
    exps = cfg.get("experiments", [])
    jobs_list = [(i, e, seed, max_vertices) for i, e in enumerate(exps)]
    if jobs > 1 and len(jobs_list) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_run_one, jobs_list))
    else:
        results = [_run_one(j) for j in jobs_list]
    results.sort(key=lambda r: r[0])
    entries, timing, artifacts = [], {}, {}
    for i, res, error, dt in results:
        exp = exps[i]
        s = SUITES[exp["suite"]]
        eid = exp.get("id", f"{i}-{s.name}")
        instance, radius, params = _effective(exp)
        entry = {"id": eid, "suite": s.name, "instance": instance, "radius": radius, "params": params}
        if error is not None:
            entry.update(passed=False, error=error, checks=[], constants={})
        else:
            entry.update(passed=all(c["passed"] for c in res.checks), checks=res.checks, constants=res.constants)
            artifacts[eid] = res
        entries.append(plain(entry))
        timing[eid] = round(dt, 3)
    report = {
        "version": REPORT_VERSION,
        "seed": seed,
        "passed": all(e["passed"] for e in entries),
        "experiments": entries,
    }
    return report, timing, artifacts


def dumps(report) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def write_outputs(out_dir, report, timing, artifacts):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(dumps(report))
    (out / "timing.json").write_text(json.dumps(timing, indent=2, sort_keys=True) + "\n")
    written = ["report.json", "timing.json"]
    for eid, res in artifacts.items():
        for name, (header, rows) in res.tables.items():
            fn = f"{eid}.{name}.csv"
            with open(out / fn, "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(header)
                w.writerows(plain(list(r)) for r in rows)
            written.append(fn)
        for name, text in res.plots.items():
            fn = f"{eid}.{name}.svg"
            (out / fn).write_text(text)
            written.append(fn)
        for name, text in res.graphs.items():
            fn = f"{eid}.{name}.dot"
            (out / fn).write_text(text)
            written.append(fn)
    return written
