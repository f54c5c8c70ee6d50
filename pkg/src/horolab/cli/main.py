"""Command line entry point: ``horolab run|list|validate|export``."""

from __future__ import annotations

import json
import sys

import click

from ..errors import ConfigError, LabError
from . import report as rp
from .suites import SUITES

INSTANCES = {
    "F2": {"family": "free", "rank": 2},
    "Z3*Z4": {"family": "free_product", "orders": [3, 4], "names": "st"},
    "Z3*Z4-coned": {"family": "free_product", "orders": [3, 4], "names": "st", "coned": True},
    "Z*Z3": {"family": "free_product", "orders": [0, 3]},
    "Z*Z3-coned": {"family": "free_product", "orders": [0, 3], "coned": True},
    "Z2*Z2*Z2": {"family": "free_product", "orders": [2, 2, 2]},
}


def _fail(e: LabError):
    click.echo(f"error: {e}", err=True)
    for d in getattr(e, "diagnostics", []):
        click.echo(f"  {d}", err=True)
    sys.exit(2)


@click.group()
def cli():
    """Desk-scale experiments on horofunctions, projection complexes and coned-off graphs."""


@cli.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), help="Experiment config (JSON).")
@click.option("--suite", "suites", multiple=True, help="Run a built-in suite with its defaults; repeatable.")
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=None, help="RNG seed (overrides the config).")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default="horolab-out", show_default=True)
@click.option("--jobs", type=click.IntRange(1), default=1, show_default=True, help="Experiments run in parallel.")
@click.option("--max-vertices", type=click.IntRange(1), default=None, help="Cap on ball sizes.")
def run(config_path, suites, seed, out_dir, jobs, max_vertices):
    """Run experiments and write report.json, timing.json, CSV, SVG and DOT files."""
    try:
        if config_path:
            cfg = rp.load_config(config_path)
            if suites:
                cfg.setdefault("experiments", []).extend({"suite": s} for s in suites)
        else:
            cfg = rp.suite_config(suites)
        if seed is not None:
            cfg["seed"] = seed
        report, timing, artifacts = rp.run_config(cfg, seed, jobs, max_vertices)
    except LabError as e:
        _fail(e)
    rp.write_outputs(out_dir, report, timing, artifacts)
    for e in report["experiments"]:
        mark = "PASS" if e["passed"] else "FAIL"
        click.echo(f"{mark} {e['id']} ({timing[e['id']]:.2f}s)")
        for c in e["checks"]:
            if not c["passed"]:
                click.echo(f"  failed: {c['name']}")
        if "error" in e:
            click.echo(f"  {e['error']['type']}: {e['error']['message']}")
    sys.exit(0 if report["passed"] else 1)


@cli.command("list")
def list_suites():
    """List the built-in suites."""
    for name, s in SUITES.items():
        click.echo(f"{name:22s} {s.summary}")


@cli.command()
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
def validate(config_path):
    """Check a config against the schema and the suite catalogue."""
    try:
        cfg = rp.load_config(config_path)
    except ConfigError as e:
        _fail(e)
    diags = rp.diagnostics(cfg)
    for d in diags:
        click.echo(d)
    sys.exit(1 if diags else 0)


@cli.command()
@click.argument("instance")
@click.option("--radius", type=click.IntRange(0), required=True)
@click.option("--format", "fmt", type=click.Choice(["dot", "graphml", "csv"]), default="dot", show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default="-", show_default=True)
@click.option("--max-vertices", type=click.IntRange(1), default=None)
def export(instance, radius, fmt, out_path, max_vertices):
    """Write a ball of INSTANCE (a built-in name or a group-spec JSON file)."""
    from ..graph import DEFAULT_MAX_VERTICES, build_ball
    from ..graphio import to_adjacency_csv, to_dot, to_graphml
    from ..spaces import action_from_spec, load_group_spec

    try:
        act = action_from_spec(INSTANCES[instance]) if instance in INSTANCES else load_group_spec(instance)
        ball = build_ball(act, radius, max_vertices or DEFAULT_MAX_VERTICES)
    except (LabError, OSError, json.JSONDecodeError) as e:
        _fail(e if isinstance(e, LabError) else ConfigError(str(e)))
    writers = {"dot": lambda: to_dot(ball, instance), "graphml": lambda: to_graphml(ball), "csv": lambda: to_adjacency_csv(ball)}
    text = writers[fmt]()
    if out_path == "-":
        click.echo(text, nl=False)
    else:
        with open(out_path, "w") as fh:
            fh.write(text)


def main():
    cli()


if __name__ == "__main__":
    main()
