"""Command-line entry point.

Exit codes: 0 on success, 2 on user errors (bad flags, malformed files,
invalid windows or groupings), 3 on environment errors (e.g. port in use).
"""

from __future__ import annotations

import csv
import functools
import io
import json
import os
import socket
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .basis import build_basis, gcv_select_dof, project_samples
from .core import decompose as core_decompose
from .core import reconstruct as core_reconstruct
from .diagnostics import wcor_matrix
from .errors import FSSAError
from .fileio import (
    decomposition_from_dict,
    decomposition_to_dict,
    parse_group_string,
    read_series_csv,
    rescale_grid,
    write_series_csv,
)
from .simulation import run_benchmark


def _fail(message: str, code: int = 2):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def user_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except FSSAError as exc:
            _fail(str(exc))
        except OSError as exc:
            _fail(str(exc), code=3)

    return wrapper


def _workers(requested: int) -> int:
    cap = os.environ.get("FSSA_THREADS")
    if cap:
        try:
            return max(1, min(requested, int(cap)))
        except ValueError:
            _fail(f"FSSA_THREADS must be an integer, got {cap!r}")
    return max(1, requested)


@click.group()
@click.version_option(__version__)
def main():
    """Decompose series of curves into interpretable components."""


@main.command("decompose")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--window", "-L", "window", required=True, type=int, help="window length L")
@click.option("--dof", type=int, default=None, help="B-spline dimension d")
@click.option("--gcv", "gcv_spec", default=None, help="comma-separated candidate dimensions")
@click.option("--rank", type=int, default=None, help="number of eigentriples to retain")
@click.option("--output", "output_path", required=True, type=click.Path(dir_okay=False))
@user_errors
def decompose_cmd(input_path, window, dof, gcv_spec, rank, output_path):
    """Smooth a series CSV into a spline basis and decompose it."""
    if (dof is None) == (gcv_spec is None):
        _fail("exactly one of --dof or --gcv is required")
    grid, values = read_series_csv(Path(input_path).read_text())
    grid01, domain = rescale_grid(grid)
    if gcv_spec is not None:
        try:
            candidates = [int(x) for x in gcv_spec.split(",") if x.strip()]
        except ValueError:
            _fail(f"--gcv expects comma-separated integers, got {gcv_spec!r}")
        d = gcv_select_dof(grid01, values, candidates)
    else:
        d = dof
    fts = project_samples(grid01, values, build_basis("bspline", d))
    dec = core_decompose(fts, window, r=rank)
    doc = decomposition_to_dict(dec, grid, domain)
    Path(output_path).write_text(json.dumps(doc))
    click.echo(f"wrote {output_path} (N={dec.N}, L={dec.L}, K={dec.K}, d={d}, r={dec.r})")


def _load_decomposition(path: str):
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        _fail(f"decomposition file is not valid JSON: {exc}")
    return decomposition_from_dict(doc)


@main.command("reconstruct")
@click.option("--decomposition", "dec_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--groups", "group_spec", required=True,
              help='group string, e.g. "1;2-3;4-5"')
@click.option("--output", "prefix", required=True, help="output path prefix")
@user_errors
def reconstruct_cmd(dec_path, group_spec, prefix):
    """Write one series CSV per group of eigentriples."""
    dec, grid, _ = _load_decomposition(dec_path)
    grouping = parse_group_string(group_spec, r=dec.r)
    grid01, _ = rescale_grid(grid)
    for label, fts in zip(grouping.group_labels(), core_reconstruct(dec, grouping)):
        path = f"{prefix}_{label}.csv"
        Path(path).write_text(write_series_csv(grid, fts.evaluate(grid01)))
        click.echo(f"wrote {path}")


@main.command("wcor")
@click.option("--decomposition", "dec_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--groups", "group_spec", required=True)
@click.option("--output", "output_path", required=True, type=click.Path(dir_okay=False))
@user_errors
def wcor_cmd(dec_path, group_spec, output_path):
    """Weighted correlation matrix of the grouped reconstructions."""
    dec, _, _ = _load_decomposition(dec_path)
    grouping = parse_group_string(group_spec, r=dec.r)
    series = core_reconstruct(dec, grouping)
    labels = grouping.group_labels()
    if len(series) == 1:
        values = np.ones((1, 1))
    else:
        out = wcor_matrix(series, dec.L, labels=labels)
        values = out.values
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["", *labels])
    for label, row in zip(labels, values):
        writer.writerow([label] + [repr(float(x)) for x in row])
    Path(output_path).write_text(buf.getvalue())
    click.echo(f"wrote {output_path}")


@main.command("bench")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--reps", required=True, type=int)
@click.option("--seed", required=True, type=int)
@click.option("--output", "prefix", required=True, help="output path prefix")
@click.option("--workers", type=int, default=1, show_default=True,
              help="parallel replicate workers (capped by FSSA_THREADS)")
@user_errors
def bench_cmd(config_path, reps, seed, prefix, workers):
    """Run the simulation benchmark described by a JSON config.

    The config either lists cells explicitly:
    ``{"cells": [{"setting": "gwn", "omega": 0.1, "N": 100, "L": 20}, ...]}``
    or gives a product grid:
    ``{"settings": [{"setting": "far1", "hs_norm": 0.9}], "omegas": [...],
    "Ns": [...], "Ls": [...]}``.
    """
    try:
        config = json.loads(Path(config_path).read_text())
    except json.JSONDecodeError as exc:
        _fail(f"config is not valid JSON: {exc}")
    if not isinstance(config, dict):
        _fail("config must be a JSON object")
    if "cells" in config:
        cells = config["cells"]
        if not isinstance(cells, list) or not cells:
            _fail("config.cells must be a non-empty list")
    else:
        try:
            cells = [
                {**setting, "omega": omega, "N": N, "L": L}
                for setting in config["settings"]
                for omega in config["omegas"]
                for N in config["Ns"]
                for L in config["Ls"]
            ]
        except (KeyError, TypeError) as exc:
            _fail(f"config needs cells or settings/omegas/Ns/Ls: {exc}")
    report = run_benchmark(cells, reps=reps, seed=seed, workers=_workers(workers))
    Path(f"{prefix}.csv").write_text(report.to_csv())
    Path(f"{prefix}.json").write_text(report.to_json())
    click.echo(f"wrote {prefix}.csv and {prefix}.json ({len(report.rows)} rows)")


main.add_command(bench_cmd, name="simulate")


@main.command("serve")
@click.option("--port", type=int, default=8350, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--data", "data_dir", type=click.Path(file_okay=False), default=None,
              help="directory for persisted series and decompositions")
@user_errors
def serve_cmd(port, host, data_dir):
    """Run the explorer HTTP service."""
    import uvicorn

    from .service import create_app

    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((host, port))
    except OSError as exc:
        _fail(f"cannot bind {host}:{port}: {exc}", code=3)
    finally:
        probe.close()
    uvicorn.run(create_app(data_dir), host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
