"""Command-line entry points: single runs, parameter sweeps, channel export.

Determinism contract: a cell's record stream depends only on (config, seed,
repetition).  Sweep cells get seeds derived as SeedSequence([master_seed,
cell_index]) with cells enumerated in cross-product order, so results are
identical under any --parallel setting.
"""

from __future__ import annotations

import csv
import itertools
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click
import numpy as np
import yaml

from . import __version__
from .benchmarks import (GeometryBenchConfig, StepsizeBenchConfig,
                         run_geometry_benchmark, run_stepsize_benchmark,
                         stepsize_summary)
from .channel import SIGMA_D_TABLE_SEED, default_sigma_d_table, rssi_at_distance, sample_rssi_sigma
from .config import (config_from_dict, config_hash, config_to_dict,
                     load_config, load_preset, save_config)
from .engine import (METRICS_HEADER, REPUTATION_TRACE_HEADER, ScenarioConfig,
                     run_repetitions)
from .errors import ConfigError, SwarmlocError

EXPORT_HEADER = ["d", "rssi_mean", "rssi_sampled", "sigma_d"]


# ---------------------------------------------------------------- helpers

def _fail(exc: Exception, code: int = 2):
    click.echo(f"error: {exc}", err=True)
    sys.exit(code)


def _resolve_config(config_path, preset):
    if (config_path is None) == (preset is None):
        raise ConfigError("exactly one of --config or --preset is required")
    return load_config(config_path) if config_path else load_preset(preset)


def _with_overrides(cfg, seed=None, reps=None):
    """Rebuild the config with CLI overrides applied (re-validates)."""
    data = config_to_dict(cfg)
    if seed is not None:
        data["seed"] = seed
    if reps is not None:
        data["reps"] = reps
    return config_from_dict(data)


def _out_dir(out) -> Path:
    path = Path(os.environ.get("SWARMLOC_OUT") or out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _write_manifest(path: Path, cfg, outputs, t_start):
    manifest = {
        "config_hash": config_hash(cfg),
        "seed": cfg.seed,
        "tool_version": __version__,
        "sigma_d_table_seed": SIGMA_D_TABLE_SEED,
        "outputs": [str(p) for p in outputs],
        "duration_s": round(time.monotonic() - t_start, 3),
    }
    path.write_text(json.dumps(manifest, indent=2) + "\n")


def _summarize_records(records, rep_means):
    errs = np.array([r.err_m for r in records])
    return {
        "n_records": len(records),
        "n_reps": len(rep_means),
        "mean_err_m": float(np.mean(rep_means)),
        "std_err_m": float(np.std(rep_means)),
        "rep_mean_err_m": [float(m) for m in rep_means],
        "all_targets_mean_err_m": float(errs.mean()) if len(errs) else None,
    }


def _run_scenario_outputs(cfg: ScenarioConfig, out_dir: Path, run_id: str,
                          trace_reputation: bool):
    """Execute all repetitions and write metrics CSV (+ optional reputation
    trace); returns (written paths, summary dict)."""
    trace = [] if trace_reputation else None
    records, rep_means = run_repetitions(cfg, run_id=run_id,
                                         reputation_trace=trace)
    metrics_path = out_dir / f"{run_id}_metrics.csv"
    _write_csv(metrics_path, METRICS_HEADER, [r.as_row() for r in records])
    outputs = [metrics_path]
    if trace is not None:
        trace_path = out_dir / f"{run_id}_reputation_trace.csv"
        _write_csv(trace_path, REPUTATION_TRACE_HEADER, trace)
        outputs.append(trace_path)
    return outputs, _summarize_records(records, rep_means)


def _run_benchmark_outputs(cfg, out_dir: Path, run_id: str):
    if isinstance(cfg, StepsizeBenchConfig):
        rows = run_stepsize_benchmark(cfg)
        summary = {"mean_err_m_by_estimator": stepsize_summary(rows)}
    else:
        rows = run_geometry_benchmark(cfg)
        summary = {"rows": rows}
    header = list(rows[0].keys())
    csv_path = out_dir / f"{run_id}_results.csv"
    _write_csv(csv_path, header, [[row[k] for k in header] for row in rows])
    return [csv_path], summary


def _execute(cfg, out_dir: Path, run_id: str, trace_reputation: bool):
    if isinstance(cfg, ScenarioConfig):
        return _run_scenario_outputs(cfg, out_dir, run_id, trace_reputation)
    return _run_benchmark_outputs(cfg, out_dir, run_id)


# ---------------------------------------------------------------- sweep plumbing

def _parse_sweep_spec(specs):
    """--sweep entries of the form field=v1,v2 (nested fields dotted, values
    YAML-parsed).  Returns [(field, [values...])]."""
    if not specs:
        raise ConfigError("sweep requires at least one --sweep field=v1,v2,... entry")
    parsed = []
    for spec in specs:
        field, sep, raw = spec.partition("=")
        field = field.strip()
        if not sep or not field:
            raise ConfigError(f"malformed sweep spec {spec!r}; expected field=v1,v2")
        values = [yaml.safe_load(v) for v in raw.split(",") if v.strip()]
        if not values:
            raise ConfigError(f"sweep spec {spec!r} lists no values")
        parsed.append((field, values))
    return parsed


def _set_nested(data: dict, dotted: str, value):
    keys = dotted.split(".")
    node = data
    for k in keys[:-1]:
        child = node.get(k)
        if not isinstance(child, dict):
            raise ConfigError(
                f"cannot sweep {dotted!r}: {k!r} is not a section in the base config")
        node = child
    if keys[-1] not in node:
        raise ConfigError(f"unknown sweep field {dotted!r}")
    node[keys[-1]] = value


def _build_cells(cfg, sweep_specs, master_seed):
    """Cross product of the sweep axes as validated config dicts."""
    base = config_to_dict(cfg)
    fields = [f for f, _ in sweep_specs]
    cells = []
    for idx, combo in enumerate(itertools.product(*(v for _, v in sweep_specs))):
        data = json.loads(json.dumps(base))  # deep copy of plain data
        for field, value in zip(fields, combo):
            _set_nested(data, field, value)
        data["seed"] = int(np.random.SeedSequence([master_seed, idx]).generate_state(1)[0])
        config_from_dict(data)  # validate before any cell runs
        label = "__".join(f"{f.replace('.', '-')}={v}" for f, v in zip(fields, combo))
        cells.append({"id": f"cell{idx:03d}_{label}", "values": dict(zip(fields, combo)),
                      "data": data})
    return cells


def _run_cell(args):
    """Worker: run one sweep cell and write its CSV (one file per cell, so
    parallel workers never share an output)."""
    cell, out_dir, trace_reputation = args
    cfg = config_from_dict(cell["data"])
    _, summary = _execute(cfg, Path(out_dir), cell["id"], trace_reputation)
    return cell["id"], cell["values"], summary


# ---------------------------------------------------------------- commands

@click.group()
@click.version_option(__version__)
def main():
    """Swarm mutual-localization simulator."""


@main.command("run")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--preset", type=str)
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--reps", type=int, default=None, help="Override repetition count.")
@click.option("--out", type=click.Path(file_okay=False), default="out",
              help="Output directory (env SWARMLOC_OUT overrides).")
@click.option("--trace-reputation", is_flag=True,
              help="Also write the per-tick reputation trace CSV.")
def cmd_run(config_path, preset, seed, reps, out, trace_reputation):
    """Run one scenario or benchmark; write metrics CSV, summary JSON, manifest."""
    t0 = time.monotonic()
    try:
        cfg = _with_overrides(_resolve_config(config_path, preset), seed, reps)
        out_dir = _out_dir(out)
        cfg_path = out_dir / "config.yaml"
        save_config(cfg, cfg_path)
        outputs, summary = _execute(cfg, out_dir, "run", trace_reputation)
        summary_path = out_dir / "summary.json"
        summary_path.write_text(json.dumps(summary, indent=2) + "\n")
        _write_manifest(out_dir / "manifest.json", cfg,
                        [cfg_path, *outputs, summary_path], t0)
    except (ConfigError, TypeError) as exc:
        _fail(exc)
    except (SwarmlocError, OSError) as exc:
        _fail(exc, code=1)
    click.echo(f"wrote {len(outputs) + 2} files to {out_dir}")


@main.command("sweep")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--preset", type=str)
@click.option("--sweep", "sweep_specs", multiple=True,
              help="Axis as field=v1,v2 (repeatable; nested fields dotted).")
@click.option("--seed", type=int, default=None, help="Override the master seed.")
@click.option("--reps", type=int, default=None, help="Override repetition count.")
@click.option("--parallel", type=int, default=1, help="Worker processes.")
@click.option("--out", type=click.Path(file_okay=False), default="out",
              help="Output directory (env SWARMLOC_OUT overrides).")
@click.option("--trace-reputation", is_flag=True)
def cmd_sweep(config_path, preset, sweep_specs, seed, reps, parallel, out,
              trace_reputation):
    """Run the cross product of sweep axes; one CSV per cell plus an aggregate
    CSV of mean error per cell."""
    t0 = time.monotonic()
    try:
        cfg = _with_overrides(_resolve_config(config_path, preset), seed, reps)
        specs = _parse_sweep_spec(sweep_specs)
        cells = _build_cells(cfg, specs, cfg.seed)
        out_dir = _out_dir(out)
        cfg_path = out_dir / "config.yaml"
        save_config(cfg, cfg_path)
        args = [(cell, str(out_dir), trace_reputation) for cell in cells]
        if parallel > 1:
            with ProcessPoolExecutor(max_workers=parallel) as pool:
                results = list(pool.map(_run_cell, args))
        else:
            results = [_run_cell(a) for a in args]
        # Aggregate after the barrier: one row per cell in cross-product order.
        fields = [f for f, _ in specs]
        agg_rows = []
        for cell_id, values, summary in results:
            mean = summary.get("mean_err_m")
            std = summary.get("std_err_m")
            agg_rows.append([cell_id, *[values[f] for f in fields], mean, std])
        agg_path = out_dir / "aggregate.csv"
        _write_csv(agg_path, ["cell_id", *fields, "mean_err_m", "std_err_m"], agg_rows)
        _write_manifest(out_dir / "manifest.json", cfg, [cfg_path, agg_path], t0)
    except (ConfigError, TypeError) as exc:
        _fail(exc)
    except (SwarmlocError, OSError) as exc:
        _fail(exc, code=1)
    click.echo(f"{len(cells)} cells -> {agg_path}")


@main.command("export-channel")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--preset", type=str)
@click.option("--seed", type=int, default=None,
              help="Seed for the sampled-RSSI column (defaults to config seed).")
@click.option("--out", type=click.Path(dir_okay=False), default="channel.csv",
              help="Output CSV path (env SWARMLOC_OUT overrides the directory).")
def cmd_export_channel(config_path, preset, seed, out):
    """Export the ranging channel: distance, mean RSSI, one sampled RSSI draw,
    and the Monte-Carlo distance-error std per distance."""
    t0 = time.monotonic()
    try:
        if config_path is None and preset is None:
            cfg = ScenarioConfig()
        else:
            cfg = _resolve_config(config_path, preset)
        channel = cfg.channel
        rng = np.random.default_rng(cfg.seed if seed is None else seed)
        table = default_sigma_d_table(channel)
        rows = []
        for d, sigma_d in zip(table.d_grid, table.sigma):
            mean_rssi = rssi_at_distance(channel, d)
            sampled = mean_rssi + rng.normal() * sample_rssi_sigma(channel, d, rng)
            rows.append([f"{d:.3f}", f"{mean_rssi:.6f}", f"{sampled:.6f}",
                         f"{sigma_d:.6f}"])
        out_env = os.environ.get("SWARMLOC_OUT")
        out_path = Path(out_env) / Path(out).name if out_env else Path(out)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        _write_csv(out_path, EXPORT_HEADER, rows)
        _write_manifest(out_path.with_suffix(".manifest.json"), cfg, [out_path], t0)
    except (ConfigError, TypeError) as exc:
        _fail(exc)
    except (SwarmlocError, OSError) as exc:
        _fail(exc, code=1)
    click.echo(f"wrote {out_path}")


if __name__ == "__main__":
    main()
