"""CSV and JSON emitters.

Fixed column orders, UTF-8, LF line endings; floats are written with
enough digits ('%.17g') that simulate/filter round-trips byte-identically.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .linalg import purity
from .master import TimeGrid
from .trajectory import COUNTING, MeasurementRecord


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_states_csv(path, times, rhos, observables: dict, innovations=None) -> None:
    """Columns: t, tr(rho O_i) per observable, trace, purity[, innovations].

    innovations, when given, is the cumulative innovations path aligned
    with the times (length len(times)).
    """
    names = list(observables)
    header = ["t"] + names + ["trace", "purity"]
    if innovations is not None:
        header.append("innovations")
    lines = [",".join(header)]
    for k, (t, rho) in enumerate(zip(times, rhos)):
        row = [_fmt(t)]
        row += [_fmt(np.trace(rho @ observables[n]).real) for n in names]
        row += [_fmt(np.trace(rho).real), _fmt(purity(rho))]
        if innovations is not None:
            row.append(_fmt(innovations[k]))
        lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


def write_record_csv(path, record: MeasurementRecord) -> None:
    lines = ["kind,dt,steps", f"{record.kind},{_fmt(record.grid.dt)},{record.grid.steps}"]
    if record.kind == COUNTING:
        lines += [str(int(v)) for v in record.increments]
    else:
        lines += [_fmt(v) for v in record.increments]
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


def read_record_csv(path) -> MeasurementRecord:
    lines = Path(path).read_text().strip().splitlines()
    if len(lines) < 2 or lines[0] != "kind,dt,steps":
        raise ValueError(f"{path}: not a measurement-record CSV")
    kind, dt_s, steps_s = lines[1].split(",")
    steps = int(steps_s)
    values = [float(v) for v in lines[2:]]
    if len(values) != steps:
        raise ValueError(f"{path}: expected {steps} increments, found {len(values)}")
    grid = TimeGrid(dt=float(dt_s), steps=steps)
    return MeasurementRecord(kind=kind, grid=grid, increments=np.array(values))


def write_ensemble_outputs(summary_path, series_path, report) -> None:
    Path(summary_path).write_text(json.dumps(report.summary_dict(), indent=2) + "\n")
    names = list(report.observable_means)
    header = ["t"]
    for n in names:
        header += [f"mean_{n}", f"stderr_{n}"]
    header += ["innovations_mean", "innovations_stderr", "trace_distance_to_master", "mean_purity"]
    lines = [",".join(header)]
    for i, t in enumerate(report.checkpoint_times):
        row = [_fmt(t)]
        for n in names:
            row += [_fmt(report.observable_means[n][i]), _fmt(report.observable_stderrs[n][i])]
        row += [
            _fmt(report.innovations_mean[i]),
            _fmt(report.innovations_stderr[i]),
            _fmt(report.trace_distances_to_master[i]),
            _fmt(report.mean_purity[i]),
        ]
        lines.append(",".join(row))
    Path(series_path).write_text("\n".join(lines) + "\n", newline="\n")


def write_classical_csv(path, times, columns: dict) -> None:
    """Columns: t plus the given name -> array mapping, in insertion order."""
    names = list(columns)
    lines = [",".join(["t"] + names)]
    for i, t in enumerate(times):
        lines.append(",".join([_fmt(t)] + [_fmt(columns[n][i]) for n in names]))
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")
