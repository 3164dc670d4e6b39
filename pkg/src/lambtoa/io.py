"""Delimited and JSON output, plus waveform CSV ingestion.

Floats are written with repr (shortest round-trip form), so identical inputs
produce byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .dispersion import DispersionCurve, curve_table
from .harness import SweepResult
from .signals import Waveform
from .tfa import Scalogram


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _write_rows(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(cell) for cell in row) for row in rows)
    Path(path).write_text("\n".join(lines) + "\n")


def write_waveforms_csv(path, channels: list[Waveform]) -> None:
    ref = channels[0]
    for ch in channels[1:]:
        if ch.dt != ref.dt or ch.t0 != ref.t0 or len(ch) != len(ref):
            raise ValueError("channels must share the sampling grid")
    header = ["time_s"] + [f"ch{j + 1}" for j in range(len(channels))]
    times = ref.times()
    rows = zip(times, *(ch.samples for ch in channels))
    _write_rows(path, header, rows)


def read_waveforms_csv(path) -> list[Waveform]:
    path = Path(path)
    with path.open() as fh:
        header = fh.readline().strip().split(",")
        if not header or header[0] != "time_s":
            raise ValueError(f"{path}: expected a 'time_s' leading column")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    times = data[:, 0]
    if len(times) < 2:
        raise ValueError(f"{path}: need at least two samples")
    dt = float(times[1] - times[0])
    steps = np.diff(times)
    if not np.allclose(steps, dt, rtol=1e-6, atol=1e-12 * max(abs(times[-1]), 1.0)):
        raise ValueError(f"{path}: time axis is not uniform")
    return [Waveform(data[:, j], dt=dt, t0=float(times[0])) for j in range(1, data.shape[1])]


def write_dispersion_csv(path, curves: list[DispersionCurve]) -> None:
    _write_rows(
        path,
        ["fd_Hz_m", "k_rad_per_m", "c_phase_m_s", "c_group_m_s", "mode"],
        curve_table(curves),
    )


def write_scalogram_csv(path, sc: Scalogram) -> None:
    rows = []
    times = sc.times()
    for i, t in enumerate(times):
        for j, f in enumerate(sc.freqs):
            rows.append((t, f, sc.values[i, j]))
    _write_rows(path, ["time_s", "freq_hz", "value"], rows)


def write_picks_csv(path, picks_by_channel) -> None:
    """picks_by_channel: list (one per channel) of ToaEstimate or lists thereof."""
    rows = []
    for j, entry in enumerate(picks_by_channel):
        ests = entry if isinstance(entry, (list, tuple)) else [entry]
        for est in ests:
            rows.append(
                (
                    est.method.value,
                    f"ch{j + 1}",
                    est.frequency,
                    est.time,
                    "found" if est.found else "not_found",
                )
            )
    _write_rows(path, ["method", "channel", "freq_hz", "time_s", "status"], rows)


def write_sweep_csv(path, result: SweepResult) -> None:
    rows = []
    for value, row in zip(result.axis_values, result.estimates):
        label = (
            "x".join(_fmt(v) for v in value) if isinstance(value, tuple) else _fmt(value)
        )
        for j, est in enumerate(row):
            flags = ";".join(k for k, v in sorted(est.params.items()) if v is True)
            rows.append((label, f"ch{j + 1}", est.time, flags))
    _write_rows(path, [result.axis_name, "channel", "time_s", "flags"], rows)


def write_trace_csv(path, w: Waveform, column: str) -> None:
    _write_rows(path, ["time_s", column], zip(w.times(), w.samples))


def write_markers_csv(path, markers: list[tuple[float, float]]) -> None:
    rows = [(f"ch{j + 1}", t_s0, t_a0) for j, (t_s0, t_a0) in enumerate(markers)]
    _write_rows(path, ["channel", "t_s0_s", "t_a0_s"], rows)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    return obj


def write_json(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")


def sweep_summary(result: SweepResult) -> dict:
    times = result.times()
    finite = times[~np.isnan(times)]
    summary = {
        "axis": result.axis_name,
        "n_points": len(result.axis_values),
        "n_channels": times.shape[1] if times.ndim == 2 else 0,
        "n_not_found": int(np.isnan(times).sum()),
        "time_min_s": float(finite.min()) if finite.size else None,
        "time_max_s": float(finite.max()) if finite.size else None,
    }
    if result.aggregates:
        summary["aggregates"] = {
            str(k): v for k, v in sorted(result.aggregates.items())
        }
    if result.meta:
        summary["meta"] = result.meta
    return summary
