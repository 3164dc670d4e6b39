"""Matplotlib figure rendering for the CLI report paths.

Figures are written as SVG with a fixed hash salt and no creation date, so
repeated runs produce stable files.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .dispersion import DispersionCurve
from .harness import SweepResult
from .signals import Waveform
from .tfa import Scalogram, coi_boundary

plt.rcParams["svg.hashsalt"] = "lambtoa"

_CHANNEL_COLORS = ["C0", "C1", "C2", "C3", "C4", "C5"]


def _save(fig, path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def plot_dispersion(curves: list[DispersionCurve], path) -> None:
    fig, (ax_phase, ax_group) = plt.subplots(1, 2, figsize=(10, 4), sharex=True)
    for curve in curves:
        ax_phase.plot(curve.fd, curve.c_phase, label=curve.mode.name)
        ax_group.plot(curve.fd, curve.c_group, label=curve.mode.name)
    for ax, ylabel in ((ax_phase, "phase speed (m/s)"), (ax_group, "group speed (m/s)")):
        ax.set_xlabel("fd (Hz·m)")
        ax.set_ylabel(ylabel)
        ax.grid(alpha=0.3)
        ax.legend()
    fig.tight_layout()
    _save(fig, path)


def plot_waveforms(channels: list[Waveform], path, markers=None) -> None:
    """Stacked channel traces; optional per-channel (t_s0, t_a0) marker lines."""
    fig, axes = plt.subplots(len(channels), 1, figsize=(10, 2 * len(channels)), sharex=True)
    axes = np.atleast_1d(axes)
    for j, (ax, ch) in enumerate(zip(axes, channels)):
        color = _CHANNEL_COLORS[j % len(_CHANNEL_COLORS)]
        ax.plot(ch.times() * 1e3, ch.samples, color=color, lw=0.6)
        if markers is not None:
            t_s0, t_a0 = markers[j]
            ax.axvline(t_s0 * 1e3, color="red", ls="--", lw=0.8)
            ax.axvline(t_a0 * 1e3, color="green", ls="--", lw=0.8)
        ax.set_ylabel(f"ch{j + 1} (V)")
        ax.grid(alpha=0.3)
    axes[-1].set_xlabel("time (ms)")
    fig.tight_layout()
    _save(fig, path)


def plot_sweep(result: SweepResult, path, markers=None, log_axis: bool = False) -> None:
    """Estimates vs the sweep axis, with optional marker lines.

    An alpha*beta-collapsed grid is drawn as mean lines with +/- std bands;
    other sweeps as one line per channel.
    """
    fig, ax = plt.subplots(figsize=(8, 4.5))
    if result.aggregates:
        keys = sorted(result.aggregates)
        means = np.array([
            result.aggregates[k]["mean"] if result.aggregates[k]["mean"] is not None else np.nan
            for k in keys
        ])
        stds = np.array([
            result.aggregates[k]["std"] if result.aggregates[k]["std"] is not None else np.nan
            for k in keys
        ])
        x = np.array([float(k) for k in keys])
        ax.plot(x, means * 1e6, color="C0", label="mean")
        ax.fill_between(x, (means - stds) * 1e6, (means + stds) * 1e6, color="C0", alpha=0.3)
        ax.set_xlabel("alpha*beta")
    else:
        times = result.times()
        x = np.array(
            [v if not isinstance(v, tuple) else i for i, v in enumerate(result.axis_values)],
            dtype=float,
        )
        for j in range(times.shape[1]):
            ax.plot(
                x,
                times[:, j] * 1e6,
                color=_CHANNEL_COLORS[j % len(_CHANNEL_COLORS)],
                marker=".",
                label=f"ch{j + 1}",
            )
        ax.set_xlabel(result.axis_name)
    if markers is not None:
        for j, (t_s0, t_a0) in enumerate(markers):
            color = _CHANNEL_COLORS[j % len(_CHANNEL_COLORS)]
            ax.axhline(t_s0 * 1e6, color=color, ls="--", lw=0.8)
            ax.axhline(t_a0 * 1e6, color=color, ls=":", lw=0.8)
    if log_axis:
        ax.set_xscale("log")
    ax.set_ylabel("estimated arrival (µs)")
    ax.grid(alpha=0.3)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def plot_scalogram(sc: Scalogram, path, title: str = "") -> None:
    """Heatmap of the normalised scalogram with the COI overlay."""
    fig, ax = plt.subplots(figsize=(8, 4.5))
    t_ms = sc.times() * 1e3
    normalized = sc.values / sc.normalizer
    mesh = ax.pcolormesh(
        t_ms,
        sc.freqs / 1e3,
        normalized.T,
        shading="auto",
        cmap="viridis",
        rasterized=True,
    )
    fig.colorbar(mesh, ax=ax, label="normalised |W|²")
    bounds = coi_boundary(sc)
    t0, t1 = t_ms[0], t_ms[-1]
    ax.plot(t0 + bounds * 1e3, sc.freqs / 1e3, "w-.", lw=1.0)
    ax.plot(t1 - bounds * 1e3, sc.freqs / 1e3, "w-.", lw=1.0)
    ax.set_xlim(t0, t1)
    ax.set_xlabel("time (ms)")
    ax.set_ylabel("frequency (kHz)")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    _save(fig, path)
