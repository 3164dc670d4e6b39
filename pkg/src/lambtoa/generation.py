"""Multichannel synthetic sensor signals from a source pulse and traced curves."""

from __future__ import annotations

import numpy as np

from .dispersion import DispersionCurve
from .signals import (
    SensorLayout,
    Waveform,
    add_noise,
    distances,
    noise_floor,
    propagate_dispersive,
    sine_cycle_pulse,
    tone_burst,
)


def make_source(kind: str, dt: float, n_total: int, **params) -> Waveform:
    """Source pulse of n_total samples; kinds: hann_burst, gauss_burst, sine_cycle."""
    if kind == "hann_burst":
        w = tone_burst(params["f0"], params.get("cycles", 5), "hanning", dt)
    elif kind == "gauss_burst":
        w = tone_burst(params["f0"], params.get("cycles", 5), "gaussian", dt)
    elif kind == "sine_cycle":
        w = sine_cycle_pulse(params["f0"], dt)
    else:
        raise ValueError(f"unknown source kind {kind!r}")
    if len(w.samples) > n_total:
        raise ValueError("source pulse longer than the requested record")
    return Waveform(np.concatenate([w.samples, np.zeros(n_total - len(w.samples))]), dt=dt)


def synthesize_channels(
    source: Waveform,
    curves: list[DispersionCurve],
    layout: SensorLayout,
    impact_index: int,
    mode_weights: dict[str, float],
    snr_db: float | None = None,
    noise_seed: int = 0,
    floor_sigma: float | None = None,
    band_tol: float = 1e-2,
) -> list[Waveform]:
    """One outgoing-wave waveform per sensor for the chosen impact.

    Noise seeds are decorrelated per channel but fully determined by
    noise_seed, so a repeated run is bit-identical.
    """
    channels = []
    for j, dist in enumerate(distances(layout, impact_index)):
        ch = propagate_dispersive(source, curves, float(dist), mode_weights, band_tol=band_tol)
        if floor_sigma:
            ch = noise_floor(ch, floor_sigma, seed=noise_seed * 1000 + 2 * j)
        if snr_db is not None:
            ch = add_noise(ch, snr_db, seed=noise_seed * 1000 + 2 * j + 1)
        channels.append(ch)
    return channels
