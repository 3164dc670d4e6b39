"""Parametric studies over the pickers and derived quantities.

Sweep points are independent; execution goes through an order-preserving
parallel map, so assembled results are deterministic.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import MissingReference, NonpositiveEstimate, WindowTooLong
from .estimators import (
    AicParams,
    AicVariant,
    Method,
    SlaParams,
    ToaEstimate,
    aic_pick,
    common_threshold,
    mer_pick,
    round_half_up,
    sla_pick,
    tc_pick,
)
from .parallel import par_map
from .signals import SensorLayout, Waveform, distances, lowpass


@dataclass
class SweepResult:
    """Estimates over one swept parameter axis, channels along columns."""

    axis_name: str
    axis_values: list
    estimates: list[list[ToaEstimate]]   # [axis point][channel]
    aggregates: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def times(self) -> np.ndarray:
        """Estimate times as a (n_axis, n_channels) array, NaN where not found."""
        return np.array(
            [[e.time if e.found else np.nan for e in row] for row in self.estimates]
        )


def tc_sweep(channels: list[Waveform], p_values) -> SweepResult:
    """Threshold-crossing picks per channel over a grid of threshold factors p.

    meta["order"] records, per p, the channel indices sorted by arrival
    (not-found channels last).
    """
    p_values = list(p_values)
    if any(b <= a for a, b in zip(p_values, p_values[1:])):
        raise ValueError("p_values must be increasing")

    def run(p):
        thr = common_threshold(channels, p)
        return [tc_pick(ch, thr) for ch in channels]

    rows = par_map(run, p_values)
    order = []
    for row in rows:
        keyed = [(e.time if e.found else np.inf, j) for j, e in enumerate(row)]
        order.append([j for _, j in sorted(keyed)])
    return SweepResult("p", p_values, rows, meta={"order": order})


def sla_grid(
    channel: Waveform,
    alphas,
    betas,
    t_dom: float,
    f_s: float,
) -> SweepResult:
    """Full (alpha, beta) grid of SLA picks with alpha*beta-collapsed aggregates.

    Grid points whose long window does not fit the signal are recorded as
    not-found with params["window_too_long"] set, so one oversized corner does
    not abort the study.
    """
    pairs = [(float(a), float(b)) for a in alphas for b in betas]
    if not pairs:
        raise ValueError("alpha and beta grids must be nonempty")

    def run(pair):
        a, b = pair
        params = SlaParams(alpha=a, beta=b, t_dom=t_dom, f_s=f_s)
        try:
            est, _ = sla_pick(channel, params)
        except WindowTooLong:
            est = ToaEstimate(Method.SLA, None, params={"alpha": a, "beta": b, "window_too_long": True})
        return [est]

    rows = par_map(run, pairs)
    buckets: dict = {}
    for (a, b), row in zip(pairs, rows):
        key = _ab_bucket(a, b)
        buckets.setdefault(key, []).append(row[0].time if row[0].found else np.nan)
    aggregates = {}
    for key, vals in sorted(buckets.items()):
        arr = np.array(vals, dtype=float)
        good = arr[~np.isnan(arr)]
        aggregates[key] = {
            "count": len(arr),
            "mean": float(np.mean(good)) if len(good) else None,
            "std": float(np.std(good)) if len(good) else None,
        }
    return SweepResult("alpha_beta", pairs, rows, aggregates=aggregates)


def _ab_bucket(a: float, b: float):
    """alpha*beta bucket key: exact integer product, else 3 significant digits."""
    if float(a).is_integer() and float(b).is_integer():
        return int(a) * int(b)
    product = a * b
    return float(f"{product:.3g}")


def mer_sweep(channel: Waveform, alphas, t_dom: float, f_s: float) -> SweepResult:
    """MER picks per window factor alpha, with n_e = round(alpha*f_s*t_dom)."""
    alphas = [float(a) for a in alphas]
    if any(b <= a for a, b in zip(alphas, alphas[1:])):
        raise ValueError("alphas must be increasing")

    def run(a):
        n_e = round_half_up(a * f_s * t_dom)
        try:
            est, _ = mer_pick(channel, n_e)
        except WindowTooLong:
            est = ToaEstimate(Method.MER, None, params={"n_e": n_e, "window_too_long": True})
        return [est]

    return SweepResult("alpha", alphas, par_map(run, alphas))


def aic_window_sweep(
    channel: Waveform,
    params: AicParams,
    ub_values,
    variant: AicVariant = AicVariant.GM,
) -> SweepResult:
    """AIC picks over a grid of first-window upper bounds (seconds)."""
    ub_values = [float(u) for u in ub_values]
    if any(b <= a for a, b in zip(ub_values, ub_values[1:])):
        raise ValueError("ub_values must be increasing")

    def run(ub):
        return [aic_pick(channel, params, variant, t_first_ub_override=ub)]

    return SweepResult("t_first_ub", ub_values, par_map(run, ub_values))


def cutoff_sweep(
    channels: list[Waveform],
    cutoffs,
    picker: str,
    picker_params: dict,
) -> SweepResult:
    """Low-pass each channel at every cutoff, then pick with MER or AIC_GM."""
    cutoffs = [float(c) for c in cutoffs]
    picker = picker.upper()
    if picker not in ("MER", "AIC_GM"):
        raise ValueError("picker must be 'MER' or 'AIC_GM'")

    def run(fc):
        row = []
        for ch in channels:
            filtered = lowpass(ch, fc)
            if picker == "MER":
                est, _ = mer_pick(filtered, picker_params["n_e"])
            else:
                est = aic_pick(
                    filtered,
                    picker_params.get("params", AicParams()),
                    AicVariant.GM,
                    picker_params.get("t_first_ub_override"),
                )
            row.append(est)
        return row

    return SweepResult("cutoff_hz", cutoffs, par_map(run, cutoffs))


def estimate_group_speed(
    layout: SensorLayout,
    impact_index: int,
    estimates: list[ToaEstimate],
    max_speed: float | None = None,
) -> list[float]:
    """Back-estimated group speed per sensor: centre distance / arrival time.

    Zero-distance sensors yield 0 with a warning; a max_speed (e.g. the bulk
    pressure speed) flags dimensionally implausible results.
    """
    dists = distances(layout, impact_index)
    if len(estimates) != len(dists):
        raise ValueError("one estimate per sensor required")
    speeds = []
    for dist, est in zip(dists, estimates):
        if not est.found or est.time is None or est.time <= 0:
            raise NonpositiveEstimate("group-speed estimation needs positive arrival times")
        if dist == 0.0:
            warnings.warn("sensor coincides with the impact; speed set to 0")
            speeds.append(0.0)
            continue
        speed = dist / est.time
        if max_speed is not None and speed >= max_speed:
            warnings.warn(f"estimated speed {speed:.0f} m/s exceeds the physical bound {max_speed:.0f} m/s")
        speeds.append(float(speed))
    return speeds


def relative_times(
    estimates: list[dict[float, ToaEstimate]],
    reference_channel: int,
) -> dict[float, list[float | None]]:
    """Per-frequency arrival differences t_i - t_ref; None where not found."""
    if not 0 <= reference_channel < len(estimates):
        raise MissingReference(f"reference channel {reference_channel} absent")
    freqs = sorted(estimates[reference_channel].keys())
    for ch in estimates:
        if sorted(ch.keys()) != freqs:
            raise MissingReference("channels do not share a frequency grid")
    table: dict[float, list[float | None]] = {}
    for f in freqs:
        ref = estimates[reference_channel][f]
        row: list[float | None] = []
        for ch in estimates:
            est = ch[f]
            if ref.found and est.found:
                row.append(est.time - ref.time)
            else:
                row.append(None)
        table[f] = row
    return table
