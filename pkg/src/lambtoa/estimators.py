"""Time-domain time-of-arrival pickers.

All argmax/argmin ties break to the earliest index. "Not found" is a value
(ToaEstimate.time is None), never an exception.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DegenerateWindow, EmptyRange, WindowTooLong
from .signals import Waveform

VARIANCE_CLAMP = 1e-30
LTA_FLOOR = 1e-300


class Method(Enum):
    TC = "TC"
    SLA = "SLA"
    MER = "MER"
    AIC_GM = "AIC_GM"
    AIC_LM = "AIC_LM"
    CWT_TC = "CWT_TC"


class AicVariant(Enum):
    GM = "GM"  # global minimum
    LM = "LM"  # first interior local minimum


@dataclass
class ToaEstimate:
    """One arrival-time estimate; time is None when nothing was found."""

    method: Method
    time: float | None
    params: dict = field(default_factory=dict)
    frequency: float | None = None

    @property
    def found(self) -> bool:
        return self.time is not None


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class SlaParams:
    """Short/long averaging windows as multiples of the dominant period."""

    alpha: float
    beta: float
    t_dom: float
    f_s: float

    def __post_init__(self):
        if self.alpha < 1 or self.beta < 1:
            raise ValueError("alpha and beta must be >= 1")
        if self.n_short < 1:
            raise ValueError("derived short window must hold at least one sample")

    @property
    def n_short(self) -> int:
        return round_half_up(self.alpha * self.f_s * self.t_dom)

    @property
    def n_long(self) -> int:
        return max(round_half_up(self.beta * self.n_short), self.n_short)


@dataclass(frozen=True)
class AicParams:
    """Two-step AIC windows; times in seconds."""

    r_a: float = 0.0
    t_am: float = 0.0
    t_first_lb: float = 0.0
    t_fb: float = 40e-6
    t_fa: float = 40e-6

    def __post_init__(self):
        for name in ("t_am", "t_first_lb", "t_fb", "t_fa"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


def tc_pick(w: Waveform, threshold: float) -> ToaEstimate:
    """Earliest time with |s| above the threshold."""
    if threshold <= 0:
        raise ValueError("threshold must be > 0")
    hits = np.nonzero(np.abs(w.samples) > threshold)[0]
    time = None if len(hits) == 0 else w.t0 + w.dt * int(hits[0])
    return ToaEstimate(Method.TC, time, params={"threshold": threshold})


def common_threshold(channels: list[Waveform], p: float) -> float:
    """p times the smallest per-channel peak |s| (shared threshold base)."""
    if p <= 0:
        raise ValueError("p must be > 0")
    if not channels:
        raise EmptyRange("at least one channel required")
    return p * min(float(np.max(np.abs(c.samples))) for c in channels)


def _trailing_mean_sq(s: np.ndarray, n: int) -> np.ndarray:
    """Mean of s^2 over the n samples ending at each index, left-padded."""
    pad = 0.5 * (s[0] + s[1])
    z = np.concatenate([np.full(n - 1, pad * pad), s * s])
    c = np.concatenate([[0.0], np.cumsum(z)])
    return (c[n:] - c[:-n]) / n


def sla_pick(w: Waveform, params: SlaParams) -> tuple[ToaEstimate, np.ndarray]:
    """Short/long-term average ratio pick.

    The arrival is the argmax of the forward finite difference of the
    STA/LTA ratio of squared samples over trailing windows; samples before
    the record are padded with (s0+s1)/2.
    """
    n_short, n_long = params.n_short, params.n_long
    if n_long >= len(w.samples):
        raise WindowTooLong(f"n_long={n_long} does not fit N={len(w.samples)}")
    sta = _trailing_mean_sq(w.samples, n_short)
    lta = _trailing_mean_sq(w.samples, n_long)
    ratio = sta / np.maximum(lta, LTA_FLOOR)
    diff = ratio[1:] - ratio[:-1]
    i = int(np.argmax(diff))
    est = ToaEstimate(
        Method.SLA,
        w.t0 + w.dt * i,
        params={"alpha": params.alpha, "beta": params.beta, "n_short": n_short, "n_long": n_long},
    )
    return est, ratio


def mer_pick(w: Waveform, n_e: int) -> tuple[ToaEstimate, np.ndarray]:
    """Modified energy ratio pick: argmax of (|s| * ER)^3.

    ER relates the energy of the n_e+1 samples from each index forward to the
    n_e+1 samples ending there; out-of-range samples take the edge-pair mean.
    """
    s = w.samples
    n = len(s)
    if not 1 <= n_e < n:
        raise WindowTooLong(f"n_e={n_e} outside [1, {n - 1}]")
    pad_l = 0.5 * (s[0] + s[1])
    pad_r = 0.5 * (s[-2] + s[-1])
    z = np.concatenate([np.full(n_e, pad_l**2), s * s, np.full(n_e, pad_r**2)])
    c = np.concatenate([[0.0], np.cumsum(z)])
    # window sums inclusive of both ends (n_e + 1 samples each, sharing index i)
    lead = c[n_e + 1 : n_e + 1 + n] - c[:n]                      # j = i-n_e .. i
    trail = c[2 * n_e + 1 :] - c[n_e:n_e + n]                    # j = i .. i+n_e
    er = trail / np.maximum(lead, LTA_FLOOR)
    mer = (np.abs(s) * er) ** 3
    i = int(np.argmax(mer))
    est = ToaEstimate(Method.MER, w.t0 + w.dt * i, params={"n_e": n_e})
    return est, mer


def aic_curve(w: Waveform, i_range: tuple[int, int] | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Two-segment log-variance criterion over the whole signal.

    AIC(i) = i*ln(var(s[0..i])) + (N-i-1)*ln(var(s[i+1..N-1])), variances
    clamped below at 1e-30. Returns (indices, values) for i in i_range
    (inclusive), default [1, N-2].
    """
    s = w.samples
    n = len(s)
    lo, hi = (1, n - 2) if i_range is None else i_range
    lo = max(int(lo), 1)
    hi = min(int(hi), n - 2)
    if hi < lo:
        raise EmptyRange("aic_curve range selects no indices")

    c1 = np.cumsum(s)
    c2 = np.cumsum(s * s)
    i = np.arange(lo, hi + 1)
    m = i + 1.0
    var_head = c2[i] / m - (c1[i] / m) ** 2
    tail_n = n - i - 1.0
    sum1 = c1[-1] - c1[i]
    sum2 = c2[-1] - c2[i]
    var_tail = sum2 / tail_n - (sum1 / tail_n) ** 2
    var_tail[tail_n == 1.0] = 0.0  # single sample: variance is exactly zero
    values = i * np.log(np.maximum(var_head, VARIANCE_CLAMP)) + (n - i - 1) * np.log(
        np.maximum(var_tail, VARIANCE_CLAMP)
    )
    return i, values


def allen_picker_index(w: Waveform, r_a: float) -> int:
    """Index of the maximum of |s| + r_a*|s_i - s_{i-1}| (difference 0 at i=0)."""
    s = w.samples
    beta = np.abs(s) + r_a * np.abs(np.concatenate([[0.0], np.diff(s)]))
    return int(np.argmax(beta))


def first_local_minimum(values: np.ndarray) -> int | None:
    """Offset of the first interior local minimum, or None if monotone.

    Requires a strict drop from the left and no rise to the right, which
    skips any leading flat plateau.
    """
    for j in range(1, len(values) - 1):
        if values[j] < values[j - 1] and values[j] <= values[j + 1]:
            return j
    return None


def aic_pick(
    w: Waveform,
    params: AicParams,
    variant: AicVariant = AicVariant.GM,
    t_first_ub_override: float | None = None,
) -> ToaEstimate:
    """Two-step AIC pick.

    Step 1 evaluates the signal's AIC curve on [t_first_lb, t_first_ub]; the
    first estimate is its global minimum (GM) or first interior local minimum
    (LM). Step 2 re-evaluates the curve on [t_fe - t_fb, t_fe + t_fa]
    (clamped to the signal) and returns its global minimum. When no upper
    bound is given, it is placed t_am past the maximum of the Allen-style
    picker function.
    """
    n = len(w.samples)
    method = Method.AIC_GM if variant is AicVariant.GM else Method.AIC_LM
    meta = {
        "r_a": params.r_a,
        "t_am": params.t_am,
        "t_fb": params.t_fb,
        "t_fa": params.t_fa,
        "variant": variant.value,
    }

    if t_first_ub_override is not None:
        ub = w.index_of_time(t_first_ub_override)
    else:
        ub = allen_picker_index(w, params.r_a) + int(round(params.t_am / w.dt))
    lb = w.index_of_time(w.t0 + params.t_first_lb)
    lb = max(lb, 1)
    ub = min(ub, n - 2)
    if ub - lb < 2:
        raise DegenerateWindow(f"first AIC window [{lb}, {ub}] shorter than 3 samples")

    idx, values = aic_curve(w, (lb, ub))
    if variant is AicVariant.GM:
        j = int(np.argmin(values))
    else:
        loc = first_local_minimum(values)
        if loc is None:
            return ToaEstimate(method, None, params=meta)
        j = loc
    i_fe = int(idx[j])

    lb2 = max(i_fe - int(round(params.t_fb / w.dt)), 1)
    ub2 = min(i_fe + int(round(params.t_fa / w.dt)), n - 2)
    if ub2 - lb2 < 2:
        raise DegenerateWindow(f"second AIC window [{lb2}, {ub2}] shorter than 3 samples")
    idx2, values2 = aic_curve(w, (lb2, ub2))
    i_final = int(idx2[int(np.argmin(values2))])
    meta["t_fe"] = w.t0 + w.dt * i_fe
    return ToaEstimate(method, w.t0 + w.dt * i_final, params=meta)
