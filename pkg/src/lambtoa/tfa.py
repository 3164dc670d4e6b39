"""Time-frequency analysis: STFT, Morlet CWT, scalograms, cone of influence,
and threshold crossing in the frequency domain.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve

from .errors import (
    EmptyRange,
    FrequencyOutOfRange,
    InconsistentChannels,
    WindowTooLong,
)
from .estimators import Method, ToaEstimate
from .parallel import par_map
from .signals import Waveform, _window

DEFAULT_OMEGA_C = 5.0
DEFAULT_COI_CONSTANT = 3.0
KERNEL_HALF_WIDTH_SIGMAS = 8.0


def morlet(t_grid: np.ndarray, omega_c: float = DEFAULT_OMEGA_C) -> np.ndarray:
    """Complex Morlet wavelet pi^(-1/4) * exp(i*omega_c*t) * exp(-t^2/2)."""
    if omega_c <= 0:
        raise ValueError("omega_c must be > 0")
    t = np.asarray(t_grid, dtype=float)
    return np.pi**-0.25 * np.exp(1j * omega_c * t) * np.exp(-0.5 * t * t)


def stft(
    w: Waveform,
    window: str = "hanning",
    window_len: int = 256,
    hop: int = 64,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Windowed FFT magnitude squared per frame.

    Returns (frame_center_times, freqs_hz, values) with values shaped
    (n_frames, n_freqs), one-sided spectrum.
    """
    n = len(w.samples)
    if window_len > n:
        raise WindowTooLong(f"window_len={window_len} exceeds N={n}")
    if hop < 1:
        raise ValueError("hop must be >= 1")
    win = _window(window, window_len)
    starts = np.arange(0, n - window_len + 1, hop)
    frames = np.stack([w.samples[s : s + window_len] * win for s in starts])
    values = np.abs(np.fft.rfft(frames, axis=1)) ** 2
    freqs = np.fft.rfftfreq(window_len, w.dt)
    times = w.t0 + (starts + (window_len - 1) / 2) * w.dt
    return times, freqs, values


@dataclass
class Scalogram:
    """Squared CWT magnitude on a time x frequency grid.

    `coi` holds, per time index, the lowest trustworthy frequency (Hz): points
    with frequency above it are clear of boundary effects at that time.
    `normalizer` is the squared cross-channel reference level; cwt() seeds it
    with the scalogram's own maximum until a multi-channel pick replaces it.
    """

    values: np.ndarray          # (n_times, n_freqs), squared magnitude
    freqs: np.ndarray           # Hz, strictly increasing
    dt: float
    t0: float = 0.0
    coi: np.ndarray = None      # per-time boundary frequency (Hz)
    normalizer: float = 1.0
    omega_c: float = DEFAULT_OMEGA_C
    coi_constant: float = DEFAULT_COI_CONSTANT

    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.values.shape[0])

    def scale_for_frequency(self, f_hz: float) -> float:
        """Dilation in sample units for a target pseudo-frequency."""
        return self.omega_c / (2 * np.pi * f_hz * self.dt)

    def nearest_bin(self, f_hz: float) -> int:
        return int(np.argmin(np.abs(self.freqs - f_hz)))

    def in_coi(self, time_index: int, f_hz: float) -> bool:
        """True when (t, f) is corrupted by the record boundaries."""
        return f_hz < self.coi[time_index]


def _coi_frequencies(n: int, dt: float, omega_c: float, coi_constant: float) -> np.ndarray:
    """Per-time lowest trustworthy frequency: C*a(f) samples from either edge."""
    if coi_constant == 0.0:
        return np.zeros(n)
    edge = np.minimum(np.arange(n), np.arange(n)[::-1]).astype(float)
    with np.errstate(divide="ignore"):
        return coi_constant * omega_c / (2 * np.pi * dt * edge)


def cwt_coefficients(w: Waveform, freqs, omega_c: float = DEFAULT_OMEGA_C) -> np.ndarray:
    """Complex CWT coefficients, shaped (n_times, n_freqs).

    Each frequency maps to the dilation a = omega_c/(2*pi*f*dt) in sample
    units; coefficients come from FFT-based convolution with the conjugate
    reversed wavelet, tails truncated at +/-8 envelope widths. Kernels are
    scale-normalised (1/a), which gives every frequency unit peak gain for a
    matched tone, so a pure tone's ridge sits exactly on the pseudo-frequency
    mapping instead of being dragged low by a sqrt(scale) amplitude trend.
    """
    freqs = np.asarray(freqs, dtype=float)
    if freqs.ndim != 1 or len(freqs) == 0:
        raise EmptyRange("freqs must be a nonempty 1-D sequence")
    if np.any(np.diff(freqs) <= 0):
        raise ValueError("freqs must be strictly increasing")
    nyquist = 0.5 / w.dt
    if freqs[0] <= 0 or freqs[-1] >= nyquist:
        raise FrequencyOutOfRange(f"freqs must lie within (0, {nyquist}) Hz")

    s = w.samples
    coeffs = np.empty((len(s), len(freqs)), dtype=complex)

    def one_scale(col):
        f = freqs[col]
        a = omega_c / (2 * np.pi * f * w.dt)
        half = int(np.ceil(KERNEL_HALF_WIDTH_SIGMAS * a))
        grid = np.arange(-half, half + 1) / a
        kernel = morlet(grid, omega_c) / a
        return fftconvolve(s, kernel[::-1].conj(), mode="same")

    for col, column in enumerate(par_map(one_scale, range(len(freqs)))):
        coeffs[:, col] = column
    return coeffs


def cwt(
    w: Waveform,
    freqs,
    omega_c: float = DEFAULT_OMEGA_C,
    coi_constant: float = DEFAULT_COI_CONSTANT,
) -> Scalogram:
    """Morlet CWT scalogram (squared coefficient magnitude) at the requested
    pseudo-frequencies (Hz)."""
    freqs = np.asarray(freqs, dtype=float)
    values = np.abs(cwt_coefficients(w, freqs, omega_c)) ** 2
    n = len(w.samples)

    peak = float(values.max()) if values.size else 0.0
    return Scalogram(
        values=values,
        freqs=freqs,
        dt=w.dt,
        t0=w.t0,
        coi=_coi_frequencies(n, w.dt, omega_c, coi_constant),
        normalizer=peak if peak > 0 else 1.0,
        omega_c=omega_c,
        coi_constant=coi_constant,
    )


def coi_boundary(sc: Scalogram) -> np.ndarray:
    """Per-frequency earliest trustworthy time offset from either record edge (s)."""
    scales = sc.omega_c / (2 * np.pi * sc.freqs * sc.dt)
    return sc.coi_constant * scales * sc.dt


def cwt_tc_pick(
    scalograms: list[Scalogram],
    threshold: float,
    freq_subset=None,
) -> list[dict[float, ToaEstimate]]:
    """Threshold crossing in the frequency domain across channels.

    The shared normalizer is the smallest per-channel scalogram maximum; per
    channel and frequency the arrival is the earliest time with
    values/normalizer above the threshold. Estimates inside the cone of
    influence carry params["in_coi"] = True.
    """
    if threshold <= 0:
        raise ValueError("threshold must be > 0")
    if not scalograms:
        raise EmptyRange("at least one scalogram required")
    ref = scalograms[0]
    for sc in scalograms[1:]:
        if sc.values.shape != ref.values.shape or sc.dt != ref.dt or sc.t0 != ref.t0:
            raise InconsistentChannels("scalograms must share the analysis window")
        if not np.array_equal(sc.freqs, ref.freqs):
            raise InconsistentChannels("scalograms must share the frequency grid")

    w_bar_sq = min(float(sc.values.max()) for sc in scalograms)
    cols = (
        range(len(ref.freqs))
        if freq_subset is None
        else [ref.nearest_bin(f) for f in np.atleast_1d(freq_subset)]
    )

    out = []
    for sc in scalograms:
        sc.normalizer = w_bar_sq if w_bar_sq > 0 else 1.0
        picks: dict[float, ToaEstimate] = {}
        for col in cols:
            f = float(sc.freqs[col])
            # crossing is inclusive so the normalizing channel's own maximum
            # still registers at threshold 1.0
            if w_bar_sq > 0:
                hits = np.nonzero(sc.values[:, col] >= threshold * w_bar_sq)[0]
            else:
                hits = np.empty(0, dtype=int)
            if len(hits) == 0:
                picks[f] = ToaEstimate(Method.CWT_TC, None, params={"threshold": threshold}, frequency=f)
            else:
                i = int(hits[0])
                picks[f] = ToaEstimate(
                    Method.CWT_TC,
                    sc.t0 + sc.dt * i,
                    params={"threshold": threshold, "in_coi": sc.in_coi(i, f)},
                    frequency=f,
                )
        out.append(picks)
    return out


def scalogram_section(sc: Scalogram, f_hz: float) -> Waveform:
    """Normalised time series of the scalogram at the nearest frequency bin."""
    col = sc.nearest_bin(f_hz)
    return Waveform(sc.values[:, col] / sc.normalizer, dt=sc.dt, t0=sc.t0)
