"""Waveforms: synthesis, dispersive propagation, noise, filtering, geometry.

All waveforms are uniformly sampled; sample i lives at t0 + i*dt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import butter, filtfilt

from .dispersion import DispersionCurve
from .errors import (
    BandNotCovered,
    CutoffOutOfRange,
    IndexOutOfRange,
    NyquistViolation,
    ZeroSignal,
)

SNR_DB_CAP = 300.0


@dataclass
class Waveform:
    """Uniformly sampled real signal."""

    samples: np.ndarray
    dt: float
    t0: float = 0.0

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        if self.dt <= 0:
            raise ValueError("dt must be > 0")
        if self.samples.ndim != 1 or len(self.samples) < 2:
            raise ValueError("a waveform needs at least two samples")

    def __len__(self) -> int:
        return len(self.samples)

    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self.samples))

    @property
    def fs(self) -> float:
        return 1.0 / self.dt

    @property
    def duration(self) -> float:
        return (len(self.samples) - 1) * self.dt

    def copy_with(self, samples: np.ndarray) -> "Waveform":
        return Waveform(samples=np.asarray(samples, dtype=float), dt=self.dt, t0=self.t0)

    def index_of_time(self, t: float) -> int:
        """Nearest sample index for a time, clamped into range."""
        i = int(round((t - self.t0) / self.dt))
        return min(max(i, 0), len(self.samples) - 1)


@dataclass(frozen=True)
class SensorLayout:
    """Sensor/impact centers on the plate (m) and the square patch width (m)."""

    sensor_positions: tuple[tuple[float, float], ...]
    impact_positions: tuple[tuple[float, float], ...]
    patch_width: float = 0.0

    def n_sensors(self) -> int:
        return len(self.sensor_positions)


def stats(w: Waveform) -> tuple[float, float, float, float]:
    """(mean, variance, rms, energy) with 1/N-normalised variance and energy = sum s^2."""
    s = w.samples
    mean = float(np.mean(s))
    variance = float(np.mean((s - mean) ** 2))
    rms = float(np.sqrt(np.mean(s**2)))
    energy = float(np.sum(s**2))
    return mean, variance, rms, energy


def _window(kind: str, n: int) -> np.ndarray:
    """Periodic window of n points (peak exactly 1 for even n)."""
    j = np.arange(n)
    kind = kind.lower()
    if kind == "hanning":
        return 0.5 * (1 - np.cos(2 * np.pi * j / n))
    if kind == "blackman":
        x = 2 * np.pi * j / n
        return 0.42 - 0.5 * np.cos(x) + 0.08 * np.cos(2 * x)
    if kind == "gaussian":
        return np.exp(-0.5 * ((j - n / 2) / (n / 6)) ** 2)
    raise ValueError(f"unknown window kind {kind!r}")


def tone_burst(f0: float, cycles: int, window: str, dt: float, pad: int = 0) -> Waveform:
    """Windowed sinusoid of `cycles` periods at f0, followed by `pad` zeros.

    The carrier is a cosine centred on the window peak, so the burst amplitude
    peaks at exactly the window maximum.
    """
    if f0 * dt >= 0.5:
        raise NyquistViolation(f"f0={f0} Hz at dt={dt} s violates the Nyquist limit")
    if cycles < 0:
        raise ValueError("cycles must be >= 0")
    n_support = int(round(cycles / (f0 * dt))) if cycles else 0
    if n_support == 0:
        return Waveform(np.zeros(max(pad, 2)), dt=dt)
    j = np.arange(n_support)
    w = _window(window, n_support)
    carrier = np.cos(2 * np.pi * f0 * (j - n_support / 2) * dt)
    burst = w * carrier
    samples = np.concatenate([burst, np.zeros(pad)])
    if len(samples) < 2:
        samples = np.concatenate([samples, np.zeros(2 - len(samples))])
    return Waveform(samples, dt=dt)


def sine_cycle_pulse(f0: float, dt: float, pad: int = 0) -> Waveform:
    """Single full sine cycle at f0 (zero-mean, impact-like bipolar pulse)."""
    if f0 * dt >= 0.5:
        raise NyquistViolation(f"f0={f0} Hz at dt={dt} s violates the Nyquist limit")
    n = int(round(1.0 / (f0 * dt)))
    j = np.arange(n)
    samples = np.concatenate([np.sin(2 * np.pi * f0 * j * dt), np.zeros(pad)])
    return Waveform(samples, dt=dt)


def occupied_band(w: Waveform, rel_tol: float = 1e-2) -> tuple[float, float]:
    """Frequency band (Hz) where |FFT| >= rel_tol * max|FFT| (DC excluded)."""
    spectrum = np.abs(np.fft.rfft(w.samples))
    freqs = np.fft.rfftfreq(len(w.samples), w.dt)
    level = rel_tol * spectrum.max()
    hot = np.nonzero((spectrum >= level) & (freqs > 0))[0]
    if len(hot) == 0:
        raise ZeroSignal("signal has no spectral content above the tolerance")
    return float(freqs[hot[0]]), float(freqs[hot[-1]])


def propagate_dispersive(
    source: Waveform,
    curves: DispersionCurve | list[DispersionCurve],
    distance: float,
    mode_weights: dict[str, float] | None = None,
    band_tol: float = 1e-2,
) -> Waveform:
    """Phase-delay synthesis of dispersive propagation over `distance` (m).

    Each retained frequency bin is multiplied by
    sum over modes of weight * exp(-i * k_mode(omega) * distance),
    where k(omega) linearly interpolates the traced branch. Bins outside the
    curves' common coverage are zeroed. Raises BandNotCovered if the source's
    occupied band (relative level band_tol) exceeds the coverage.
    """
    if distance < 0:
        raise ValueError("distance must be >= 0")
    if isinstance(curves, DispersionCurve):
        curves = [curves]
    if not curves:
        raise ValueError("at least one dispersion curve is required")
    if mode_weights is None:
        mode_weights = {c.mode.name: 1.0 for c in curves}

    n = len(source.samples)
    spectrum = np.fft.rfft(source.samples)
    omega = 2 * np.pi * np.fft.rfftfreq(n, source.dt)

    lo = max(c.omega[0] for c in curves)
    hi = min(c.omega[-1] for c in curves)
    band_lo, band_hi = occupied_band(source, band_tol)
    if 2 * np.pi * band_lo < lo or 2 * np.pi * band_hi > hi:
        raise BandNotCovered(
            f"source band [{band_lo:.0f}, {band_hi:.0f}] Hz exceeds curve coverage "
            f"[{lo / (2 * np.pi):.0f}, {hi / (2 * np.pi):.0f}] Hz"
        )

    retained = (omega >= lo) & (omega <= hi)
    transfer = np.zeros(len(omega), dtype=complex)
    for curve in curves:
        weight = mode_weights.get(curve.mode.name, 0.0)
        if weight == 0.0:
            continue
        k = curve.wavenumber_at(omega[retained])
        transfer[retained] += weight * np.exp(-1j * k * distance)
    out = np.fft.irfft(spectrum * np.where(retained, transfer, 0.0), n=n)
    return source.copy_with(out)


def _box_muller_gauss(n: int, seed: int) -> np.ndarray:
    """Standard normal draws from a counter-based PRNG (Philox) via Box-Muller."""
    gen = np.random.Generator(np.random.Philox(key=int(seed)))
    m = (n + 1) // 2
    u1 = gen.random(m)
    u2 = gen.random(m)
    r = np.sqrt(-2.0 * np.log1p(-u1))  # 1-u1 in (0,1]: no log(0)
    return np.concatenate([r * np.cos(2 * np.pi * u2), r * np.sin(2 * np.pi * u2)])[:n]


def add_noise(w: Waveform, snr_db: float, seed: int) -> Waveform:
    """Add white Gaussian noise at the requested SNR (dB, 20*log10 of rms ratio)."""
    rms = float(np.sqrt(np.mean(w.samples**2)))
    if rms == 0.0:
        raise ZeroSignal("cannot scale noise against an all-zero signal")
    snr_db = min(snr_db, SNR_DB_CAP)
    sigma = rms / 10 ** (snr_db / 20)
    return w.copy_with(w.samples + sigma * _box_muller_gauss(len(w.samples), seed))


def noise_floor(w: Waveform, sigma: float, seed: int) -> Waveform:
    """Add zero-mean Gaussian noise of fixed absolute standard deviation."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    if sigma == 0.0:
        return w.copy_with(w.samples.copy())
    return w.copy_with(w.samples + sigma * _box_muller_gauss(len(w.samples), seed))


def _settling_length(b: np.ndarray, a: np.ndarray) -> int:
    """Samples for the filter impulse response to decay below ~1e-8."""
    poles = np.roots(a)
    r = float(np.max(np.abs(poles))) if len(poles) else 0.0
    if r <= 0.0 or r >= 1.0:
        return 3 * max(len(a), len(b))
    return max(int(math.ceil(math.log(1e-8) / math.log(r))), 3 * max(len(a), len(b)))


def lowpass(w: Waveform, cutoff: float) -> Waveform:
    """Zero-phase low-pass: 2nd-order Butterworth run forward and backward.

    Edge handling uses reflective padding of three settling lengths, clamped
    to the signal size.
    """
    nyquist = 0.5 / w.dt
    if not 0 < cutoff < nyquist:
        raise CutoffOutOfRange(f"cutoff {cutoff} Hz outside (0, {nyquist}) Hz")
    b, a = butter(2, cutoff, fs=w.fs)
    padlen = min(3 * _settling_length(b, a), len(w.samples) - 2)
    out = filtfilt(b, a, w.samples, padtype="even", padlen=padlen)
    return w.copy_with(out)


def distances(layout: SensorLayout, impact_index: int) -> np.ndarray:
    """Euclidean centre-to-centre sensor-impact distances (m)."""
    if not 0 <= impact_index < len(layout.impact_positions):
        raise IndexOutOfRange(f"impact index {impact_index} outside the layout")
    ix, iy = layout.impact_positions[impact_index]
    return np.array(
        [math.hypot(sx - ix, sy - iy) for sx, sy in layout.sensor_positions]
    )


def reference_markers(
    layout: SensorLayout,
    impact_index: int,
    c_s0_max: float,
    c_a0_max: float,
) -> list[tuple[float, float]]:
    """Per-sensor earliest-arrival markers (t_S0, t_A0) in seconds.

    Uses the effective distance to the nearest patch corner,
    d_eff = centre distance - (patch_width/2)*sqrt(2), clamped at zero.
    """
    if c_s0_max <= 0 or c_a0_max <= 0:
        raise ValueError("marker speeds must be positive")
    corner = layout.patch_width / 2 * math.sqrt(2.0)
    out = []
    for dist in distances(layout, impact_index):
        d_eff = max(dist - corner, 0.0)
        out.append((d_eff / c_s0_max, d_eff / c_a0_max))
    return out
