import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.signal import hilbert

from lambtoa import (
    Mode,
    Waveform,
    add_noise,
    distances,
    lowpass,
    noise_floor,
    propagate_dispersive,
    reference_markers,
    stats,
    tone_burst,
    trace_mode,
)
from lambtoa.errors import (
    BandNotCovered,
    CutoffOutOfRange,
    IndexOutOfRange,
    NyquistViolation,
    ZeroSignal,
)
from lambtoa.signals import occupied_band, sine_cycle_pulse

from conftest import ALUMINUM, DT, LAYOUT


class TestWaveform:
    def test_time_axis(self):
        w = Waveform(np.zeros(5), dt=0.5, t0=1.0)
        np.testing.assert_allclose(w.times(), [1.0, 1.5, 2.0, 2.5, 3.0])

    def test_rejects_degenerate(self):
        with pytest.raises(ValueError):
            Waveform(np.zeros(1), dt=1.0)
        with pytest.raises(ValueError):
            Waveform(np.zeros(4), dt=0.0)


class TestStats:
    def test_constant_signal(self):
        mean, var, rms, energy = stats(Waveform(np.full(10, 3.0), dt=1.0))
        assert (mean, var, rms, energy) == (3.0, 0.0, 3.0, 90.0)

    def test_plus_minus_one(self):
        mean, var, rms, energy = stats(Waveform(np.array([1.0, -1.0]), dt=1.0))
        assert (mean, var, rms, energy) == (0.0, 1.0, 1.0, 2.0)

    def test_sine_rms(self):
        n = 100000
        t = np.arange(n) * 1e-4
        w = Waveform(np.sin(2 * np.pi * 100.0 * t), dt=1e-4)  # integer periods
        _, _, rms, _ = stats(w)
        assert rms == pytest.approx(1 / math.sqrt(2), abs=1e-3)

    @given(st.floats(-100, 100), st.integers(2, 200))
    @settings(max_examples=50, deadline=None)
    def test_constant_signal_property(self, c, n):
        mean, var, rms, energy = stats(Waveform(np.full(n, c), dt=1.0))
        assert mean == pytest.approx(c, rel=1e-12, abs=1e-12)
        assert var == pytest.approx(0.0, abs=1e-9 * max(c * c, 1.0))
        assert rms == pytest.approx(abs(c), rel=1e-9, abs=1e-12)
        assert energy == pytest.approx(n * c * c, rel=1e-12, abs=1e-9)


class TestToneBurst:
    def test_support_length(self):
        w = tone_burst(100e3, 5, "hanning", DT, pad=100)
        nz = np.nonzero(w.samples)[0]
        n_support = round(5 / (100e3 * DT))
        assert n_support == 250
        assert nz[-1] < n_support
        assert len(w.samples) == n_support + 100

    def test_zero_cycles(self):
        w = tone_burst(100e3, 0, "hanning", DT, pad=10)
        assert np.all(w.samples == 0.0)

    def test_hanning_peak_is_one(self):
        w = tone_burst(100e3, 5, "hanning", DT)
        assert np.max(np.abs(w.samples)) == pytest.approx(1.0, abs=1e-12)

    def test_nyquist_guard(self):
        with pytest.raises(NyquistViolation):
            tone_burst(3e6, 5, "hanning", DT)

    @pytest.mark.parametrize("window", ["hanning", "gaussian", "blackman"])
    def test_windows_supported(self, window):
        w = tone_burst(50e3, 4, window, DT)
        assert np.max(np.abs(w.samples)) <= 1.0 + 1e-12


class TestPropagateDispersive:
    @pytest.fixture
    def s0(self, s0_curve):
        return s0_curve

    def test_zero_distance_identity(self, s0):
        src = tone_burst(100e3, 5, "hanning", DT, pad=2000)
        out = propagate_dispersive(src, s0, 0.0, {"S0": 1.0})
        # compare against the band-limited source
        spec = np.fft.rfft(src.samples)
        omega = 2 * np.pi * np.fft.rfftfreq(len(src.samples), DT)
        retained = (omega >= s0.omega[0]) & (omega <= s0.omega[-1])
        ref = np.fft.irfft(np.where(retained, spec, 0.0), n=len(src.samples))
        err = np.linalg.norm(out.samples - ref) / np.linalg.norm(ref)
        assert err < 1e-9

    def test_envelope_delay_matches_group_speed(self, s0):
        f0 = 100e3
        src = tone_burst(f0, 10, "hanning", DT, pad=6000)
        r = 0.5
        out = propagate_dispersive(src, s0, r, {"S0": 1.0})
        peak_in = np.argmax(np.abs(hilbert(src.samples)))
        peak_out = np.argmax(np.abs(hilbert(out.samples)))
        delay = (peak_out - peak_in) * DT
        expected = r / s0.group_speed_at_frequency(f0)
        assert delay == pytest.approx(expected, abs=10 / f0)  # one burst period

    def test_constant_speed_curve_delays_exactly(self, s0):
        # synthetic non-dispersive branch: k = omega / c
        c = 5000.0
        curve = trace_mode(ALUMINUM, Mode.S0, np.arange(1.0, 501.0, 1.0))
        curve.c_phase = np.full_like(curve.c_phase, c)
        curve.k = 2 * np.pi * curve.fd / ALUMINUM.half_thickness / c
        m = 250  # delay in samples for r = m*c*dt
        r = m * c * DT
        src = tone_burst(100e3, 5, "hanning", DT, pad=4000)
        one = propagate_dispersive(src, curve, r, {"S0": 1.0})
        two = propagate_dispersive(src, curve, 2 * r, {"S0": 1.0})
        p0 = np.argmax(np.abs(hilbert(src.samples)))
        p1 = np.argmax(np.abs(hilbert(one.samples)))
        p2 = np.argmax(np.abs(hilbert(two.samples)))
        assert p1 - p0 == m
        assert p2 - p0 == 2 * m

    def test_band_energy_preserved(self, s0):
        src = tone_burst(80e3, 8, "hanning", DT, pad=3000)
        out = propagate_dispersive(src, s0, 0.3, {"S0": 1.0})
        spec_in = np.fft.rfft(src.samples)
        spec_out = np.fft.rfft(out.samples)
        omega = 2 * np.pi * np.fft.rfftfreq(len(src.samples), DT)
        retained = (omega >= s0.omega[0]) & (omega <= s0.omega[-1])
        e_in = np.sum(np.abs(spec_in[retained]) ** 2)
        e_out = np.sum(np.abs(spec_out[retained]) ** 2)
        assert e_out == pytest.approx(e_in, rel=1e-9)

    def test_band_not_covered(self):
        short = trace_mode(ALUMINUM, Mode.S0, np.arange(10.0, 31.0, 1.0))  # 10-30 kHz only
        src = tone_burst(100e3, 5, "hanning", DT, pad=1000)
        with pytest.raises(BandNotCovered):
            propagate_dispersive(src, short, 0.1, {"S0": 1.0})

    def test_fft_round_trip(self):
        rng = np.random.default_rng(7)
        s = rng.normal(size=4096)
        back = np.fft.irfft(np.fft.rfft(s), n=len(s))
        assert np.linalg.norm(back - s) / np.linalg.norm(s) < 1e-10


class TestNoise:
    def test_snr_achieved(self):
        t = np.arange(200000) * DT
        w = Waveform(np.sin(2 * np.pi * 50e3 * t), dt=DT)
        for seed in (1, 2, 3):
            noisy = add_noise(w, 45.0, seed)
            noise = noisy.samples - w.samples
            measured = 20 * np.log10(
                np.sqrt(np.mean(w.samples**2)) / np.sqrt(np.mean(noise**2))
            )
            assert measured == pytest.approx(45.0, abs=0.1)

    def test_cap_makes_identity_like(self):
        w = Waveform(np.sin(np.arange(1000) * 0.1), dt=1.0)
        out = add_noise(w, 1e9, seed=4)
        assert np.allclose(out.samples, w.samples, atol=1e-12)

    def test_deterministic(self):
        w = Waveform(np.sin(np.arange(1000) * 0.1), dt=1.0)
        a = add_noise(w, 30.0, seed=42)
        b = add_noise(w, 30.0, seed=42)
        assert np.array_equal(a.samples, b.samples)

    def test_zero_signal_rejected(self):
        with pytest.raises(ZeroSignal):
            add_noise(Waveform(np.zeros(100), dt=1.0), 45.0, seed=1)


class TestNoiseFloor:
    def test_sigma_zero_is_identity(self):
        w = Waveform(np.arange(10.0), dt=1.0)
        out = noise_floor(w, 0.0, seed=1)
        assert np.array_equal(out.samples, w.samples)

    def test_variance_matches_sigma(self):
        w = Waveform(np.zeros(200000), dt=1.0)
        out = noise_floor(w, 1e-4, seed=11)
        assert np.var(out.samples) == pytest.approx(1e-8, rel=0.05)

    def test_zero_mean(self):
        n = 200000
        w = Waveform(np.zeros(n), dt=1.0)
        out = noise_floor(w, 1e-4, seed=12)
        assert abs(np.mean(out.samples)) < 4e-4 / math.sqrt(n)


class TestLowpass:
    def test_dc_preserved(self):
        w = Waveform(np.full(5000, 2.5), dt=DT)
        out = lowpass(w, 100e3)
        np.testing.assert_allclose(out.samples, w.samples, atol=1e-9)

    def test_tone_at_10x_cutoff_attenuated(self):
        t = np.arange(50000) * DT
        w = Waveform(np.sin(2 * np.pi * 100e3 * t), dt=DT)
        out = lowpass(w, 10e3)
        mid = slice(10000, 40000)
        atten = 20 * np.log10(
            np.sqrt(np.mean(w.samples[mid] ** 2)) / np.sqrt(np.mean(out.samples[mid] ** 2))
        )
        assert atten >= 40.0

    def test_zero_phase_keeps_envelope_peak(self):
        src = tone_burst(5e3, 5, "hanning", DT, pad=20000)
        out = lowpass(src, 50e3)
        p_in = np.argmax(np.abs(hilbert(src.samples)))
        p_out = np.argmax(np.abs(hilbert(out.samples)))
        assert abs(int(p_in) - int(p_out)) <= 1

    def test_linear(self):
        rng = np.random.default_rng(3)
        x = Waveform(rng.normal(size=8000), dt=DT)
        y = Waveform(rng.normal(size=8000), dt=DT)
        a, b = 2.5, -1.25
        combo = lowpass(Waveform(a * x.samples + b * y.samples, dt=DT), 100e3)
        split = a * lowpass(x, 100e3).samples + b * lowpass(y, 100e3).samples
        assert np.linalg.norm(combo.samples - split) / np.linalg.norm(split) < 1e-9

    def test_cutoff_range_enforced(self):
        w = Waveform(np.zeros(100), dt=DT)
        with pytest.raises(CutoffOutOfRange):
            lowpass(w, 0.0)
        with pytest.raises(CutoffOutOfRange):
            lowpass(w, 0.5 / DT)


class TestGeometry:
    def test_paper_distances(self):
        d1 = distances(LAYOUT, 0) * 1000  # mm
        np.testing.assert_allclose(d1, [518.8, 349.6, 643.9, 517.4], atol=0.05)
        d2 = distances(LAYOUT, 1) * 1000
        np.testing.assert_allclose(d2, [110.3, 577.3, 676.5, 882.5], atol=0.05)

    def test_coincident_sensor(self):
        from lambtoa import SensorLayout

        lay = SensorLayout(((0.1, 0.1),), ((0.1, 0.1),), patch_width=0.0)
        assert distances(lay, 0)[0] == 0.0

    def test_bad_index(self):
        with pytest.raises(IndexOutOfRange):
            distances(LAYOUT, 5)


class TestReferenceMarkers:
    # earliest-arrival marker table (microseconds), per impact and sensor
    EXPECTED = {
        0: {"t_s0": [92.2, 60.8, 115.4, 92.0], "t_a0": [157.6, 104.0, 197.2, 157.2]},
        1: {"t_s0": [16.4, 103.0, 121.4, 159.6], "t_a0": [28.2, 176.2, 207.6, 272.8]},
    }

    def test_marker_table(self):
        for impact, expected in self.EXPECTED.items():
            markers = reference_markers(LAYOUT, impact, c_s0_max=5392.0, c_a0_max=3156.0)
            for j, (t_s0, t_a0) in enumerate(markers):
                assert t_s0 * 1e6 == pytest.approx(expected["t_s0"][j], abs=0.3)
                assert t_a0 * 1e6 == pytest.approx(expected["t_a0"][j], abs=0.3)

    def test_zero_patch_width(self):
        from lambtoa import SensorLayout

        lay = SensorLayout(LAYOUT.sensor_positions, LAYOUT.impact_positions, patch_width=0.0)
        markers = reference_markers(lay, 0, 5392.0, 3156.0)
        d = distances(lay, 0)
        for dist, (t_s0, _) in zip(d, markers):
            assert t_s0 == pytest.approx(dist / 5392.0, rel=1e-12)


def test_occupied_band_of_burst():
    src = tone_burst(100e3, 5, "hanning", DT, pad=2000)
    lo, hi = occupied_band(src)
    assert lo < 100e3 < hi


def test_sine_cycle_pulse_zero_mean():
    w = sine_cycle_pulse(10e3, DT, pad=500)
    assert abs(np.mean(w.samples)) < 1e-12
