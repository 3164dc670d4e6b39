import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from lambtoa import Waveform, reference_markers
from lambtoa.io import read_waveforms_csv, write_waveforms_csv

from conftest import LAYOUT

SMALL_CONFIG = {
    "schema_version": 1,
    "sampling": {"dt_s": 2e-7, "duration_s": 8e-4},
    "dispersion": {"modes": ["S0", "A0"], "fd_min_hz_m": 1.0, "fd_max_hz_m": 500.0, "fd_step_hz_m": 1.0},
    "generation": {
        "impact_index": 0,
        "source": {"kind": "hann_burst", "f0": 80e3, "cycles": 5},
        "mode_weights": {"S0": 1.0, "A0": 0.3},
        "fd_max_hz_m": 400.0,
    },
    "methods": {
        "cwt": {"freq_min_hz": 50e3, "freq_max_hz": 100e3, "freq_step_hz": 2e3, "threshold": 1e-2}
    },
    "outputs": {"plots": False},
}


def run_cli(*argv, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "lambtoa.cli", *argv],
        capture_output=True,
        text=True,
        cwd=cwd,
    )


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli")
    (path / "small.json").write_text(json.dumps(SMALL_CONFIG))
    proc = run_cli("generate", "--config", "small.json", "--out", "run", cwd=path)
    assert proc.returncode == 0, proc.stderr
    return path


class TestDispersionCommand:
    def test_checkpoints_in_csv(self, tmp_path, s0_curve):
        cfg = dict(SMALL_CONFIG)
        (tmp_path / "c.json").write_text(json.dumps(cfg))
        proc = run_cli("dispersion", "--config", "c.json", "--out", "d", cwd=tmp_path)
        assert proc.returncode == 0, proc.stderr
        rows = (tmp_path / "d" / "dispersion.csv").read_text().strip().splitlines()
        header = rows[0].split(",")
        assert header == ["fd_Hz_m", "k_rad_per_m", "c_phase_m_s", "c_group_m_s", "mode"]
        first_s0 = next(r for r in rows[1:] if r.endswith("S0")).split(",")
        assert float(first_s0[2]) == pytest.approx(5392.0, rel=0.005)
        # cross-module consistency with the library trace
        assert float(first_s0[2]) == pytest.approx(s0_curve.c_phase[0], rel=1e-9)

    def test_unknown_mode_exits_2_naming_field(self, tmp_path):
        cfg = json.loads(json.dumps(SMALL_CONFIG))
        cfg["dispersion"]["modes"] = ["S0", "bogus"]
        (tmp_path / "c.json").write_text(json.dumps(cfg))
        proc = run_cli("dispersion", "--config", "c.json", "--out", "d", cwd=tmp_path)
        assert proc.returncode == 2
        assert "dispersion.modes" in proc.stderr

    def test_empty_mode_list_warns_exit_0(self, tmp_path):
        cfg = json.loads(json.dumps(SMALL_CONFIG))
        cfg["dispersion"]["modes"] = []
        (tmp_path / "c.json").write_text(json.dumps(cfg))
        proc = run_cli("dispersion", "--config", "c.json", "--out", "d", cwd=tmp_path)
        assert proc.returncode == 0
        assert "warning" in proc.stderr.lower()


class TestGenerateCommand:
    def test_closest_sensor_arrives_first(self, workdir):
        channels = read_waveforms_csv(workdir / "run" / "waveforms.csv")
        assert len(channels) == 4
        onsets = []
        for ch in channels:
            hot = np.nonzero(np.abs(ch.samples) > 1e-3 * np.abs(ch.samples).max())[0]
            onsets.append(hot[0])
        assert int(np.argmin(onsets)) == 1  # S2 at 349.6 mm

    def test_same_seed_identical_bytes(self, workdir):
        for out in ("rep1", "rep2"):
            proc = run_cli(
                "generate", "--config", "small.json", "--out", out, "--seed", "9", cwd=workdir
            )
            assert proc.returncode == 0, proc.stderr
        a = (workdir / "rep1" / "waveforms.csv").read_bytes()
        b = (workdir / "rep2" / "waveforms.csv").read_bytes()
        assert a == b

    def test_zero_weights_give_zero_channels(self, tmp_path):
        cfg = json.loads(json.dumps(SMALL_CONFIG))
        cfg["generation"]["mode_weights"] = {"S0": 0.0, "A0": 0.0}
        (tmp_path / "c.json").write_text(json.dumps(cfg))
        proc = run_cli("generate", "--config", "c.json", "--out", "z", cwd=tmp_path)
        assert proc.returncode == 0, proc.stderr
        channels = read_waveforms_csv(tmp_path / "z" / "waveforms.csv")
        for ch in channels:
            assert np.all(ch.samples == 0.0)


class TestPickCommand:
    def test_tc_pick_outputs(self, workdir):
        proc = run_cli("pick", "--config", "small.json", "--method", "tc", "--out", "run", cwd=workdir)
        assert proc.returncode == 0, proc.stderr
        lines = (workdir / "run" / "picks_tc.csv").read_text().strip().splitlines()
        assert len(lines) == 5
        summary = json.loads((workdir / "run" / "summary_tc.json").read_text())
        assert summary["n_found"] == 4

    def test_missing_waveform_file_exits_2(self, workdir):
        proc = run_cli(
            "pick", "--config", "small.json", "--method", "tc", "--out", "nowhere", cwd=workdir
        )
        assert proc.returncode == 2

    def test_all_not_found_exits_1(self, tmp_path):
        (tmp_path / "c.json").write_text(
            json.dumps(json.loads(json.dumps(SMALL_CONFIG)) | {"methods": {"tc": {"p": 5.0}}})
        )
        w = Waveform(np.concatenate([np.zeros(100), [1.0], np.zeros(99)]), dt=2e-7)
        (tmp_path / "wf").mkdir()
        write_waveforms_csv(tmp_path / "wf" / "waveforms.csv", [w])
        proc = run_cli("pick", "--config", "c.json", "--method", "tc", "--out", "wf", cwd=tmp_path)
        assert proc.returncode == 1

    def test_sla_and_mer_emit_traces(self, workdir):
        for method, trace in (("sla", "trace_sla_ratio_ch1.csv"), ("mer", "trace_mer_ch1.csv")):
            proc = run_cli(
                "pick", "--config", "small.json", "--method", method, "--out", "run", cwd=workdir
            )
            assert proc.returncode == 0, proc.stderr
            assert (workdir / "run" / trace).exists()

    def test_cwt_pick_writes_scalograms(self, workdir):
        proc = run_cli("pick", "--config", "small.json", "--method", "cwt", "--out", "run", cwd=workdir)
        assert proc.returncode == 0, proc.stderr
        assert (workdir / "run" / "scalogram_ch1.csv").exists()
        lines = (workdir / "run" / "picks_cwt.csv").read_text().strip().splitlines()
        # one row per channel per frequency bin
        n_freqs = len(np.arange(50e3, 100e3 + 1e3, 2e3))
        assert len(lines) == 1 + 4 * n_freqs


class TestSweepCommand:
    def test_tc_sweep_runs(self, workdir):
        proc = run_cli("sweep", "--config", "small.json", "--method", "tc", "--out", "run", cwd=workdir)
        assert proc.returncode == 0, proc.stderr
        assert (workdir / "run" / "sweep_tc.csv").exists()
        summary = json.loads((workdir / "run" / "summary_sweep_tc.json").read_text())
        assert summary["axis"] == "p"
        assert summary["n_channels"] == 4

    def test_json_format(self, workdir):
        proc = run_cli(
            "sweep", "--config", "small.json", "--method", "mer", "--out", "run",
            "--format", "json", cwd=workdir,
        )
        assert proc.returncode == 0, proc.stderr
        payload = json.loads((workdir / "run" / "sweep_mer.json").read_text())
        assert "times_s" in payload


class TestMarkersCommand:
    def test_matches_library(self, workdir):
        proc = run_cli("markers", "--config", "small.json", "--out", "run", "--impact", "0", cwd=workdir)
        assert proc.returncode == 0, proc.stderr
        lines = (workdir / "run" / "markers.csv").read_text().strip().splitlines()[1:]
        got = [(float(r.split(",")[1]), float(r.split(",")[2])) for r in lines]
        # the CLI derives marker speeds from its own traced curves
        summaryless = reference_markers(LAYOUT, 0, 5393.2, 3157.4)
        for (a, b), (c, d) in zip(got, summaryless):
            assert a == pytest.approx(c, rel=1e-3)
            assert b == pytest.approx(d, rel=1e-3)

    def test_bad_impact_index(self, workdir):
        proc = run_cli("markers", "--config", "small.json", "--out", "run", "--impact", "7", cwd=workdir)
        assert proc.returncode == 2
