"""Command-line front end.

Subcommands: dispersion, generate, pick, sweep, markers.
Exit codes: 0 success, 1 only not-found estimates, 2 config or I/O errors.
Parallelism is capped by the LAMB_TOA_THREADS environment variable.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io
from .config import RunConfig, load_config
from .dispersion import Mode, bulk_speeds, fastest_group_speed, trace_mode
from .errors import ConfigError, LambToaError
from .estimators import (
    AicParams,
    AicVariant,
    SlaParams,
    aic_pick,
    common_threshold,
    mer_pick,
    round_half_up,
    sla_pick,
    tc_pick,
)
from .generation import make_source, synthesize_channels
from .harness import (
    aic_window_sweep,
    cutoff_sweep,
    mer_sweep,
    sla_grid,
    tc_sweep,
)
from .parallel import par_map
from .signals import Waveform, reference_markers
from .tfa import cwt, cwt_tc_pick

PICK_METHODS = ("tc", "sla", "mer", "aic", "cwt")
SWEEP_METHODS = ("tc", "sla", "mer", "aic", "cutoff")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lambtoa",
        description="Lamb-wave dispersion and time-of-arrival estimation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=Path, default=None, help="JSON config file")
        p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override the config noise seed")
        p.add_argument("--format", choices=("csv", "json"), default="csv", help="table format")

    p = sub.add_parser("dispersion", help="trace dispersion curves")
    common(p)

    p = sub.add_parser("generate", help="synthesize multichannel sensor signals")
    common(p)

    p = sub.add_parser("pick", help="run one estimator on a waveform file")
    common(p)
    p.add_argument("--method", choices=PICK_METHODS, required=True)
    p.add_argument("--waveforms", type=Path, default=None, help="waveform CSV (default <out>/waveforms.csv)")

    p = sub.add_parser("sweep", help="run a parametric study on a waveform file")
    common(p)
    p.add_argument("--method", choices=SWEEP_METHODS, required=True)
    p.add_argument("--waveforms", type=Path, default=None, help="waveform CSV (default <out>/waveforms.csv)")

    p = sub.add_parser("markers", help="earliest-arrival reference markers per sensor")
    common(p)
    p.add_argument("--impact", type=int, default=None, help="impact index (default from config)")

    return parser


def _table_path(out: Path, stem: str, fmt: str) -> Path:
    return out / f"{stem}.{'json' if fmt == 'json' else 'csv'}"


def _emit_table(path: Path, fmt: str, csv_writer, json_payload) -> None:
    if fmt == "json":
        io.write_json(path, json_payload)
    else:
        csv_writer(path)


def _trace_config_modes(cfg: RunConfig, fd_cap: float | None = None):
    disp = cfg.section("dispersion", default={})
    fd_min = disp.get("fd_min_hz_m", 1.0)
    fd_max = disp.get("fd_max_hz_m", 5000.0)
    if fd_cap is not None:
        fd_max = min(fd_max, fd_cap)
    step = disp.get("fd_step_hz_m", 1.0)
    grid = np.arange(fd_min, fd_max + step / 2, step)
    modes = [Mode[name] for name in disp.get("modes", ["S0", "A0"])]
    return par_map(lambda m: trace_mode(cfg.material, m, grid), modes)


def _marker_speeds(cfg: RunConfig) -> tuple[float, float]:
    """Fastest fundamental-mode group speeds from the traced curves."""
    disp = cfg.section("dispersion", default={})
    fd_min = disp.get("fd_min_hz_m", 1.0)
    step = disp.get("fd_step_hz_m", 1.0)
    grid = np.arange(fd_min, 2000.0 + step / 2, step)
    s0, a0 = par_map(
        lambda m: trace_mode(cfg.material, m, grid), [Mode.S0, Mode.A0]
    )
    c_s0, _ = fastest_group_speed(s0, (grid[0], grid[-1]))
    c_a0, _ = fastest_group_speed(a0, (grid[0], grid[-1]))
    return c_s0, c_a0


def cmd_dispersion(cfg: RunConfig, args) -> int:
    modes = cfg.section("dispersion", "modes", default=["S0", "A0"])
    if not modes:
        print("warning: dispersion.modes is empty; nothing to do", file=sys.stderr)
        return 0
    curves = _trace_config_modes(cfg)
    args.out.mkdir(parents=True, exist_ok=True)
    from .dispersion import curve_table

    _emit_table(
        _table_path(args.out, "dispersion", args.format),
        args.format,
        lambda p: io.write_dispersion_csv(p, curves),
        {"rows": curve_table(curves)},
    )
    if cfg.section("outputs", "plots", default=True):
        from .plotting import plot_dispersion

        plot_dispersion(curves, args.out / "dispersion.svg")
    return 0


def _generate_channels(cfg: RunConfig, seed_override: int | None):
    gen = cfg.section("generation", default={})
    impact = gen.get("impact_index", 0)
    src_cfg = dict(gen.get("source", {}))
    kind = src_cfg.pop("kind")
    n = cfg.n_samples
    source = make_source(kind, cfg.dt, n, **src_cfg)

    disp = cfg.section("dispersion", default={})
    fd_min = disp.get("fd_min_hz_m", 1.0)
    step = disp.get("fd_step_hz_m", 1.0)
    fd_max = gen.get("fd_max_hz_m", 2000.0)
    grid = np.arange(fd_min, fd_max + step / 2, step)
    weights = gen.get("mode_weights", {"S0": 0.1, "A0": 1.0})
    curves = par_map(
        lambda name: trace_mode(cfg.material, Mode[name], grid), sorted(weights)
    )

    noise = cfg.section("noise", default={})
    seed = seed_override if seed_override is not None else noise.get("seed", 0)
    return synthesize_channels(
        source,
        curves,
        cfg.layout,
        impact,
        weights,
        snr_db=noise.get("snr_db"),
        noise_seed=seed,
        floor_sigma=noise.get("floor_sigma_v"),
    ), impact


def cmd_generate(cfg: RunConfig, args) -> int:
    channels, impact = _generate_channels(cfg, args.seed)
    args.out.mkdir(parents=True, exist_ok=True)
    io.write_waveforms_csv(args.out / "waveforms.csv", channels)
    if cfg.section("outputs", "plots", default=True):
        from .plotting import plot_waveforms

        c_s0, c_a0 = _marker_speeds(cfg)
        markers = reference_markers(cfg.layout, impact, c_s0, c_a0)
        plot_waveforms(channels, args.out / "signals.svg", markers=markers)
    return 0


def _load_channels(cfg: RunConfig, args) -> list[Waveform]:
    path = args.waveforms if args.waveforms is not None else args.out / "waveforms.csv"
    if not path.exists():
        raise ConfigError(str(path), "waveform file does not exist")
    channels = io.read_waveforms_csv(path)
    for ch in channels:
        if abs(ch.dt - cfg.dt) > 1e-9 * cfg.dt:
            raise ConfigError(
                "sampling.dt_s",
                f"config dt {cfg.dt} s does not match the waveform file's {ch.dt} s",
            )
    return channels


def cmd_pick(cfg: RunConfig, args) -> int:
    channels = _load_channels(args)
    args.out.mkdir(parents=True, exist_ok=True)
    method = args.method
    methods = cfg.section("methods", default={})
    picks = []
    traces = []

    if method == "tc":
        thr = common_threshold(channels, methods.get("tc", {}).get("p", 1e-2))
        picks = [tc_pick(ch, thr) for ch in channels]
    elif method == "sla":
        msla = methods.get("sla", {})
        params = SlaParams(
            alpha=msla.get("alpha", 5.0),
            beta=msla.get("beta", 10.0),
            t_dom=msla.get("t_dom_s", 10e-6),
            f_s=1.0 / cfg.dt,
        )
        for ch in channels:
            est, ratio = sla_pick(ch, params)
            picks.append(est)
            traces.append(("sla_ratio", Waveform(ratio, dt=ch.dt, t0=ch.t0)))
    elif method == "mer":
        mmer = methods.get("mer", {})
        n_e = round_half_up(mmer.get("alpha", 25.0) * mmer.get("t_dom_s", 10e-6) / cfg.dt)
        for ch in channels:
            est, trace = mer_pick(ch, n_e)
            picks.append(est)
            traces.append(("mer", Waveform(trace, dt=ch.dt, t0=ch.t0)))
    elif method == "aic":
        maic = methods.get("aic", {})
        params = AicParams(
            r_a=maic.get("r_a", 0.0),
            t_am=maic.get("t_am_s", 0.0),
            t_first_lb=maic.get("t_first_lb_s", 0.0),
            t_fb=maic.get("t_fb_s", 40e-6),
            t_fa=maic.get("t_fa_s", 40e-6),
        )
        variant = AicVariant[maic.get("variant", "GM")]
        for ch in channels:
            picks.append(aic_pick(ch, params, variant))
            from .estimators import aic_curve

            _, values = aic_curve(ch)
            traces.append(("aic", Waveform(values, dt=ch.dt, t0=ch.t0 + ch.dt)))
    elif method == "cwt":
        mcwt = methods.get("cwt", {})
        freqs = np.arange(
            mcwt.get("freq_min_hz", 50e3),
            mcwt.get("freq_max_hz", 100e3) + mcwt.get("freq_step_hz", 100.0) / 2,
            mcwt.get("freq_step_hz", 100.0),
        )
        omega_c = mcwt.get("omega_c", 5.0)
        coi_c = mcwt.get("coi_constant", 3.0)
        scalograms = par_map(lambda ch: cwt(ch, freqs, omega_c, coi_c), channels)
        per_channel = cwt_tc_pick(scalograms, mcwt.get("threshold", 1e-2))
        picks = [[entry[f] for f in sorted(entry)] for entry in per_channel]
        for j, sc in enumerate(scalograms):
            io.write_scalogram_csv(args.out / f"scalogram_ch{j + 1}.csv", sc)
            if cfg.section("outputs", "plots", default=True):
                from .plotting import plot_scalogram

                plot_scalogram(sc, args.out / f"scalogram_ch{j + 1}.svg", title=f"ch{j + 1}")

    io.write_picks_csv(args.out / f"picks_{method}.csv", picks)
    for j, (kind, trace) in enumerate(traces):
        io.write_trace_csv(args.out / f"trace_{kind}_ch{j + 1}.csv", trace, kind)

    flat = [e for entry in picks for e in (entry if isinstance(entry, list) else [entry])]
    n_found = sum(e.found for e in flat)
    io.write_json(
        args.out / f"summary_{method}.json",
        {
            "method": method,
            "n_estimates": len(flat),
            "n_found": n_found,
            "times_s": [e.time for e in flat],
        },
    )
    return 0 if n_found else 1


def cmd_sweep(cfg: RunConfig, args) -> int:
    channels = _load_channels(args)
    args.out.mkdir(parents=True, exist_ok=True)
    sweeps = cfg.section("sweeps", default={})
    method = args.method
    log_axis = False

    if method == "tc":
        result = tc_sweep(channels, sweeps.get("tc", {}).get("p_values", [1e-3, 1e-2]))
        log_axis = True
    elif method == "sla":
        ssla = sweeps.get("sla", {})
        result = sla_grid(
            channels[0],
            ssla.get("alphas", list(range(1, 11))),
            ssla.get("betas", list(range(1, 11))),
            t_dom=ssla.get("t_dom_s", 10e-6),
            f_s=1.0 / cfg.dt,
        )
        log_axis = True
    elif method == "mer":
        smer = sweeps.get("mer", {})
        result = mer_sweep(
            channels[0],
            smer.get("alphas", list(range(5, 101, 5))),
            t_dom=smer.get("t_dom_s", 10e-6),
            f_s=1.0 / cfg.dt,
        )
    elif method == "aic":
        saic = sweeps.get("aic", {})
        maic = cfg.section("methods", "aic", default={})
        params = AicParams(
            r_a=maic.get("r_a", 0.0),
            t_am=maic.get("t_am_s", 0.0),
            t_first_lb=maic.get("t_first_lb_s", 0.0),
            t_fb=maic.get("t_fb_s", 40e-6),
            t_fa=maic.get("t_fa_s", 40e-6),
        )
        result = aic_window_sweep(
            channels[0],
            params,
            saic.get("ub_values_s", [1e-3, 2e-3]),
            AicVariant[saic.get("variant", "LM")],
        )
    else:  # cutoff
        scut = sweeps.get("cutoff", {})
        picker = scut.get("picker", "AIC_GM")
        if picker == "MER":
            mmer = cfg.section("methods", "mer", default={})
            picker_params = {
                "n_e": round_half_up(mmer.get("alpha", 25.0) * mmer.get("t_dom_s", 10e-6) / cfg.dt)
            }
        else:
            maic = cfg.section("methods", "aic", default={})
            picker_params = {
                "params": AicParams(
                    r_a=maic.get("r_a", 0.0),
                    t_am=maic.get("t_am_s", 0.0),
                    t_first_lb=maic.get("t_first_lb_s", 0.0),
                    t_fb=maic.get("t_fb_s", 40e-6),
                    t_fa=maic.get("t_fa_s", 40e-6),
                )
            }
        result = cutoff_sweep(channels, scut.get("cutoffs_hz", [10e3]), picker, picker_params)

    _emit_table(
        _table_path(args.out, f"sweep_{method}", args.format),
        args.format,
        lambda p: io.write_sweep_csv(p, result),
        io.sweep_summary(result) | {"times_s": result.times().tolist()},
    )
    io.write_json(args.out / f"summary_sweep_{method}.json", io.sweep_summary(result))
    if cfg.section("outputs", "plots", default=True):
        from .plotting import plot_sweep

        impact = cfg.section("generation", "impact_index", default=0)
        c_s0, c_a0 = _marker_speeds(cfg)
        markers = reference_markers(cfg.layout, impact, c_s0, c_a0)
        plot_sweep(result, args.out / f"sweep_{method}.svg", markers=markers, log_axis=log_axis)

    times = result.times()
    return 0 if np.any(~np.isnan(times)) else 1


def cmd_markers(cfg: RunConfig, args) -> int:
    impact = args.impact
    if impact is None:
        impact = cfg.section("generation", "impact_index", default=0)
    if not 0 <= impact < len(cfg.layout.impact_positions):
        raise ConfigError("--impact", f"must index into layout.impacts_m (0..{len(cfg.layout.impact_positions) - 1})")
    c_s0, c_a0 = _marker_speeds(cfg)
    markers = reference_markers(cfg.layout, impact, c_s0, c_a0)
    args.out.mkdir(parents=True, exist_ok=True)
    _emit_table(
        _table_path(args.out, "markers", args.format),
        args.format,
        lambda p: io.write_markers_csv(p, markers),
        {
            "impact_index": impact,
            "c_s0_m_s": c_s0,
            "c_a0_m_s": c_a0,
            "markers_s": [{"t_s0": a, "t_a0": b} for a, b in markers],
        },
    )
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.command == "dispersion":
            return cmd_dispersion(cfg, args)
        if args.command == "generate":
            return cmd_generate(cfg, args)
        if args.command == "pick":
            return cmd_pick(cfg, args)
        if args.command == "sweep":
            return cmd_sweep(cfg, args)
        if args.command == "markers":
            return cmd_markers(cfg, args)
        raise AssertionError(f"unhandled command {args.command}")
    except ConfigError as exc:
        print(f"config error at {exc.path}: {exc.message}", file=sys.stderr)
        return 2
    except (LambToaError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
