"""Run configuration: JSON schema, defaults, validation.

A config is one JSON document with a schema_version field. Validation errors
carry the JSON path of the offending field.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .dispersion import Mode, PlateMaterial
from .errors import ConfigError
from .signals import SensorLayout

SCHEMA_VERSION = 1

# Calibrated aluminum plate (900 x 1000 x 2 mm) with four 30 mm patches and
# two impact positions; 5 MHz sampling over 3 ms.
DEFAULT_CONFIG: dict = {
    "schema_version": SCHEMA_VERSION,
    "material": {
        "youngs_modulus_pa": 69e9,
        "poisson_ratio": 0.33,
        "density_kg_m3": 2660.0,
        "half_thickness_m": 1e-3,
    },
    "layout": {
        "sensors_m": [[0.125, 0.125], [0.775, 0.125], [0.125, 0.875], [0.775, 0.875]],
        "impacts_m": [[0.563, 0.403], [0.203, 0.203]],
        "patch_width_m": 0.030,
    },
    "sampling": {"dt_s": 0.2e-6, "duration_s": 3e-3},
    "dispersion": {
        "modes": ["S0", "A0"],
        "fd_min_hz_m": 1.0,
        "fd_max_hz_m": 5000.0,
        "fd_step_hz_m": 1.0,
    },
    "generation": {
        "impact_index": 0,
        "source": {"kind": "hann_burst", "f0": 80e3, "cycles": 5},
        "mode_weights": {"S0": 0.1, "A0": 1.0},
        "fd_max_hz_m": 2000.0,
    },
    "noise": {},
    "methods": {
        "tc": {"p": 1e-2},
        "sla": {"alpha": 5.0, "beta": 10.0, "t_dom_s": 10e-6},
        "mer": {"alpha": 25.0, "t_dom_s": 10e-6},
        "aic": {
            "variant": "GM",
            "r_a": 0.0,
            "t_am_s": 0.0,
            "t_first_lb_s": 0.0,
            "t_fb_s": 40e-6,
            "t_fa_s": 40e-6,
        },
        "cwt": {
            "omega_c": 5.0,
            "coi_constant": 3.0,
            "freq_min_hz": 50e3,
            "freq_max_hz": 100e3,
            "freq_step_hz": 100.0,
            "threshold": 1e-2,
        },
    },
    "sweeps": {
        "tc": {"p_values": [1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 1e-1]},
        "sla": {"alphas": list(range(1, 11)), "betas": list(range(1, 11)), "t_dom_s": 10e-6},
        "mer": {"alphas": list(range(5, 101, 5)), "t_dom_s": 10e-6},
        "aic": {"variant": "LM", "ub_values_s": [4e-4, 8e-4, 1.2e-3, 1.6e-3, 2e-3]},
        "cutoff": {"cutoffs_hz": [5e3, 10e3, 20e3, 50e3], "picker": "AIC_GM"},
    },
    "outputs": {"plots": True},
}

VALID_MODES = {m.name for m in Mode}
VALID_SOURCES = {"hann_burst", "gauss_burst", "sine_cycle"}


@dataclass
class RunConfig:
    material: PlateMaterial
    layout: SensorLayout
    dt: float
    duration: float
    raw: dict = field(repr=False, default_factory=dict)

    @property
    def n_samples(self) -> int:
        return int(round(self.duration / self.dt))

    def section(self, *keys, default=None):
        node = self.raw
        for key in keys:
            if not isinstance(node, dict) or key not in node:
                return default
            node = node[key]
        return node


def _require(raw: dict, path: str, keys: list[str]) -> None:
    for key in keys:
        if key not in raw:
            raise ConfigError(f"{path}.{key}", "missing required field")


def _number(raw, path: str, lo=None, hi=None) -> float:
    if not isinstance(raw, (int, float)) or isinstance(raw, bool):
        raise ConfigError(path, f"expected a number, got {type(raw).__name__}")
    x = float(raw)
    if lo is not None and x < lo:
        raise ConfigError(path, f"must be >= {lo}")
    if hi is not None and x > hi:
        raise ConfigError(path, f"must be <= {hi}")
    return x


def _merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> RunConfig:
    """Load and validate a config file, merged over the built-in defaults."""
    raw = DEFAULT_CONFIG
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ConfigError(str(path), "config file does not exist")
        try:
            user = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(str(path), f"invalid JSON: {exc}") from None
        if not isinstance(user, dict):
            raise ConfigError(str(path), "top-level JSON value must be an object")
        raw = _merge(raw, user)
    if overrides:
        raw = _merge(raw, overrides)
    return validate_config(raw)


def validate_config(raw: dict) -> RunConfig:
    version = raw.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError("schema_version", f"expected {SCHEMA_VERSION}, got {version!r}")

    _require(raw, "", ["material", "layout", "sampling"])
    m = raw["material"]
    _require(m, "material", ["youngs_modulus_pa", "poisson_ratio", "density_kg_m3", "half_thickness_m"])
    try:
        material = PlateMaterial(
            youngs_modulus=_number(m["youngs_modulus_pa"], "material.youngs_modulus_pa", lo=1.0),
            poisson_ratio=_number(m["poisson_ratio"], "material.poisson_ratio"),
            density=_number(m["density_kg_m3"], "material.density_kg_m3", lo=1e-6),
            half_thickness=_number(m["half_thickness_m"], "material.half_thickness_m", lo=1e-9),
        )
    except ValueError as exc:
        raise ConfigError("material", str(exc)) from None

    lay = raw["layout"]
    _require(lay, "layout", ["sensors_m", "impacts_m"])
    sensors = _points(lay["sensors_m"], "layout.sensors_m")
    impacts = _points(lay["impacts_m"], "layout.impacts_m")
    patch = _number(lay.get("patch_width_m", 0.0), "layout.patch_width_m", lo=0.0)
    layout = SensorLayout(sensors, impacts, patch)

    smp = raw["sampling"]
    _require(smp, "sampling", ["dt_s", "duration_s"])
    dt = _number(smp["dt_s"], "sampling.dt_s", lo=1e-12)
    duration = _number(smp["duration_s"], "sampling.duration_s", lo=2 * dt)

    disp = raw.get("dispersion", {})
    for mode in disp.get("modes", []):
        if mode not in VALID_MODES:
            raise ConfigError("dispersion.modes", f"unknown mode {mode!r}; valid: {sorted(VALID_MODES)}")

    gen = raw.get("generation", {})
    if gen:
        idx = gen.get("impact_index", 0)
        if not isinstance(idx, int) or not 0 <= idx < len(impacts):
            raise ConfigError("generation.impact_index", f"must index into layout.impacts_m (0..{len(impacts) - 1})")
        src = gen.get("source", {})
        if src.get("kind") not in VALID_SOURCES:
            raise ConfigError("generation.source.kind", f"unknown kind {src.get('kind')!r}; valid: {sorted(VALID_SOURCES)}")
        for mode in gen.get("mode_weights", {}):
            if mode not in VALID_MODES:
                raise ConfigError("generation.mode_weights", f"unknown mode {mode!r}")

    noise = raw.get("noise", {})
    if "snr_db" in noise:
        _number(noise["snr_db"], "noise.snr_db")
    if "floor_sigma_v" in noise:
        _number(noise["floor_sigma_v"], "noise.floor_sigma_v", lo=0.0)

    return RunConfig(material=material, layout=layout, dt=dt, duration=duration, raw=raw)


def _points(raw, path: str) -> tuple[tuple[float, float], ...]:
    if not isinstance(raw, list) or not raw:
        raise ConfigError(path, "expected a nonempty list of [x, y] pairs")
    out = []
    for i, item in enumerate(raw):
        if not isinstance(item, list) or len(item) != 2:
            raise ConfigError(f"{path}[{i}]", "expected an [x, y] pair")
        out.append((_number(item[0], f"{path}[{i}][0]"), _number(item[1], f"{path}[{i}][1]")))
    return tuple(out)
