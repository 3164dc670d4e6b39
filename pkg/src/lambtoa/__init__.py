"""Lamb-wave dispersion and time-of-arrival estimation for isotropic plates."""

from .dispersion import (
    DispersionCurve,
    Mode,
    PlateMaterial,
    axial_plate_speed,
    bulk_speeds,
    fastest_group_speed,
    flexural_plate_speed,
    rayleigh_lamb_residual,
    trace_mode,
)
from .errors import LambToaError
from .estimators import (
    AicParams,
    AicVariant,
    Method,
    SlaParams,
    ToaEstimate,
    aic_curve,
    aic_pick,
    common_threshold,
    mer_pick,
    sla_pick,
    tc_pick,
)
from .harness import (
    SweepResult,
    aic_window_sweep,
    cutoff_sweep,
    estimate_group_speed,
    mer_sweep,
    relative_times,
    sla_grid,
    tc_sweep,
)
from .signals import (
    SensorLayout,
    Waveform,
    add_noise,
    distances,
    lowpass,
    noise_floor,
    propagate_dispersive,
    reference_markers,
    stats,
    tone_burst,
)
from .tfa import Scalogram, coi_boundary, cwt, cwt_tc_pick, morlet, scalogram_section, stft

__version__ = "0.1.0"

__all__ = [
    "AicParams",
    "AicVariant",
    "DispersionCurve",
    "LambToaError",
    "Method",
    "Mode",
    "PlateMaterial",
    "Scalogram",
    "SensorLayout",
    "SlaParams",
    "SweepResult",
    "ToaEstimate",
    "Waveform",
    "add_noise",
    "aic_curve",
    "aic_pick",
    "aic_window_sweep",
    "axial_plate_speed",
    "bulk_speeds",
    "coi_boundary",
    "common_threshold",
    "cutoff_sweep",
    "cwt",
    "cwt_tc_pick",
    "distances",
    "estimate_group_speed",
    "fastest_group_speed",
    "flexural_plate_speed",
    "lowpass",
    "mer_pick",
    "mer_sweep",
    "morlet",
    "noise_floor",
    "propagate_dispersive",
    "rayleigh_lamb_residual",
    "reference_markers",
    "relative_times",
    "scalogram_section",
    "sla_grid",
    "sla_pick",
    "stats",
    "stft",
    "tc_pick",
    "tc_sweep",
    "tone_burst",
    "trace_mode",
]
