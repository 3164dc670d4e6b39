import numpy as np
import pytest

from lambtoa import Mode, PlateMaterial, SensorLayout, trace_mode

# Calibrated aluminum plate: 900 x 1000 x 2 mm, four 30 mm square patches.
ALUMINUM = PlateMaterial(
    youngs_modulus=69e9,
    poisson_ratio=0.33,
    density=2660.0,
    half_thickness=1e-3,
)

LAYOUT = SensorLayout(
    sensor_positions=((0.125, 0.125), (0.775, 0.125), (0.125, 0.875), (0.775, 0.875)),
    impact_positions=((0.563, 0.403), (0.203, 0.203)),
    patch_width=0.030,
)

DT = 0.2e-6  # 5 MHz sampling


@pytest.fixture(scope="session")
def aluminum():
    return ALUMINUM


@pytest.fixture(scope="session")
def layout():
    return LAYOUT


@pytest.fixture(scope="session")
def s0_curve():
    return trace_mode(ALUMINUM, Mode.S0, np.arange(1.0, 2001.0, 1.0))


@pytest.fixture(scope="session")
def a0_curve():
    return trace_mode(ALUMINUM, Mode.A0, np.arange(1.0, 2001.0, 1.0))
