import numpy as np
import pytest

from borefield.kernels import (
    BoreholeSpec,
    FluidCircuit,
    SoilProperties,
    borehole_coefficients,
)

# Reference parameter set used throughout the suite: water-glycol carrier,
# sandy soil, 150 mm boreholes, assumed internal resistances.
ALPHA = 0.08 / 86400.0  # m2/s
LAMBDA = 1.9  # W/(m K)
T_GROUND = 15.0  # degC
CP = 4019.0  # J/(kg K)
RHO = 1026.0  # kg/m3
MDOT_TOTAL = 10.3397  # kg/s
N_BOREHOLES = 25
R_SOIL = 0.10  # (m K)/W
R_INTER = 0.30  # (m K)/W
R_BOREHOLE = 0.075  # m


@pytest.fixture(scope="session")
def soil():
    return SoilProperties(
        thermal_conductivity=LAMBDA,
        thermal_diffusivity=ALPHA,
        undisturbed_temperature=T_GROUND,
    )


@pytest.fixture(scope="session")
def fluid():
    return FluidCircuit.from_total_flow(CP, RHO, MDOT_TOTAL, N_BOREHOLES)


@pytest.fixture(scope="session")
def borehole():
    return BoreholeSpec(
        radius=R_BOREHOLE, soil_resistance=R_SOIL, interpipe_resistance=R_INTER
    )


@pytest.fixture(scope="session")
def coeffs_100m(fluid, borehole):
    return borehole_coefficients(fluid, borehole, 100.0)


@pytest.fixture()
def rng():
    return np.random.default_rng(20260808)
