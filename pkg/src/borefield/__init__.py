"""Borehole heat exchanger field design.

Places vertical boreholes inside arbitrary property polygons, simulates
multi-year hourly fluid temperatures with an analytical soil and borehole
model, and sizes the minimum uniform borehole length that honors fluid
temperature limits.
"""

from .errors import (
    BorefieldError,
    CoefficientOverflowError,
    DegenerateDomainError,
    InfeasibleAtMaxLength,
    ParseError,
    QuadratureError,
    ValidationError,
)
from .geometry import DomainPolygon, nearest_point_in_domain, sample_domain
from .kernels import (
    BoreholeCoefficients,
    BoreholeSpec,
    FluidCircuit,
    SoilProperties,
    borehole_coefficients,
    g_functions,
    integrated_vertical_kernel,
    outlet_from_wall_profile,
    radial_kernel,
    vertical_kernel,
)
from .placement import LloydCVT, PlacementResult, discrete_objective, lloyd_cvt
from .response import (
    FieldLayout,
    LoadProfile,
    SimulationResult,
    StepResponseTable,
    convolve_increments,
    distance_matrix,
    dual_grid_response,
    simulate_outlet,
    soil_field,
    step_response,
)
from .scenario import (
    Scenario,
    load_scenario,
    read_load_profile,
    save_scenario,
    scenario_from_dict,
)
from .sizing import (
    LengthProblem,
    MinimumLengthSizer,
    OptimizationResult,
    minimize_length,
    temperature_envelope,
)

__version__ = "0.1.0"
