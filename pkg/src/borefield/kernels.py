"""Closed-form thermal response kernels and the 1U borehole solution.

All temperatures handled here are deviations from the undisturbed ground
temperature, in kelvin. Every quantity is SI: lengths in m, times in s,
conductivity in W/(m K), diffusivity in m2/s, resistances in (m K)/W.

The module is purely functional: every operation is a deterministic function
of immutable inputs and safe to call from any number of threads.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import erf, erfc, erfcx

from .errors import CoefficientOverflowError
from .quadrature import integrate_cells
from .validation import check_positive

# Hyperbolic terms grow like exp(gamma*L); past this product the outlet
# coefficients lose all significance, so evaluation is refused outright.
GAMMA_L_MAX = 50.0


@dataclass(frozen=True)
class SoilProperties:
    """Homogeneous ground: conductivity [W/(m K)], diffusivity [m2/s],
    undisturbed temperature [degC]."""

    thermal_conductivity: float
    thermal_diffusivity: float
    undisturbed_temperature: float = 0.0

    def __post_init__(self):
        check_positive("soil.thermal_conductivity", self.thermal_conductivity)
        check_positive("soil.thermal_diffusivity", self.thermal_diffusivity)


@dataclass(frozen=True)
class FluidCircuit:
    """Heat carrier circuit shared by all boreholes.

    ``total_mass_flow`` is the field total [kg/s]; ``per_borehole_mass_flow``
    is the share routed through each borehole. Their consistency with the
    borehole count is enforced at scenario validation.
    """

    specific_heat: float
    density: float
    total_mass_flow: float
    per_borehole_mass_flow: float

    def __post_init__(self):
        check_positive("fluid.specific_heat", self.specific_heat)
        check_positive("fluid.density", self.density)
        check_positive("fluid.total_mass_flow", self.total_mass_flow)
        check_positive("fluid.per_borehole_mass_flow", self.per_borehole_mass_flow)

    @classmethod
    def from_total_flow(cls, specific_heat, density, total_mass_flow, n_boreholes):
        return cls(
            specific_heat=specific_heat,
            density=density,
            total_mass_flow=total_mass_flow,
            per_borehole_mass_flow=total_mass_flow / n_boreholes,
        )


@dataclass(frozen=True)
class BoreholeSpec:
    """Borehole geometry and internal resistances.

    ``soil_resistance`` couples each pipe leg to the borehole wall,
    ``interpipe_resistance`` couples the two legs; both per unit length.
    """

    radius: float
    soil_resistance: float
    interpipe_resistance: float

    def __post_init__(self):
        check_positive("borehole.radius", self.radius)
        check_positive("borehole.soil_resistance", self.soil_resistance)
        check_positive("borehole.interpipe_resistance", self.interpipe_resistance)


@dataclass(frozen=True)
class BoreholeCoefficients:
    """Derived quantities of the 1U borehole solution for one length.

    beta_s, beta_inter and gamma are the normalized conductances [1/m] built
    from the resistances and the per-borehole thermal capacity flow
    W_b = m_dot_b * c_p; psi1 and psi2 are the outlet coupling coefficients.
    """

    beta_s: float
    beta_inter: float
    gamma: float
    length: float
    psi1: float
    psi2: float


def borehole_coefficients(fluid, borehole, length):
    """Build :class:`BoreholeCoefficients` for a candidate borehole length.

    Raises
    ------
    CoefficientOverflowError
        If gamma * length exceeds the stable evaluation range.
    """
    length = check_positive("length", length)
    capacity_flow = fluid.per_borehole_mass_flow * fluid.specific_heat
    beta_s = 1.0 / (borehole.soil_resistance * capacity_flow)
    beta_inter = 1.0 / (borehole.interpipe_resistance * capacity_flow)
    gamma = np.sqrt(beta_s * (beta_s + 2.0 * beta_inter))
    gl = gamma * length
    if gl > GAMMA_L_MAX:
        raise CoefficientOverflowError(
            f"gamma * L = {gl:.3g} exceeds the stable range ({GAMMA_L_MAX:g})"
        )
    psi1 = gamma / (2.0 * beta_s * np.sinh(gl))
    psi2 = 0.5 * (gamma * np.cosh(gl) / (beta_s * np.sinh(gl)) - 1.0)
    return BoreholeCoefficients(
        beta_s=float(beta_s),
        beta_inter=float(beta_inter),
        gamma=float(gamma),
        length=length,
        psi1=float(psi1),
        psi2=float(psi2),
    )


def vertical_kernel(z, tau, length, soil):
    """Depth factor of the line-source response, with the surface image sink.

    Zero at the ground surface (z = 0) for all times, close to one deep
    inside the source for short times. Dimensionless; vectorized in ``z``
    and ``tau``.
    """
    z = np.asarray(z, dtype=float)
    tau = np.asarray(tau, dtype=float)
    if np.any(tau <= 0.0):
        raise ValueError("tau must be > 0")
    if not length > 0.0:
        raise ValueError("length must be > 0")
    s = 2.0 * np.sqrt(soil.thermal_diffusivity * tau)
    return 0.5 * (erf((length - z) / s) + 2.0 * erf(z / s) - erf((length + z) / s))


def radial_kernel(r, tau, soil):
    """Radial factor exp(-r^2 / (4 alpha tau)) / tau of the response [1/s].

    Singular at r = 0; only off-axis evaluation points are meaningful.
    """
    r = np.asarray(r, dtype=float)
    tau = np.asarray(tau, dtype=float)
    if np.any(r <= 0.0):
        raise ValueError("r must be > 0 (the kernel is singular on the axis)")
    if np.any(tau <= 0.0):
        raise ValueError("tau must be > 0")
    return np.exp(-(r * r) / (4.0 * soil.thermal_diffusivity * tau)) / tau


def g_functions(z, coeffs):
    """The three internal heat-transfer coefficients (g1, g2, g3) at depth z.

    g1 and g2 relate outlet to inlet and wall temperatures, g3 is the wall
    weighting 2 beta_s cosh(gamma z). Vectorized in ``z``.
    """
    z = np.asarray(z, dtype=float)
    if np.any(z < 0.0):
        raise ValueError("z must be >= 0")
    gz = coeffs.gamma * z
    if np.any(gz > GAMMA_L_MAX):
        raise CoefficientOverflowError(
            f"gamma * z exceeds the stable range ({GAMMA_L_MAX:g})"
        )
    beta_s, gamma = coeffs.beta_s, coeffs.gamma
    ch, sh, th = np.cosh(gz), np.sinh(gz), np.tanh(gz)
    g1 = 2.0 * gamma / (beta_s * th + gamma) - 1.0
    g2 = gamma / (beta_s * sh + gamma * ch)
    g3 = 2.0 * beta_s * ch
    return g1, g2, g3


def outlet_from_wall_profile(t_in, wall_profile, coeffs, rel_tol=1e-10):
    """Outlet temperature deviation for a given wall-temperature profile.

    ``wall_profile`` maps depth (vectorized ndarray in [0, L]) to the wall
    temperature deviation. The weighted wall integral is evaluated by
    adaptive quadrature to ``rel_tol``; a :class:`QuadratureError` reports
    the achieved tolerance if it cannot converge.
    """
    length = coeffs.length
    g1_l, g2_l, _ = g_functions(length, coeffs)

    def integrand(x, _cell):
        _, _, g3 = g_functions(length - x, coeffs)
        return np.asarray(wall_profile(x), dtype=float) * g3

    # A handful of initial panels keeps the adaptive pass shallow.
    edges = np.linspace(0.0, length, 9)
    parts = integrate_cells(integrand, edges[:-1], edges[1:], rel_tol=rel_tol)
    return float(t_in) * float(g1_l) + float(g2_l) * float(parts.sum())


def _scaled_erfc_pair(xi, eta):
    """e^{-xi^2} * [erfcx(eta + xi) + erfcx(eta - xi)], overflow-safe.

    For eta < xi the second term is rewritten as
    e^{eta^2 - 2 xi eta} * erfc(eta - xi) whose exponent is negative, so the
    pair stays finite for every xi, eta >= 0.
    """
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    xi, eta = np.broadcast_arrays(xi, eta)
    first = np.exp(-xi * xi) * erfcx(eta + xi)
    second = np.empty_like(first)
    grow = eta < xi
    if np.any(grow):
        x_g, e_g = xi[grow], eta[grow]
        second[grow] = np.exp(e_g * e_g - 2.0 * x_g * e_g) * erfc(e_g - x_g)
    decay = ~grow
    if np.any(decay):
        x_d, e_d = xi[decay], eta[decay]
        second[decay] = np.exp(-x_d * x_d) * erfcx(e_d - x_d)
    return first + second


def integrated_vertical_kernel(tau, length, coeffs, soil):
    """Vertical kernel integrated against the wall weight g3 over the depth.

    Equals int_0^L Z(z, tau) * 2 beta_s cosh(gamma (L - z)) dz, evaluated
    through its closed form. The naive closed form multiplies e^{eta^2} by
    differences of error functions and cancels catastrophically; here the
    unbounded parts are cancelled analytically and only scaled complementary
    error functions remain, which keeps the result finite and accurate for
    arbitrarily large eta^2. Dimensionless; vectorized in ``tau``.
    """
    tau = np.asarray(tau, dtype=float)
    if np.any(tau <= 0.0):
        raise ValueError("tau must be > 0")
    if not length > 0.0:
        raise ValueError("length must be > 0")
    s = np.sqrt(soil.thermal_diffusivity * tau)
    xi = length / (2.0 * s)
    eta = coeffs.gamma * s
    # 2 xi eta == gamma * L independently of tau.
    c2 = np.cosh(2.0 * xi * eta)
    h = (
        -(2.0 + 2.0 * c2) * _scaled_erfc_pair(xi, eta)
        + _scaled_erfc_pair(2.0 * xi, eta)
        + (1.0 + 2.0 * c2) * (2.0 * erfcx(eta))
    )
    result = coeffs.beta_s / (2.0 * coeffs.gamma) * h
    if not np.all(np.isfinite(result)):
        raise ArithmeticError(
            "integrated vertical kernel is non-finite for the given parameters"
        )
    return result if result.ndim else float(result)
