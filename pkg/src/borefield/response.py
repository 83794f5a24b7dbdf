"""Multi-borehole transient response assembly.

Builds per-distance step-response tables by adaptive quadrature of the
separated kernels, superposes piecewise-constant loads through FFT
convolution, and couples the soil response to the fluid loop to produce
outlet/inlet temperature series.

Series convention: a load profile has values E_0..E_{N-1} on intervals
[t_n, t_{n+1}); all returned temperature series are sampled at the interval
end points t_{n+1}, so entry n reflects the load that was active during
interval n. Positive load means heat extraction from the ground.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .kernels import borehole_coefficients, integrated_vertical_kernel, vertical_kernel
from .quadrature import NODES, WEIGHTS_K, integrate_cells
from .validation import as_float_vector, as_points_array, check_int_at_least, check_positive

# Fine steps folded into one coarse step for borehole interactions:
# monthly aggregation of hourly data.
DEFAULT_COARSE_FACTOR = 730

# Distances are considered equal when they agree to this quantum [m].
DISTANCE_QUANTUM = 1e-6


@dataclass(frozen=True)
class FieldLayout:
    """Borehole axis positions in the horizontal plane [m]."""

    positions: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "positions", as_points_array(self.positions, "positions"))

    @property
    def n_boreholes(self):
        return len(self.positions)


@dataclass(frozen=True)
class LoadProfile:
    """Piecewise-constant building load on a uniform time grid.

    ``values`` are watts, positive for heat extraction (heating demand),
    negative for heat rejection (cooling demand).
    """

    step_duration: float
    values: np.ndarray

    def __post_init__(self):
        check_positive("load.step_duration", self.step_duration)
        values = as_float_vector(self.values, "load.values")
        if values.size < 1:
            raise ValidationError("load.values must contain at least one step")
        object.__setattr__(self, "values", values)

    @property
    def n_steps(self):
        return self.values.size

    @property
    def horizon(self):
        return self.step_duration * self.n_steps

    def end_times(self):
        return self.step_duration * np.arange(1, self.n_steps + 1)


@dataclass(frozen=True)
class StepResponseTable:
    """Temperature response h(t) [K per W/m] to a unit step load at one
    radial distance, sampled on a time grid starting at t = 0."""

    distance: float
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = as_float_vector(self.times, "times")
        values = as_float_vector(self.values, "values")
        failures = []
        if times.shape != values.shape:
            failures.append("times and values must have equal length")
        if times.size and times[0] != 0.0:
            failures.append("time grid must start at 0")
        if values.size and values[0] != 0.0:
            failures.append("h(0) must be 0")
        if values.size and np.any(np.diff(values) < 0.0):
            failures.append("step response must be non-decreasing")
        if failures:
            raise ValidationError(failures)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class SimulationResult:
    """Outlet/inlet series [degC] and the interaction diagnostics [K].

    ``outlet_deviation`` is the outlet series relative to the undisturbed
    ground temperature; linearity statements (scaling, superposition) hold
    exactly on it, not on the absolute series.
    """

    times: np.ndarray
    outlet: np.ndarray
    inlet: np.ndarray
    outlet_deviation: np.ndarray
    psi_self: np.ndarray
    psi_inter: np.ndarray
    pipe_drop: np.ndarray
    max_outlet: float
    min_outlet: float
    energy_residual: float


def distance_matrix(layout, radius):
    """Pairwise borehole distances with the wall radius on the diagonal."""
    check_positive("radius", radius)
    pos = layout.positions
    diff = pos[:, None, :] - pos[None, :, :]
    d = np.sqrt(np.sum(diff * diff, axis=2))
    off_diag = ~np.eye(len(pos), dtype=bool)
    if np.any(d[off_diag] == 0.0):
        dupes = [
            (i, j)
            for i in range(len(pos))
            for j in range(i + 1, len(pos))
            if d[i, j] == 0.0
        ]
        raise ValidationError([f"boreholes {i} and {j} coincide" for i, j in dupes])
    np.fill_diagonal(d, radius)
    return d


def unique_pair_distances(layout, quantum=DISTANCE_QUANTUM):
    """Distinct off-diagonal pair distances and their multiplicities.

    Distances are quantized so one quadrature serves every pair that shares
    a separation, and results are returned in ascending order for a
    deterministic summation order downstream.
    """
    pos = layout.positions
    n = len(pos)
    if n < 2:
        return np.empty(0), np.empty(0, dtype=np.intp)
    iu, ju = np.triu_indices(n, k=1)
    d = np.hypot(pos[iu, 0] - pos[ju, 0], pos[iu, 1] - pos[ju, 1])
    if np.any(d == 0.0):
        raise ValidationError("layout contains coincident boreholes")
    keys = np.round(d / quantum).astype(np.int64)
    uniq, inverse = np.unique(keys, return_inverse=True)
    counts = np.bincount(inverse)
    # Representative distance per bucket: the first pair encountered.
    rep = np.zeros(uniq.size)
    seen = np.zeros(uniq.size, dtype=bool)
    for dist, k in zip(d, inverse):
        if not seen[k]:
            rep[k] = dist
            seen[k] = True
    order = np.argsort(rep, kind="stable")
    return rep[order], counts[order]


def step_response(distance, length, times, soil, coeffs, rel_tol=1e-10):
    """Step-response table at one distance; see :func:`step_response_batch`."""
    values = step_response_batch([distance], length, times, soil, coeffs, rel_tol)[0]
    return StepResponseTable(distance=float(distance), times=np.asarray(times, float), values=values)


def step_response_batch(distances, length, times, soil, coeffs, rel_tol=1e-10):
    """h(t) for several distances on a common time grid.

    h(t) accumulates the integral of the radial kernel times the
    depth-integrated vertical kernel over each grid interval, by adaptive
    Gauss-Kronrod quadrature with a per-interval relative target of
    ``rel_tol / 10`` (so the accumulated values meet ``rel_tol``). Returns an
    array of shape (n_distances, len(times)); the grid must start at 0.
    """
    distances = as_float_vector(distances, "distances")
    if np.any(distances <= 0.0):
        raise ValidationError("distances must be > 0")
    times = as_float_vector(times, "times")
    if times[0] != 0.0 or np.any(np.diff(times) <= 0.0):
        raise ValidationError("times must start at 0 and increase strictly")
    n_int = times.size - 1
    lam = soil.thermal_conductivity

    lower = np.tile(times[:-1], distances.size)
    upper = np.tile(times[1:], distances.size)

    def integrand(tau, cell):
        # The vertical factor is distance-independent; evaluate it once per
        # distinct node. Nodes repeat exactly across the distance blocks
        # because the segments are bisected identically.
        uniq, inverse = np.unique(tau, return_inverse=True)
        zhat = np.asarray(integrated_vertical_kernel(uniq, length, coeffs, soil))
        r = distances[cell // n_int]
        return np.exp(-(r * r) / (4.0 * soil.thermal_diffusivity * tau)) / tau * zhat[inverse]

    parts = integrate_cells(integrand, lower, upper, rel_tol=rel_tol / 10.0)
    parts = parts.reshape(distances.size, n_int)
    values = np.zeros((distances.size, times.size))
    np.cumsum(parts, axis=1, out=values[:, 1:])
    values /= 4.0 * np.pi * lam
    return values


def convolve_increments(increments, response_samples):
    """Linear FFT convolution of load increments with response samples.

    Returns ``u[j] = sum_{l<=j} increments[l] * response_samples[j-l]`` for
    ``j < len(increments)``, computed with zero padding to the next power of
    two at or above the combined length; deterministic bit for bit.
    """
    increments = as_float_vector(increments, "increments")
    response_samples = as_float_vector(response_samples, "response_samples")
    n_out = increments.size
    if response_samples.size < n_out:
        raise ValidationError(
            f"response has {response_samples.size} samples but {n_out} are needed"
        )
    size = 1
    while size < increments.size + response_samples.size:
        size *= 2
    spectrum = np.fft.rfft(increments, size) * np.fft.rfft(response_samples, size)
    return np.fft.irfft(spectrum, size)[:n_out]


def load_increments(step_values):
    """Steps of a piecewise-constant series, first step measured from zero."""
    step_values = as_float_vector(step_values)
    out = np.empty_like(step_values)
    out[0] = step_values[0]
    np.subtract(step_values[1:], step_values[:-1], out=out[1:])
    return out


def aggregate_coarse(values, factor):
    """Block means over ``factor`` consecutive entries.

    A trailing partial block is averaged over its actual length.
    """
    values = as_float_vector(values)
    factor = check_int_at_least("coarse_factor", factor, 1)
    n = values.size
    n_coarse = -(-n // factor)
    edges = np.arange(n_coarse) * factor
    sums = np.add.reduceat(values, edges)
    lengths = np.minimum(factor, n - edges)
    return sums / lengths


def dual_grid_response(
    layout,
    load,
    length,
    soil,
    coeffs,
    radius,
    coarse_factor=DEFAULT_COARSE_FACTOR,
    include_self_pairs=False,
    rel_tol=1e-10,
):
    """Self and interaction responses of the field on the fine load grid.

    The self response (wall-radius distance, identical for all boreholes) is
    convolved on the fine grid. Interactions are convolved per distinct pair
    distance on a grid coarsened by ``coarse_factor`` with block-averaged
    loads, summed with pair multiplicities, and linearly interpolated back to
    the fine end-of-step times. ``include_self_pairs`` reproduces the
    variant whose inner pair sum also counts each borehole against itself;
    it double-counts the self response and exists for diagnostics only.

    Returns ``(psi_self, psi_inter)`` in kelvin, each of length
    ``load.n_steps``.
    """
    n_b = layout.n_boreholes
    n_t = load.n_steps
    dt = load.step_duration
    q_fine = -load.values / (length * n_b)

    fine_times = dt * np.arange(n_t + 1)
    self_table = step_response_batch(
        [radius], length, fine_times, soil, coeffs, rel_tol=rel_tol
    )[0]
    psi_self = convolve_increments(load_increments(q_fine), self_table[1:])

    if n_b == 1 and not include_self_pairs:
        return psi_self, np.zeros(n_t)

    coarse_factor = check_int_at_least("coarse_factor", coarse_factor, 1)
    e_coarse = aggregate_coarse(load.values, coarse_factor)
    q_coarse = -e_coarse / (length * n_b)
    n_c = e_coarse.size
    coarse_step = coarse_factor * dt
    coarse_times = coarse_step * np.arange(n_c + 1)

    dists, counts = unique_pair_distances(layout)
    weights = 2.0 * counts.astype(float) / n_b
    if include_self_pairs:
        dists = np.concatenate([[radius], dists])
        weights = np.concatenate([[2.0 * (n_b - 1) / n_b], weights])
    if dists.size == 0:
        return psi_self, np.zeros(n_t)

    tables = step_response_batch(dists, length, coarse_times, soil, coeffs, rel_tol=rel_tol)
    combined = weights @ tables
    u_coarse = convolve_increments(load_increments(q_coarse), combined[1:])
    psi_inter = np.interp(
        fine_times[1:], coarse_times, np.concatenate([[0.0], u_coarse])
    )
    return psi_self, psi_inter


def simulate_outlet(scenario, length, rel_tol=1e-10):
    """Average outlet and inlet temperature series for one borehole length.

    Couples the soil response to the fluid loop: the averaged outlet is
    psi1 * (Psi_self + Psi_inter) - psi2 * pipe_drop in deviation form,
    the inlet follows from the energy balance, and both are returned in
    absolute degC. Raises if any intermediate becomes non-finite, naming
    the first offending time step.
    """
    if scenario.layout is None:
        raise ValidationError(
            "scenario has no resolved layout; call ensure_layout() first"
        )
    coeffs = borehole_coefficients(scenario.fluid, scenario.borehole, length)
    soil = scenario.soil
    load = scenario.load
    psi_self, psi_inter = dual_grid_response(
        scenario.layout,
        load,
        length,
        soil,
        coeffs,
        scenario.borehole.radius,
        coarse_factor=scenario.coarse_factor,
        rel_tol=rel_tol,
    )
    pipe_drop = load.values / (scenario.fluid.total_mass_flow * scenario.fluid.specific_heat)
    outlet_dev = coeffs.psi1 * (psi_self + psi_inter) - coeffs.psi2 * pipe_drop
    if not np.all(np.isfinite(outlet_dev)):
        bad = int(np.flatnonzero(~np.isfinite(outlet_dev))[0])
        raise ArithmeticError(f"non-finite outlet temperature at time step {bad}")
    inlet_dev = outlet_dev - pipe_drop
    residual = float(np.max(np.abs((outlet_dev - inlet_dev) - pipe_drop))) if load.n_steps else 0.0

    t_ground = soil.undisturbed_temperature
    outlet = t_ground + outlet_dev
    inlet = t_ground + inlet_dev
    return SimulationResult(
        times=load.end_times(),
        outlet=outlet,
        inlet=inlet,
        outlet_deviation=outlet_dev,
        psi_self=psi_self,
        psi_inter=psi_inter,
        pipe_drop=pipe_drop,
        max_outlet=float(outlet.max()),
        min_outlet=float(outlet.min()),
        energy_residual=residual,
    )


# Log-spaced subdivisions per decade for the soil-field time integral.
_FIELD_SPLITS_PER_DECADE = 4


def soil_field(
    layout,
    load,
    length,
    soil,
    grid_points,
    z,
    t,
    radius,
    coarse_factor=DEFAULT_COARSE_FACTOR,
):
    """Soil temperature deviation [K] at depth ``z`` and time ``t``.

    Superposes the per-borehole convolution of the separated kernels over
    coarse-averaged loads for every evaluation point. Grid points closer
    than the borehole radius to any axis are rejected.
    """
    grid_points = as_points_array(grid_points, "grid_points")
    check_positive("radius", radius)
    if t < 0.0:
        raise ValidationError("t must be >= 0")
    if t > load.horizon:
        raise ValidationError(
            f"t = {t:g} s lies beyond the load horizon {load.horizon:g} s"
        )
    pos = layout.positions
    dists = np.hypot(
        grid_points[:, 0][:, None] - pos[:, 0][None, :],
        grid_points[:, 1][:, None] - pos[:, 1][None, :],
    )
    too_close = dists < radius
    if np.any(too_close):
        bad = int(np.flatnonzero(np.any(too_close, axis=1))[0])
        raise ValidationError(
            f"grid point {bad} at {tuple(grid_points[bad])} lies within the "
            "borehole radius of a borehole axis"
        )
    if t == 0.0:
        return np.zeros(len(grid_points))

    e_coarse = aggregate_coarse(load.values, coarse_factor)
    q_coarse = -e_coarse / (length * layout.n_boreholes)
    coarse_step = coarse_factor * load.step_duration

    # tau sub-intervals per load step, split logarithmically so the sharply
    # peaked radial kernel is resolved at every distance scale.
    alpha = soil.thermal_diffusivity
    tau_floor = 1e-3 * float(dists.min()) ** 2 / (4.0 * alpha)
    nodes = []
    node_weights = []
    for m, q_m in enumerate(q_coarse):
        b = t - m * coarse_step
        if b <= 0.0:
            break
        a = max(t - (m + 1) * coarse_step, 0.0)
        lo = max(a, min(tau_floor, 0.5 * b))
        n_splits = max(1, int(np.ceil(_FIELD_SPLITS_PER_DECADE * np.log10(b / lo))))
        edges = np.geomspace(lo, b, n_splits + 1)
        mid = 0.5 * (edges[:-1] + edges[1:])
        half = 0.5 * (edges[1:] - edges[:-1])
        nodes.append((mid[:, None] + half[:, None] * NODES[None, :]).ravel())
        node_weights.append(q_m * (half[:, None] * WEIGHTS_K[None, :]).ravel())
    if not nodes:
        return np.zeros(len(grid_points))
    tau = np.concatenate(nodes)
    w = np.concatenate(node_weights) * vertical_kernel(z, tau, length, soil)

    out = np.zeros(len(grid_points))
    d2 = dists * dists
    # Chunk the node axis so the (points x boreholes x nodes) block stays
    # within a modest memory budget.
    chunk = max(1, 16_000_000 // max(d2.size, 1))
    for lo_i in range(0, tau.size, chunk):
        sl = slice(lo_i, min(lo_i + chunk, tau.size))
        tau_c = tau[sl][None, None, :]
        kern = np.exp(-d2[:, :, None] / (4.0 * alpha * tau_c)) / tau_c
        out += np.einsum("pbn,n->p", kern, w[sl])
    return out / (4.0 * np.pi * soil.thermal_conductivity)
