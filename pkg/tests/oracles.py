"""Independent reference implementations used only to check the package.

Everything here deliberately avoids the package's own numerical paths:
integrals go through QUADPACK (scipy.integrate), the borehole equations are
integrated as an ODE system, convolutions are direct O(N^2) sums.
"""

import numpy as np
from scipy.integrate import quad
from scipy.special import erf, erfc


def vertical_kernel_ref(z, tau, length, alpha):
    s = 2.0 * np.sqrt(alpha * tau)
    return 0.5 * (erf((length - z) / s) + 2.0 * erf(z / s) - erf((length + z) / s))


def radial_kernel_ref(r, tau, alpha):
    return np.exp(-(r * r) / (4.0 * alpha * tau)) / tau


def fls_spatial_deviation(q, r, z, t, length, lam, alpha):
    """Constant-rate finite line source by spatial integration (with image).

    Temperature deviation [K] at radial distance r and depth z after time t
    under a constant rate q [W/m] applied from t = 0.
    """

    def integrand(xi):
        dist = np.sqrt(r * r + (z - xi) ** 2)
        return erfc(dist / np.sqrt(4.0 * alpha * t)) / dist

    source, _ = quad(integrand, 0.0, length, epsabs=1e-14, epsrel=1e-10, limit=400)
    image, _ = quad(integrand, -length, 0.0, epsabs=1e-14, epsrel=1e-10, limit=400)
    return q / (4.0 * np.pi * lam) * (source - image)


def fls_convolution_deviation(q, r, z, t, length, lam, alpha):
    """Same quantity by the temporal convolution of the separated kernels."""

    def integrand(tau):
        return radial_kernel_ref(r, tau, alpha) * vertical_kernel_ref(
            z, tau, length, alpha
        )

    val, _ = quad(
        integrand, 0.0, t, epsabs=1e-16, epsrel=1e-11, limit=800,
        points=[min(t, r * r / (4.0 * alpha))],
    )
    return q / (4.0 * np.pi * lam) * val


def weighted_kernel_integral(tau, length, alpha, beta_s, gamma):
    """Quadrature reference for the g3-weighted vertical kernel integral.

    For short times the vertical kernel is a plateau with boundary layers of
    width ~2 sqrt(alpha tau) at both ends; QUADPACK needs breakpoints there
    or it silently under-resolves them.
    """

    def integrand(z):
        return vertical_kernel_ref(z, tau, length, alpha) * (
            2.0 * beta_s * np.cosh(gamma * (length - z))
        )

    layer = 12.0 * np.sqrt(alpha * tau)
    breaks = sorted({min(layer, 0.5 * length), max(length - layer, 0.5 * length)})
    val, _ = quad(
        integrand, 0.0, length, epsabs=1e-15, epsrel=1e-11, limit=600,
        points=[b for b in breaks if 0.0 < b < length],
    )
    return val


def outlet_rk4(t_in, wall_profile, length, beta_s, beta_inter, n_steps=20000):
    """Outlet deviation by shooting on the two-pipe ODE system.

    Fourth-order Runge-Utta integration of the downward/upward fluid
    equations with T_i(0) = t_in and the U-bend continuity condition; the
    unknown outlet value enters linearly, so two integrations determine it.
    """

    def rhs(z, y):
        t_i, t_o = y
        t_b = wall_profile(z)
        return np.array([
            beta_s * (t_b - t_i) - beta_inter * (t_i - t_o),
            -beta_s * (t_b - t_o) - beta_inter * (t_i - t_o),
        ])

    def mismatch(outlet_guess):
        y = np.array([t_in, outlet_guess], dtype=float)
        h = length / n_steps
        z = 0.0
        for _ in range(n_steps):
            k1 = rhs(z, y)
            k2 = rhs(z + 0.5 * h, y + 0.5 * h * k1)
            k3 = rhs(z + 0.5 * h, y + 0.5 * h * k2)
            k4 = rhs(z + h, y + h * k3)
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            z += h
        return y[0] - y[1]

    m0 = mismatch(0.0)
    m1 = mismatch(1.0)
    return -m0 / (m1 - m0)


def direct_convolution(increments, response):
    """O(N^2) reference for the step-superposition convolution."""
    n = len(increments)
    out = np.zeros(n)
    for j in range(n):
        acc = 0.0
        for l in range(j + 1):
            acc += increments[l] * response[j - l]
        out[j] = acc
    return out


def clustering_objective(generators, samples):
    """Exhaustive nearest-generator assignment and summed squared distance."""
    total = 0.0
    for p in samples:
        d2 = np.sum((generators - p) ** 2, axis=1)
        total += float(d2.min())
    return total


def assembled_outlet_oracle(
    positions, radius, e_series, dt, length, lam, alpha,
    beta_s, beta_inter, gamma, total_capacity_flow,
):
    """Averaged outlet deviation series assembled from first principles.

    Builds the wall temperature of every borehole by quadrature of the
    separated kernels, weights it along the depth, averages the per-borehole
    outlet relation over the field and solves the resulting linear fixed
    point with the energy balance. Only QUADPACK quadrature and the raw
    g1/g2 formulas are used; the packaged psi coefficients, closed-form
    depth integral and FFT superposition never enter.
    """
    positions = np.asarray(positions, dtype=float)
    n_b = len(positions)
    n_t = len(e_series)
    q = -np.asarray(e_series, dtype=float) / (length * n_b)

    dists = np.hypot(
        positions[:, 0][:, None] - positions[:, 0][None, :],
        positions[:, 1][:, None] - positions[:, 1][None, :],
    )
    np.fill_diagonal(dists, radius)
    unique_r = sorted(set(np.round(dists.ravel(), 9)))

    def weighted_block(r, m):
        """(1/4 pi lam) * int_z g3(L-z) int_{m dt}^{(m+1) dt} R Z dtau dz."""

        def inner(z):
            def f(tau):
                return radial_kernel_ref(r, tau, alpha) * vertical_kernel_ref(
                    z, tau, length, alpha
                )

            peak = min(max(m * dt, r * r / (4.0 * alpha)), (m + 1) * dt)
            val, _ = quad(
                f, m * dt, (m + 1) * dt, epsabs=1e-16, epsrel=1e-9,
                limit=300, points=[peak],
            )
            return val * 2.0 * beta_s * np.cosh(gamma * (length - z))

        total = 0.0
        for a, b in ((0.0, 12.0), (12.0, length - 12.0), (length - 12.0, length)):
            val, _ = quad(inner, a, b, epsabs=1e-14, epsrel=1e-8, limit=300)
            total += val
        return total / (4.0 * np.pi * lam)

    blocks = {
        (r, m): weighted_block(r, m) for r in unique_r for m in range(n_t)
    }

    # Weighted wall integral per target borehole and end-of-step time.
    wall = np.zeros((n_b, n_t))
    for target in range(n_b):
        for source in range(n_b):
            r = round(dists[target, source], 9)
            for n in range(n_t):
                for l in range(n + 1):
                    wall[target, n] += q[l] * blocks[(r, n - l)]
    mean_wall = wall.mean(axis=0)

    gl = gamma * length
    g1 = 2.0 * gamma / (beta_s * np.tanh(gl) + gamma) - 1.0
    g2 = gamma / (beta_s * np.sinh(gl) + gamma * np.cosh(gl))
    pipe_drop = np.asarray(e_series, dtype=float) / total_capacity_flow
    return (g2 * mean_wall - g1 * pipe_drop) / (1.0 - g1)


def step_response_ref(r, length, t, lam, alpha, beta_s, gamma, rel=1e-11):
    """h(t) by QUADPACK, using the quadrature form of the weighted kernel."""

    def integrand(tau):
        return radial_kernel_ref(r, tau, alpha) * weighted_kernel_integral(
            tau, length, alpha, beta_s, gamma
        )

    val, _ = quad(
        integrand, 0.0, t, epsabs=1e-18, epsrel=rel, limit=800,
        points=[min(t, r * r / (4.0 * alpha))],
    )
    return val / (4.0 * np.pi * lam)
