"""Borehole placement by a projected Lloyd iteration inside a polygon.

The domain is discretized into uniform sample points; generators are
alternately assigned the nearest samples and moved to their cell centroids,
with centroids that leave a non-convex domain projected back onto it. The
``LloydCVT`` estimator wraps the procedure in the scikit-learn protocol
(constructor parameters, ``fit``, trailing-underscore attributes) so it can
be cloned and grid-searched like any clustering estimator.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .base import ParamsMixin
from .errors import ValidationError
from .geometry import DomainPolygon, nearest_point_in_domain, sample_domain
from .validation import as_points_array, check_int_at_least, check_positive

# Spacing below which thermal interference between boreholes becomes severe;
# placements tighter than this are reported, not rejected.
DEFAULT_MIN_SPACING = 5.0


@dataclass(frozen=True)
class PlacementResult:
    """Converged generators plus the diagnostics of the run."""

    generators: np.ndarray
    iterations: int
    movement: float
    objective: float
    objective_total: float
    converged: bool
    seed: object
    min_pairwise_distance: float
    min_boundary_distance: float


def assign_nearest(points, generators):
    """Index of the nearest generator per point; ties take the lowest index."""
    points = as_points_array(points)
    generators = as_points_array(generators, "generators")
    # Chunk the (n_points x n_generators) distance table to bound memory.
    labels = np.empty(len(points), dtype=np.intp)
    step = max(1, 8_000_000 // max(len(generators), 1))
    for lo in range(0, len(points), step):
        block = points[lo : lo + step]
        d2 = (
            np.sum(block**2, axis=1)[:, None]
            - 2.0 * block @ generators.T
            + np.sum(generators**2, axis=1)[None, :]
        )
        labels[lo : lo + step] = np.argmin(d2, axis=1)
    return labels


def discrete_objective(generators, samples, normalize=True):
    """Sum of squared distances from samples to their nearest generator.

    Per-sample mean by default; ``normalize=False`` returns the raw sum.
    """
    generators = as_points_array(generators, "generators")
    samples = as_points_array(samples, "samples")
    labels = assign_nearest(samples, generators)
    total = float(np.sum((samples - generators[labels]) ** 2))
    return total / len(samples) if normalize else total


def _pairwise_min_distance(points):
    if len(points) < 2:
        return np.inf
    d2 = np.sum((points[:, None, :] - points[None, :, :]) ** 2, axis=2)
    np.fill_diagonal(d2, np.inf)
    return float(np.sqrt(d2.min()))


def lloyd_cvt(
    domain,
    n_generators,
    n_samples=None,
    max_iter=500,
    tol=1e-6,
    seed=None,
    n_starts=1,
    min_spacing_warn=DEFAULT_MIN_SPACING,
):
    """Place ``n_generators`` points in ``domain`` by the projected Lloyd loop.

    Parameters
    ----------
    domain : DomainPolygon
    n_generators : int
        Number of boreholes to place.
    n_samples : int, optional
        Sample-point count for the discretization; defaults to
        ``max(100 * n_generators, 10_000)``.
    max_iter : int
        Iteration cap.
    tol : float
        Convergence threshold on the summed squared generator movement [m2].
    seed : int, optional
        Seeds both the sampling and the initial generator draw.
    n_starts : int
        Independent restarts; the result with the lowest objective wins.
    min_spacing_warn : float
        Emit a warning when the final minimum pairwise distance falls below
        this value [m].

    Returns
    -------
    PlacementResult
    """
    n_generators = check_int_at_least("n_generators", n_generators, 1)
    max_iter = check_int_at_least("max_iter", max_iter, 1)
    n_starts = check_int_at_least("n_starts", n_starts, 1)
    check_positive("tol", tol)
    if n_samples is None:
        n_samples = max(100 * n_generators, 10_000)
    n_samples = check_int_at_least("n_samples", n_samples, 1)
    if n_generators > n_samples:
        raise ValidationError(
            f"n_generators ({n_generators}) exceeds n_samples ({n_samples})"
        )

    rng = np.random.default_rng(seed)
    best = None
    for _ in range(n_starts):
        result = _lloyd_single_run(
            domain, n_generators, n_samples, max_iter, tol, rng, seed
        )
        if best is None or result.objective < best.objective:
            best = result

    if best.min_pairwise_distance < min_spacing_warn:
        warnings.warn(
            f"minimum borehole spacing {best.min_pairwise_distance:.2f} m is below "
            f"the recommended {min_spacing_warn:g} m",
            UserWarning,
            stacklevel=2,
        )
    return best


def _lloyd_single_run(domain, n_generators, n_samples, max_iter, tol, rng, seed):
    samples = sample_domain(domain, n_samples, rng=rng)
    picks = rng.choice(n_samples, size=n_generators, replace=False)
    generators = samples[picks].copy()

    iterations = 0
    movement = np.inf
    converged = False
    for iterations in range(1, max_iter + 1):
        labels = assign_nearest(samples, generators)
        updated = generators.copy()
        counts = np.bincount(labels, minlength=n_generators)
        sums_x = np.bincount(labels, weights=samples[:, 0], minlength=n_generators)
        sums_y = np.bincount(labels, weights=samples[:, 1], minlength=n_generators)
        occupied = counts > 0
        centroids = np.empty((n_generators, 2))
        centroids[occupied, 0] = sums_x[occupied] / counts[occupied]
        centroids[occupied, 1] = sums_y[occupied] / counts[occupied]
        for i in np.flatnonzero(occupied):
            updated[i] = nearest_point_in_domain(centroids[i], domain)
        # Empty cells keep their generator in place.
        movement = float(np.sum((updated - generators) ** 2))
        generators = updated
        if movement < tol:
            converged = True
            break

    objective_total = discrete_objective(generators, samples, normalize=False)
    return PlacementResult(
        generators=generators,
        iterations=iterations,
        movement=movement,
        objective=objective_total / n_samples,
        objective_total=objective_total,
        converged=converged,
        seed=seed,
        min_pairwise_distance=_pairwise_min_distance(generators),
        min_boundary_distance=float(domain.boundary_distance(generators).min()),
    )


class LloydCVT(ParamsMixin):
    """Clustering-style estimator for borehole placement.

    ``fit`` takes a :class:`DomainPolygon` (or a bare outer ring as a vertex
    list) and exposes the converged generators as ``generators_``. The
    interface mirrors k-means: ``predict`` labels points by nearest
    generator and ``score`` returns the negative per-sample objective.
    """

    def __init__(
        self,
        n_generators=25,
        n_samples=None,
        max_iter=500,
        tol=1e-6,
        random_state=None,
        n_starts=1,
        min_spacing_warn=DEFAULT_MIN_SPACING,
    ):
        self.n_generators = n_generators
        self.n_samples = n_samples
        self.max_iter = max_iter
        self.tol = tol
        self.random_state = random_state
        self.n_starts = n_starts
        self.min_spacing_warn = min_spacing_warn

    def fit(self, X, y=None):
        domain = X if isinstance(X, DomainPolygon) else DomainPolygon(X)
        result = lloyd_cvt(
            domain,
            self.n_generators,
            n_samples=self.n_samples,
            max_iter=self.max_iter,
            tol=self.tol,
            seed=self.random_state,
            n_starts=self.n_starts,
            min_spacing_warn=self.min_spacing_warn,
        )
        self.domain_ = domain
        self.result_ = result
        self.generators_ = result.generators
        self.n_iter_ = result.iterations
        self.objective_ = result.objective
        self.converged_ = result.converged
        return self

    def predict(self, X):
        self._check_fitted()
        return assign_nearest(X, self.generators_)

    def score(self, X, y=None):
        self._check_fitted()
        return -discrete_objective(self.generators_, X)

    def _check_fitted(self):
        if not hasattr(self, "generators_"):
            raise AttributeError("this LloydCVT instance is not fitted yet")
