import numpy as np
import pytest

from borefield.errors import ValidationError
from borefield.geometry import DomainPolygon, sample_domain
from borefield.placement import LloydCVT, discrete_objective, lloyd_cvt

import oracles
from test_geometry import lshape_domain


def square_domain(side):
    return DomainPolygon([[0.0, 0.0], [side, 0.0], [side, side], [0.0, side]])


class TestDiscreteObjective:
    def test_zero_when_generators_are_samples(self, rng):
        pts = rng.uniform(0, 10, size=(30, 2))
        assert discrete_objective(pts, pts) == 0.0

    def test_single_generator_at_mean_gives_variance(self, rng):
        pts = rng.uniform(0, 10, size=(500, 2))
        center = pts.mean(axis=0, keepdims=True)
        expected = float(np.sum((pts - center) ** 2)) / len(pts)
        assert discrete_objective(center, pts) == pytest.approx(expected, rel=1e-12)

    def test_matches_brute_force(self, rng):
        gens = rng.uniform(0, 10, size=(3, 2))
        pts = rng.uniform(0, 10, size=(30, 2))
        got = discrete_objective(gens, pts, normalize=False)
        assert got == pytest.approx(oracles.clustering_objective(gens, pts), rel=1e-12)


class TestLloydCVT:
    def test_single_generator_converges_to_centroid(self):
        result = lloyd_cvt(square_domain(1.0), 1, n_samples=100_000, seed=2)
        assert np.allclose(result.generators[0], [0.5, 0.5], atol=0.01)

    def test_generators_stay_inside(self):
        dom = lshape_domain()
        result = lloyd_cvt(dom, 12, seed=4)
        assert dom.contains(result.generators).all()

    def test_deterministic(self):
        a = lloyd_cvt(square_domain(40.0), 9, seed=123)
        b = lloyd_cvt(square_domain(40.0), 9, seed=123)
        assert np.array_equal(a.generators, b.generators)
        assert a.iterations == b.iterations
        assert a.objective == b.objective

    def test_termination_within_max_iter(self):
        result = lloyd_cvt(square_domain(40.0), 16, max_iter=3, seed=0)
        assert result.iterations <= 3
        assert not result.converged

    def test_partition_covers_samples(self, rng):
        dom = square_domain(10.0)
        samples = sample_domain(dom, 2000, seed=9)
        result = lloyd_cvt(dom, 5, n_samples=2000, seed=9)
        est = LloydCVT(n_generators=5, n_samples=2000, random_state=9).fit(dom)
        labels = est.predict(samples)
        assert labels.shape == (2000,)
        assert set(np.unique(labels)).issubset(set(range(5)))

    def test_objective_nonincreasing_on_convex_domain(self):
        # Classical Lloyd descent applies when no projection triggers.
        dom = square_domain(20.0)
        samples = sample_domain(dom, 5000, seed=31)
        rng = np.random.default_rng(31)
        generators = samples[rng.choice(5000, size=8, replace=False)].copy()
        from borefield.placement import assign_nearest

        objectives = []
        for _ in range(40):
            objectives.append(discrete_objective(generators, samples))
            labels = assign_nearest(samples, generators)
            for i in range(8):
                cell = samples[labels == i]
                if len(cell):
                    c = cell.mean(axis=0)
                    if dom.contains(c[None, :])[0]:
                        generators[i] = c
        diffs = np.diff(objectives)
        assert np.all(diffs <= 1e-12)

    def test_quasi_grid_recovery(self):
        # 25 generators in a 40 m square should land near the ideal
        # 5 x 5 grid with 8 m pitch.
        ideal = np.array(
            [[4.0 + 8.0 * i, 4.0 + 8.0 * j] for i in range(5) for j in range(5)]
        )
        dom = square_domain(40.0)
        dists = []
        for seed in range(3):
            result = lloyd_cvt(dom, 25, seed=seed)
            d = np.sqrt(
                np.min(
                    np.sum((result.generators[:, None, :] - ideal[None, :, :]) ** 2, axis=2),
                    axis=1,
                )
            )
            dists.append(d.mean())
        assert np.mean(dists) <= 3.0

    def test_spacing_warning(self):
        with pytest.warns(UserWarning, match="spacing"):
            lloyd_cvt(square_domain(4.0), 4, n_samples=2000, seed=1)

    def test_rejects_more_generators_than_samples(self):
        with pytest.raises(ValidationError):
            lloyd_cvt(square_domain(1.0), 10, n_samples=5, seed=0)

    def test_multi_start_picks_best(self):
        dom = lshape_domain()
        single = lloyd_cvt(dom, 10, seed=7, n_starts=1)
        multi = lloyd_cvt(dom, 10, seed=7, n_starts=4)
        assert multi.objective <= single.objective + 1e-12


class TestEstimatorProtocol:
    def test_get_set_params_roundtrip(self):
        est = LloydCVT(n_generators=7, random_state=3)
        params = est.get_params()
        assert params["n_generators"] == 7
        est2 = LloydCVT().set_params(**params)
        assert est2.get_params() == params

    def test_invalid_param_rejected(self):
        with pytest.raises(ValueError, match="invalid parameter"):
            LloydCVT().set_params(bogus=1)

    def test_sklearn_clone_compatible(self):
        sklearn = pytest.importorskip("sklearn")
        from sklearn.base import clone

        est = LloydCVT(n_generators=4, random_state=0)
        cloned = clone(est)
        assert cloned.get_params() == est.get_params()

    def test_fit_sets_trailing_underscore_attributes(self):
        est = LloydCVT(n_generators=3, n_samples=1000, random_state=5)
        out = est.fit(square_domain(10.0))
        assert out is est
        assert est.generators_.shape == (3, 2)
        assert est.n_iter_ >= 1
        assert np.isfinite(est.objective_)

    def test_predict_before_fit_raises(self):
        with pytest.raises(AttributeError, match="not fitted"):
            LloydCVT().predict([[0.0, 0.0]])

    def test_score_is_negative_objective(self):
        dom = square_domain(10.0)
        est = LloydCVT(n_generators=3, n_samples=1000, random_state=5).fit(dom)
        pts = sample_domain(dom, 500, seed=8)
        assert est.score(pts) == pytest.approx(
            -discrete_objective(est.generators_, pts), rel=1e-12
        )
