"""Minimum borehole length subject to outlet temperature limits.

The feasibility of a candidate length is decided by simulating the full
horizon and checking the outlet envelope against the limits. The solver
first probes feasibility on a coarse length grid; when feasibility is
monotone in length (the physically expected case) it bisects the boundary,
otherwise it falls back to a constrained descent. Either path ends with the
same certificate: the margin at the returned length and the violation one
length-tolerance below it.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .base import ParamsMixin
from .errors import InfeasibleAtMaxLength, ValidationError
from .response import simulate_outlet
from .validation import check_positive


@dataclass(frozen=True)
class LengthProblem:
    """Bounds, limits and tolerances of the sizing problem.

    Lengths in m, temperatures in degC, tolerances in m and K.
    """

    l_min: float
    l_max: float
    t_min: float
    t_max: float
    temperature_tolerance: float = 1e-3
    length_tolerance: float = 0.01

    def __post_init__(self):
        check_positive("l_min", self.l_min)
        check_positive("temperature_tolerance", self.temperature_tolerance)
        check_positive("length_tolerance", self.length_tolerance)
        failures = []
        if not self.l_min < self.l_max:
            failures.append(f"l_min ({self.l_min}) must be < l_max ({self.l_max})")
        if not self.t_min < self.t_max:
            failures.append(f"t_min ({self.t_min}) must be < t_max ({self.t_max})")
        if failures:
            raise ValidationError(failures)


@dataclass(frozen=True)
class OptimizationResult:
    """Sized length plus the feasibility certificate."""

    optimal_length: float
    binding_side: str  # "upper", "lower" or "none"
    max_outlet: float
    min_outlet: float
    n_evaluations: int
    margin: float
    violation_below: Optional[float]
    binding_time_index: Optional[int]
    method: str


def temperature_envelope(scenario, length):
    """(max, min) of the outlet series over the whole horizon [degC]."""
    result = simulate_outlet(scenario, length)
    return result.max_outlet, result.min_outlet


def _envelope_with_indices(scenario, length):
    result = simulate_outlet(scenario, length)
    return (
        result.max_outlet,
        result.min_outlet,
        int(np.argmax(result.outlet)),
        int(np.argmin(result.outlet)),
    )


class _Evaluator:
    """Caches envelope evaluations per candidate length."""

    def __init__(self, envelope, problem):
        self._envelope = envelope
        self._problem = problem
        self._cache = {}

    @property
    def n_evaluations(self):
        return len(self._cache)

    def _get(self, length):
        if length not in self._cache:
            out = self._envelope(length)
            if len(out) == 2:
                out = (*out, None, None)
            self._cache[length] = out
        return self._cache[length]

    def margins(self, length):
        """(upper margin, lower margin) [K]; negative means violated."""
        hi, lo, _, _ = self._get(length)
        return self._problem.t_max - hi, lo - self._problem.t_min

    def extremum_index(self, length, side):
        _, _, i_max, i_min = self._get(length)
        return i_max if side == "upper" else i_min

    def feasible(self, length):
        up, down = self.margins(length)
        tol = self._problem.temperature_tolerance
        return up >= -tol and down >= -tol

    def violation(self, length):
        up, down = self.margins(length)
        return max(0.0, -up, -down)


def minimize_length(scenario, problem=None, n_probe=8, method="auto", envelope=None):
    """Smallest borehole length whose outlet stays within the limits.

    Parameters
    ----------
    scenario : Scenario
        Validated scenario; ignored when ``envelope`` is supplied.
    problem : LengthProblem, optional
        Defaults to ``scenario.limits``.
    n_probe : int
        Size of the coarse feasibility probe grid (monotonicity check).
    method : {"auto", "bisection", "descent"}
        "auto" bisects when the probe shows monotone feasibility and falls
        back to descent otherwise.
    envelope : callable, optional
        ``length -> (max_outlet, min_outlet)`` replacing the simulation,
        for testing and for pre-assembled pipelines.

    Raises
    ------
    InfeasibleAtMaxLength
        When even the upper length bound violates the limits.
    """
    if problem is None:
        problem = scenario.limits
    if envelope is None:
        envelope = lambda length: _envelope_with_indices(scenario, length)  # noqa: E731
    if n_probe < 2:
        raise ValidationError("n_probe must be >= 2")
    if method not in ("auto", "bisection", "descent"):
        raise ValidationError(f"unknown method {method!r}")

    ev = _Evaluator(envelope, problem)
    l_min, l_max = problem.l_min, problem.l_max

    if ev.feasible(l_min):
        return _certificate(ev, problem, l_min, method="lower-bound")
    if not ev.feasible(l_max):
        raise InfeasibleAtMaxLength(ev.violation(l_max))

    probes = np.linspace(l_min, l_max, n_probe)
    flags = [ev.feasible(float(p)) for p in probes]
    monotone = all(b or not a for a, b in zip(flags, flags[1:]))

    if method == "bisection" and not monotone:
        raise ValidationError(
            "feasibility is not monotone on the probe grid; use method='auto'"
        )
    use_bisection = method == "bisection" or (method == "auto" and monotone)

    if use_bisection:
        hi_idx = flags.index(True)
        lo = float(probes[hi_idx - 1])
        hi = float(probes[hi_idx])
        optimum = _bisect(ev, lo, hi, problem.length_tolerance)
        return _certificate(ev, problem, optimum, method="bisection")

    optimum = _descend(ev, problem, probes, flags)
    return _certificate(ev, problem, optimum, method="descent")


def _bisect(ev, lo, hi, length_tolerance):
    """Shrink an (infeasible, feasible) bracket to half the tolerance."""
    while hi - lo > 0.5 * length_tolerance:
        mid = 0.5 * (lo + hi)
        if ev.feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _descend(ev, problem, probes, flags):
    """Constrained descent fallback for non-monotone feasibility.

    A smooth solver locates a boundary estimate, which is then snapped to a
    certified (infeasible, feasible) bracket and bisected like the primary
    path so both methods share the certificate semantics. Like any local
    descent, it certifies a local boundary of the feasible set.
    """
    from scipy.optimize import minimize

    tol = problem.temperature_tolerance

    def constraint(x):
        up, down = ev.margins(float(x[0]))
        return min(up, down) + tol

    best = minimize(
        lambda x: x[0],
        x0=np.array([problem.l_max]),
        method="SLSQP",
        bounds=[(problem.l_min, problem.l_max)],
        constraints=[{"type": "ineq", "fun": constraint}],
        options={"maxiter": 200, "ftol": 1e-9},
    )
    guess = float(np.clip(best.x[0], problem.l_min, problem.l_max))

    # Snap up to a feasible point: a few tolerance steps, then the smallest
    # feasible probe above the guess (the upper bound is known feasible).
    hi = guess
    for _ in range(16):
        if ev.feasible(hi):
            break
        hi = min(hi + problem.length_tolerance, problem.l_max)
    if not ev.feasible(hi):
        hi = next(
            float(p) for p, ok in zip(probes, flags) if ok and p >= guess
        )

    # Expand down to an infeasible bracket end (or the lower bound).
    step = problem.length_tolerance
    lo = hi
    while lo > problem.l_min:
        candidate = max(lo - step, problem.l_min)
        if ev.feasible(candidate):
            lo = candidate
            step *= 2.0
        else:
            return _bisect(ev, candidate, lo, problem.length_tolerance)
    return lo  # reached a feasible lower bound: the region extends down


def _certificate(ev, problem, optimum, method):
    up, down = ev.margins(optimum)
    margin = min(up, down)
    if method == "lower-bound":
        binding = "none"
        violation_below = None
        binding_index = None
    else:
        binding = "upper" if up <= down else "lower"
        below = optimum - problem.length_tolerance
        violation_below = ev.violation(below) if below >= problem.l_min else None
        binding_index = ev.extremum_index(optimum, binding)
    hi, lo = problem.t_max - up, problem.t_min + down
    return OptimizationResult(
        optimal_length=float(optimum),
        binding_side=binding,
        max_outlet=float(hi),
        min_outlet=float(lo),
        n_evaluations=ev.n_evaluations,
        margin=float(margin),
        violation_below=violation_below,
        binding_time_index=binding_index,
        method=method,
    )


class MinimumLengthSizer(ParamsMixin):
    """Estimator wrapper around :func:`minimize_length`.

    Constructor arguments override the scenario's own limits when given;
    ``fit`` stores the certificate as fitted attributes.
    """

    def __init__(
        self,
        l_min=None,
        l_max=None,
        t_min=None,
        t_max=None,
        temperature_tolerance=None,
        length_tolerance=None,
        n_probe=8,
        method="auto",
    ):
        self.l_min = l_min
        self.l_max = l_max
        self.t_min = t_min
        self.t_max = t_max
        self.temperature_tolerance = temperature_tolerance
        self.length_tolerance = length_tolerance
        self.n_probe = n_probe
        self.method = method

    def _problem_for(self, scenario):
        base = scenario.limits
        merged = {
            "l_min": self.l_min if self.l_min is not None else base.l_min,
            "l_max": self.l_max if self.l_max is not None else base.l_max,
            "t_min": self.t_min if self.t_min is not None else base.t_min,
            "t_max": self.t_max if self.t_max is not None else base.t_max,
            "temperature_tolerance": (
                self.temperature_tolerance
                if self.temperature_tolerance is not None
                else base.temperature_tolerance
            ),
            "length_tolerance": (
                self.length_tolerance
                if self.length_tolerance is not None
                else base.length_tolerance
            ),
        }
        return LengthProblem(**merged)

    def fit(self, X, y=None):
        scenario = X
        problem = self._problem_for(scenario)
        result = minimize_length(
            scenario, problem, n_probe=self.n_probe, method=self.method
        )
        self.result_ = result
        self.optimal_length_ = result.optimal_length
        self.binding_side_ = result.binding_side
        self.n_evaluations_ = result.n_evaluations
        return self
