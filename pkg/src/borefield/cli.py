"""Command line interface: place, simulate, optimize, field.

All artifacts are written atomically (temp file + rename) and floats are
serialized with 17 significant digits in CSV columns, so identical inputs
produce identical bytes. Errors go to stderr with the machine-parseable
prefix ``ERROR <code>:``; the exit code is 2 when the scenario is
infeasible at the maximum borehole length, 1 for any other error.
"""

import argparse
import json
import os
import sys
import tempfile
import time
from dataclasses import replace

import numpy as np

from .errors import (
    BorefieldError,
    CoefficientOverflowError,
    DegenerateDomainError,
    InfeasibleAtMaxLength,
    ParseError,
    QuadratureError,
    ValidationError,
)
from .geometry import DomainPolygon
from .placement import lloyd_cvt
from .response import simulate_outlet, soil_field
from .scenario import load_scenario
from .sizing import minimize_length


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _format_float(x):
    return format(float(x), ".17g")


def _atomic_write(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_json(path, obj):
    _atomic_write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _write_csv(path, header, rows):
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    _atomic_write(path, "\n".join(lines) + "\n")


def _load_domain_file(path):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(
                f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}",
                line=exc.lineno,
                column=exc.colno,
            ) from exc
    if not isinstance(doc, dict) or "outer" not in doc:
        raise ValidationError(f"{path}: domain file needs an 'outer' ring")
    unknown = set(doc) - {"outer", "holes"}
    if unknown:
        raise ValidationError(
            [f"{path}: unknown field {k!r}" for k in sorted(unknown)]
        )
    return DomainPolygon(doc["outer"], tuple(doc.get("holes") or ()))


def _layout_document(positions, seed, objective):
    return {
        "positions": [[float(x), float(y)] for x, y in positions],
        "seed": seed,
        "objective": objective,
    }


def _write_outlet_csv(path, result):
    rows = (
        (_format_float(t / 3600.0), _format_float(t_in), _format_float(t_out))
        for t, t_in, t_out in zip(result.times, result.inlet, result.outlet)
    )
    _write_csv(path, ["t_hour", "t_in_c", "t_out_c"], rows)


def _summary_document(scenario, length, result, runtime):
    i_max = int(np.argmax(result.outlet))
    i_min = int(np.argmin(result.outlet))
    return {
        "length_m": length,
        "n_boreholes": scenario.n_boreholes,
        "n_steps": scenario.load.n_steps,
        "coarse_factor": scenario.coarse_factor,
        "max_outlet_c": result.max_outlet,
        "max_outlet_time_hour": float(result.times[i_max] / 3600.0),
        "min_outlet_c": result.min_outlet,
        "min_outlet_time_hour": float(result.times[i_min] / 3600.0),
        "margin_upper_k": scenario.limits.t_max - result.max_outlet,
        "margin_lower_k": result.min_outlet - scenario.limits.t_min,
        "energy_balance_residual_max_k": result.energy_residual,
        "positions_m": [[float(x), float(y)] for x, y in scenario.layout.positions],
        "runtime_seconds": runtime,
        "metadata": {
            "temperature_convention": (
                "series are absolute degC; internal computation uses "
                "deviations from soil.undisturbed_temperature_c"
            ),
            "load_sign_convention": "positive power_w = heat extraction",
        },
    }


def cmd_place(args):
    domain = _load_domain_file(args.domain)
    result = lloyd_cvt(
        domain,
        args.n,
        n_samples=args.samples,
        max_iter=args.max_iter,
        tol=args.tol,
        seed=args.seed,
    )
    _write_json(
        args.output, _layout_document(result.generators, args.seed, result.objective)
    )
    return 0


def cmd_simulate(args):
    started = time.perf_counter()
    scenario = load_scenario(args.scenario)
    if args.coarse_factor is not None:
        if args.coarse_factor < 1:
            raise ValidationError("--coarse-factor must be >= 1")
        scenario = replace(scenario, coarse_factor=args.coarse_factor)
    limits = scenario.limits
    if not limits.l_min <= args.length <= limits.l_max:
        raise ValidationError(
            f"--length {args.length:g} outside the scenario bounds "
            f"[{limits.l_min:g}, {limits.l_max:g}]"
        )
    scenario, _ = scenario.ensure_layout()
    result = simulate_outlet(scenario, args.length)
    os.makedirs(args.output, exist_ok=True)
    _write_outlet_csv(os.path.join(args.output, "outlet.csv"), result)
    runtime = time.perf_counter() - started
    _write_json(
        os.path.join(args.output, "summary.json"),
        _summary_document(scenario, args.length, result, runtime),
    )
    return 0


def cmd_optimize(args):
    started = time.perf_counter()
    scenario = load_scenario(args.scenario)
    scenario, placement = scenario.ensure_layout()
    optimum = minimize_length(scenario)
    result = simulate_outlet(scenario, optimum.optimal_length)
    os.makedirs(args.output, exist_ok=True)
    seed = None
    objective = None
    if placement is not None:
        seed = placement.seed
        objective = placement.objective
    _write_json(
        os.path.join(args.output, "layout.json"),
        _layout_document(scenario.layout.positions, seed, objective),
    )
    _write_outlet_csv(os.path.join(args.output, "outlet.csv"), result)
    binding_hour = None
    if optimum.binding_time_index is not None:
        binding_hour = float(result.times[optimum.binding_time_index] / 3600.0)
    _write_json(
        os.path.join(args.output, "optimal.json"),
        {
            "optimal_length_m": optimum.optimal_length,
            "binding_side": optimum.binding_side,
            "binding_time_hour": binding_hour,
            "max_outlet_c": optimum.max_outlet,
            "min_outlet_c": optimum.min_outlet,
            "evaluations": optimum.n_evaluations,
            "method": optimum.method,
            "certificate": {
                "margin_k": optimum.margin,
                "violation_below_k": optimum.violation_below,
                "length_tolerance_m": scenario.limits.length_tolerance,
                "temperature_tolerance_k": scenario.limits.temperature_tolerance,
            },
        },
    )
    runtime = time.perf_counter() - started
    _write_json(
        os.path.join(args.output, "summary.json"),
        _summary_document(scenario, optimum.optimal_length, result, runtime),
    )
    return 0


def cmd_field(args):
    scenario = load_scenario(args.scenario)
    limits = scenario.limits
    if not limits.l_min <= args.length <= limits.l_max:
        raise ValidationError(
            f"--length {args.length:g} outside the scenario bounds "
            f"[{limits.l_min:g}, {limits.l_max:g}]"
        )
    t = args.time_hours * 3600.0
    if t < 0 or t > scenario.load.horizon:
        raise ValidationError(
            f"--time-hours {args.time_hours:g} outside the simulated horizon "
            f"[0, {scenario.load.horizon / 3600.0:g}]"
        )
    scenario, _ = scenario.ensure_layout()
    depth = args.depth if args.depth is not None else args.length / 2.0
    res = args.grid_res

    if scenario.domain is not None:
        x0, y0, x1, y1 = scenario.domain.bounds
    else:
        pos = scenario.layout.positions
        x0, y0 = pos.min(axis=0) - 2.0
        x1, y1 = pos.max(axis=0) + 2.0
    xs = np.arange(x0, x1 + res / 2.0, res)
    ys = np.arange(y0, y1 + res / 2.0, res)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    points = np.column_stack([gx.ravel(), gy.ravel()])
    # Grid nodes falling inside a borehole are dropped: the kernel is
    # singular on the axis and the value is meaningless there.
    pos = scenario.layout.positions
    d = np.hypot(
        points[:, 0][:, None] - pos[:, 0][None, :],
        points[:, 1][:, None] - pos[:, 1][None, :],
    ).min(axis=1)
    points = points[d >= scenario.borehole.radius]

    values = soil_field(
        scenario.layout,
        scenario.load,
        args.length,
        scenario.soil,
        points,
        depth,
        t,
        scenario.borehole.radius,
        coarse_factor=scenario.coarse_factor,
    )
    rows = (
        (_format_float(p[0]), _format_float(p[1]), _format_float(v))
        for p, v in zip(points, values)
    )
    _write_csv(args.output, ["x_m", "y_m", "du_k"], rows)
    return 0


def build_parser():
    parser = _Parser(
        prog="borefield",
        description=(
            "Design vertical borehole heat exchanger fields: place boreholes "
            "in a property polygon, simulate fluid temperatures, and size the "
            "minimum borehole length."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    place = sub.add_parser("place", help="place boreholes inside a domain polygon")
    place.add_argument("--domain", required=True, help="domain JSON file (outer, holes)")
    place.add_argument("--n", type=int, required=True, help="number of boreholes")
    place.add_argument("--samples", type=int, default=None, help="sample point count")
    place.add_argument("--max-iter", type=int, default=500)
    place.add_argument("--tol", type=float, default=1e-6, help="convergence tolerance [m^2]")
    place.add_argument("--seed", type=int, default=0)
    place.add_argument("-o", "--output", required=True, help="output layout JSON path")
    place.set_defaults(func=cmd_place)

    simulate = sub.add_parser("simulate", help="simulate outlet temperatures")
    simulate.add_argument("--scenario", required=True)
    simulate.add_argument("--length", type=float, required=True, help="borehole length [m]")
    simulate.add_argument("--coarse-factor", type=int, default=None)
    simulate.add_argument("-o", "--output", required=True, help="output directory")
    simulate.set_defaults(func=cmd_simulate)

    optimize = sub.add_parser("optimize", help="find the minimum feasible length")
    optimize.add_argument("--scenario", required=True)
    optimize.add_argument("-o", "--output", required=True, help="output directory")
    optimize.set_defaults(func=cmd_optimize)

    fld = sub.add_parser("field", help="soil temperature deviation map")
    fld.add_argument("--scenario", required=True)
    fld.add_argument("--length", type=float, required=True)
    fld.add_argument("--time-hours", type=float, required=True)
    fld.add_argument("--depth", type=float, default=None, help="default: length / 2")
    fld.add_argument("--grid-res", type=float, default=1.0, help="grid spacing [m]")
    fld.add_argument("-o", "--output", required=True, help="output CSV path")
    fld.set_defaults(func=cmd_field)

    return parser


_ERROR_CODES = (
    (InfeasibleAtMaxLength, "infeasible"),
    (ParseError, "parse"),
    (DegenerateDomainError, "domain"),
    (QuadratureError, "quadrature"),
    (CoefficientOverflowError, "overflow"),
    (ValidationError, "validation"),
    (BorefieldError, "internal"),
    (OSError, "io"),
    (ValueError, "validation"),
)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"ERROR usage: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - single reporting point
        for klass, code in _ERROR_CODES:
            if isinstance(exc, klass):
                print(f"ERROR {code}: {exc}", file=sys.stderr)
                return 2 if code == "infeasible" else 1
        raise


if __name__ == "__main__":
    sys.exit(main())
