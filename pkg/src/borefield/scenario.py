"""Scenario documents: parsing, validation, normalization and round-trip.

A scenario is a single JSON document with unit-bearing field names
(``thermal_diffusivity_m2_per_day`` and the like); units are converted to SI
once at parse time. Validation is strict: unknown fields are rejected and
every violated invariant is reported together with its field path.
"""

import csv
import json
import math
import os
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import ParseError, ValidationError
from .geometry import DomainPolygon
from .kernels import BoreholeSpec, FluidCircuit, SoilProperties
from .placement import lloyd_cvt
from .response import DEFAULT_COARSE_FACTOR, FieldLayout, LoadProfile
from .sizing import LengthProblem

SECONDS_PER_DAY = 86400.0
SECONDS_PER_HOUR = 3600.0

_PLACEMENT_DEFAULTS = {"samples": None, "max_iter": 500, "tol": 1e-6, "seed": 0}


@dataclass(frozen=True)
class Scenario:
    """A fully validated problem description in SI units.

    ``layout`` is None until auto-placement has run (``ensure_layout``);
    ``domain`` is None when the layout was given explicitly.
    """

    soil: SoilProperties
    fluid: FluidCircuit
    borehole: BoreholeSpec
    n_boreholes: int
    load: LoadProfile
    limits: LengthProblem
    coarse_factor: int = DEFAULT_COARSE_FACTOR
    layout: Optional[FieldLayout] = None
    domain: Optional[DomainPolygon] = None
    placement_options: Optional[dict] = None
    load_reference: Optional[dict] = None
    description: Optional[str] = None

    @property
    def step_duration(self):
        return self.load.step_duration

    @property
    def horizon(self):
        return self.load.horizon

    def ensure_layout(self, seed=None):
        """Resolve auto-placement; returns (scenario with layout, result).

        A scenario with an explicit layout is returned unchanged with a
        ``None`` placement result.
        """
        if self.layout is not None:
            return self, None
        options = dict(_PLACEMENT_DEFAULTS)
        if self.placement_options:
            options.update(self.placement_options)
        if seed is not None:
            options["seed"] = seed
        result = lloyd_cvt(
            self.domain,
            self.n_boreholes,
            n_samples=options["samples"],
            max_iter=options["max_iter"],
            tol=options["tol"],
            seed=options["seed"],
        )
        return replace(self, layout=FieldLayout(result.generators)), result

    def __eq__(self, other):
        if not isinstance(other, Scenario):
            return NotImplemented
        return _comparable(self) == _comparable(other)

    def to_dict(self):
        """Canonical dict form (SI units); inverse of :func:`scenario_from_dict`."""
        doc = {
            "soil": {
                "thermal_conductivity_w_per_m_k": self.soil.thermal_conductivity,
                "thermal_diffusivity_m2_per_s": self.soil.thermal_diffusivity,
                "undisturbed_temperature_c": self.soil.undisturbed_temperature,
            },
            "fluid": {
                "specific_heat_j_per_kg_k": self.fluid.specific_heat,
                "density_kg_per_m3": self.fluid.density,
                "total_mass_flow_kg_per_s": self.fluid.total_mass_flow,
                "per_borehole_mass_flow_kg_per_s": self.fluid.per_borehole_mass_flow,
            },
            "borehole": {
                "radius_m": self.borehole.radius,
                "soil_resistance_m_k_per_w": self.borehole.soil_resistance,
                "interpipe_resistance_m_k_per_w": self.borehole.interpipe_resistance,
            },
            "limits": {"t_min_c": self.limits.t_min, "t_max_c": self.limits.t_max},
            "lengths": {
                "l_min_m": self.limits.l_min,
                "l_max_m": self.limits.l_max,
                "temperature_tolerance_k": self.limits.temperature_tolerance,
                "length_tolerance_m": self.limits.length_tolerance,
            },
            "simulation": {"coarse_factor": self.coarse_factor},
        }
        if self.description is not None:
            doc["description"] = self.description
        if self.layout is not None and self.domain is None:
            doc["layout"] = {"positions_m": self.layout.positions.tolist()}
        else:
            layout_doc = {
                "domain": {
                    "outer": self.domain.outer.tolist(),
                    "holes": [h.tolist() for h in self.domain.holes],
                },
                "borehole_count": self.n_boreholes,
            }
            if self.placement_options:
                layout_doc["placement"] = dict(self.placement_options)
            doc["layout"] = layout_doc
        if self.load_reference is not None:
            doc["load"] = dict(self.load_reference)
        else:
            doc["load"] = {
                "step_duration_s": self.load.step_duration,
                "values_w": self.load.values.tolist(),
            }
        return doc


def _comparable(sc):
    return (
        sc.soil,
        sc.fluid,
        sc.borehole,
        sc.n_boreholes,
        sc.load.step_duration,
        sc.load.values.tobytes(),
        sc.limits,
        sc.coarse_factor,
        None if sc.layout is None else sc.layout.positions.tobytes(),
        None if sc.domain is None else (
            sc.domain.outer.tobytes(),
            tuple(h.tobytes() for h in sc.domain.holes),
        ),
        None if sc.placement_options is None else tuple(sorted(sc.placement_options.items())),
        sc.description,
    )


class _Section:
    """Typed view over one JSON object with strict key accounting."""

    def __init__(self, data, path, failures):
        self.data = data if isinstance(data, dict) else {}
        self.path = path
        self.failures = failures
        self.seen = set()
        if not isinstance(data, dict):
            failures.append(f"{path}: expected an object")

    def number(self, key, required=True, default=None):
        self.seen.add(key)
        if key not in self.data:
            if required:
                self.failures.append(f"{self.path}.{key}: missing required field")
            return default
        value = self.data[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.failures.append(f"{self.path}.{key}: expected a number")
            return default
        if not math.isfinite(value):
            self.failures.append(f"{self.path}.{key}: must be finite")
            return default
        return float(value)

    def integer(self, key, required=True, default=None):
        if key not in self.data:
            self.seen.add(key)
            if required:
                self.failures.append(f"{self.path}.{key}: missing required field")
            return default
        value = self.number(key, required=required, default=default)
        if value is None:
            return default
        if value != int(value):
            self.failures.append(f"{self.path}.{key}: expected an integer")
            return default
        return int(value)

    def raw(self, key, required=True, default=None):
        self.seen.add(key)
        if key not in self.data:
            if required:
                self.failures.append(f"{self.path}.{key}: missing required field")
            return default
        return self.data[key]

    def finish(self):
        for key in self.data:
            if key not in self.seen:
                self.failures.append(f"{self.path}.{key}: unknown field")


def _build_component(factory, kwargs, failures, path):
    if any(v is None for v in kwargs.values()):
        return None  # missing fields already reported
    try:
        return factory(**kwargs)
    except ValidationError as exc:
        failures.extend(f"{path}: {msg}" for msg in exc.failures)
        return None


def scenario_from_dict(doc, base_dir=".", load_profile=None):
    """Build a validated :class:`Scenario` from its dict form.

    ``base_dir`` anchors relative load CSV references. ``load_profile``
    overrides the document's load section (used by callers that already
    hold a profile in memory).
    """
    failures = []
    if not isinstance(doc, dict):
        raise ValidationError("scenario document must be a JSON object")
    known_top = {
        "description", "soil", "fluid", "borehole", "layout",
        "load", "limits", "lengths", "simulation",
    }
    for key in doc:
        if key not in known_top:
            failures.append(f"{key}: unknown field")

    description = doc.get("description")
    if description is not None and not isinstance(description, str):
        failures.append("description: expected a string")

    soil_sec = _Section(doc.get("soil"), "soil", failures)
    lam = soil_sec.number("thermal_conductivity_w_per_m_k")
    alpha_day = soil_sec.number("thermal_diffusivity_m2_per_day", required=False)
    alpha_si = soil_sec.number("thermal_diffusivity_m2_per_s", required=False)
    t_ground = soil_sec.number("undisturbed_temperature_c")
    soil_sec.finish()
    if alpha_day is None and alpha_si is None:
        failures.append(
            "soil: one of thermal_diffusivity_m2_per_day or "
            "thermal_diffusivity_m2_per_s is required"
        )
        alpha = None
    elif alpha_day is not None and alpha_si is not None:
        failures.append("soil: give the thermal diffusivity in exactly one unit")
        alpha = None
    else:
        alpha = alpha_si if alpha_si is not None else alpha_day / SECONDS_PER_DAY
    soil = _build_component(
        SoilProperties,
        {
            "thermal_conductivity": lam,
            "thermal_diffusivity": alpha,
            "undisturbed_temperature": t_ground,
        },
        failures,
        "soil",
    )

    layout, domain, n_boreholes, placement_options = _parse_layout(doc, failures)

    fluid_sec = _Section(doc.get("fluid"), "fluid", failures)
    cp = fluid_sec.number("specific_heat_j_per_kg_k")
    rho = fluid_sec.number("density_kg_per_m3")
    m_tot = fluid_sec.number("total_mass_flow_kg_per_s", required=False)
    m_per = fluid_sec.number("per_borehole_mass_flow_kg_per_s", required=False)
    fluid_sec.finish()
    fluid = None
    if m_tot is None and m_per is None:
        failures.append(
            "fluid: one of total_mass_flow_kg_per_s or "
            "per_borehole_mass_flow_kg_per_s is required"
        )
    elif n_boreholes is not None:
        if m_tot is None:
            m_tot = m_per * n_boreholes
        elif m_per is None:
            m_per = m_tot / n_boreholes
        elif not math.isclose(m_tot, m_per * n_boreholes, rel_tol=1e-9):
            failures.append(
                f"fluid: total_mass_flow_kg_per_s ({m_tot}) != "
                f"per_borehole_mass_flow_kg_per_s * borehole count "
                f"({m_per} * {n_boreholes})"
            )
        fluid = _build_component(
            FluidCircuit,
            {
                "specific_heat": cp,
                "density": rho,
                "total_mass_flow": m_tot,
                "per_borehole_mass_flow": m_per,
            },
            failures,
            "fluid",
        )

    bhe_sec = _Section(doc.get("borehole"), "borehole", failures)
    radius = bhe_sec.number("radius_m")
    r_soil = bhe_sec.number("soil_resistance_m_k_per_w")
    r_inter = bhe_sec.number("interpipe_resistance_m_k_per_w")
    bhe_sec.finish()
    borehole = _build_component(
        BoreholeSpec,
        {"radius": radius, "soil_resistance": r_soil, "interpipe_resistance": r_inter},
        failures,
        "borehole",
    )

    if layout is not None and borehole is not None:
        _check_layout_spacing(layout, borehole.radius, failures)

    limits_sec = _Section(doc.get("limits"), "limits", failures)
    t_min = limits_sec.number("t_min_c")
    t_max = limits_sec.number("t_max_c")
    limits_sec.finish()
    lengths_sec = _Section(doc.get("lengths"), "lengths", failures)
    l_min = lengths_sec.number("l_min_m")
    l_max = lengths_sec.number("l_max_m")
    tol_t = lengths_sec.number("temperature_tolerance_k", required=False, default=1e-3)
    tol_l = lengths_sec.number("length_tolerance_m", required=False, default=0.01)
    lengths_sec.finish()
    limits = _build_component(
        LengthProblem,
        {
            "l_min": l_min,
            "l_max": l_max,
            "t_min": t_min,
            "t_max": t_max,
            "temperature_tolerance": tol_t,
            "length_tolerance": tol_l,
        },
        failures,
        "limits",
    )

    sim_sec = _Section(doc.get("simulation", {}), "simulation", failures)
    coarse_factor = sim_sec.integer("coarse_factor", required=False, default=DEFAULT_COARSE_FACTOR)
    sim_sec.finish()
    if coarse_factor is not None and coarse_factor < 1:
        failures.append("simulation.coarse_factor: must be >= 1")

    load, load_reference = _parse_load(doc, base_dir, failures, load_profile)

    if failures:
        raise ValidationError(failures)
    return Scenario(
        soil=soil,
        fluid=fluid,
        borehole=borehole,
        n_boreholes=n_boreholes,
        load=load,
        limits=limits,
        coarse_factor=coarse_factor,
        layout=layout,
        domain=domain,
        placement_options=placement_options,
        load_reference=load_reference,
        description=description,
    )


def _parse_layout(doc, failures):
    sec = _Section(doc.get("layout"), "layout", failures)
    positions = sec.raw("positions_m", required=False)
    domain_doc = sec.raw("domain", required=False)
    count = sec.integer("borehole_count", required=False)
    placement_doc = sec.raw("placement", required=False)
    sec.finish()

    if positions is None and domain_doc is None:
        failures.append("layout: needs positions_m or domain + borehole_count")
        return None, None, None, None
    if positions is not None and domain_doc is not None:
        failures.append("layout: positions_m and domain are mutually exclusive")
        return None, None, None, None

    if positions is not None:
        try:
            layout = FieldLayout(positions)
        except ValidationError as exc:
            failures.extend(f"layout.positions_m: {m}" for m in exc.failures)
            return None, None, None, None
        if count is not None and count != layout.n_boreholes:
            failures.append(
                f"layout.borehole_count ({count}) contradicts positions_m "
                f"({layout.n_boreholes} entries)"
            )
        return layout, None, layout.n_boreholes, None

    if count is None:
        failures.append("layout.borehole_count: required with a domain")
        return None, None, None, None
    dom_sec = _Section(domain_doc, "layout.domain", failures)
    outer = dom_sec.raw("outer")
    holes = dom_sec.raw("holes", required=False, default=[])
    dom_sec.finish()
    if outer is None:
        return None, None, None, None
    try:
        domain = DomainPolygon(outer, tuple(holes))
    except (ValidationError, ValueError) as exc:
        msgs = exc.failures if isinstance(exc, ValidationError) else [str(exc)]
        failures.extend(f"layout.domain: {m}" for m in msgs)
        return None, None, None, None

    options = None
    if placement_doc is not None:
        p_sec = _Section(placement_doc, "layout.placement", failures)
        samples = p_sec.integer("samples", required=False)
        options = {
            "max_iter": p_sec.integer("max_iter", required=False, default=500),
            "tol": p_sec.number("tol", required=False, default=1e-6),
            "seed": p_sec.integer("seed", required=False, default=0),
        }
        if samples is not None:
            options["samples"] = samples
        p_sec.finish()
    return None, domain, count, options


def _check_layout_spacing(layout, radius, failures):
    pos = layout.positions
    n = len(pos)
    for i in range(n):
        for j in range(i + 1, n):
            d = float(np.hypot(*(pos[i] - pos[j])))
            if d < 2.0 * radius:
                failures.append(
                    f"layout.positions_m: boreholes {i} and {j} are {d:.4g} m "
                    f"apart, closer than one borehole diameter ({2 * radius:g} m)"
                )


def _parse_load(doc, base_dir, failures, load_profile):
    if load_profile is not None:
        # Programmatic override: the document's load section (typically a
        # CSV reference meaningless in memory) is ignored wholesale.
        return load_profile, None

    sec = _Section(doc.get("load"), "load", failures)
    csv_name = sec.raw("profile_csv", required=False)
    repeat = sec.integer("repeat_years", required=False, default=1)
    step = sec.number("step_duration_s", required=False)
    values = sec.raw("values_w", required=False)
    sec.finish()

    if csv_name is not None and values is not None:
        failures.append("load: profile_csv and values_w are mutually exclusive")
        return None, None
    if csv_name is not None:
        if not isinstance(csv_name, str):
            failures.append("load.profile_csv: expected a string path")
            return None, None
        path = csv_name if os.path.isabs(csv_name) else os.path.join(base_dir, csv_name)
        if repeat is None or repeat < 1:
            failures.append("load.repeat_years: must be >= 1")
            return None, None
        try:
            profile = read_load_profile(path, repeat=repeat)
        except (ParseError, ValidationError, OSError) as exc:
            failures.append(f"load.profile_csv: {exc}")
            return None, None
        reference = {"profile_csv": os.path.abspath(path), "repeat_years": repeat}
        return profile, reference
    if values is not None:
        if step is None:
            failures.append("load.step_duration_s: required with values_w")
            return None, None
        try:
            return LoadProfile(step, values), None
        except (ValidationError, ValueError, TypeError) as exc:
            msgs = exc.failures if isinstance(exc, ValidationError) else [str(exc)]
            failures.extend(f"load: {m}" for m in msgs)
            return None, None
    failures.append("load: needs profile_csv or step_duration_s + values_w")
    return None, None


def load_scenario(path):
    """Parse and validate a scenario JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}",
            line=exc.lineno,
            column=exc.colno,
        ) from exc
    return scenario_from_dict(doc, base_dir=os.path.dirname(os.path.abspath(path)))


def save_scenario(scenario, path):
    """Write the canonical JSON form; ``load_scenario`` restores an equal
    Scenario."""
    doc = scenario.to_dict()
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_load_profile(path, repeat=1):
    """Read an hourly load CSV with header ``hour,power_w``.

    The hour column must run 0, 1, 2, ... without gaps or duplicates.
    ``repeat`` tiles the profile that many times (years, for an annual
    profile). Positive power means heat extraction.
    """
    if int(repeat) != repeat or repeat < 1:
        raise ValidationError(f"repeat must be an integer >= 1, got {repeat!r}")
    repeat = int(repeat)
    values = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file", line=1) from None
        if [h.strip() for h in header] != ["hour", "power_w"]:
            raise ParseError(
                f"{path}: line 1: header must be 'hour,power_w', got {','.join(header)!r}",
                line=1,
            )
        expected = 0
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                raise ParseError(f"{path}: line {line_no}: blank row", line=line_no)
            if len(row) != 2:
                raise ParseError(
                    f"{path}: line {line_no}: expected 2 columns, got {len(row)}",
                    line=line_no,
                )
            try:
                hour = int(row[0])
                power = float(row[1])
            except ValueError:
                raise ParseError(
                    f"{path}: line {line_no}: non-numeric value in {row!r}",
                    line=line_no,
                ) from None
            if hour != expected:
                kind = "duplicate or out-of-order" if hour < expected else "gap in"
                raise ParseError(
                    f"{path}: line {line_no}: {kind} hour column "
                    f"(got {hour}, expected {expected})",
                    line=line_no,
                )
            if not math.isfinite(power):
                raise ParseError(
                    f"{path}: line {line_no}: power must be finite", line=line_no
                )
            values.append(power)
            expected += 1
    if not values:
        raise ParseError(f"{path}: no data rows", line=1)
    tiled = np.tile(np.asarray(values, dtype=float), repeat)
    return LoadProfile(SECONDS_PER_HOUR, tiled)
