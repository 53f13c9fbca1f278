"""
JSON descriptors for surfaces, monoids, Cremona maps and rectification
traces. Forms are embedded as strings in the polynomial grammar of
:mod:`retifica.core.grammar`; every descriptor carries ``"schema": 1``.
"""

import json
from typing import Any, Dict, List, Optional

from retifica.core.grammar import format_form, parse_biform, parse_multipoly
from retifica.interfaces.models import (
    CremonaMap,
    Monoid,
    OrbitResult,
    ParamSurface,
    ProjectionStep,
    RationalMap,
    RectificationStep,
    RectificationTrace,
)
from retifica.monoids import make_monoid
from retifica.surfaces import make_surface

__all__ = [
    "SCHEMA_VERSION",
    "surface_to_dict",
    "surface_from_dict",
    "monoid_to_dict",
    "monoid_from_dict",
    "map_to_dict",
    "map_from_dict",
    "trace_to_dict",
    "orbit_to_dict",
    "read_json",
    "dump_json",
]

SCHEMA_VERSION = 1


def _check_schema(data: Any, kind: str) -> Dict[str, Any]:
    if not isinstance(data, dict):
        raise ValueError(f"A {kind} descriptor must be a JSON object")
    version = data.get("schema")
    if version != SCHEMA_VERSION:
        raise ValueError(f"Unsupported schema version {version!r}, expected {SCHEMA_VERSION}")
    found = data.get("kind", kind)
    if found != kind:
        raise ValueError(f"Expected a {kind} descriptor, got {found!r}")
    return data


def _field(data: Dict[str, Any], name: str):
    try:
        return data[name]
    except KeyError:
        raise ValueError(f"Descriptor is missing the field {name!r}")


def surface_to_dict(S: ParamSurface) -> Dict[str, Any]:
    return {
        "schema": SCHEMA_VERSION,
        "kind": "surface",
        "bidegree": list(S.bidegree),
        "forms": [format_form(f) for f in S.forms],
    }


def surface_from_dict(data: Any, seed: int = 0) -> ParamSurface:
    """
    :raises ValueError: Bad schema, malformed forms, or forms that do not
        define a surface.
    """
    data = _check_schema(data, "surface")
    forms = _field(data, "forms")
    if not isinstance(forms, list) or not all(isinstance(f, str) for f in forms):
        raise ValueError("'forms' must be a list of strings")
    bidegree = data.get("bidegree")
    grade = tuple(bidegree) if bidegree is not None else None
    if grade is not None and (len(grade) != 2 or not all(isinstance(k, int) for k in grade)):
        raise ValueError("'bidegree' must be a pair of integers")
    return make_surface([parse_biform(f, grade) for f in forms], seed)


def monoid_to_dict(F: Monoid) -> Dict[str, Any]:
    return {
        "schema": SCHEMA_VERSION,
        "kind": "monoid",
        "d": F.d,
        "vertexes": [f"p{v}" for v in F.vertexes],
        "form": format_form(F.form),
    }


def _vertex_index(name: Any) -> int:
    if name not in ("p0", "p4"):
        raise ValueError(f"Unknown vertex {name!r}")
    return int(name[1])


def monoid_from_dict(data: Any) -> Monoid:
    data = _check_schema(data, "monoid")
    form = parse_multipoly(_field(data, "form"), 5)
    vertexes = [_vertex_index(v) for v in data.get("vertexes", ["p0", "p4"])]
    return make_monoid(form, vertexes)


def _components(forms: List[str], name: str) -> tuple:
    if not isinstance(forms, list) or len(forms) != 4:
        raise ValueError(f"'{name}' must list four forms")
    return tuple(parse_multipoly(f, 4) for f in forms)


def map_to_dict(omega: CremonaMap) -> Dict[str, Any]:
    out = {
        "schema": SCHEMA_VERSION,
        "kind": "cremona",
        "degrees": list(omega.degrees),
        "forward": [format_form(c) for c in omega.forward.components],
        "inverse": [format_form(c) for c in omega.inverse.components],
        "gcd_skipped": omega.forward.gcd_skipped or omega.inverse.gcd_skipped,
    }
    if omega.source_monoid is not None:
        out["monoid"] = format_form(omega.source_monoid.form)
    return out


def map_from_dict(data: Any) -> CremonaMap:
    data = _check_schema(data, "cremona")
    forward = RationalMap(3, 3, _components(_field(data, "forward"), "forward"))
    inverse = RationalMap(3, 3, _components(_field(data, "inverse"), "inverse"))
    monoid = None
    if data.get("monoid"):
        monoid = make_monoid(parse_multipoly(data["monoid"], 5), (0, 4))
    return CremonaMap(forward, inverse, monoid)


def _projection_to_dict(p: ProjectionStep, timings: bool) -> Dict[str, Any]:
    out = {
        "index": p.index,
        "beta": p.beta,
        "d": p.d,
        "seed": p.seed,
        "lambda": surface_to_dict(p.realization.result),
        "lambda_degree": p.realization.expected_degree,
        "monoid": monoid_to_dict(p.monoid),
        "cremona": map_to_dict(p.cremona),
        "surface": surface_to_dict(p.surface),
    }
    if timings:
        out["seconds"] = round(p.seconds, 6)
    return out


def _step_to_dict(step: RectificationStep, timings: bool) -> Dict[str, Any]:
    return {
        "seed": step.seed,
        "ruling_degree": [step.start.ruling_degree, step.result.ruling_degree],
        "normalization": map_to_dict(step.normalization),
        "gamma": format_form(step.gamma),
        "projections": [_projection_to_dict(p, timings) for p in step.projections],
        "result": surface_to_dict(step.result),
    }


def trace_to_dict(
    trace: RectificationTrace, timings: bool = False, degrees: Optional[List[int]] = None
) -> Dict[str, Any]:
    """
    :param timings: Include wall-clock seconds per projection.
    :param degrees: Optional image degrees of the initial and every
        intermediate surface.
    """
    out = {
        "schema": SCHEMA_VERSION,
        "kind": "trace",
        "seed": trace.seed,
        "initial": surface_to_dict(trace.initial),
        "final": surface_to_dict(trace.final),
        "steps": [_step_to_dict(s, timings) for s in trace.steps],
    }
    if degrees is not None:
        out["surface_degrees"] = degrees
    return out


def orbit_to_dict(result: OrbitResult, timings: bool = False) -> Dict[str, Any]:
    return {
        "schema": SCHEMA_VERSION,
        "kind": "orbit",
        "scroll": surface_to_dict(result.scroll),
        "cremona": map_to_dict(result.cremona),
        "monoids": [monoid_to_dict(m) for m in result.monoids],
        "surface": surface_to_dict(result.surface),
        "ruling_degree": result.ruling_degree,
        "status": result.status,
        "message": result.message,
        "trace": trace_to_dict(result.trace, timings) if result.trace else None,
    }


def read_json(path: str) -> Any:
    """
    :raises FileNotFoundError: ``path`` does not exist.
    :raises ValueError: The file is not valid JSON.
    """
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def dump_json(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=True, default=str)
