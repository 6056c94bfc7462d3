"""JSON map specs, scene specs and reports.

Rationals travel as ``"p/q"`` strings.  Map spec layout::

    {
      "name": "map-g",
      "notes": "...",
      "breakpoints": ["0", "1/2", "1"],
      "pieces": [
        {"slope": "-2/5", "intercept": "3/5", "lo_closed": true, "hi_closed": false},
        {"slope": "1/5", "intercept": "-1/10", "lo_closed": true, "hi_closed": false}
      ]
    }

Scene spec layout::

    {
      "name": "right-triangle",
      "vertices": [["0", "0"], ["1", "0"], ["0", "1"]],
      "fields": [{"edge": 0, "lo": "0", "hi": "1", "direction": ["1", "1"]}, ...],
      "approximate": false
    }
"""

from __future__ import annotations

import json
from pathlib import Path

from .billiard import FieldPiece, PolygonScene
from .core import AffinePiece, PiecewiseAffineContraction, validate
from .errors import InvalidMap, SpecError
from .intervals import SidedInterval, fmt, rational


def _load(source) -> dict:
    if isinstance(source, dict):
        return source
    text = Path(source).read_text() if not isinstance(source, str) or not source.lstrip().startswith("{") else source
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from None
    if not isinstance(data, dict):
        raise SpecError("top level must be an object", "$")
    return data


def _q(value, where):
    if isinstance(value, float):
        raise SpecError(f"{value!r} is a float; write rationals as \"p/q\" strings", where)
    try:
        return rational(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise SpecError(str(exc), where) from None


def _flag(value, where):
    if not isinstance(value, bool):
        raise SpecError("expected true or false", where)
    return value


def _field(obj, key, where):
    if key not in obj:
        raise SpecError(f"missing field {key!r}", where)
    return obj[key]


def parse_map(source, check: bool = True) -> PiecewiseAffineContraction:
    """Map from a spec dict, JSON text or path; raises ``SpecError`` or ``InvalidMap``."""
    data = _load(source)
    xs = _field(data, "breakpoints", "$")
    pieces = _field(data, "pieces", "$")
    if not isinstance(xs, list) or not isinstance(pieces, list):
        raise SpecError("breakpoints and pieces must be lists", "$")
    xs = [_q(x, f"breakpoints[{i}]") for i, x in enumerate(xs)]
    if len(xs) != len(pieces) + 1:
        raise SpecError(f"{len(pieces)} pieces need {len(pieces) + 1} breakpoints, got {len(xs)}", "breakpoints")
    out = []
    for i, pc in enumerate(pieces):
        where = f"pieces[{i}]"
        if not isinstance(pc, dict):
            raise SpecError("expected an object", where)
        slope = _q(_field(pc, "slope", where), where + ".slope")
        intercept = _q(_field(pc, "intercept", where), where + ".intercept")
        lo_closed = _flag(pc.get("lo_closed", True), where + ".lo_closed")
        hi_closed = _flag(pc.get("hi_closed", False), where + ".hi_closed")
        if not xs[i] < xs[i + 1]:
            raise SpecError("breakpoints must increase", f"breakpoints[{i + 1}]")
        out.append(AffinePiece(slope, intercept, SidedInterval(xs[i], xs[i + 1], lo_closed, hi_closed)))
    f = PiecewiseAffineContraction(out, name=data.get("name"))
    f.notes = data.get("notes")
    if check:
        rep = validate(f)
        if not rep.ok:
            raise InvalidMap(rep)
    return f


def map_to_spec(f: PiecewiseAffineContraction) -> dict:
    spec = {
        "name": f.name,
        "breakpoints": [fmt(x) for x in f.breakpoints],
        "pieces": [
            {
                "slope": fmt(p.slope),
                "intercept": fmt(p.intercept),
                "lo_closed": p.domain.lo_closed,
                "hi_closed": p.domain.hi_closed,
            }
            for p in f.pieces
        ],
    }
    if f.notes:
        spec["notes"] = f.notes
    return spec


def parse_scene(source) -> PolygonScene:
    data = _load(source)
    verts = _field(data, "vertices", "$")
    fields = _field(data, "fields", "$")
    if not isinstance(verts, list) or not isinstance(fields, list):
        raise SpecError("vertices and fields must be lists", "$")
    vs = []
    for i, v in enumerate(verts):
        if not isinstance(v, list) or len(v) != 2:
            raise SpecError("a vertex is a pair [x, y]", f"vertices[{i}]")
        vs.append((_q(v[0], f"vertices[{i}][0]"), _q(v[1], f"vertices[{i}][1]")))
    fps = []
    for i, fp in enumerate(fields):
        where = f"fields[{i}]"
        if not isinstance(fp, dict):
            raise SpecError("expected an object", where)
        edge = _field(fp, "edge", where)
        if not isinstance(edge, int) or isinstance(edge, bool):
            raise SpecError("edge must be an integer", where + ".edge")
        d = _field(fp, "direction", where)
        if not isinstance(d, list) or len(d) != 2:
            raise SpecError("direction is a pair [dx, dy]", where + ".direction")
        fps.append(
            FieldPiece(
                edge,
                _q(fp.get("lo", "0"), where + ".lo"),
                _q(fp.get("hi", "1"), where + ".hi"),
                (_q(d[0], where + ".direction[0]"), _q(d[1], where + ".direction[1]")),
            )
        )
    approximate = _flag(data.get("approximate", False), "approximate")
    return PolygonScene(vs, fps, name=data.get("name"), approximate=approximate)


def dumps(obj) -> str:
    """Deterministic JSON text with a trailing newline."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj))
    return path
