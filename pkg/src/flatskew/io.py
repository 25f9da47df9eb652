"""JSON file formats for surfaces and cut collections, plus result encoders.

Rationals are always lowest-terms strings ``"a/b"`` (``"a"`` for integers).
"""

from __future__ import annotations

import json

import jsonschema

from .cuts import Cut, CutCollection
from .errors import SchemaError
from .groups import GroupElement, GroupSpec
from .rational import fmt, parse_rational
from .surface import SquareTiledSurface, SurfacePoint, build_surface

RATIONAL = {"type": "string", "pattern": r"^-?\d+(/\d+)?$"}
INT_STRING = {"type": "string", "pattern": r"^-?\d+$"}

SURFACE_SCHEMA = {
    "type": "object",
    "required": ["k", "h", "v"],
    "properties": {
        "k": {"type": "integer", "minimum": 1},
        "h": {"type": "array", "items": {"type": "integer"}},
        "v": {"type": "array", "items": {"type": "integer"}},
        "marked": {
            "type": "object",
            "required": ["square", "x", "y"],
            "properties": {"square": {"type": "integer"}, "x": RATIONAL, "y": RATIONAL},
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}

_VALUE = {
    "type": "object",
    "properties": {
        "free": {"type": "array", "items": {"type": "integer"}},
        "torsion": {"type": "array", "items": {"type": "integer"}},
    },
    "additionalProperties": False,
}

CUTS_SCHEMA = {
    "type": "object",
    "required": ["group", "cuts"],
    "properties": {
        "group": {
            "type": "object",
            "required": ["free"],
            "properties": {
                "free": {"type": "integer", "minimum": 0},
                "torsion": {"type": "array", "items": {"type": "integer", "minimum": 2}},
            },
            "additionalProperties": False,
        },
        "cuts": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["xp", "xm", "slope", "len", "value"],
                "properties": {
                    "xp": {"type": "array", "items": RATIONAL, "minItems": 2, "maxItems": 2},
                    "xm": {"type": "array", "items": RATIONAL, "minItems": 2, "maxItems": 2},
                    "slope": {"type": "array", "items": INT_STRING, "minItems": 2,
                              "maxItems": 2},
                    "len": RATIONAL,
                    "value": _VALUE,
                },
                "additionalProperties": False,
            },
        },
    },
    "additionalProperties": False,
}


def _validate(data, schema, what):
    try:
        jsonschema.validate(data, schema)
    except jsonschema.ValidationError as exc:
        path = "/".join(map(str, exc.absolute_path)) or "<root>"
        raise SchemaError(f"{what}: {path}: {exc.message}") from None


def _load_json(path_or_text):
    try:
        if isinstance(path_or_text, (dict, list)):
            return path_or_text
        with open(path_or_text, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path_or_text}: invalid JSON ({exc})") from None


# -- surfaces ----------------------------------------------------------------------

def surface_from_dict(data) -> SquareTiledSurface:
    _validate(data, SURFACE_SCHEMA, "surface")
    marked = None
    if "marked" in data:
        m = data["marked"]
        try:
            marked = SurfacePoint(m["square"], parse_rational(m["x"]), parse_rational(m["y"]))
        except ValueError as exc:
            raise SchemaError(f"surface: marked point: {exc}") from None
    if len(data["h"]) != data["k"] or len(data["v"]) != data["k"]:
        raise SchemaError("surface: permutation length differs from k")
    return build_surface(data["k"], data["h"], data["v"], marked)


def surface_to_dict(surface: SquareTiledSurface):
    m = surface.marked
    return {"k": surface.k, "h": list(surface.h), "v": list(surface.v),
            "marked": {"square": m.square, "x": fmt(m.x), "y": fmt(m.y)}}


def load_surface(path) -> SquareTiledSurface:
    return surface_from_dict(_load_json(path))


# -- cuts ----------------------------------------------------------------------------

def group_to_dict(group: GroupSpec):
    return {"free": group.free_rank, "torsion": list(group.torsion)}


def element_to_dict(g: GroupElement):
    return {"free": list(g.free), "torsion": list(g.torsion)}


def element_from_dict(data, group: GroupSpec):
    free = data.get("free", [])
    tors = data.get("torsion", [])
    if len(free) != group.free_rank or len(tors) != len(group.torsion):
        raise SchemaError("value does not match the group shape")
    return group.element(free, tors)


def cuts_from_dict(data) -> CutCollection:
    _validate(data, CUTS_SCHEMA, "cuts")
    group = GroupSpec(data["group"]["free"], tuple(data["group"].get("torsion", ())))
    out = []
    for i, c in enumerate(data["cuts"]):
        try:
            xp = tuple(parse_rational(t) for t in c["xp"])
            xm = tuple(parse_rational(t) for t in c["xm"])
            slope = tuple(int(t) for t in c["slope"])
            out.append(Cut(xp, xm, slope, parse_rational(c["len"]),
                           element_from_dict(c["value"], group)))
        except SchemaError as exc:
            raise SchemaError(f"cuts[{i}]: {exc}") from None
        except ValueError as exc:
            raise SchemaError(f"cuts[{i}]: {exc}") from None
    return CutCollection(group, tuple(out))


def cuts_to_dict(cuts: CutCollection):
    return {
        "group": group_to_dict(cuts.group),
        "cuts": [{"xp": [fmt(a) for a in c.start_plus], "xm": [fmt(a) for a in c.start_minus],
                  "slope": [str(a) for a in c.slope], "len": fmt(c.length),
                  "value": element_to_dict(c.value)} for c in cuts.cuts],
    }


def load_cuts(path) -> CutCollection:
    return cuts_from_dict(_load_json(path))


# -- flags ---------------------------------------------------------------------------

def parse_point(text) -> SurfacePoint:
    """``"sq,x,y"`` -> SurfacePoint."""
    parts = [t.strip() for t in str(text).split(",")]
    if len(parts) != 3:
        raise SchemaError(f"point {text!r} must look like 'square,x,y'")
    try:
        return SurfacePoint(int(parts[0]), parse_rational(parts[1]), parse_rational(parts[2]))
    except SchemaError:
        raise
    except ValueError as exc:
        raise SchemaError(f"point {text!r}: {exc}") from None


def parse_transversal(text):
    parts = [t.strip() for t in str(text).split(",")]
    if len(parts) != 3:
        raise SchemaError(f"transversal {text!r} must look like 'square,a/b,c/d'")
    try:
        s = int(parts[0])
    except ValueError:
        raise SchemaError(f"transversal {text!r}: bad square") from None
    lo, hi = parse_rational(parts[1]), parse_rational(parts[2])
    if not 0 <= lo < hi <= 1:
        raise SchemaError(f"transversal {text!r} must satisfy 0 <= a < b <= 1")
    return s, lo, hi


# -- result encoders ---------------------------------------------------------------------

def point_to_dict(x: SurfacePoint):
    return {"square": x.square, "x": fmt(x.x), "y": fmt(x.y)}


def cylinder_to_dict(cyl):
    return {"crossings": cyl.crossings, "width": fmt(cyl.width)}


def iet_to_dict(iet, transversal=None):
    out = {"lengths": [fmt(a) for a in iet.lengths], "permutation": list(iet.permutation),
           "total": fmt(iet.total), "return_heights": list(iet.return_heights)}
    if transversal is not None:
        s, a, b = transversal
        out["transversal"] = [s, fmt(a), fmt(b)]
    return out


def profile_to_dict(profile):
    return {"period": profile.period, "width": fmt(profile.width),
            "breakpoints": [fmt(b) for b in profile.breakpoints],
            "values": [element_to_dict(g) for g in profile.values],
            "integral": [fmt(a) for a in profile.integral()]}


def candidate_to_dict(cand):
    lo, hi = cand.quality_bounds
    return {"dir": str(cand.direction), "crossings": cand.crossings, "width": fmt(cand.width),
            "quality": [fmt(lo), fmt(hi)], "single_cylinder": cand.is_single_cylinder}


def witness_to_dict(rep):
    return {"dir": str(rep.direction), "target_cut": rep.target_cut,
            "plus_fraction": fmt(rep.plus_fraction), "minus_fraction": fmt(rep.minus_fraction),
            "other_fraction": fmt(rep.other_fraction),
            "boundary_margin": fmt(rep.boundary_margin),
            "plus_regions": [[fmt(a), fmt(b)] for a, b in rep.plus_regions],
            "minus_regions": [[fmt(a), fmt(b)] for a, b in rep.minus_regions]}


def dumps(obj):
    return json.dumps(obj, sort_keys=True, indent=2)

