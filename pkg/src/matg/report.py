"""Machine-readable reports and their text rendering.

Every command produces one JSON-serialisable dict.  The text form is
rendered from that dict only.  Timestamps never enter the dict; the text
form carries one in its first line.
"""

from __future__ import annotations

import datetime as _dt
import json

import numpy as np

from . import groups as mg
from .body import BodyGrid, MaterialGroupoid, is_discretely_homogeneous, is_uniform

SCHEMA = "matg-report/1"


def clean(obj):
    """Plain JSON types, with floats rounded to 12 significant digits."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if v != v or v in (float("inf"), float("-inf")):
            return str(v)
        v = float(f"{v:.12g}")
        return 0.0 if v == 0 else v
    return obj


def envelope(command: str, inputs: dict, settings: dict, result: dict) -> dict:
    return clean({"schema": SCHEMA, "command": command, "inputs": inputs,
                  "settings": settings, "result": result})


def body_summary(g: MaterialGroupoid) -> dict:
    """Single-body verdicts: uniformity, homogeneity and pointwise classes."""
    uv = is_uniform(g)
    out = {"points": len(g.objects), "uniform": uv.uniform, "components": uv.components}
    if uv.uniform:
        hv = is_discretely_homogeneous(g)
        out["homogeneous"] = hv.status
        out["homogeneity_reason"] = hv.reason
        out["homogeneity_defect"] = hv.max_defect
    else:
        out["homogeneous"] = "not_applicable"
    out["vertex_groups"] = _grouped_classes(g)
    return out


def _grouped_classes(g: MaterialGroupoid) -> list[dict]:
    """Pointwise classes run-length grouped by identical label."""
    rows: list[dict] = []
    for x in g.objects:
        cls = mg.class_of_group(g.vertex[x])
        kind = g.vertex[x].kind
        if rows and rows[-1]["class"] == cls.label and rows[-1]["kind"] == kind:
            rows[-1]["points"].append(x)
        else:
            rows.append({"class": cls.label, "kind": kind, "points": [x]})
    return rows


def to_json(report: dict) -> str:
    return json.dumps(report, indent=1, sort_keys=True) + "\n"


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, list) and len(v) > 12 and all(isinstance(x, (int, list)) for x in v):
        return f"[{len(v)} items]"
    return json.dumps(v) if isinstance(v, (list, dict)) else str(v)


def _lines(d: dict, indent: int = 0):
    pad = "  " * indent
    for k, v in d.items():
        if isinstance(v, dict) and v:
            yield f"{pad}{k}:"
            yield from _lines(v, indent + 1)
        else:
            yield f"{pad}{k}: {_fmt(v)}"


def to_text(report: dict, now: _dt.datetime | None = None) -> str:
    now = now or _dt.datetime.now(_dt.timezone.utc)
    head = f"# generated {now.isoformat(timespec='seconds')}"
    return "\n".join([head, *_lines(report)]) + "\n"


def describe_body(body: BodyGrid) -> dict:
    return {"dimension": body.dim, "points": len(body.points),
            "description": body.metadata.get("description", "")}
