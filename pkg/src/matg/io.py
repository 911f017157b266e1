"""Body description files (JSON).

Layout::

    {
      "dimension": 2,
      "metadata": {...},                        # optional
      "points": [
        {"pos": [1, 1], "mode": "symbolic",
         "group": {"type": "SO", "n": 2}, "transplant": [[1, 0], [0, 1]],
         "material": "default"},                # material is optional
        {"pos": [2, 1], "mode": "numeric",
         "family": "NeoHookean", "parameters": {"mu": 1, "lam": 1},
         "pre": [[...]]}                         # pre is optional
      ]
    }

Matrices are row-major nested lists.  Point ids follow list order.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from . import groups as mg
from .body import BodyGrid, MaterialPoint, Numeric, Symbolic
from .constitutive import ConstitutiveModel


class BodyParseError(ValueError):
    def __init__(self, msg: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(msg + where)
        self.line = line
        self.column = column


def _point_from_dict(i: int, d: dict, dim: int) -> MaterialPoint:
    try:
        pos = tuple(int(v) for v in d["pos"])
        mode = d.get("mode", "symbolic")
        material = str(d.get("material", "default"))
        if mode == "symbolic":
            data = Symbolic(mg.group_from_dict(d["group"], dim), np.array(d["transplant"], dtype=float))
        elif mode == "numeric":
            data = Numeric(ConstitutiveModel.from_dict(
                {"family": d["family"], "parameters": d["parameters"], "dim": dim,
                 "pre": d.get("pre")}, dim))
        else:
            raise BodyParseError(f"point {i}: unknown mode {mode!r}")
    except KeyError as e:
        raise BodyParseError(f"point {i}: missing field {e.args[0]!r}") from None
    except mg.UnsupportedPair:
        raise
    except (TypeError, ValueError) as e:
        if isinstance(e, BodyParseError):
            raise
        raise BodyParseError(f"point {i}: {e}") from None
    return MaterialPoint(i, pos, data, material)


def body_from_dict(d: dict) -> BodyGrid:
    if not isinstance(d, dict) or "points" not in d or "dimension" not in d:
        raise BodyParseError("body file needs 'dimension' and 'points'")
    dim = int(d["dimension"])
    if dim not in (2, 3):
        raise BodyParseError(f"dimension must be 2 or 3, got {dim}")
    pts = tuple(_point_from_dict(i, p, dim) for i, p in enumerate(d["points"]))
    try:
        return BodyGrid(dim, pts, dict(d.get("metadata", {})))
    except ValueError as e:
        raise BodyParseError(str(e)) from None


def point_to_dict(p: MaterialPoint) -> dict:
    out = {"pos": list(p.grid_pos)}
    if isinstance(p.data, Symbolic):
        out.update(mode="symbolic", group=mg.group_to_dict(p.data.group),
                   transplant=p.data.transplant.tolist())
    else:
        m = p.data.model
        out.update(mode="numeric", family=m.family, parameters=dict(m.params))
        if m.pre is not None:
            out["pre"] = m.pre.tolist()
    if p.material != "default":
        out["material"] = p.material
    return out


def body_to_dict(body: BodyGrid) -> dict:
    out = {"dimension": body.dim}
    if body.metadata:
        out["metadata"] = dict(body.metadata)
    out["points"] = [point_to_dict(p) for p in body.points]
    return out


def loads(text: str) -> BodyGrid:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise BodyParseError(e.msg, e.lineno, e.colno) from None
    return body_from_dict(d)


def dumps(body: BodyGrid) -> str:
    return json.dumps(body_to_dict(body), indent=1) + "\n"


def load(path) -> BodyGrid:
    return loads(Path(path).read_text())


def save(body: BodyGrid, path) -> None:
    Path(path).write_text(dumps(body))


def digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def bodies_equal(a: BodyGrid, b: BodyGrid) -> bool:
    """Structural equality; matrices compared exactly."""
    return body_to_dict(a) == body_to_dict(b)
