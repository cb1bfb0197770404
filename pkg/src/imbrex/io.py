"""Canonical JSON formats for geometries, embedded point sets and spreads."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .galois import GF
from .geometry import GeometryError, IncidenceGeometry, build_geometry
from .mm import EmbeddedMMSet

__all__ = [
    "FormatError",
    "dumps",
    "geometry_to_dict",
    "geometry_from_dict",
    "embedded_to_dict",
    "embedded_from_dict",
    "spread_to_dict",
    "load",
    "save",
    "sha256_file",
]


class FormatError(ValueError):
    pass


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def geometry_to_dict(g: IncidenceGeometry) -> dict:
    return {"name": g.name, "point_count": g.point_count, "lines": sorted(sorted(int(p) for p in l) for l in g.lines)}


def geometry_from_dict(d: dict) -> IncidenceGeometry:
    try:
        return build_geometry(d["lines"], int(d["point_count"]), d.get("name", ""))
    except KeyError as e:
        raise FormatError(f"geometry JSON lacks field {e}") from None
    except (GeometryError, TypeError) as e:
        raise FormatError(str(e)) from None


def embedded_to_dict(e: EmbeddedMMSet) -> dict:
    d = e.to_dict()
    d["xi"] = sorted(sorted(int(p) for p in x) for x in e.xi)
    d["name"] = e.name
    return d


def embedded_from_dict(d: dict) -> EmbeddedMMSet:
    try:
        f = GF(int(d["field"]["p"]) ** int(d["field"]["k"]))
        pts = np.array(d["points"], dtype=np.int64)
        n = int(d["ambient_dim"])
        if pts.ndim != 2 or pts.shape[1] != n + 1:
            raise FormatError("point coordinates do not match ambient_dim")
        if (pts < 0).any() or (pts >= f.q).any():
            raise FormatError("coordinates outside the field")
        return EmbeddedMMSet(d.get("name", "embedded"), f, n, pts, None, [tuple(x) for x in d.get("xi", [])],
                             int(d["d"]), int(d["r"]))
    except KeyError as e:
        raise FormatError(f"embedded JSON lacks field {e}") from None


def spread_to_dict(spread) -> dict:
    return spread.to_dict()


def load(path: str | Path) -> IncidenceGeometry | EmbeddedMMSet:
    """Read either kind of file; embedded files are recognised by their ``field`` key."""
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: not JSON ({e})") from None
    if not isinstance(d, dict):
        raise FormatError(f"{path}: expected a JSON object")
    return embedded_from_dict(d) if "field" in d else geometry_from_dict(d)


def save(obj, path: str | Path) -> None:
    if isinstance(obj, IncidenceGeometry):
        d = geometry_to_dict(obj)
    elif isinstance(obj, EmbeddedMMSet):
        d = embedded_to_dict(obj)
    else:
        d = obj
    Path(path).write_text(dumps(d))


def sha256_file(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
