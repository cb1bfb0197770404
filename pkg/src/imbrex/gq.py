"""Generalized quadrangles: classification, perps, regularity, O'Nan configurations."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .geometry import GeometryError, IncidenceGeometry, build_geometry, polar_profile

__all__ = [
    "GQVerdict",
    "Regularity",
    "OnanConfig",
    "classify_gq",
    "dual_geometry",
    "concurrency",
    "perp",
    "is_regular_pair",
    "is_ideal_subquadrangle",
    "find_onan",
]


@dataclass(frozen=True)
class GQVerdict:
    """``kind`` is one of ``thick``, ``grid``, ``dual_grid``, ``not_a_gq``."""

    kind: str
    params: tuple[int, ...] = ()
    witness: object = None

    @property
    def is_gq(self) -> bool:
        return self.kind != "not_a_gq"

    def __str__(self) -> str:
        if self.kind == "not_a_gq":
            return f"not_a_gq({self.witness})"
        return f"{self.kind}{self.params}"


def dual_geometry(g: IncidenceGeometry) -> IncidenceGeometry:
    """Points become lines; only points on at least two lines give dual lines."""
    lines = [t for t in g.lines_through if len(t) >= 2]
    return build_geometry(lines, len(g.lines), f"dual({g.name})") if lines else IncidenceGeometry(len(g.lines), ())


def _grid_shape(g: IncidenceGeometry) -> tuple[int, int] | None:
    if not g.lines or any(len(t) != 2 for t in g.lines_through):
        return None
    conc = concurrency(g)
    # two parallel classes: lines disjoint within a class, meeting once across
    cls_a = np.flatnonzero(~conc[0])
    cls_b = np.flatnonzero(conc[0])
    cls_b = cls_b[cls_b != 0]
    a = np.concatenate([[0], cls_a])
    if len(a) < 2 or len(cls_b) < 2:
        return None
    if conc[np.ix_(a, a)].sum() != len(a) or conc[np.ix_(cls_b, cls_b)].sum() != len(cls_b):
        return None
    if not conc[np.ix_(a, cls_b)].all():
        return None
    inc = g.incidence.astype(np.int32)
    meet = (inc @ inc.T).toarray()
    if not (meet[np.ix_(a, cls_b)] == 1).all() or g.point_count != len(a) * len(cls_b):
        return None
    return tuple(sorted((len(a), len(cls_b))))


def classify_gq(g: IncidenceGeometry) -> GQVerdict:
    """Classify ``g`` as a thick quadrangle, a grid, a dual grid, or none of these."""
    shape = _grid_shape(g)
    if shape is not None:
        return GQVerdict("grid", shape)
    prof = polar_profile(g)
    if prof.ok and prof.rank == 2:
        s = set(int(x) - 1 for x in g.line_sizes)
        t = set(len(x) - 1 for x in g.lines_through)
        if len(s) == 1 and len(t) == 1:
            return GQVerdict("thick", (s.pop(), t.pop()))
        return GQVerdict("thick", (max(s), max(t)), {"nonuniform_order": True})  # pragma: no cover
    if g.lines:
        dual = dual_geometry(g)
        if dual.point_count == len(g.lines) and _grid_shape(dual) is not None:
            return GQVerdict("dual_grid", _grid_shape(dual))
    witness = dict(prof.violations)
    if prof.ok:
        witness = {"PS3": {"rank": prof.rank}}
    return GQVerdict("not_a_gq", (), witness)


def concurrency(g: IncidenceGeometry) -> np.ndarray:
    """Boolean ``lines x lines`` matrix; every line is concurrent with itself."""
    cached = g.meta.get("_concurrency")
    if cached is None:
        inc = g.incidence.astype(np.int32)
        cached = (inc @ inc.T).toarray() > 0
        cached.flags.writeable = False
        g.meta["_concurrency"] = cached
    return cached


def perp(g: IncidenceGeometry, lines: Iterable[int]) -> tuple[int, ...]:
    """Lines concurrent with every member of ``lines``."""
    t = list(lines)
    if not t:
        raise ValueError("perp of an empty line set")
    conc = concurrency(g)
    return tuple(int(i) for i in np.flatnonzero(conc[t].all(axis=0)))


@dataclass(frozen=True)
class Regularity:
    regular: bool
    perp: tuple[int, ...]
    double_perp: tuple[int, ...]
    witness: object = None


def is_regular_pair(g: IncidenceGeometry, a: int, b: int) -> Regularity:
    """Test ``({a,b}^perp)^perp == {c,d}^perp`` for distinct ``c, d`` in ``{a,b}^perp``."""
    conc = concurrency(g)
    if conc[a, b]:
        raise GeometryError("pair must be non-concurrent")
    p = perp(g, (a, b))
    pp = perp(g, p) if p else tuple(range(len(g.lines)))
    if len(p) < 2:
        return Regularity(False, p, pp, {"perp_size": len(p)})
    for c, d in itertools.combinations(p, 2):
        if perp(g, (c, d)) == pp:
            return Regularity(True, p, pp)
    return Regularity(False, p, pp, {"pairs_tried": len(p) * (len(p) - 1) // 2})


def is_ideal_subquadrangle(g: IncidenceGeometry, points: Iterable[int], lines: Iterable[int]) -> tuple[bool, object]:
    """``(ideal, witness)``; witness is ``(point, missing_line)`` when not ideal."""
    pts = sorted(set(int(p) for p in points))
    lids = sorted(set(int(l) for l in lines))
    pos = {p: i for i, p in enumerate(pts)}
    sub_lines = []
    for l in lids:
        inside = [pos[p] for p in g.lines[l] if p in pos]
        if len(inside) < 2:
            raise GeometryError(f"line {l} meets the subquadrangle in fewer than 2 points")
        sub_lines.append(inside)
    sub = build_geometry(sub_lines, len(pts))
    verdict = classify_gq(sub)
    if not verdict.is_gq:
        raise GeometryError(f"substructure is not a generalized quadrangle: {verdict.witness}")
    lset = set(lids)
    for p in pts:
        for l in g.lines_through[p]:
            if int(l) not in lset:
                return False, (p, int(l))
    return True, None


@dataclass(frozen=True)
class OnanConfig:
    lines: tuple[int, int, int, int]
    points: tuple[int, ...]
    closing: bool


def find_onan(g: IncidenceGeometry, subset: Iterable[int] | None = None, mode: str = "nonclosing",
              first: bool = False) -> list[OnanConfig]:
    """O'Nan configurations among the lines lying inside ``subset``.

    Non-closing: four lines, exactly one disjoint pair, the other five pairs
    meeting in five distinct points.  Closing: all six pairs meet, six
    distinct points.
    """
    if mode not in ("nonclosing", "closing", "any"):
        raise ValueError(f"unknown mode {mode!r}")
    if subset is None:
        lids = np.arange(len(g.lines))
    else:
        lids = g.lines_inside(g.mask(subset))
    sets = [set(g.lines[int(l)]) for l in lids]
    k = len(lids)
    meet = np.full((k, k), -1, dtype=np.int64)
    for i in range(k):
        for j in range(i + 1, k):
            common = sets[i] & sets[j]
            if len(common) == 1:
                meet[i, j] = meet[j, i] = next(iter(common))
            elif len(common) > 1:
                meet[i, j] = meet[j, i] = -2
    out: list[OnanConfig] = []
    for i, j, l in itertools.combinations(range(k), 3):
        m3 = [meet[i, j], meet[i, l], meet[j, l]]
        if -2 in m3 or m3.count(-1) > 1:
            continue
        for h in range(l + 1, k):
            ms = m3 + [meet[i, h], meet[j, h], meet[l, h]]
            if -2 in ms:
                continue
            disjoint = ms.count(-1)
            pts = [p for p in ms if p >= 0]
            if len(set(pts)) != len(pts):
                continue
            closing = disjoint == 0
            if disjoint > 1 or (mode == "nonclosing" and closing) or (mode == "closing" and not closing):
                continue
            out.append(OnanConfig(tuple(int(lids[x]) for x in (i, j, l, h)), tuple(sorted(int(p) for p in pts)),
                                  closing))
            if first:
                return out
    return out
