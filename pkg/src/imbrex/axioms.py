"""Axiom checkers returning structured, replayable reports.

Every report names its axiom with the fixed strings ``PS1`` .. ``PS4``,
``PPS1``, ``PPS2``, ``PPS4``, ``Imb``, ``Imb*`` (composite reports use
``polar``, ``parapolar`` and ``imbrex`` and list their parts).
"""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .geometry import (
    EXHAUSTIVE_LIMIT,
    GeometryError,
    IncidenceGeometry,
    NotPolarError,
    SympSystem,
    _chain_rank,
    collinearity_distances,
    convex_closure,
    enumerate_symps,
    is_connected,
    maximal_singular_subspaces,
    polar_profile,
)

__all__ = [
    "AxiomReport",
    "RankProfile",
    "PreconditionError",
    "check_polar_space",
    "check_strong_parapolar_diam2",
    "check_pps4",
    "check_imb",
    "check_imb_star",
    "is_imbrex",
    "symps_of",
    "replay",
    "far_lines",
]


class PreconditionError(ValueError):
    pass


@dataclass
class AxiomReport:
    axiom: str
    verdict: str
    witness: object = None
    ms: int = 0
    parts: list["AxiomReport"] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def __bool__(self) -> bool:
        return self.passed

    def part(self, axiom: str) -> "AxiomReport":
        for p in self.parts:
            if p.axiom == axiom:
                return p
            try:
                return p.part(axiom)
            except KeyError:
                pass
        raise KeyError(axiom)

    def to_dict(self) -> dict:
        d = {"axiom": self.axiom, "verdict": self.verdict, "witness": _jsonable(self.witness), "ms": self.ms}
        if self.parts:
            d["parts"] = [p.to_dict() for p in self.parts]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "AxiomReport":
        return cls(d["axiom"], d["verdict"], d.get("witness"), d.get("ms", 0),
                   [cls.from_dict(p) for p in d.get("parts", [])])

    def __str__(self) -> str:
        return f"{self.axiom}: {self.verdict}" + (f" {self.witness}" if self.verdict == "fail" else "")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [_jsonable(v) for v in items]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


@contextmanager
def _timer() -> Iterator[list]:
    box = [0]
    t0 = time.perf_counter()
    yield box
    box[0] = int(round((time.perf_counter() - t0) * 1000))


def _report(axiom: str, witness, ok: bool, ms: int, parts=None) -> AxiomReport:
    return AxiomReport(axiom, "pass" if ok else "fail", witness, ms, parts or [])


def symps_of(g: IncidenceGeometry, exhaustive: bool | None = None) -> SympSystem:
    """Symp system of ``g``, cached on the geometry."""
    want = g.point_count <= EXHAUSTIVE_LIMIT if exhaustive is None else exhaustive
    cache = g.meta.setdefault("_symps", [])
    for sys in cache:
        if sys.exhaustive or not want:
            return sys
    sys = enumerate_symps(g, want)
    cache.append(sys)
    return sys


# ---------------------------------------------------------------------------
# polar spaces
# ---------------------------------------------------------------------------
def check_polar_space(g: IncidenceGeometry, expect_rank: int | None = None) -> AxiomReport:
    """PS1-PS4; the certificate carries the realized rank and thickness."""
    with _timer() as t:
        prof = polar_profile(g)
    parts = []
    for ax in ("PS1", "PS2", "PS3", "PS4"):
        w = prof.violations.get(ax)
        if ax == "PS3" and w is None and expect_rank is not None and prof.rank != expect_rank:
            w = {"rank": prof.rank, "expected": expect_rank}
        parts.append(_report(ax, w, w is None, 0))
    ok = all(p.passed for p in parts)
    return _report("polar", {"rank": prof.rank, "thickness": prof.thickness}, ok, t[0], parts)


# ---------------------------------------------------------------------------
# parapolar spaces
# ---------------------------------------------------------------------------
def _collinear_counts(g: IncidenceGeometry, chunk: int = 4096) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(first_line, counts)`` with ``counts[l, x]`` = points of line l collinear with x."""
    inc = g.incidence
    adj = g.adjacency.astype(np.int32)
    for start in range(0, len(g.lines), chunk):
        yield start, np.asarray(inc[start : start + chunk] @ adj)


def check_pps1(g: IncidenceGeometry) -> AxiomReport:
    with _timer() as t:
        seen = {"0": False, "1": False, "all": False}
        witness = None
        inc = g.incidence
        for start, counts in _collinear_counts(g):
            block = inc[start : start + len(counts)].toarray().astype(bool)
            sizes = g.line_sizes[start : start + len(counts), None]
            off = ~block
            seen["0"] |= bool((off & (counts == 0)).any())
            seen["1"] |= bool((off & (counts == 1)).any())
            seen["all"] |= bool((off & (counts == sizes)).any())
            bad = off & (counts != 0) & (counts != 1) & (counts != sizes)
            if bad.any() and witness is None:
                li, x = np.argwhere(bad)[0]
                witness = {"point": int(x), "line": list(g.lines[start + int(li)]),
                           "collinear": int(counts[li, x])}
        if witness is None and not all(seen.values()):
            witness = {"unrealized": [k for k, v in seen.items() if not v]}
    return _report("PPS1", witness if witness else {"cases": seen}, witness is None, t[0])


def check_strong_parapolar_diam2(g: IncidenceGeometry, exhaustive: bool | None = None) -> AxiomReport:
    """Connectivity, PPS1 (all three cases realized), diameter exactly 2, PPS2."""
    with _timer() as t:
        parts = []
        conn = is_connected(g)
        parts.append(_report("connected", None if conn else {"components": "more than one"}, conn, 0))
        parts.append(check_pps1(g))
        adj = g.adjacency
        two = (adj.astype(np.float32) @ adj.astype(np.float32)) > 0
        noncol = ~adj
        np.fill_diagonal(noncol, False)
        far = noncol & ~two
        if far.any():
            x, y = np.argwhere(far)[0]
            dw = {"pair": [int(x), int(y)], "distance": _dist(g, int(x), int(y))}
        elif not noncol.any():
            dw = {"diameter": 1 if g.point_count > 1 else 0}
        else:
            dw = None
        parts.append(_report("diameter", dw if dw else {"diameter": 2}, dw is None, 0))
        if dw is None:
            try:
                sys = symps_of(g, exhaustive)
                w2 = {"symps": len(sys), "exhaustive": sys.exhaustive}
                ok2 = True
            except NotPolarError as e:
                w2 = {"pair": list(e.pair), "violations": e.violations, "rank": e.rank}
                ok2 = False
            except GeometryError as e:
                w2 = {"error": str(e)}
                ok2 = False
            parts.append(_report("PPS2", w2, ok2, 0))
    ok = all(p.passed for p in parts)
    return _report("parapolar", None, ok, t[0], parts)


def _dist(g: IncidenceGeometry, x: int, y: int):
    d = collinearity_distances(g)[x, y]
    return None if np.isinf(d) else int(d)


def check_pps4(g: IncidenceGeometry) -> AxiomReport:
    """Always passes for finite geometries; certifies the longest singular chain found."""
    with _timer() as t:
        maxes = maximal_singular_subspaces(g)
        longest = max((_chain_rank(g, m) for m in maxes), default=0) + 1
    return _report("PPS4", {"max_chain_length": longest, "maximal_singular_subspaces": len(maxes)}, True, t[0])


# ---------------------------------------------------------------------------
# (Imb) and (Imb*)
# ---------------------------------------------------------------------------
@dataclass
class RankProfile:
    ranks: list[int]
    thickness: list[str]

    @property
    def constant(self) -> bool:
        return len(set(self.ranks)) <= 1

    @property
    def symplectic_rank(self) -> int | None:
        return self.ranks[0] if self.ranks and self.constant else None

    @property
    def uniform_thickness(self) -> bool:
        return len(set(self.thickness)) <= 1

    def to_dict(self) -> dict:
        return {"symplectic_rank": self.symplectic_rank if self.constant else "non-constant",
                "ranks": sorted(set(self.ranks)), "thickness": sorted(set(self.thickness)),
                "symps": len(self.ranks)}


def far_lines(g: IncidenceGeometry, x: int) -> np.ndarray:
    """Lines none of whose points is collinear with (or equal to) ``x``."""
    touch = g.adjacency[x].copy()
    touch[x] = True
    counts = g.incidence @ touch.astype(np.int32)
    return np.flatnonzero(counts == 0)


def _pair_verdict(sys: SympSystem, i: int, j: int, star: bool) -> str | None:
    """None if symps i, j satisfy the axiom, else a reason string."""
    g = sys.geometry
    if i == j:
        return "same symp"
    m = sys.membership
    inter = m[i] & m[j]
    idx = np.flatnonzero(inter)
    if not len(idx):
        return "empty intersection"
    sub = g.adjacency[np.ix_(idx, idx)]
    if sub.sum() != len(idx) * (len(idx) - 1) or not g.is_subspace(inter):
        return "intersection not singular"
    if star:
        return None if len(g.lines_inside(inter)) else "intersection contains no line"
    for h in (i, j):
        rest = np.flatnonzero(m[h] & ~inter)
        if len(rest) and g.adjacency[np.ix_(rest, idx)].all(axis=1).any():
            return f"intersection not maximal in symp {h}"
    return None


def _imb_scan(g: IncidenceGeometry, star: bool, sample: int | None, seed: int, exhaustive_report: bool,
              exhaustive: bool | None) -> AxiomReport:
    name = "Imb*" if star else "Imb"
    with _timer() as t:
        pre = check_strong_parapolar_diam2(g, exhaustive)
        if not pre.passed:
            raise PreconditionError("not a strong parapolar space of diameter 2")
        sys = symps_of(g, exhaustive)
        ps = sys.pair_symp
        cache: dict[tuple[int, int], str | None] = {}
        failures = []
        triples = 0
        rng = np.random.default_rng(seed)
        if sample is None:
            xs = range(g.point_count)
        else:
            xs = np.sort(rng.integers(0, g.point_count, size=max(1, min(sample, g.point_count * 4) // 100 + 1)))
        per_x = None if sample is None else max(1, sample // max(1, len(xs)))
        for x in xs:
            x = int(x)
            lids = far_lines(g, x)
            if not len(lids):
                continue
            if per_x is not None:
                lids = np.sort(rng.choice(lids, size=min(per_x, len(lids)), replace=False))
            for size in np.unique(g.line_sizes[lids]):
                sel = lids[g.line_sizes[lids] == size]
                pts = np.array([g.lines[l] for l in sel], dtype=np.int64)
                sids = ps[x, pts]
                for a in range(size):
                    for b in range(a + 1, size):
                        sa, sb = sids[:, a], sids[:, b]
                        triples += len(sel)
                        lo, hi = np.minimum(sa, sb), np.maximum(sa, sb)
                        for key in set(zip(lo.tolist(), hi.tolist())):
                            if key not in cache:
                                cache[key] = _pair_verdict(sys, key[0], key[1], star)
                        bad = [r for r in range(len(sel)) if cache[(int(lo[r]), int(hi[r]))] is not None]
                        for r in bad:
                            failures.append({"x": x, "line": list(g.lines[int(sel[r])]),
                                             "y1": int(pts[r, a]), "y2": int(pts[r, b]),
                                             "symps": [int(sa[r]), int(sb[r])],
                                             "reason": cache[(int(lo[r]), int(hi[r]))]})
                            if not exhaustive_report:
                                break
                        if failures and not exhaustive_report:
                            break
                    if failures and not exhaustive_report:
                        break
                if failures and not exhaustive_report:
                    break
            if failures and not exhaustive_report:
                break
        cert = {"triples": triples, "symp_pairs": len(cache), "sampled": sample is not None}
        if sample is not None:
            cert["seed"] = seed
    if failures:
        w = dict(failures[0])
        if exhaustive_report:
            w["all"] = failures
        return _report(name, w, False, t[0])
    return _report(name, cert, True, t[0])


def check_imb(g: IncidenceGeometry, sample: int | None = None, seed: int = 0, exhaustive_report: bool = False,
              exhaustive: bool | None = None) -> AxiomReport:
    """Symps through x and two points of a far line meet in a common maximal singular subspace."""
    return _imb_scan(g, False, sample, seed, exhaustive_report, exhaustive)


def check_imb_star(g: IncidenceGeometry, sample: int | None = None, seed: int = 0,
                   exhaustive_report: bool = False, exhaustive: bool | None = None) -> AxiomReport:
    """Weaker variant: the intersection only has to be singular and contain a line."""
    return _imb_scan(g, True, sample, seed, exhaustive_report, exhaustive)


def is_imbrex(g: IncidenceGeometry, sample: int | None = None, seed: int = 0,
              exhaustive: bool | None = None) -> tuple[AxiomReport, RankProfile | None]:
    with _timer() as t:
        para = check_strong_parapolar_diam2(g, exhaustive)
        parts = [para]
        profile = None
        if para.passed:
            parts.append(check_pps4(g))
            parts.append(check_imb(g, sample=sample, seed=seed, exhaustive=exhaustive))
            sys = symps_of(g, exhaustive)
            profile = RankProfile([s.rank for s in sys], [s.thickness for s in sys])
            parts.append(_report("constant-rank", profile.to_dict(), profile.constant, 0))
        ok = all(p.passed for p in parts)
    return _report("imbrex", profile.to_dict() if profile else None, ok, t[0], parts), profile


# ---------------------------------------------------------------------------
# witness replay
# ---------------------------------------------------------------------------
def replay(g: IncidenceGeometry, report: AxiomReport) -> bool:
    """Re-derive a failure witness from scratch; True iff the violation is genuine.

    Replays never consult cached symp systems: closures are recomputed.
    """
    if report.passed:
        raise ValueError("only fail verdicts carry counterexamples")
    if report.parts:
        return any(replay(g, p) for p in report.parts if not p.passed)
    w = report.witness
    ax = report.axiom
    adj = g.adjacency
    if ax == "PS1":
        return len(w["line"]) < 3 and tuple(w["line"]) in set(g.lines)
    if ax == "PS2":
        x = w["point"]
        return x is not None and adj[x].sum() == g.point_count - 1
    if ax in ("PS4", "PPS1") and "point" in w:
        x, line = w["point"], w["line"]
        c = int(adj[x, list(line)].sum())
        allowed = {1, len(line)} if ax == "PS4" else {0, 1, len(line)}
        return x not in line and c not in allowed
    if ax == "PPS1":
        cases = {"0": False, "1": False, "all": False}
        for line in g.lines:
            c = adj[:, list(line)].sum(axis=1)
            on = np.zeros(g.point_count, dtype=bool)
            on[list(line)] = True
            cases["0"] |= bool(((c == 0) & ~on).any())
            cases["1"] |= bool(((c == 1) & ~on).any())
            cases["all"] |= bool(((c == len(line)) & ~on).any())
        return any(not cases[k] for k in w["unrealized"])
    if ax == "PS3":
        prof = polar_profile(g)
        if "expected" in w:
            return prof.rank != w["expected"]
        lengths = {_chain_rank(g, m) + 1 for m in maximal_singular_subspaces(g)}
        return len(lengths) > 1 or max(lengths, default=1) < 2
    if ax == "connected":
        return not is_connected(g)
    if ax == "diameter":
        if "pair" in w:
            x, y = w["pair"]
            return not adj[x, y] and not (adj[x] & adj[y]).any()
        return bool((adj | np.eye(g.point_count, dtype=bool)).all())
    if ax == "PPS2":
        if "pair" not in w:
            return False
        x, y = w["pair"]
        try:
            pts = convex_closure(g, x, y)
        except GeometryError:
            return True
        sub, _ = g.induced(pts)
        prof = polar_profile(sub)
        return not prof.ok or prof.rank < 2
    if ax in ("Imb", "Imb*"):
        x, y1, y2 = w["x"], w["y1"], w["y2"]
        line = w["line"]
        if adj[x, line].any() or y1 not in line or y2 not in line:
            return False
        h1, h2 = convex_closure(g, x, y1), convex_closure(g, x, y2)
        inter = sorted(h1 & h2)
        if not inter:
            return True
        mask = g.mask(inter)
        sub = adj[np.ix_(inter, inter)]
        if sub.sum() != len(inter) * (len(inter) - 1) or not g.is_subspace(mask):
            return True
        if ax == "Imb*":
            return len(g.lines_inside(mask)) == 0
        for h in (h1, h2):
            rest = sorted(h - set(inter))
            if rest and adj[np.ix_(rest, inter)].all(axis=1).any():
                return True
        return False
    raise ValueError(f"no replay rule for axiom {ax!r}")
