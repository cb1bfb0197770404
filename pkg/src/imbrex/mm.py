"""Coordinatized point sets with a family of subspaces (Mazzocca-Melone data).

An :class:`EmbeddedMMSet` holds a point set ``X`` of PG(N, q) and a family
``xi`` of subspaces, each given by a generating set of points of ``X``.  The
lines of the abstract geometry are the projective lines fully inside ``X``.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from functools import cached_property

import networkx as nx
import numpy as np

from .axioms import AxiomReport, PreconditionError, check_polar_space
from .galois import FiniteField, ProjSubspace, nullspace, rank, rref
from .geometry import IncidenceGeometry, build_geometry, enumerate_symps

__all__ = [
    "EmbeddedMMSet",
    "TangentData",
    "full_lines",
    "x_collinear",
    "tangent_space",
    "check_mm_axioms",
    "check_lmm3",
    "residue",
    "abstract_geometry",
    "discover_xi",
    "incidence_graph",
    "structurally_isomorphic",
]


class _Lookup:
    """Normalized coordinate rows -> index (-1 when absent)."""

    def __init__(self, f: FiniteField, coords: np.ndarray):
        self.f = f
        codes = f.encode(coords)
        self.order = np.argsort(codes)
        self.codes = codes[self.order]

    def find(self, vecs: np.ndarray) -> np.ndarray:
        shape = vecs.shape[:-1]
        flat = vecs.reshape(-1, vecs.shape[-1])
        nz = flat.any(axis=1)
        codes = self.f.encode(self.f.normalize(flat))
        pos = np.minimum(np.searchsorted(self.codes, codes), len(self.codes) - 1)
        hit = (self.codes[pos] == codes) & nz
        return np.where(hit, self.order[pos], -1).reshape(shape)


def full_lines(f: FiniteField, coords: np.ndarray) -> list[tuple[int, ...]]:
    """All projective lines whose every point lies in the point set ``coords``."""
    coords = f.normalize(np.asarray(coords, dtype=np.int64))
    look = _Lookup(f, coords)
    scalars = np.arange(1, f.q)
    out = []
    for i in range(len(coords)):
        ys = coords[i + 1 :]
        if not len(ys):
            break
        # points x + s*y for nonzero s; together with x, y they fill the line
        others = f.add_table[coords[i][None, None, :], f.mul_table[scalars[:, None, None], ys[None, :, :]]]
        ids = look.find(others)  # (q-1, m)
        ok = (ids >= 0).all(axis=0)
        j_ids = np.arange(i + 1, len(coords))
        # keep each line once: from its two smallest point ids
        ok &= (ids > j_ids[None, :]).all(axis=0)
        for col in np.flatnonzero(ok):
            out.append(tuple(sorted([i, int(j_ids[col])] + ids[:, col].tolist())))
    return sorted(out)


@dataclass
class EmbeddedMMSet:
    name: str
    field: FiniteField
    ambient_dim: int
    points: np.ndarray
    geometry: IncidenceGeometry | None = None
    xi: list[tuple[int, ...]] = field(default_factory=list)
    d: int = 0
    r: int = 0

    def __post_init__(self) -> None:
        self.points = self.field.normalize(np.asarray(self.points, dtype=np.int64))
        if self.geometry is None:
            self.geometry = build_geometry(full_lines(self.field, self.points), len(self.points), self.name)

    def __len__(self) -> int:
        return len(self.points)

    @cached_property
    def lookup(self) -> _Lookup:
        return _Lookup(self.field, self.points)

    @cached_property
    def spaces(self) -> list[ProjSubspace]:
        return [ProjSubspace.span(self.field, self.ambient_dim, self.points[list(x)]) for x in self.xi]

    @cached_property
    def membership(self) -> np.ndarray:
        """``membership[i, p]``: point p of X lies in the i-th member of Xi."""
        f = self.field
        m = np.zeros((len(self.xi), len(self.points)), dtype=bool)
        for i, s in enumerate(self.spaces):
            ann = nullspace(s.matrix, f)
            if not len(ann):
                m[i] = True
            else:
                m[i] = ~f.matmul(self.points, ann.T).any(axis=1)
        return m

    @cached_property
    def pair_xi(self) -> np.ndarray:
        """``[x, y]`` lookup: index of the unique member through a non-collinear pair, else -1."""
        out = np.full((len(self), len(self)), -1, dtype=np.int64)
        for i, row in enumerate(self.membership):
            pts = np.flatnonzero(row)
            out[np.ix_(pts, pts)] = i
        adj = self.geometry.adjacency
        out[adj] = -1
        np.fill_diagonal(out, -1)
        return out

    @property
    def proper(self) -> bool:
        return len(self.xi) >= 2

    def xi_points(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.membership[i])

    def to_dict(self) -> dict:
        return {"field": {"p": self.field.p, "k": self.field.k}, "ambient_dim": self.ambient_dim,
                "points": self.points.tolist(), "xi": [list(x) for x in self.xi], "d": self.d, "r": self.r}


def x_collinear(e: EmbeddedMMSet, x: int, y: int) -> bool:
    """Every point of the projective line xy lies in X."""
    if x == y:
        raise ValueError("x-collinearity needs two distinct points")
    f = e.field
    px, py = e.points[x], e.points[y]
    others = f.add_table[px[None, :], f.mul_table[np.arange(1, f.q)[:, None], py[None, :]]]
    return bool((e.lookup.find(others) >= 0).all())


@dataclass(frozen=True)
class TangentData:
    x: int
    xi: int
    space: ProjSubspace
    consistent: bool

    @property
    def dim(self) -> int:
        return self.space.dim


def tangent_space(e: EmbeddedMMSet, xi: int, x: int) -> TangentData:
    """Span of x and the points of X(xi) X-collinear with x."""
    mem = e.membership[xi]
    if not mem[x]:
        raise ValueError(f"point {x} is not in member {xi}")
    nbrs = np.flatnonzero(mem & e.geometry.adjacency[x])
    sp = ProjSubspace.span(e.field, e.ambient_dim, e.points[np.concatenate([[x], nbrs])])
    return TangentData(x, xi, sp, bool(len(nbrs)))


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, int(round((time.perf_counter() - t0) * 1000))


def _structure(e: EmbeddedMMSet) -> dict | None:
    f = e.field
    if rank(e.points, f) != e.ambient_dim + 1:
        return {"reason": "X does not span the ambient space", "rank": rank(e.points, f)}
    for i, s in enumerate(e.spaces):
        if s.dim != e.d + 1:
            return {"reason": "member has the wrong dimension", "xi": i, "dim": s.dim, "expected": e.d + 1}
        sub, _ = e.geometry.induced(e.xi_points(i))
        rep = check_polar_space(sub, expect_rank=e.r)
        if not rep.passed:
            return {"reason": "member is not a polar space of the stated rank", "xi": i,
                    "report": rep.to_dict()}
    return None


def check_mm_axioms(e: EmbeddedMMSet, structural: bool = True) -> AxiomReport:
    """MM1 and MM2, plus uniqueness of ``[x, y]`` and (optionally) structural validity."""
    t0 = time.perf_counter()
    parts = []
    if structural:
        w, ms = _timed(lambda: _structure(e))
        parts.append(AxiomReport("structure", "pass" if w is None else "fail",
                                 w if w else {"members": len(e.xi), "proper": e.proper}, ms))
    adj = e.geometry.adjacency
    mem = e.membership.astype(np.int32)
    cover = mem.T @ mem
    noncol = ~adj
    np.fill_diagonal(noncol, False)
    unc = noncol & (cover == 0)
    if unc.any():
        x, y = np.argwhere(unc)[0]
        parts.append(AxiomReport("MM1", "fail", {"pair": [int(x), int(y)]}, 0))
    else:
        parts.append(AxiomReport("MM1", "pass", {"pairs": int(noncol.sum() // 2)}, 0))
    multi = noncol & (cover > 1)
    if multi.any():
        x, y = np.argwhere(multi)[0]
        parts.append(AxiomReport("uniqueness", "fail", {"pair": [int(x), int(y)], "members": int(cover[x, y])}, 0))
    else:
        parts.append(AxiomReport("uniqueness", "pass", None, 0))
    w, ms = _timed(lambda: _mm2(e))
    parts.append(AxiomReport("MM2", "pass" if w is None else "fail",
                             w if w else {"member_pairs": len(e.xi) * (len(e.xi) - 1) // 2}, ms))
    ok = all(p.passed for p in parts)
    return AxiomReport("MM", "pass" if ok else "fail", None, int(round((time.perf_counter() - t0) * 1000)), parts)


def _mm2(e: EmbeddedMMSet) -> dict | None:
    """A meet of two members lies in X iff it has as many X-points as projective points."""
    f, q = e.field, e.field.q
    mem = e.membership.astype(np.int32)
    shared = mem @ mem.T
    mats = [s.matrix for s in e.spaces]
    for i, j in itertools.combinations(range(len(mats)), 2):
        k = len(mats[i]) + len(mats[j]) - rank(np.vstack([mats[i], mats[j]]), f)
        npts = (q**k - 1) // (q - 1)
        if shared[i, j] != npts:
            meet = e.spaces[i].meet(e.spaces[j]).points()
            outside = meet[e.lookup.find(meet) < 0]
            return {"members": [i, j], "meet_dim": k - 1, "point": outside[0].tolist()}
    return None


def check_lmm3(e: EmbeddedMMSet, sample: int | None = None, seed: int = 0, table: bool = True) -> AxiomReport:
    """dim T_{x,L} <= 2d - r + 1 for every x and every full line L far from x."""
    t0 = time.perf_counter()
    pre = check_mm_axioms(e, structural=False)
    if not pre.passed:
        raise PreconditionError("MM1/MM2 must hold before LMM3")
    g = e.geometry
    f = e.field
    bound = 2 * e.d - e.r + 1
    tangent: dict[tuple[int, int], np.ndarray] = {}

    def tan(x: int, i: int) -> np.ndarray:
        if (x, i) not in tangent:
            tangent[(x, i)] = tangent_space(e, i, x).space.matrix
        return tangent[(x, i)]

    rng = np.random.default_rng(seed)
    pairs = []
    inc = g.incidence
    xs = range(len(e)) if sample is None else np.sort(rng.choice(len(e), size=min(len(e), max(1, sample // 50 + 1)),
                                                                 replace=False))
    per_x = None if sample is None else -(-sample // len(xs))
    for x in xs:
        x = int(x)
        touch = g.adjacency[x].astype(np.int32)
        touch[x] = 1
        far = np.flatnonzero(inc @ touch == 0)
        if per_x is not None and len(far) > per_x:
            far = np.sort(rng.choice(far, size=per_x, replace=False))
        pairs.extend((x, int(l)) for l in far)
    if sample is not None and len(pairs) > sample:
        pick = np.sort(rng.choice(len(pairs), size=sample, replace=False))
        pairs = [pairs[i] for i in pick]
    hist: dict[int, int] = {}
    worst = None
    span_cache: dict[tuple, int] = {}
    for x, l in pairs:
        key = (x, tuple(sorted({int(e.pair_xi[x, y]) for y in g.lines[l]})))
        if key not in span_cache:
            if -1 in key[1]:
                raise PreconditionError(f"no member [x,y] for x={x} on line {l}")
            span_cache[key] = rank(np.vstack([tan(x, i) for i in key[1]]), f) - 1
        dim = span_cache[key]
        hist[dim] = hist.get(dim, 0) + 1
        if dim > bound and worst is None:
            worst = {"x": x, "line": list(g.lines[l]), "dim": dim, "bound": bound}
    realized = max(hist, default=-1)
    ms = int(round((time.perf_counter() - t0) * 1000))
    if worst:
        worst["realized_max"] = realized
        return AxiomReport("LMM3", "fail", worst, ms)
    w = {"bound": bound, "realized_max": realized, "pairs": len(pairs), "sampled": sample is not None}
    if sample is not None:
        w["seed"] = seed
    if table:
        w["dimensions"] = {str(k): v for k, v in sorted(hist.items())}
    return AxiomReport("LMM3", "pass", w, ms)


def residue(e: EmbeddedMMSet, x: int) -> EmbeddedMMSet:
    """Lines through x and tangent spaces at x, seen in the quotient by x.

    The quotient is realized on the hyperplane ``x_i = 0`` with ``i`` the
    leading coordinate of x, then re-coordinatized inside the span of the
    image points.
    """
    f = e.field
    g = e.geometry
    through = g.lines_through[x]
    if not len(through):
        raise ValueError(f"point {x} lies on no line of X")
    px = e.points[x]
    lead = int(np.flatnonzero(px)[0])

    def project(v: np.ndarray) -> np.ndarray:
        v = np.atleast_2d(v)
        c = f.mul_table[v[:, lead], f.inv_table[px[lead]]]
        out = f.add_table[v, f.neg_table[f.mul_table[c[:, None], px[None, :]]]]
        return np.delete(out, lead, axis=1)

    reps = np.array([next(p for p in g.lines[l] if p != x) for l in through])
    imgs = f.normalize(project(e.points[reps]))
    basis = rref(imgs, f)
    pivots = [int(np.flatnonzero(row)[0]) for row in basis]
    coords = f.normalize(imgs[:, pivots])
    xi = []
    for i in np.flatnonzero(e.membership[:, x]):
        t = tangent_space(e, int(i), x).space.matrix
        img = rref(project(t), f)
        img = img[:, pivots]
        ann = nullspace(img, f) if len(img) else np.eye(len(pivots), dtype=np.int64)
        inside = np.flatnonzero(~f.matmul(coords, ann.T).any(axis=1)) if len(ann) else np.arange(len(coords))
        xi.append(tuple(int(p) for p in inside))
    # canonical order of the residue's points
    order = np.argsort(f.encode(coords))
    rank_of = np.empty_like(order)
    rank_of[order] = np.arange(len(order))
    coords = coords[order]
    xi = sorted(tuple(sorted(int(rank_of[p]) for p in s)) for s in xi)
    return EmbeddedMMSet(f"residue({e.name},{x})", f, len(pivots) - 1, coords, None, xi, d=e.d - 2, r=e.r - 1)


def abstract_geometry(e: EmbeddedMMSet) -> IncidenceGeometry:
    """Points of X with the full projective lines inside X."""
    return e.geometry


def discover_xi(e: EmbeddedMMSet, exhaustive: bool | None = None) -> list[tuple[int, ...]]:
    """Members of Xi recovered as spans of the symps of the abstract geometry."""
    sys = enumerate_symps(e.geometry, exhaustive)
    out = []
    for s in sys:
        sp = ProjSubspace.span(e.field, e.ambient_dim, e.points[list(s.points)])
        out.append(tuple(int(p) for p in _points_in(e, sp)))
    return sorted(out)


def _points_in(e: EmbeddedMMSet, sp: ProjSubspace) -> np.ndarray:
    ann = nullspace(sp.matrix, e.field)
    if not len(ann):
        return np.arange(len(e))
    return np.flatnonzero(~e.field.matmul(e.points, ann.T).any(axis=1))


def incidence_graph(g: IncidenceGeometry, blocks: list[tuple[int, ...]] = ()) -> nx.Graph:
    """Bipartite point/line graph, with extra nodes for each block when given."""
    gr = nx.Graph()
    gr.add_nodes_from((("p", i) for i in range(g.point_count)), kind="p")
    for li, line in enumerate(g.lines):
        gr.add_node(("l", li), kind="l")
        gr.add_edges_from((("l", li), ("p", p)) for p in line)
    for bi, b in enumerate(blocks):
        gr.add_node(("x", bi), kind="x")
        gr.add_edges_from((("x", bi), ("p", p)) for p in b)
    return gr


def structurally_isomorphic(a: EmbeddedMMSet, b: EmbeddedMMSet) -> bool:
    """Same field, ambient dimension and type, and isomorphic point/line/member incidence."""
    if (a.field.q, a.ambient_dim, a.d, a.r, len(a), len(a.xi)) != (b.field.q, b.ambient_dim, b.d, b.r, len(b), len(b.xi)):
        return False
    if len(a.geometry.lines) != len(b.geometry.lines):
        return False
    ga = incidence_graph(a.geometry, a.xi)
    gb = incidence_graph(b.geometry, b.xi)
    return nx.is_isomorphic(ga, gb, node_match=lambda u, v: u["kind"] == v["kind"])
