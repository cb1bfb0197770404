"""Point-line geometries: collinearity, closures, singular subspaces and symps.

Points are dense integers ``0 .. n-1``.  Internally a point set is a boolean
numpy vector of length ``n``; the public functions accept any iterable of
point ids and return frozensets or sorted tuples.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components, shortest_path

__all__ = [
    "IncidenceGeometry",
    "GeometryError",
    "NotPolarError",
    "Symp",
    "SympSystem",
    "SingularClosure",
    "PolarProfile",
    "build_geometry",
    "distance",
    "singular_closure",
    "maximal_singular_subspaces",
    "convex_closure",
    "enumerate_symps",
    "polar_profile",
    "maximal_cliques",
    "EXHAUSTIVE_LIMIT",
    "is_convex",
]

#: geometries with at most this many points get exhaustive scans by default
EXHAUSTIVE_LIMIT = 500


class GeometryError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class IncidenceGeometry:
    """A point-line geometry with lines stored as sorted point tuples.

    Use :func:`build_geometry` to construct one from raw input; the
    constructor assumes lines are already canonical (sorted, deduplicated,
    sorted lexicographically).
    """

    point_count: int
    lines: tuple[tuple[int, ...], ...]
    name: str = ""
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    def __repr__(self) -> str:
        return f"IncidenceGeometry({self.name or '?'}: {self.point_count} points, {len(self.lines)} lines)"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IncidenceGeometry):
            return NotImplemented
        return self.point_count == other.point_count and self.lines == other.lines

    def __hash__(self) -> int:
        return hash((self.point_count, self.lines))

    @property
    def n(self) -> int:
        return self.point_count

    # -- incidence structures ---------------------------------------------
    @cached_property
    def incidence(self) -> sp.csr_matrix:
        """Sparse ``lines x points`` 0/1 matrix."""
        rows = np.repeat(np.arange(len(self.lines)), [len(l) for l in self.lines])
        cols = np.fromiter((p for l in self.lines for p in l), dtype=np.int64, count=len(rows))
        data = np.ones(len(rows), dtype=np.int32)
        return sp.csr_matrix((data, (rows, cols)), shape=(len(self.lines), self.point_count))

    @cached_property
    def lines_through(self) -> tuple[np.ndarray, ...]:
        csc = self.incidence.tocsc()
        return tuple(csc.indices[csc.indptr[p] : csc.indptr[p + 1]].copy() for p in range(self.point_count))

    @cached_property
    def line_sizes(self) -> np.ndarray:
        return np.array([len(l) for l in self.lines], dtype=np.int64)

    @cached_property
    def adjacency(self) -> np.ndarray:
        """Dense collinearity matrix (diagonal false)."""
        inc = self.incidence.astype(np.int32)
        a = (inc.T @ inc).toarray() > 0
        np.fill_diagonal(a, False)
        a.flags.writeable = False
        return a

    @cached_property
    def pair_line(self) -> np.ndarray:
        """``pair_line[x, y]``: the line through ``x, y``; -1 if none, -2 if several."""
        n = self.point_count
        out = np.full((n, n), -1, dtype=np.int32)
        for i, line in enumerate(self.lines):
            idx = np.asarray(line)
            block = out[np.ix_(idx, idx)]
            block = np.where(block == -1, i, -2)
            out[np.ix_(idx, idx)] = block
        np.fill_diagonal(out, -1)
        out.flags.writeable = False
        return out

    @cached_property
    def is_partial_linear(self) -> bool:
        return not (self.pair_line == -2).any()

    @cached_property
    def neighbor_bits(self) -> tuple[int, ...]:
        """Collinearity rows as Python int bitsets (bit ``i`` = point ``i``)."""
        return tuple(_mask_to_int(row) for row in self.adjacency)

    def lines_through_pair(self, x: int, y: int) -> list[int]:
        return sorted(set(self.lines_through[x].tolist()) & set(self.lines_through[y].tolist()))

    def mask(self, points: Iterable[int]) -> np.ndarray:
        m = np.zeros(self.point_count, dtype=bool)
        m[np.fromiter(points, dtype=np.int64)] = True
        return m

    def lines_inside(self, mask: np.ndarray) -> np.ndarray:
        """Ids of lines all of whose points lie in ``mask``."""
        counts = self.incidence @ mask.astype(np.int32)
        return np.flatnonzero(counts == self.line_sizes)

    def induced(self, points: Iterable[int], name: str = "") -> tuple["IncidenceGeometry", np.ndarray]:
        """Subgeometry on ``points`` with the lines fully inside it.

        Returns the renumbered geometry and the array mapping new ids to old.
        """
        old = np.array(sorted(set(int(p) for p in points)), dtype=np.int64)
        m = np.zeros(self.point_count, dtype=bool)
        m[old] = True
        new_id = np.full(self.point_count, -1, dtype=np.int64)
        new_id[old] = np.arange(len(old))
        lines = tuple(tuple(int(new_id[p]) for p in self.lines[i]) for i in self.lines_inside(m))
        return IncidenceGeometry(len(old), tuple(sorted(lines)), name), old

    def is_subspace(self, mask: np.ndarray) -> bool:
        counts = self.incidence @ mask.astype(np.int32)
        return bool(np.all((counts < 2) | (counts == self.line_sizes)))

    def is_singular(self, mask: np.ndarray) -> bool:
        idx = np.flatnonzero(mask)
        sub = self.adjacency[np.ix_(idx, idx)]
        return bool(sub.sum() == len(idx) * (len(idx) - 1)) and self.is_subspace(mask)

    def to_dict(self) -> dict:
        return {"name": self.name, "point_count": self.point_count, "lines": [list(l) for l in self.lines]}


def _mask_to_int(row: np.ndarray) -> int:
    return int.from_bytes(np.packbits(row.astype(np.uint8), bitorder="little").tobytes(), "little")


def _int_to_list(bits: int) -> list[int]:
    out = []
    while bits:
        low = bits & -bits
        out.append(low.bit_length() - 1)
        bits ^= low
    return out


def build_geometry(lines: Iterable[Iterable[int]], point_count: int, name: str = "") -> IncidenceGeometry:
    """Validate, sort and deduplicate ``lines``."""
    canon = set()
    for i, raw in enumerate(lines):
        pts = tuple(sorted(set(int(p) for p in raw)))
        if len(pts) < 2:
            raise GeometryError(f"line {i} {list(raw)!r} has fewer than 2 distinct points")
        if pts[0] < 0 or pts[-1] >= point_count:
            raise GeometryError(f"line {i} {list(pts)!r} has a point outside 0..{point_count - 1}")
        canon.add(pts)
    return IncidenceGeometry(point_count, tuple(sorted(canon)), name)


# ---------------------------------------------------------------------------
# distances and closures
# ---------------------------------------------------------------------------
def _check_point(g: IncidenceGeometry, x: int) -> None:
    if not 0 <= x < g.point_count:
        raise GeometryError(f"point {x} outside 0..{g.point_count - 1}")


def distance(g: IncidenceGeometry, x: int, y: int, metric: str = "collinearity") -> float:
    """Graph distance between two points; ``math.inf`` when disconnected.

    ``metric='incidence'`` measures in the bipartite point-line incidence graph,
    so it is twice the collinearity distance.
    """
    _check_point(g, x)
    _check_point(g, y)
    if metric not in ("collinearity", "incidence"):
        raise ValueError(f"unknown metric {metric!r}")
    if x == y:
        return 0
    seen = {x}
    frontier = [x]
    d = 0
    adj = g.adjacency
    while frontier:
        d += 1
        nxt = []
        for u in frontier:
            for v in np.flatnonzero(adj[u]):
                v = int(v)
                if v == y:
                    return d if metric == "collinearity" else 2 * d
                if v not in seen:
                    seen.add(v)
                    nxt.append(v)
        frontier = nxt
    return math.inf


def collinearity_distances(g: IncidenceGeometry) -> np.ndarray:
    return shortest_path(sp.csr_matrix(g.adjacency), unweighted=True, directed=False)


def is_connected(g: IncidenceGeometry) -> bool:
    if g.point_count == 0:
        return True
    ncomp, _ = connected_components(sp.csr_matrix(g.adjacency), directed=False)
    return ncomp == 1


class SingularClosure(NamedTuple):
    points: frozenset[int]
    witness: tuple[int, int] | None


def _subspace_closure(g: IncidenceGeometry, mask: np.ndarray) -> np.ndarray:
    inc = g.incidence
    sizes = g.line_sizes
    mask = mask.copy()
    while True:
        counts = inc @ mask.astype(np.int32)
        grow = np.flatnonzero((counts >= 2) & (counts < sizes))
        if not len(grow):
            return mask
        mask[inc[grow].indices] = True


def singular_closure(g: IncidenceGeometry, points: Iterable[int]) -> SingularClosure:
    """Least subspace containing ``points``, obtained by adding joining lines.

    If the fixpoint is not singular, ``witness`` is its first non-collinear pair.
    """
    mask = _subspace_closure(g, g.mask(points))
    idx = np.flatnonzero(mask)
    sub = g.adjacency[np.ix_(idx, idx)] | np.eye(len(idx), dtype=bool)
    bad = np.argwhere(~sub)
    witness = (int(idx[bad[0, 0]]), int(idx[bad[0, 1]])) if len(bad) else None
    return SingularClosure(frozenset(int(i) for i in idx), witness)


def maximal_cliques(neighbors: Sequence[int], candidates: int | None = None) -> list[int]:
    """Bron-Kerbosch with pivoting over int bitsets; returns cliques as bitsets."""
    n = len(neighbors)
    out: list[int] = []
    stack = [(0, (1 << n) - 1 if candidates is None else candidates, 0)]
    while stack:
        r, p, x = stack.pop()
        if not p:
            if not x:
                out.append(r)
            continue
        px = p | x
        # pivot: vertex of p|x with most neighbours in p
        best, pivot = -1, 0
        for u in _int_to_list(px):
            c = (neighbors[u] & p).bit_count()
            if c > best:
                best, pivot = c, u
        for v in _int_to_list(p & ~neighbors[pivot]):
            bit = 1 << v
            stack.append((r | bit, p & neighbors[v], x & neighbors[v]))
            p &= ~bit
            x |= bit
    return out


def maximal_singular_subspaces(g: IncidenceGeometry) -> list[tuple[int, ...]]:
    """Maximal sets of pairwise collinear points that are subspaces, sorted."""
    cliques = maximal_cliques(g.neighbor_bits)
    out = []
    for c in cliques:
        pts = _int_to_list(c)
        if len(pts) < 2 and g.lines_through[pts[0]].size:
            continue
        if g.is_subspace(g.mask(pts)):
            out.append(tuple(pts))
    return sorted(out)


def _convex_closure_mask(g: IncidenceGeometry, mask: np.ndarray) -> np.ndarray:
    adj = g.adjacency
    adjf = g.meta.get("_adjf")
    if adjf is None:
        adjf = adj.astype(np.float32)
        g.meta["_adjf"] = adjf
    while True:
        mask = _subspace_closure(g, mask)
        idx = np.flatnonzero(mask)
        rows = adjf[idx]
        noncol = 1.0 - rows[:, idx]
        np.fill_diagonal(noncol, 0.0)
        # m is added when it is a common neighbour of some non-collinear pair in the set
        hits = ((noncol @ rows) * rows).any(axis=0)
        new = mask | hits
        if np.array_equal(new, mask):
            return mask
        mask = new


def convex_closure(g: IncidenceGeometry, x: int, y: int) -> frozenset[int]:
    """Smallest convex subspace through two points at distance 2."""
    _check_point(g, x)
    _check_point(g, y)
    if x == y or g.adjacency[x, y] or not (g.adjacency[x] & g.adjacency[y]).any():
        raise GeometryError(f"points {x}, {y} are not at distance 2")
    mask = np.zeros(g.point_count, dtype=bool)
    mask[[x, y]] = True
    return frozenset(int(i) for i in np.flatnonzero(_convex_closure_mask(g, mask)))


# ---------------------------------------------------------------------------
# polar spaces
# ---------------------------------------------------------------------------
@dataclass
class PolarProfile:
    """Outcome of the polar-space axioms on a geometry.

    ``violations`` maps an axiom name to the first witness found; ``rank`` is
    the longest greedy chain of nonempty singular subspaces.
    """

    rank: int
    violations: dict[str, object]
    thickness: str

    @property
    def ok(self) -> bool:
        return not self.violations


def _chain_rank(g: IncidenceGeometry, subspace: Sequence[int]) -> int:
    """Number of nonempty members in a greedy singular chain inside ``subspace``."""
    idx = np.asarray(sorted(subspace), dtype=np.int64)
    # closures of subsets of a subspace only use the lines lying inside it
    lids, hits = np.unique(np.concatenate([g.lines_through[p] for p in idx]), return_counts=True)
    inside = lids[hits == g.line_sizes[lids]]
    rows = g.incidence[inside]
    inc = np.zeros((len(inside), len(idx)), dtype=np.int32)
    inc[np.repeat(np.arange(len(inside)), np.diff(rows.indptr)), np.searchsorted(idx, rows.indices)] = 1
    sizes = g.line_sizes[inside]
    cur = np.zeros(len(idx), dtype=bool)
    steps = 0
    while not cur.all():
        cur[int(np.flatnonzero(~cur)[0])] = True
        while True:
            counts = inc @ cur
            grow = (counts >= 2) & (counts < sizes)
            if not grow.any():
                break
            cur |= inc[grow].any(axis=0)
        steps += 1
    return steps


def polar_profile(g: IncidenceGeometry) -> PolarProfile:
    """Check PS1-PS4; the rank is realized from maximal singular subspaces."""
    violations: dict[str, object] = {}
    short = np.flatnonzero(g.line_sizes < 3)
    if len(short):
        violations["PS1"] = {"line": list(g.lines[int(short[0])])}
    full = np.flatnonzero(g.adjacency.sum(axis=1) == g.point_count - 1)
    if len(full) or g.point_count == 0:
        violations["PS2"] = {"point": int(full[0]) if len(full) else None}
    counts = (g.incidence @ g.adjacency.astype(np.int32))
    counts = np.asarray(counts)
    inc = g.incidence.toarray().astype(bool)
    sizes = g.line_sizes[:, None]
    bad = (~inc) & (counts != 1) & (counts != sizes)
    if bad.any():
        li, x = np.argwhere(bad)[0]
        violations["PS4"] = {"point": int(x), "line": list(g.lines[int(li)]), "collinear": int(counts[li, x])}
    maxes = maximal_singular_subspaces(g)
    ranks = {_chain_rank(g, m) for m in maxes} if maxes else {0}
    rank = max(ranks)
    if len(ranks) > 1:
        violations["PS3"] = {"chain_lengths": sorted(r + 1 for r in ranks)}
    if rank < 1:
        violations.setdefault("PS3", {"chain_lengths": [rank + 1]})
    per_point = np.array([len(t) for t in g.lines_through])
    if rank == 2 and (per_point == 2).all():
        thickness = "grid"
    elif len(per_point) and (per_point >= 3).all() and (g.line_sizes >= 3).all():
        thickness = "thick"
    else:
        thickness = "other"
    return PolarProfile(rank, violations, thickness)


class NotPolarError(GeometryError):
    """A convex closure that is not a polar space of rank at least 2."""

    def __init__(self, pair: tuple[int, int], violations: dict, rank: int):
        super().__init__(f"closure of {pair} is not a polar space of rank >= 2: {violations or {'rank': rank}}")
        self.pair = pair
        self.violations = violations
        self.rank = rank


@dataclass(frozen=True)
class Symp:
    index: int
    points: tuple[int, ...]
    lines: tuple[int, ...]
    rank: int
    thickness: str

    def __len__(self) -> int:
        return len(self.points)


@dataclass(eq=False)
class SympSystem:
    """All symps of a geometry with the non-collinear pair -> symp lookup."""

    geometry: IncidenceGeometry
    symps: list[Symp]
    pair_symp: np.ndarray
    exhaustive: bool

    @cached_property
    def membership(self) -> np.ndarray:
        m = np.zeros((len(self.symps), self.geometry.point_count), dtype=bool)
        for s in self.symps:
            m[s.index, list(s.points)] = True
        m.flags.writeable = False
        return m

    def symp_of(self, x: int, y: int) -> Symp:
        i = int(self.pair_symp[x, y])
        if i < 0:
            raise GeometryError(f"points {x}, {y} are collinear or equal; no unique symp")
        return self.symps[i]

    def __len__(self) -> int:
        return len(self.symps)

    def __iter__(self):
        return iter(self.symps)

    def __getitem__(self, i: int) -> Symp:
        return self.symps[i]

    @cached_property
    def ranks(self) -> list[int]:
        return [s.rank for s in self.symps]


def enumerate_symps(g: IncidenceGeometry, exhaustive: bool | None = None) -> SympSystem:
    """Convex closures of non-collinear pairs, deduplicated and classified.

    Closures are first computed for pairs not yet covered by an earlier
    symp.  With ``exhaustive`` (default for at most :data:`EXHAUSTIVE_LIMIT`
    points) every remaining non-collinear pair is then closed as well: each
    symp is checked to be convex, so the closure of a pair inside it can be
    run on the induced subgeometry, for all of its pairs in one batch.  In
    both modes every non-collinear pair must lie in exactly one symp.
    """
    n = g.point_count
    if exhaustive is None:
        exhaustive = n <= EXHAUSTIVE_LIMIT
    adj = g.adjacency
    pair_symp = np.full((n, n), -1, dtype=np.int32)
    masks: list[np.ndarray] = []
    symps: list[Symp] = []
    for x in range(n):
        far = np.flatnonzero(~adj[x])
        far = far[far > x]
        for y in far:
            y = int(y)
            if pair_symp[x, y] >= 0:
                continue
            if not (adj[x] & adj[y]).any():
                raise NotPolarError((x, y), {"PPS2": "points at distance > 2"}, 0)
            seed = np.zeros(n, dtype=bool)
            seed[[x, y]] = True
            mask = _convex_closure_mask(g, seed)
            sub, old = g.induced(np.flatnonzero(mask))
            prof = polar_profile(sub)
            if not prof.ok or prof.rank < 2:
                raise NotPolarError((x, y), prof.violations, prof.rank)
            sid = len(symps)
            masks.append(mask)
            symps.append(Symp(sid, tuple(int(p) for p in old), tuple(int(l) for l in g.lines_inside(mask)),
                              prof.rank, prof.thickness))
            idx = np.flatnonzero(mask)
            block = pair_symp[np.ix_(idx, idx)]
            noncol = ~adj[np.ix_(idx, idx)]
            np.fill_diagonal(noncol, False)
            if (block[noncol] >= 0).any():
                a, b = np.argwhere(noncol & (block >= 0))[0]
                raise GeometryError(f"pair {(int(idx[a]), int(idx[b]))} lies in two symps")
            block[noncol] = sid
            pair_symp[np.ix_(idx, idx)] = block
    if exhaustive:
        for s, mask in zip(symps, masks):
            _verify_all_closures(g, s, mask)
    system = SympSystem(g, symps, pair_symp, exhaustive)
    _verify_unique_cover(system)
    pair_symp.flags.writeable = False
    return system


def is_convex(g: IncidenceGeometry, mask: np.ndarray) -> bool:
    """Subspace containing all common neighbours of its non-collinear pairs."""
    if not g.is_subspace(mask):
        return False
    idx = np.flatnonzero(mask)
    rows = g.adjacency[idx].astype(np.float32)
    noncol = 1.0 - rows[:, idx]
    np.fill_diagonal(noncol, 0.0)
    hits = ((noncol @ rows) * rows).any(axis=0)
    return not (hits & ~mask).any()


#: batched closure verification is used while pairs * k^3 stays below this
_BATCH_BUDGET = 2e9


def _verify_all_closures(g: IncidenceGeometry, symp: Symp, mask: np.ndarray) -> None:
    if not is_convex(g, mask):
        raise GeometryError(f"symp {symp.index} is not convex")
    sub, old = g.induced(symp.points)
    k = sub.point_count
    nc = ~sub.adjacency
    np.fill_diagonal(nc, False)
    xs, ys = np.nonzero(np.triu(nc))
    if len(xs) * k**3 <= _BATCH_BUDGET:
        bad = _closures_batched(sub, xs, ys)
    else:
        bad = _closures_pairwise(sub, xs, ys)
    if bad is not None:
        raise GeometryError(
            f"closure of {(int(old[bad[0]]), int(old[bad[1]]))} is strictly inside symp {symp.index}; "
            "the pair lies in two convex closures")


def _closures_batched(sub: IncidenceGeometry, xs: np.ndarray, ys: np.ndarray) -> tuple[int, int] | None:
    """Run every pair's closure fixpoint at once; return a pair whose closure falls short."""
    k = sub.point_count
    a = sub.adjacency.astype(np.float32)
    nc = 1.0 - a
    np.fill_diagonal(nc, 0.0)
    inc = sub.incidence.toarray().astype(np.float32)
    sizes = sub.line_sizes.astype(np.float32)
    # nc_a[a, b, m] = noncollinear(a, b) * adjacent(b, m)
    nc_a = nc[:, :, None] * a[None, :, :]
    # the einsum intermediate has rows * k * k entries; keep it near 64 MB
    chunk = max(1, 2**24 // (k * k))
    for start in range(0, len(xs), chunk):
        cx, cy = xs[start : start + chunk], ys[start : start + chunk]
        state = np.zeros((len(cx), k), dtype=np.float32)
        state[np.arange(len(cx)), cx] = 1.0
        state[np.arange(len(cx)), cy] = 1.0
        while True:
            counts = state @ inc.T
            grow = (counts >= 2) & (counts < sizes)
            new = np.maximum(state, (grow.astype(np.float32) @ inc > 0).astype(np.float32))
            # common neighbours m of non-collinear a, b in the current set
            w = np.einsum("rb,abm->ram", new, nc_a, optimize=True)
            hits = np.einsum("ra,am,ram->rm", new, a, w, optimize=True) > 0
            new = np.maximum(new, hits.astype(np.float32))
            if np.array_equal(new, state):
                break
            state = new
        short = np.flatnonzero(state.sum(axis=1) < k)
        if len(short):
            return int(cx[short[0]]), int(cy[short[0]])
    return None


def _closures_pairwise(sub: IncidenceGeometry, xs: np.ndarray, ys: np.ndarray) -> tuple[int, int] | None:
    """One fixpoint per pair, stopping early once the set holds a pair already known to close to everything.

    Closures are monotone, so a set containing such a pair closes to everything too.
    """
    k = sub.point_count
    adj = sub.adjacency
    nc = ~adj
    np.fill_diagonal(nc, False)
    inc = sub.incidence.astype(np.int32)
    sizes = sub.line_sizes
    adj_f = adj.astype(np.float32)
    full = np.zeros((k, k), dtype=bool)
    for x, y in zip(xs.tolist(), ys.tolist()):
        if full[x, y]:
            continue
        s = np.zeros(k, dtype=bool)
        s[[x, y]] = True
        while True:
            idx = np.flatnonzero(s)
            if full[np.ix_(idx, idx)].any():
                s[:] = True
                break
            counts = inc @ s.astype(np.int32)
            grow = (counts >= 2) & (counts < sizes)
            new = s | (inc.T @ grow.astype(np.int32) > 0)
            # m is a common neighbour of a non-collinear pair in s
            side = adj_f[:, idx]
            hits = ((side @ nc[np.ix_(idx, idx)].astype(np.float32)) * side).sum(axis=1) > 0
            new |= hits
            if np.array_equal(new, s):
                break
            s = new
        if not s.all():
            return x, y
        full[x, y] = full[y, x] = True
    return None


def _verify_unique_cover(system: SympSystem) -> None:
    g = system.geometry
    m = system.membership.astype(np.float32)
    cover = m.T @ m
    noncol = ~g.adjacency
    np.fill_diagonal(noncol, False)
    bad = noncol & (cover != 1)
    if bad.any():
        x, y = np.argwhere(bad)[0]
        raise GeometryError(f"non-collinear pair {(int(x), int(y))} lies in {int(cover[x, y])} symps")
    # the lookup must agree with membership
    ps = system.pair_symp
    if (ps[noncol] < 0).any():  # pragma: no cover - guarded by construction
        raise GeometryError("pair lookup incomplete")
    xs, ys = np.nonzero(noncol)
    if not system.membership[ps[xs, ys], xs].all() or not system.membership[ps[xs, ys], ys].all():
        raise GeometryError("pair lookup disagrees with symp membership")
