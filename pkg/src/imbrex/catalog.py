"""Constructions of the named geometries, abstract and coordinatized.

Canonical forms used (coordinates ``x0 .. xn``, ``conj(x) = x**sqrt(q)``):

=========  ==========  ===============================================
name       ambient     form
=========  ==========  ===============================================
W(q)       PG(3,q)     x0*y1 - x1*y0 + x2*y3 - x3*y2
Q4(q)      PG(4,q)     x0*x4 + x1*x3 + x2^2
Qminus5(q) PG(5,q)     x0*x5 + x1*x4 + x2^2 + x2*x3 + c*x3^2
H3(q2)     PG(3,q2)    sum_i x_i * conj(x_{3-i})
H4(q2)     PG(4,q2)    sum_i x_i * conj(x_{4-i})
=========  ==========  ===============================================

``c`` is the smallest field element making ``t^2 + t + c`` irreducible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .galois import (
    GF,
    FiniteField,
    ProjSubspace,
    SesquilinearForm,
    gaussian_binomial,
    isotropic_subspaces,
    pg_enumerate,
    pg_points,
    rref,
)
from .geometry import GeometryError, IncidenceGeometry, build_geometry
from .mm import EmbeddedMMSet

__all__ = [
    "EmbeddedQuadrangle",
    "EmbeddedMMSet",
    "CatalogEntry",
    "CATALOG",
    "build",
    "build_embedded_quadrangle",
    "imbrex_from_embedded_quadrangle",
    "imbrex_from_planes",
    "quadrangle_form",
    "segre_embedding",
    "plucker_embedding",
    "spinor_embedding",
    "supported",
]


def _key(m: np.ndarray) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(x) for x in row) for row in m)


class PointIndex:
    """Lookup from normalized coordinate rows to their position."""

    def __init__(self, f: FiniteField, coords: np.ndarray):
        self.field = f
        self.coords = np.asarray(coords, dtype=np.int64)
        codes = f.encode(self.coords)
        self._order = np.argsort(codes)
        self._codes = codes[self._order]

    def __len__(self) -> int:
        return len(self.coords)

    def find(self, vecs: np.ndarray) -> np.ndarray:
        """Indices of the (normalized) rows of ``vecs``; -1 where absent."""
        vecs = np.atleast_2d(vecs)
        codes = self.field.encode(self.field.normalize(vecs))
        pos = np.searchsorted(self._codes, codes)
        pos = np.minimum(pos, len(self._codes) - 1)
        hit = self._codes[pos] == codes
        return np.where(hit, self._order[pos], -1)

    def index(self, vec) -> int:
        i = int(self.find(np.asarray(vec))[0])
        if i < 0:
            raise KeyError(tuple(vec))
        return i


# ---------------------------------------------------------------------------
# small fixtures
# ---------------------------------------------------------------------------
def grid(m: int, n: int) -> IncidenceGeometry:
    rows = [[i * n + j for j in range(n)] for i in range(m)]
    cols = [[i * n + j for i in range(m)] for j in range(n)]
    return build_geometry(rows + cols, m * n, f"grid({m},{n})")


def projective_plane(q: int) -> IncidenceGeometry:
    f = GF(q)
    pts = PointIndex(f, pg_points(2, f))
    lines = [pts.find(l.points()) for l in pg_enumerate(2, f, 1)]
    return build_geometry(lines, len(pts), f"PG(2,{q})")


def affine_plane(q: int) -> IncidenceGeometry:
    f = GF(q)
    pts = list(itertools.product(range(q), repeat=2))
    idx = {p: i for i, p in enumerate(pts)}
    lines = []
    for a, b in pts:  # direction (a, b) normalized
        if (a, b) == (0, 0) or (a != 0 and a != 1) or (a == 0 and b != 1):
            continue
        for p in pts:
            line = {idx[(f.add(p[0], f.mul(t, a)), f.add(p[1], f.mul(t, b)))] for t in range(q)}
            lines.append(sorted(line))
    return build_geometry(lines, q * q, f"AG(2,{q})")


def disjoint_union(*geoms: IncidenceGeometry) -> IncidenceGeometry:
    lines, off = [], 0
    for g in geoms:
        lines += [[p + off for p in l] for l in g.lines]
        off += g.point_count
    return build_geometry(lines, off, " + ".join(g.name for g in geoms))


# ---------------------------------------------------------------------------
# classical quadrangles
# ---------------------------------------------------------------------------
def _elliptic_constant(f: FiniteField) -> int:
    for c in range(f.q):
        if all(f.add(f.add(f.mul(t, t), t), c) for t in range(f.q)):
            return c
    raise ValueError("no irreducible t^2+t+c")  # pragma: no cover


def quadrangle_form(name: str, q: int) -> SesquilinearForm:
    """The canonical form behind a classical quadrangle (see module table)."""
    f = GF(q)
    one, minus = 1, f.neg(1)
    if name == "W":
        m = np.zeros((4, 4), dtype=np.int64)
        m[0, 1] = m[2, 3] = one
        m[1, 0] = m[3, 2] = minus
        return SesquilinearForm.from_matrix("alternating", f, m)
    if name == "Q4":
        m = np.zeros((5, 5), dtype=np.int64)
        m[0, 4] = m[1, 3] = m[2, 2] = one
        return SesquilinearForm.from_matrix("quadratic", f, m)
    if name == "Qminus5":
        m = np.zeros((6, 6), dtype=np.int64)
        m[0, 5] = m[1, 4] = m[2, 2] = m[2, 3] = one
        m[3, 3] = _elliptic_constant(f)
        return SesquilinearForm.from_matrix("quadratic", f, m)
    if name in ("H3", "H4"):
        n = 3 if name == "H3" else 4
        m = np.zeros((n + 1, n + 1), dtype=np.int64)
        for i in range(n + 1):
            m[i, n - i] = 1
        return SesquilinearForm.from_matrix("hermitian", f, m)
    raise ValueError(f"no quadrangle form named {name!r}")


@dataclass(eq=False)
class EmbeddedQuadrangle:
    """A quadrangle with projective coordinates: points and full lines of PG(n, q)."""

    name: str
    field: FiniteField
    n: int
    points: np.ndarray
    lines: list[ProjSubspace]
    line_points: tuple[tuple[int, ...], ...]

    def geometry(self) -> IncidenceGeometry:
        return build_geometry(self.line_points, len(self.points), self.name)

    @classmethod
    def from_lines(cls, name: str, f: FiniteField, n: int, lines: list[ProjSubspace]) -> "EmbeddedQuadrangle":
        allpts = np.unique(np.vstack([l.points() for l in lines]), axis=0)
        index = PointIndex(f, allpts)
        lp = tuple(tuple(sorted(int(i) for i in index.find(l.points()))) for l in lines)
        return cls(name, f, n, index.coords, lines, lp)


def build_embedded_quadrangle(name: str, q: int) -> EmbeddedQuadrangle:
    """One of ``W``, ``Q4``, ``Qminus5``, ``H3``, ``H4`` with its coordinatization."""
    if name not in _QUADRANGLE_BOUNDS:
        raise ValueError(f"unknown embedded quadrangle {name!r}; supported: {sorted(_QUADRANGLE_BOUNDS)}")
    if q not in _QUADRANGLE_BOUNDS[name]:
        raise ValueError(f"{name}: parameter {q} outside supported set {_QUADRANGLE_BOUNDS[name]}")
    form = quadrangle_form(name, q)
    f, n = form.field, form.n
    pts = isotropic_subspaces(form, n, 0)
    lines = isotropic_subspaces(form, n, 1)
    coords = np.array([p.basis[0] for p in pts], dtype=np.int64)
    index = PointIndex(f, coords)
    lp = tuple(tuple(sorted(int(i) for i in index.find(l.points()))) for l in lines)
    return EmbeddedQuadrangle(f"{name}({q})", f, n, coords, lines, lp)


_QUADRANGLE_BOUNDS = {"W": (2, 3, 4), "Q4": (2, 3, 4), "Qminus5": (2, 3), "H3": (4, 9), "H4": (4,)}


# ---------------------------------------------------------------------------
# the imbrex construction from an embedded quadrangle
# ---------------------------------------------------------------------------
def imbrex_from_embedded_quadrangle(omega: EmbeddedQuadrangle) -> IncidenceGeometry:
    """Points: lines of the quadrangle; lines: maximal pencils of them in a plane.

    A plane holding two quadrangle lines holds only lines through their
    common point (a quadrangle has no triangles), so the planes are found by
    grouping the lines through each quadrangle point by the plane they span
    with a fixed first line.
    """
    from .gq import classify_gq

    verdict = classify_gq(omega.geometry())
    if verdict.kind == "not_a_gq":
        raise ValueError(f"construction degenerate: the input is not a generalized quadrangle ({verdict.witness})")
    f = omega.field
    through: dict[int, list[int]] = {}
    for li, pts in enumerate(omega.line_points):
        for p in pts:
            through.setdefault(p, []).append(li)
    gamma_lines = []
    for p, lids in through.items():
        groups: dict[tuple, list[int]] = {}
        for i, a in enumerate(lids):
            for b in lids[i + 1 :]:
                plane = _key(rref(np.vstack([omega.lines[a].matrix, omega.lines[b].matrix]), f))
                g = groups.setdefault(plane, [])
                g.extend([a, b])
        for members in groups.values():
            gamma_lines.append(sorted(set(members)))
    if len({tuple(l) for l in gamma_lines}) < 2:
        raise ValueError("construction degenerate: fewer than 2 planes contain two quadrangle lines")
    g = build_geometry(gamma_lines, len(omega.lines), f"imbrex[{omega.name}]")
    g.meta["omega"] = omega
    return g


def imbrex_from_planes(omega: EmbeddedQuadrangle) -> IncidenceGeometry:
    """Same geometry via raw enumeration of all planes (slow reference route)."""
    f, n = omega.field, omega.n
    keys = {_key(l.matrix): i for i, l in enumerate(omega.lines)}
    lines = []
    for plane in pg_enumerate(n, f, 2):
        pts = plane.points()
        # quadrangle lines inside the plane: spans of pairs of its points that are quadrangle lines
        found = set()
        for a, b in itertools.combinations(range(len(pts)), 2):
            k = _key(rref(pts[[a, b]], f))
            if k in keys:
                found.add(keys[k])
        if len(found) >= 2:
            lines.append(sorted(found))
    return build_geometry(lines, len(omega.lines), f"imbrex-planes[{omega.name}]")


# ---------------------------------------------------------------------------
# Grassmannians, Segre geometries and their embeddings
# ---------------------------------------------------------------------------
def _local_plane(f: FiniteField):
    pts = pg_points(2, f)
    idx = PointIndex(f, pts)
    lines = [l for l in pg_enumerate(2, f, 1)]
    on = [[int(i) for i in idx.find(l.points())] for l in lines]
    return pts, lines, on


def grassmann(n: int, q: int) -> IncidenceGeometry:
    """Lines of PG(n, q); a line of the geometry is a pencil (point, plane)."""
    return _grassmann(n, q)[0]


def _grassmann(n: int, q: int):
    f = GF(q)
    glines = pg_enumerate(n, f, 1)
    keys = {_key(l.matrix): i for i, l in enumerate(glines)}
    lpts, llines, lon = _local_plane(f)
    pencils = []
    for plane in pg_enumerate(n, f, 2):
        b = plane.matrix
        ids = []
        for l in llines:
            ids.append(keys[_key(rref(f.matmul(l.matrix, b), f))])
        for p in range(len(lpts)):
            pencils.append([ids[j] for j, on in enumerate(lon) if p in on])
    return build_geometry(pencils, len(glines), f"grassmann({n},{q})"), glines


def plucker_embedding(n: int, q: int) -> EmbeddedMMSet:
    """Grassmannian of lines of PG(n, q) in PG(C(n+1,2)-1, q) with solids as symps."""
    f = GF(q)
    g, glines = _grassmann(n, q)
    pairs = list(itertools.combinations(range(n + 1), 2))
    coords = np.zeros((len(glines), len(pairs)), dtype=np.int64)
    for li, l in enumerate(glines):
        u, v = l.matrix
        for c, (i, j) in enumerate(pairs):
            coords[li, c] = f.sub(f.mul(int(u[i]), int(v[j])), f.mul(int(u[j]), int(v[i])))
    coords = f.normalize(coords)
    keys = {_key(l.matrix): i for i, l in enumerate(glines)}
    xi = []
    for solid in pg_enumerate(n, f, 3):
        b = solid.matrix
        inside = sorted(keys[_key(rref(f.matmul(l.matrix, b), f))] for l in pg_enumerate(3, f, 1))
        xi.append(tuple(inside))
    return EmbeddedMMSet(f"plucker({n},{q})", f, len(pairs) - 1, coords, None, sorted(xi), d=4, r=3)


def segre(p: int, r: int, q: int) -> IncidenceGeometry:
    return _segre(p, r, q)[0]


def _segre(p: int, r: int, q: int):
    f = GF(q)
    a_pts, b_pts = pg_points(p, f), pg_points(r, f)
    ia, ib = PointIndex(f, a_pts), PointIndex(f, b_pts)
    nb = len(b_pts)
    lines = []
    a_lines = [ia.find(l.points()) for l in pg_enumerate(p, f, 1)]
    b_lines = [ib.find(l.points()) for l in pg_enumerate(r, f, 1)]
    for a in range(len(a_pts)):
        for m in b_lines:
            lines.append([a * nb + int(b) for b in m])
    for b in range(nb):
        for l in a_lines:
            lines.append([int(a) * nb + b for a in l])
    g = build_geometry(lines, len(a_pts) * nb, f"segre({p},{r},{q})")
    return g, a_pts, b_pts, a_lines, b_lines


def segre_embedding(p: int, r: int, q: int) -> EmbeddedMMSet:
    """Segre variety of PG(p,q) x PG(r,q) in PG((p+1)(r+1)-1, q); symps are sub-grids."""
    f = GF(q)
    g, a_pts, b_pts, a_lines, b_lines = _segre(p, r, q)
    coords = f.mul_table[a_pts[:, None, :, None], b_pts[None, :, None, :]].reshape(len(a_pts) * len(b_pts), -1)
    nb = len(b_pts)
    xi = sorted(tuple(sorted(int(a) * nb + int(b) for a in la for b in lb)) for la in a_lines for lb in b_lines)
    return EmbeddedMMSet(f"segre({p},{r},{q})", f, (p + 1) * (r + 1) - 1, coords, None, xi, d=2, r=2)


# ---------------------------------------------------------------------------
# half-spin geometry D5,5
# ---------------------------------------------------------------------------
def halfspin_generators(q: int = 2) -> np.ndarray:
    """Generators of Q+(9,q) in the family of ``E = <e0..e4>``, as 5x10 RREF bases.

    Coordinates are ``(x, y)`` with ``Q = x . y``.  A generator ``W`` of that
    family meets ``E`` in a subspace ``S`` of odd dimension, and ``W/S`` is
    the graph of an alternating map from ``Ann_F(S)`` into ``E``; running
    over all ``S`` and all alternating matrices lists the family once.
    """
    if q != 2:
        raise ValueError("halfspin_d5 is only built for q=2")
    f = GF(q)
    out = []
    for k in (5, 3, 1):
        for s in pg_enumerate(4, f, k - 1):
            smat = s.matrix
            t = nullspace_rref(smat, f)  # rows: basis of Ann_F(S), in RREF
            piv = [int(np.flatnonzero(row)[0]) for row in t]
            m = len(t)
            slots = list(itertools.combinations(range(m), 2))
            for vals in itertools.product(range(q), repeat=len(slots)):
                a = np.zeros((m, m), dtype=np.int64)
                for (i, j), v in zip(slots, vals):
                    a[i, j] = v
                    a[j, i] = f.neg(v)
                rows = [np.concatenate([row, np.zeros(5, dtype=np.int64)]) for row in smat]
                for i in range(m):
                    x = np.zeros(5, dtype=np.int64)
                    for j in range(m):
                        x[piv[j]] = f.add(int(x[piv[j]]), int(a[i, j]))
                    rows.append(np.concatenate([x, t[i]]))
                out.append(rref(np.array(rows), f))
    return np.array(out)


def nullspace_rref(m: np.ndarray, f: FiniteField) -> np.ndarray:
    from .galois import nullspace

    ns = nullspace(m, f)
    return rref(ns, f) if len(ns) else ns.reshape(0, m.shape[1])


def halfspin_d5(q: int = 2) -> IncidenceGeometry:
    """Half-spin geometry: one family of generators of Q+(9,q).

    A line is the set of generators of the family through a fixed totally
    singular 3-space; two generators are collinear iff they meet in one.
    """
    f = GF(q)
    gens = halfspin_generators(q)
    # every generator as the indicator of its q^5 vectors
    span = np.array([_all_vectors(g, f) for g in gens])
    width = q**10
    ind = np.zeros((len(gens), width), dtype=np.float32)
    rows = np.repeat(np.arange(len(gens)), span.shape[1])
    ind[rows, span.ravel()] = 1.0
    meet = ind @ ind.T
    target = q**3
    lines: dict[bytes, set[int]] = {}
    for i in range(len(gens)):
        for j in np.flatnonzero(meet[i, i + 1 :] == target) + i + 1:
            key = np.packbits(ind[i].astype(bool) & ind[j].astype(bool)).tobytes()
            lines.setdefault(key, set()).update((i, int(j)))
    bad = [sorted(v) for v in lines.values() if len(v) != q + 1]
    if bad:  # pragma: no cover - structural sanity
        raise GeometryError(f"half-spin line with {len(bad[0])} generators")
    g = build_geometry(lines.values(), len(gens), f"halfspin_d5({q})")
    g.meta["generators"] = gens
    return g


def _all_vectors(basis: np.ndarray, f: FiniteField) -> np.ndarray:
    from .galois import _all_combinations

    vecs = _all_combinations(basis, f)
    return f.encode(vecs)


def spinor_embedding(q: int = 2) -> EmbeddedMMSet:
    """Pure spinors of D5 over GF(2) in PG(15,2).

    The even exterior algebra of GF(2)^5 is spanned by the 16 even subsets of
    ``{0..4}``.  Starting from the empty subset, the orbit is closed under the
    unipotent maps ``psi -> psi + e_i e_j psi`` (wedge) and
    ``psi -> psi + d_i d_j psi`` (contraction); over GF(2) no signs appear.
    """
    if q != 2:
        raise ValueError("spinor embedding is only built for q=2")
    f = GF(2)
    subsets = [s for k in (0, 2, 4) for s in itertools.combinations(range(5), k)]
    pos = {frozenset(s): i for i, s in enumerate(subsets)}

    def op(psi: int, i: int, j: int, wedge: bool) -> int:
        out = psi
        for s, idx in pos.items():
            if psi >> idx & 1:
                if wedge and i not in s and j not in s:
                    out ^= 1 << pos[s | {i, j}]
                if not wedge and i in s and j in s:
                    out ^= 1 << pos[s - {i, j}]
        return out

    start = 1 << pos[frozenset()]
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for psi in frontier:
            for i, j in itertools.combinations(range(5), 2):
                for wedge in (True, False):
                    v = op(psi, i, j, wedge)
                    if v not in seen:
                        seen.add(v)
                        nxt.append(v)
        frontier = nxt
    coords = np.array([[v >> i & 1 for i in range(16)] for v in sorted(seen)], dtype=np.int64)
    coords = coords[np.argsort(f.encode(coords))]
    return EmbeddedMMSet("spinor_d5(2)", f, 15, coords, None, [], d=6, r=4)


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class CatalogEntry:
    name: str
    params: tuple[str, ...]
    builder: Callable[..., IncidenceGeometry]
    bounds: dict = field(default_factory=dict)
    expected: Callable[..., dict] | None = None
    description: str = ""


def _quadrangle_geometry(name: str) -> Callable[..., IncidenceGeometry]:
    def build_q(q: int) -> IncidenceGeometry:
        return build_embedded_quadrangle(name, q).geometry()

    return build_q


def _imbrex_h4(q2: int = 4) -> IncidenceGeometry:
    return imbrex_from_embedded_quadrangle(build_embedded_quadrangle("H4", q2))


def _imbrex_q4(q: int = 2) -> IncidenceGeometry:
    return imbrex_from_embedded_quadrangle(build_embedded_quadrangle("Q4", q))


def _pg_count(n: int, q: int) -> int:
    return gaussian_binomial(n + 1, 1, q)


CATALOG: dict[str, CatalogEntry] = {
    e.name: e
    for e in [
        CatalogEntry("grid", ("m", "n"), grid, {"m": range(2, 33), "n": range(2, 33)},
                     lambda m, n: {"points": m * n, "lines": m + n}),
        CatalogEntry("fano", (), lambda: projective_plane(2), {}, lambda: {"points": 7, "lines": 7}),
        CatalogEntry("projective_plane", ("q",), projective_plane, {"q": (2, 3, 4)},
                     lambda q: {"points": q * q + q + 1, "lines": q * q + q + 1}),
        CatalogEntry("affine_plane", ("q",), affine_plane, {"q": (2, 3, 4)},
                     lambda q: {"points": q * q, "lines": q * q + q}),
        CatalogEntry("W", ("q",), _quadrangle_geometry("W"), {"q": (2, 3, 4)},
                     lambda q: {"points": (q + 1) * (q * q + 1), "lines": (q + 1) * (q * q + 1)}),
        CatalogEntry("Q4", ("q",), _quadrangle_geometry("Q4"), {"q": (2, 3, 4)},
                     lambda q: {"points": (q + 1) * (q * q + 1), "lines": (q + 1) * (q * q + 1)}),
        CatalogEntry("Qminus5", ("q",), _quadrangle_geometry("Qminus5"), {"q": (2, 3)},
                     lambda q: {"points": (q + 1) * (q**3 + 1), "lines": (q * q + 1) * (q**3 + 1)}),
        CatalogEntry("H3", ("q2",), _quadrangle_geometry("H3"), {"q2": (4, 9)},
                     lambda q2: _hermitian_counts(3, q2)),
        CatalogEntry("H4", ("q2",), _quadrangle_geometry("H4"), {"q2": (4,)},
                     lambda q2: _hermitian_counts(4, q2)),
        CatalogEntry("grassmann", ("n", "q"), grassmann, {"n": (3, 4, 5), "q": (2, 3)},
                     lambda n, q: {"points": gaussian_binomial(n + 1, 2, q),
                                   "lines": gaussian_binomial(n + 1, 3, q) * gaussian_binomial(3, 1, q),
                                   "symps": gaussian_binomial(n + 1, 4, q) if n >= 3 else 0}),
        CatalogEntry("segre", ("p", "r", "q"), segre, {"p": (1, 2, 3), "r": (1, 2, 3), "q": (2, 3)},
                     lambda p, r, q: {"points": _pg_count(p, q) * _pg_count(r, q),
                                      "lines": _pg_count(p, q) * gaussian_binomial(r + 1, 2, q)
                                      + _pg_count(r, q) * gaussian_binomial(p + 1, 2, q),
                                      "symps": gaussian_binomial(p + 1, 2, q) * gaussian_binomial(r + 1, 2, q)}),
        CatalogEntry("halfspin_d5", ("q",), halfspin_d5, {"q": (2,)},
                     lambda q: {"points": 2295, "lines": 118575}),
        CatalogEntry("imbrex_H4", ("q2",), _imbrex_h4, {"q2": (4,)},
                     lambda q2: {"points": 297, "lines": 1980, "symps": 176, "blocks": 165}),
        CatalogEntry("imbrex_Q4", ("q",), _imbrex_q4, {"q": (2,)},
                     lambda q: {"points": 15, "lines": 45}),
    ]
}


def _hermitian_counts(n: int, q2: int) -> dict:
    s = int(round(q2**0.5))
    if n == 3:
        return {"points": (s**3 + 1) * (s * s + 1), "lines": (s**3 + 1) * (s + 1)}
    return {"points": (s**5 + 1) * (s * s + 1), "lines": (s**5 + 1) * (s**3 + 1)}


def supported() -> list[str]:
    return [f"{e.name}({', '.join(e.params)})" for e in CATALOG.values()]


def build(name: str, **params) -> IncidenceGeometry:
    """Build the catalog geometry ``name`` with integer parameters."""
    entry = CATALOG.get(name)
    if entry is None:
        raise ValueError(f"unknown catalog entry {name!r}; supported: {', '.join(supported())}")
    missing = [p for p in entry.params if p not in params]
    extra = [p for p in params if p not in entry.params]
    if missing or extra:
        raise ValueError(f"{name} takes parameters {entry.params}; got {sorted(params)}")
    for p, allowed in entry.bounds.items():
        if params[p] not in allowed:
            raise ValueError(f"{name}: {p}={params[p]} outside supported range {list(allowed)}")
    g = entry.builder(*[params[p] for p in entry.params])
    label = f"{name}({','.join(str(params[p]) for p in entry.params)})" if entry.params else name
    out = IncidenceGeometry(g.point_count, g.lines, label, g.meta)
    return out


def expected_statistics(name: str, **params) -> dict:
    entry = CATALOG[name]
    return entry.expected(**params) if entry.expected else {}
