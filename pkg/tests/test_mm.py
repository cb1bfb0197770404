import itertools

import numpy as np
import pytest

from imbrex import catalog
from imbrex.axioms import PreconditionError
from imbrex.galois import GF, ProjSubspace
from imbrex.mm import (
    EmbeddedMMSet,
    check_lmm3,
    check_mm_axioms,
    discover_xi,
    full_lines,
    residue,
    structurally_isomorphic,
    tangent_space,
    x_collinear,
)


@pytest.fixture(scope="module")
def seg12():
    return catalog.segre_embedding(1, 2, 2)


@pytest.fixture(scope="module")
def seg22():
    return catalog.segre_embedding(2, 2, 2)


@pytest.fixture(scope="module")
def pl42():
    return catalog.plucker_embedding(4, 2)


def _span_points(e, rows):
    return {tuple(p) for p in ProjSubspace.span(e.field, e.ambient_dim, e.points[list(rows)]).points()}


def test_full_lines_match_brute_force(seg12):
    pts = {tuple(p): i for i, p in enumerate(seg12.points)}
    brute = set()
    for x, y in itertools.combinations(range(len(seg12)), 2):
        line = _span_points(seg12, [x, y])
        if all(p in pts for p in line):
            brute.add(tuple(sorted(pts[p] for p in line)))
    assert set(full_lines(seg12.field, seg12.points)) == brute
    for x, y in itertools.combinations(range(len(seg12)), 2):
        assert x_collinear(seg12, x, y) == any(x in l and y in l for l in brute)
    with pytest.raises(ValueError):
        x_collinear(seg12, 0, 0)


def test_membership_matches_span_enumeration(seg12):
    pts = {tuple(p): i for i, p in enumerate(seg12.points)}
    for i, members in enumerate(seg12.xi):
        inside = {pts[p] for p in _span_points(seg12, members) if p in pts}
        assert set(seg12.xi_points(i).tolist()) == inside


@pytest.mark.parametrize("fx", ["seg12", "seg22", "pl42"])
def test_mm_axioms_hold(fx, request):
    e = request.getfixturevalue(fx)
    rep = check_mm_axioms(e)
    assert rep.passed
    assert [p.axiom for p in rep.parts] == ["structure", "MM1", "uniqueness", "MM2"]
    assert e.proper


def test_mm1_and_uniqueness_failures(seg12):
    fewer = EmbeddedMMSet("fewer", seg12.field, seg12.ambient_dim, seg12.points, seg12.geometry,
                          seg12.xi[1:], seg12.d, seg12.r)
    assert not check_mm_axioms(fewer).part("MM1").passed
    doubled = EmbeddedMMSet("doubled", seg12.field, seg12.ambient_dim, seg12.points, seg12.geometry,
                            seg12.xi + seg12.xi[:1], seg12.d, seg12.r)
    assert not check_mm_axioms(doubled).part("uniqueness").passed
    with pytest.raises(PreconditionError):
        check_lmm3(fewer)


def test_mm2_failure_reports_meet_outside_x():
    f = GF(2)
    # the members span the lines e0e1 and e2(e0+e1+e2), which meet in e0+e1, not a point of X
    pts = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [1, 1, 1, 0], [0, 0, 0, 1]])
    e = EmbeddedMMSet("bad", f, 3, pts, None, [(0, 1), (2, 3)], 0, 0)
    rep = check_mm_axioms(e, structural=False).part("MM2")
    assert not rep.passed
    assert rep.witness["point"] == [1, 1, 0, 0] and rep.witness["meet_dim"] == 0


def test_structure_failure(seg12):
    wrong = EmbeddedMMSet("wrong", seg12.field, seg12.ambient_dim, seg12.points, seg12.geometry,
                          seg12.xi, seg12.d + 1, seg12.r)
    assert not check_mm_axioms(wrong).part("structure").passed


@pytest.mark.parametrize("fx,tdim", [("seg22", 2), ("pl42", 4)])
def test_tangent_spaces_of_quadrics(fx, tdim, request):
    # a point of a non-degenerate quadric in PG(d + 1) has a tangent hyperplane of dimension d
    e = request.getfixturevalue(fx)
    assert e.d == tdim
    for i in range(0, len(e.xi), max(1, len(e.xi) // 5)):
        x = int(e.xi_points(i)[0])
        t = tangent_space(e, i, x)
        assert t.consistent and t.dim == tdim
    outside = int(np.flatnonzero(~e.membership[0])[0])
    with pytest.raises(ValueError):
        tangent_space(e, 0, outside)


@pytest.mark.parametrize("fx", ["seg12", "seg22"])
def test_lmm3_bound(fx, request):
    e = request.getfixturevalue(fx)
    rep = check_lmm3(e)
    assert rep.passed
    w = rep.witness
    assert w["bound"] == 2 * e.d - e.r + 1
    assert w["realized_max"] <= w["bound"]
    assert sum(w["dimensions"].values()) == w["pairs"]


def test_lmm3_sampled_is_deterministic(pl42):
    a = check_lmm3(pl42, sample=400, seed=5)
    b = check_lmm3(pl42, sample=400, seed=5)
    assert a.witness == b.witness and a.witness["pairs"] == 400 and a.passed


def test_residue_of_grassmannian_is_segre(pl42):
    res = residue(pl42, 0)
    assert (len(res), res.ambient_dim, res.d, res.r) == (21, 5, 2, 2)
    # lines through a line of PG(4) meet it in a point and lie in a plane through it: PG(1) x PG(2)
    assert structurally_isomorphic(res, catalog.segre_embedding(1, 2, 2))
    assert check_mm_axioms(res).passed


def test_residue_of_segre_plane_product(seg22):
    res = residue(seg22, 0)
    # two disjoint lines in PG(3), one per factor
    assert (len(res), res.ambient_dim, len(res.geometry.lines)) == (6, 3, 2)
    assert len(res.xi) == 9 and {len(x) for x in res.xi} == {2}


def test_residue_rejects_isolated_point():
    f = GF(2)
    e = EmbeddedMMSet("pts", f, 1, np.array([[1, 0], [0, 1]]))
    with pytest.raises(ValueError):
        residue(e, 0)


def test_discover_xi_recovers_members(seg12, seg22):
    for e in (seg12, seg22):
        assert discover_xi(e) == sorted(e.xi)


def test_structural_isomorphism_distinguishes(seg12, seg22):
    assert structurally_isomorphic(seg12, catalog.segre_embedding(1, 2, 2))
    assert not structurally_isomorphic(seg12, seg22)
