import json

import pytest

from imbrex import catalog
from imbrex.axioms import (
    AxiomReport,
    PreconditionError,
    check_imb,
    check_imb_star,
    check_polar_space,
    check_pps1,
    check_strong_parapolar_diam2,
    far_lines,
    is_imbrex,
    replay,
)
from imbrex.geometry import build_geometry

import oracles

# five lines of size 3 closing up into a pentagon: 1 sees no point of the line through 4, 5, 6
PENTAGON = build_geometry([[0, 1, 2], [2, 3, 4], [4, 5, 6], [6, 7, 8], [8, 9, 0]], 10)
# 3 is collinear with exactly two points of the line 0 1 2
TWO_OF_THREE = build_geometry([[0, 1, 2], [0, 3, 4], [1, 3, 5]], 6)


def _strip(d):
    if isinstance(d, dict):
        return {k: _strip(v) for k, v in d.items() if k != "ms"}
    if isinstance(d, list):
        return [_strip(v) for v in d]
    return d


def test_polar_space_examples():
    w = check_polar_space(catalog.build("W", q=3), expect_rank=2)
    assert w.passed and w.witness == {"rank": 2, "thickness": "thick"}
    assert [p.axiom for p in w.parts] == ["PS1", "PS2", "PS3", "PS4"]
    q = check_polar_space(catalog.build("Qminus5", q=2))
    assert q.passed and q.witness["rank"] == 2
    assert not check_polar_space(catalog.build("W", q=2), expect_rank=3).part("PS3").passed


@pytest.mark.parametrize("g,axiom", [
    (build_geometry([[0, 1], [2, 3]], 4), "PS1"),
    (catalog.build("fano"), "PS2"),
    (PENTAGON, "PS4"),
])
def test_polar_failures_replay(g, axiom):
    rep = check_polar_space(g)
    part = rep.part(axiom)
    assert not part.passed
    assert replay(g, part) and replay(g, rep)


def test_ps3_failure_replays():
    rep = check_polar_space(catalog.build("W", q=2), expect_rank=3)
    assert replay(catalog.build("W", q=2), rep.part("PS3"))


def test_pps1_point_witness_replays():
    rep = check_pps1(TWO_OF_THREE)
    assert not rep.passed and rep.witness["collinear"] == 2
    assert replay(TWO_OF_THREE, rep)


def test_pps1_unrealized_cases_on_grid():
    g = catalog.grid(3, 3)
    rep = check_pps1(g)
    assert rep.witness == {"unrealized": ["0", "all"]}
    assert replay(g, rep)


def test_parapolar_failures_replay():
    two = catalog.disjoint_union(catalog.grid(3, 3), catalog.grid(3, 3))
    rep = check_strong_parapolar_diam2(two)
    assert not rep.part("connected").passed and replay(two, rep.part("connected"))
    path = build_geometry([[0, 1, 2], [2, 3, 4], [4, 5, 6]], 7)
    rep = check_strong_parapolar_diam2(path)
    assert not rep.part("diameter").passed and replay(path, rep.part("diameter"))
    with pytest.raises(KeyError):
        rep.part("PPS2")  # skipped once the diameter check fails


def test_pps2_failure_on_dual_grid_symps():
    g = catalog.build("imbrex_Q4", q=2)
    rep = check_strong_parapolar_diam2(g)
    pps2 = rep.part("PPS2")
    assert not pps2.passed and "PS1" in pps2.witness["violations"]
    assert replay(g, pps2) and replay(g, rep)


def test_replay_rejects_pass_and_forged_witnesses(segre12):
    ok = check_imb(segre12)
    with pytest.raises(ValueError):
        replay(segre12, ok)
    x = 0
    line = segre12.lines[int(far_lines(segre12, x)[0])]
    forged = AxiomReport("Imb", "fail", {"x": x, "line": list(line), "y1": line[0], "y2": line[1]})
    assert not replay(segre12, forged)
    assert not replay(segre12, AxiomReport("PS1", "fail", {"line": list(segre12.lines[0])}))
    with pytest.raises(ValueError):
        replay(segre12, AxiomReport("Nonsense", "fail", {}))


@pytest.mark.parametrize("fixture", ["segre12", "segre22"])
def test_imb_agrees_with_brute_force(fixture, request):
    g = request.getfixturevalue(fixture)
    for star in (False, True):
        rep = (check_imb_star if star else check_imb)(g)
        assert rep.passed == (oracles.imb_verdict(g, star=star) is None)


def test_imb_requires_parapolar():
    with pytest.raises(PreconditionError):
        check_imb(catalog.build("imbrex_Q4", q=2))
    with pytest.raises(PreconditionError):
        check_imb_star(catalog.grid(3, 3))


@pytest.mark.parametrize("fixture,rank,thickness", [
    ("segre12", 2, "grid"), ("segre22", 2, "grid"), ("a42", 3, "thick"), ("h44", 2, "thick"),
])
def test_is_imbrex_examples(fixture, rank, thickness, request):
    g = request.getfixturevalue(fixture)
    rep, prof = is_imbrex(g)
    assert rep.passed
    assert prof.constant and prof.symplectic_rank == rank
    assert prof.uniform_thickness and set(prof.thickness) == {thickness}
    assert [p.axiom for p in rep.parts] == ["parapolar", "PPS4", "Imb", "constant-rank"]
    # the weaker axiom follows from the stronger one
    assert check_imb_star(g).passed


def test_report_json_round_trip(segre12):
    rep, _ = is_imbrex(segre12)
    d = rep.to_dict()
    text = json.dumps(d, sort_keys=True)
    back = AxiomReport.from_dict(json.loads(text))
    assert back.to_dict() == d
    assert set(d) == {"axiom", "verdict", "witness", "ms", "parts"}
    names = {p["axiom"] for p in d["parts"]}
    assert names == {"parapolar", "PPS4", "Imb", "constant-rank"}
    assert bool(rep) and "imbrex: pass" in str(rep)


def test_sampled_scan_is_deterministic(a42):
    a = check_imb(a42, sample=500, seed=7)
    b = check_imb(a42, sample=500, seed=7)
    assert _strip(a.to_dict()) == _strip(b.to_dict())
    assert a.witness["sampled"] and a.witness["seed"] == 7
    full = check_imb(a42)
    assert full.witness["triples"] > a.witness["triples"]


def test_exhaustive_report_counts_every_triple(segre12):
    rep = check_imb(segre12, exhaustive_report=True)
    # each point of a Segre(1, 2) sees far lines; every pair on each is a triple
    n_far = sum(len(far_lines(segre12, x)) for x in range(segre12.point_count))
    assert rep.witness["triples"] == n_far * 3
