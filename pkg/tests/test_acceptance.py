"""Acceptance criteria, one test each; results are summarized at the end of the run."""

import itertools
import time

import numpy as np
import pytest

from conftest import record
from imbrex import catalog
from imbrex.analysis import (
    block_geometry,
    blocks,
    check_collinear_point_on_meet,
    check_pair_regularity,
    check_perp_subspaces,
    check_quadrangle_lemma,
    check_separating_symps,
    check_spread_closure,
    verify_nonclosing_theorem,
)
from imbrex.axioms import (
    check_imb,
    check_polar_space,
    check_strong_parapolar_diam2,
    is_imbrex,
    replay,
    symps_of,
)
from imbrex.gq import perp
from imbrex.mm import check_lmm3, check_mm_axioms, discover_xi, residue, structurally_isomorphic

import oracles


def _gauss(n, k, q):
    return oracles.subspace_count(n, k, q)


def _gq(s, t):
    return (s + 1) * (s * t + 1), (t + 1) * (s * t + 1)


def _failed_leaves(rep):
    if rep.passed:
        return []
    if not rep.parts:
        return [rep]
    return [leaf for p in rep.parts for leaf in _failed_leaves(p)]


# ---------------------------------------------------------------------------
# 1. catalog statistics
# ---------------------------------------------------------------------------
def _h4_imbrex_expected():
    q = 2
    points, lines = _gq(q * q, q**3)
    # points of Gamma are lines of H(4, q^2); lines of Gamma are the blocks of the unital at each point
    unital_blocks = q * q * (q * q - q + 1)
    hyperplanes = _gauss(5, 4, q * q)
    # symps come from the non-tangent hyperplanes, blocks from the points
    return {"points": lines, "lines": points * unital_blocks, "symps": hyperplanes - points, "blocks": points}


STATS = [
    ("W", dict(q=2), dict(zip(("points", "lines"), _gq(2, 2)))),
    ("Qminus5", dict(q=2), dict(zip(("points", "lines"), _gq(2, 4)))),
    ("H3", dict(q2=4), dict(zip(("points", "lines"), _gq(4, 2)))),
    ("H4", dict(q2=4), dict(zip(("points", "lines"), _gq(4, 8)))),
    ("grassmann", dict(n=4, q=2), {"points": _gauss(5, 2, 2), "lines": _gauss(5, 3, 2) * _gauss(3, 1, 2),
                                   "symps": _gauss(5, 4, 2), "symp_size": _gauss(4, 2, 2)}),
    ("segre", dict(p=2, r=2, q=2), {"points": _gauss(3, 1, 2) ** 2, "lines": 2 * _gauss(3, 1, 2) * _gauss(3, 2, 2),
                                    "symps": _gauss(3, 2, 2) ** 2, "symp_size": 9}),
    ("imbrex_H4", dict(q2=4), _h4_imbrex_expected()),
]


@pytest.mark.parametrize("name,params,expected", STATS, ids=[s[0] for s in STATS])
def test_criterion_1_catalog_statistics(name, params, expected):
    t0 = time.perf_counter()
    g = catalog.build(name, **params)
    got = {"points": g.point_count, "lines": len(g.lines)}
    if "symps" in expected:
        sys = symps_of(g)
        got["symps"] = len(sys)
        if "symp_size" in expected:
            got["symp_size"] = sizes.pop() if len(sizes := {len(s) for s in sys}) == 1 else sorted(sizes)
        if name == "segre":
            assert {s.thickness for s in sys} == {"grid"}
    if "blocks" in expected:
        got["blocks"] = len(blocks(g))
    dt = time.perf_counter() - t0
    ok = got == expected and dt < 10
    record("1 catalog statistics", ok, f"{name}={got['points']}/{got['lines']} ({dt:.1f}s)")
    assert got == expected
    assert dt < 10


# ---------------------------------------------------------------------------
# 2. imbrex verdicts
# ---------------------------------------------------------------------------
IMBREX = [
    ("segre", dict(p=1, r=2, q=2), 2),
    ("segre", dict(p=2, r=2, q=2), 2),
    ("grassmann", dict(n=4, q=2), 3),
    ("grassmann", dict(n=5, q=2), 3),
    ("imbrex_H4", dict(q2=4), 2),
]


@pytest.mark.parametrize("name,params,rank", IMBREX, ids=[f"{n}{tuple(p.values())}" for n, p, _ in IMBREX])
def test_criterion_2_imbrex_verdicts(name, params, rank):
    t0 = time.perf_counter()
    g = catalog.build(name, **params)
    rep, prof = is_imbrex(g, exhaustive=True)
    dt = time.perf_counter() - t0
    ok = rep.passed and prof.symplectic_rank == rank and prof.uniform_thickness and dt < 300
    record("2 imbrex verdicts", ok, f"{g.name}: rank {prof.symplectic_rank if prof else None} ({dt:.0f}s)")
    assert rep.passed and prof.constant
    assert prof.symplectic_rank == rank and prof.uniform_thickness
    assert dt < 300


# ---------------------------------------------------------------------------
# 3. non-closing O'Nan configurations in every block
# ---------------------------------------------------------------------------
def test_criterion_3_nonclosing(h44):
    t0 = time.perf_counter()
    rep = verify_nonclosing_theorem(h44)
    dt = time.perf_counter() - t0
    ok = rep.passed and rep.witness["blocks"] == 165 and dt < 60
    record("3 nonclosing", ok, f"{rep.witness.get('blocks')} blocks, per block {rep.witness.get('per_block')} "
                               f"({dt:.0f}s)")
    assert rep.passed and rep.witness["blocks"] == 165 and min(rep.witness["counts"]) > 0
    assert dt < 60


# ---------------------------------------------------------------------------
# 4. pair regularity and spread closure
# ---------------------------------------------------------------------------
def test_criterion_4_pair_regularity_and_spreads(h44):
    t0 = time.perf_counter()
    reg = check_pair_regularity(h44)
    bg, _ = block_geometry(h44)
    spreads = check_spread_closure(h44, bg)
    dt = time.perf_counter() - t0
    ok = reg.passed and reg.witness["symps"] == 176 and spreads.passed and dt < 600
    record("4 pair regularity", ok, f"{reg.witness.get('pairs')} line pairs, {spreads.witness.get('pairs')} "
                                    f"(block, symp) pairs ({dt:.0f}s)")
    assert reg.passed and reg.witness["symps"] == 176
    assert spreads.passed
    assert dt < 600


# ---------------------------------------------------------------------------
# 5. block lemma suite
# ---------------------------------------------------------------------------
LEMMA_PARTS = ["far-line", "far-point", "blocks-meet-once", "point-sees-block", "delta-gq", "symps-ideal"]


@pytest.mark.parametrize("fixture", ["segre12", "h44"])
def test_criterion_5_block_lemmas(fixture, request):
    g = request.getfixturevalue(fixture)
    t0 = time.perf_counter()
    _, delta = block_geometry(g)
    results = {name: delta.part(name) for name in LEMMA_PARTS}
    results["collinear-point-on-meet"] = check_collinear_point_on_meet(g)
    dt = time.perf_counter() - t0
    failed = {k: r.witness for k, r in results.items() if not r.passed}
    record("5 block lemma suite", not failed, f"{g.name}: " + (f"violations {failed}" if failed else "0 violations")
           + f" ({dt:.0f}s)")
    assert not failed


# ---------------------------------------------------------------------------
# 6. embedded sets: MM1, MM2, LMM3
# ---------------------------------------------------------------------------
@pytest.mark.parametrize("which", ["segre", "plucker"])
def test_criterion_6_mm_lmm3(which):
    t0 = time.perf_counter()
    e = catalog.segre_embedding(2, 2, 2) if which == "segre" else catalog.plucker_embedding(4, 2)
    expected = {"segre": (2, 2, 3), "plucker": (4, 3, 6)}[which]
    mm = check_mm_axioms(e)
    lmm = check_lmm3(e)
    imb = check_imb(e.geometry)
    dt = time.perf_counter() - t0
    realized = lmm.witness.get("realized_max")
    ok = mm.passed and lmm.passed and (e.d, e.r, realized) == expected and imb.passed and dt < 900
    record("6 MM/LMM3", ok, f"{e.name}: d={e.d} r={e.r} realized {realized} of bound {lmm.witness.get('bound')}, "
                            f"abstract Imb {imb.verdict} ({dt:.0f}s)")
    assert mm.passed and lmm.passed and imb.passed
    assert (e.d, e.r, realized) == expected
    assert dt < 900


# ---------------------------------------------------------------------------
# 7. residues of the Pluecker embedding
# ---------------------------------------------------------------------------
def test_criterion_7_residue_chain():
    t0 = time.perf_counter()
    e = catalog.plucker_embedding(4, 2)
    target = catalog.segre_embedding(1, 2, 2)
    bad = [x for x in range(len(e)) if not structurally_isomorphic(residue(e, x), target)]
    dt = time.perf_counter() - t0
    record("7 residue chain", not bad and dt < 300, f"{len(e) - len(bad)}/{len(e)} residues match ({dt:.0f}s)")
    assert not bad
    assert dt < 300


# ---------------------------------------------------------------------------
# 8. property suites across the catalog
# ---------------------------------------------------------------------------
def _small_catalog():
    for entry in catalog.CATALOG.values():
        combos = itertools.product(*(entry.bounds.get(p, ()) for p in entry.params))
        for values in combos:
            params = dict(zip(entry.params, values))
            if entry.name == "grid" and (params["m"] > params["n"] or params["n"] > 6):
                continue  # grids are all alike; a few shapes suffice
            stats = catalog.expected_statistics(entry.name, **params)
            if stats.get("points", 0) <= 500:
                yield entry.name, params


def _galois_connection(g, rng):
    nl = len(g.lines)
    for _ in range(10):
        a = set(rng.choice(nl, size=min(nl, int(rng.integers(1, 4))), replace=False).tolist())
        b = a | {int(rng.integers(nl))}
        pa = set(perp(g, a))
        if not set(perp(g, b)) <= pa:
            return {"antitone": sorted(a)}
        if pa and (not a <= set(perp(g, pa)) or set(perp(g, perp(g, pa))) != pa):
            return {"closure": sorted(a)}
    return None


def test_criterion_8_property_suites():
    t0 = time.perf_counter()
    rng = np.random.default_rng(0)
    failures = []
    counted = 0
    for name, params in _small_catalog():
        g = catalog.build(name, **params)
        counted += 1
        gal = _galois_connection(g, rng)
        if gal:
            failures.append((g.name, "galois", gal))
        reports = [check_polar_space(g), check_strong_parapolar_diam2(g, exhaustive=True)]
        if reports[1].passed:
            reports.append(check_imb(g, exhaustive=True))
            lemmas = [check_quadrangle_lemma(g), check_perp_subspaces(g)]
            if len(symps_of(g)) >= 2:
                lemmas.append(check_separating_symps(g))
            failures += [(g.name, r.axiom, r.witness) for r in lemmas if not r.passed]
        for r in reports:
            for leaf in _failed_leaves(r):
                if not replay(g, leaf):
                    failures.append((g.name, "replay " + leaf.axiom, leaf.witness))
    dt = time.perf_counter() - t0
    detail = f"{counted} geometries, {len(failures)} failures" + (f": {failures}" if failures else "") + f" ({dt:.0f}s)"
    record("8 property suites", not failures, detail)
    assert not failures


# ---------------------------------------------------------------------------
# 9. stretch: the half-spin geometry
# ---------------------------------------------------------------------------
@pytest.mark.slow
def test_criterion_9_halfspin_stretch():
    t0 = time.perf_counter()
    g = catalog.build("halfspin_d5", q=2)
    rep, prof = is_imbrex(g, sample=100_000, seed=0, exhaustive=False)
    triples = rep.part("Imb").witness.get("triples", 0) if rep.passed else 0
    e = catalog.spinor_embedding(2)
    e.xi = discover_xi(e, exhaustive=False)
    lmm = check_lmm3(e, sample=100_000, seed=0)
    dt = time.perf_counter() - t0
    ok = rep.passed and prof.symplectic_rank == 4 and triples >= 100_000 and lmm.passed and lmm.witness["bound"] == 9
    record("9 stretch halfspin", ok, f"rank {prof.symplectic_rank if prof else None}, {triples} Imb triples, "
                                     f"LMM3 realized {lmm.witness.get('realized_max')} of bound "
                                     f"{lmm.witness.get('bound')} ({dt:.0f}s)")
    assert ok
