"""Acceptance criteria, one test each; the terminal summary lists their outcomes."""
import time
from collections import Counter

import numpy as np
import pytest

from strata.fixtures import fixture_check, load_fixture
from strata.graph import (component_of, flip_walks, involution_minus, involution_pairs,
                          involution_ze)
from strata.lattice import form_invariants, matrix_problems
from strata.oracle import ind_of_report, solve_j_equation
from strata.query import Query, builtin_query, filter_vf
from strata.seeds import PlaceholderSeed, builtin_names, builtin_seed
from strata.state import VirtualFunction, ind

P8_CARDS = [258, 156, 60, 60, 1216, 336, 336, 1318, 844, 844, 1648, 1648, 262, 94, 94]
P8_INDS = [-3] * 4 + [-2] * 3 + [-1] * 3 + [0] * 2 + [1] * 3


def test_1_flip_congruence(criterion):
    t = time.perf_counter()
    rng = np.random.default_rng(2024)
    steps, bad = 0, []
    for name in ("p81-base", "p82-mat"):
        seed = builtin_seed(name)
        ref = form_invariants(seed.gram)
        for _, f, w in flip_walks(seed, 500, 50, rng):
            steps += 1
            if form_invariants(w.gram) != ref or matrix_problems(w.matrix):
                bad.append((name, f.label()))
    secs = time.perf_counter() - t
    criterion("1", not bad, f"1000 walks, {steps} flips, {len(bad)} violations, {secs:.1f} s")
    assert not bad


def test_2_reversibility(criterion, p81, p82):
    checked, missing, states = 0, 0, 0
    for e, limit in ((p82, len(p82.graph)), (p81, 10_000 - len(p82.graph))):
        states += limit
        back = {(a, b) for a, _, b in e.graph.edges}
        for a, f, b in e.graph.edges:
            if a < limit:
                checked += 1
                missing += (b, a) not in back
    criterion("2", missing == 0, f"{states} states, {checked} flips, {missing} without inverse")
    assert missing == 0


def test_3_ind_contract(criterion, p81, p82):
    bad_same, bad_cross, values = 0, 0, set()
    for e in (p81, p82):
        g = e.graph
        values |= {ind(v) for v in g.nodes}
        for a, f, b in g.edges:
            d = ind(g.nodes[b]) - ind(g.nodes[a])
            if f.discriminant:
                bad_cross += abs(d) != 1
            else:
                bad_same += d != 0
    ok = bad_same == 0 and bad_cross == 0 and values <= {1, 0, -1, -2, -3}
    criterion("3", ok, f"Ind values {sorted(values)}, {bad_same} + {bad_cross} violations")
    assert ok


def test_4_involutions(criterion, p81, p82):
    errs = []
    for e in (p81, p82):
        g, comps = e.graph, e.comps
        for v in g.nodes:
            w = involution_minus(v)
            if not involution_minus(w).same_data(v) or ind(w) != ind(v) or g.lookup(w) is None:
                errs.append("state")
                break
        pairs = involution_pairs(g, comps)
        for a, b in pairs.items():
            if pairs[b] != a or (comps[a].ind, comps[a].card) != (comps[b].ind, comps[b].card):
                errs.append("component")
    m = -2 * np.eye(9, dtype=np.int64)
    x92 = VirtualFunction.from_canonical("X9^2", (0, 1, 1, 0, 1, 1, 0, 1, 1), 4, 0, m)
    ze = 0
    for _, _, v in flip_walks(x92, 50, 20, np.random.default_rng(7)):
        ze += 1
        w = involution_ze(v)
        if ind(w) != -3 - ind(v) or not involution_ze(w).same_data(v):
            errs.append("ze")
    criterion("4", not errs, f"minus on {len(p81.graph) + len(p82.graph)} P8 states; "
                             f"ze on {ze} synthetic X9^2 states; {len(errs)} errors")
    assert not errs


def test_5_ci4(criterion):
    res = fixture_check("ci4")
    r = res.report
    got = [(round(c.value, 8), c.morse_index) for c in sorted(r.points, key=lambda c: c.value)]
    want = sorted([(0.0, 0)] + [(round(88 / 49, 8), 1)] * 3 + [(4.0, 2)] * 3 + [(12.0, 1)])
    mids = [-1.0, 44 / 49, (88 / 49 + 4) / 2, 8.0, 13.0]
    scan = [ind_of_report(r, c) for c in mids]
    ok = res.passed and got == want and scan == [0, 1, -2, 1, 0]
    criterion("5", ok, f"8 points within 1e-8: {got == want}; Ind(f-C) at midpoints {scan}")
    assert ok, res.line()


def test_6_oracle_values(criterion):
    checks = {n: fixture_check(n) for n in ("e258", "ci3", "lemx+", "1216")}
    ci3 = checks["ci3"].report
    ci3_ok = ci3.ind == 1 and sorted(round(c.value, 8) for c in ci3.points) == [-2.0, 2.0]
    lem = [c for c in checks["lemx+"].report.points if abs(c.value + 27 / 256) < 1e-8]
    lem_ok = len(lem) == 1 and np.allclose(lem[0].coords, (-0.75, 0.0), atol=1e-6)
    roots = solve_j_equation()
    j_ok = np.allclose(roots, [-11.118, -1.395], atol=1e-3)
    r1216 = checks["1216"].report
    omega = [c.value for c in r1216.points if c.morse_index == 2]
    w_ok = len(omega) == 2 and all(abs(w - 3.14) < 0.01 for w in omega) and r1216.complex_count == 2
    ok = all(c.passed for c in checks.values()) and ci3_ok and lem_ok and j_ok and w_ok
    criterion("6", ok, f"e258/ci3/lemx+/1216 fixtures "
                       f"{'pass' if all(c.passed for c in checks.values()) else 'fail'}; "
                       f"roots {[round(x, 4) for x in roots]}; omega {omega[0]:.6f}")
    assert ok, [c.line() for c in checks.values()]


def test_7_family_scans(criterion):
    res = [fixture_check(n) for n in ("fam1", "fam3")]
    samples = [load_fixture(n)["samples"] for n in ("fam1", "fam3")]
    ok = all(r.passed for r in res) and samples == [64, 64]
    criterion("7", ok, "; ".join(r.line() for r in res))
    assert ok


def test_8_p81(criterion, p81):
    inds = sorted(c.ind for c in p81.comps)
    ok = len(p81.graph) == 6503 and len(p81.comps) == 7 and inds == [-3, -3, -2, -1, 0, 1, 1]
    ok = ok and p81.seconds < 60
    criterion("8", ok, f"{len(p81.graph)} states, {len(p81.comps)} components, Ind {inds}, "
                       f"{p81.seconds:.1f} s")
    assert ok


def test_9_p82(criterion, p82):
    comps = p82.comps
    got = Counter((c.ind, c.card) for c in comps)
    want = Counter(zip(P8_INDS, P8_CARDS))
    pairs = involution_pairs(p82.graph, comps)
    swapped = sorted((comps[a].card, comps[b].card) for a, b in pairs.items() if a < b and a != b)
    fixed = sorted(comps[a].card for a, b in pairs.items() if a == b)
    ok = (len(p82.graph) == 9174 and len(comps) == 15 and got == want
          and swapped == [(60, 60), (94, 94), (336, 336), (844, 844), (1648, 1648)]
          and fixed == [156, 258, 262, 1216, 1318])
    criterion("9", ok, f"{len(p82.graph)} states, {len(comps)} components, (Ind, Card) table "
                       f"{'matches' if got == want else 'differs'}, involution swaps {len(swapped)} pairs")
    assert ok


def test_10a_filter_chain(criterion, p82):
    chain = builtin_query("p82-six-real-chain")
    counts = [len(filter_vf(p82.graph, chain.prefix(k))) for k in range(1, 5)]
    final = filter_vf(p82.graph, chain)
    where = component_of(p82.comps)
    cards = Counter(p82.comps[where[i]].card for i in final)
    ok = counts == [1897, 140, 20, 12]
    criterion("10.a", ok, f"chain {' -> '.join(map(str, counts))}; final states by Card {dict(cards)}")
    assert ok


@pytest.mark.xfail(strict=True, reason="the block predicate selects 28 states, 4 of them in Card 156; "
                                       "the reference count of 6 is not reproduced")
def test_10b_block156(criterion, p82):
    q = builtin_query("p82-block156")
    hits = filter_vf(p82.graph, q)
    where = component_of(p82.comps)
    cards = Counter(p82.comps[where[i]].card for i in hits)
    narrowed = filter_vf(p82.graph, Query({"all": q.data["all"] + [{"ind": -3}]}))
    ncards = Counter(p82.comps[where[i]].card for i in narrowed)
    ok = len(hits) == 6 and set(cards) == {156}
    criterion("10.b", ok, f"{len(hits)} states {dict(cards)}; with Ind -3: {len(narrowed)} "
                          f"states {dict(ncards)}", expected_failure=True)
    assert ok


STRETCH = {"x9-plus": 7, "x9-minus": 7, "x9-1": 10, "x9-2": 18, "j10-1": 10, "j10-3": 23}


@pytest.mark.parametrize("name", sorted(STRETCH))
def test_11_stretch(criterion, name):
    from strata.graph import explore, virtual_components
    try:
        seed = builtin_seed(name)
    except PlaceholderSeed:
        criterion(f"11.{name}", False, f"target {STRETCH[name]} components; seed is a placeholder "
                                        "awaiting user-supplied morsification data",
                  expected_failure=True)
        pytest.xfail("placeholder seed: needs user-supplied morsification data")
    n = len(virtual_components(explore([seed])))
    criterion(f"11.{name}", n == STRETCH[name], f"{n} components, target {STRETCH[name]}")
    assert n == STRETCH[name]


def test_stretch_names_are_registered():
    assert set(STRETCH) <= set(builtin_names(include_placeholders=True))
