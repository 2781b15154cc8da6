import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from strata.flips import apply_flip, available_flips, canonicalize
from strata.graph import (BudgetExceeded, InconsistentCounts, component_of, explore, flip_walks,
                          hi_candidates, involution_minus, involution_pairs, involution_x91,
                          involution_ze, stats)
from strata.seeds import builtin_seed
from strata.state import VirtualFunction, ind, problems


def synthetic_x9_2():
    # orthogonal cycles: satisfies every state invariant, not a morsification
    m = -2 * np.eye(9, dtype=np.int64)
    return VirtualFunction.from_canonical("X9^2", (0, 1, 1, 0, 1, 1, 0, 1, 1), 4, 0, m)


def test_p81_counts(p81):
    assert len(p81.graph) == 6503
    assert sorted((c.card, c.ind) for c in p81.comps) == [
        (128, 1), (128, 1), (210, -3), (210, -3), (1370, -2), (1992, -1), (2465, 0)]


def test_p82_counts(p82):
    assert len(p82.graph) == 9174
    assert len(p82.comps) == 15
    seed_comp = component_of(p82.comps)[p82.graph.lookup(p82.seed)]
    assert p82.comps[seed_comp].card == 258


def test_components_partition_nodes(p82):
    members = sorted(m for c in p82.comps for m in c.members)
    assert members == list(range(len(p82.graph)))
    for c in p82.comps:
        assert {ind(p82.graph.nodes[m]) for m in c.members} == {c.ind}


def test_budget():
    with pytest.raises(BudgetExceeded):
        explore([builtin_seed("p81-base")], budget=50)


def test_threads_do_not_change_numbering(p81):
    g = explore([builtin_seed("p81-base")], threads=4)
    assert g.keys == p81.graph.keys
    assert g.edges == p81.graph.edges


def test_other_seed_reaches_same_graph(p82):
    g = explore([builtin_seed("p82-fig7-e258")])
    assert sorted(g.keys) == sorted(p82.graph.keys)


def test_involution_minus_pairs_equal_cards(p82):
    pairs = involution_pairs(p82.graph, p82.comps)
    for a, b in pairs.items():
        assert pairs[b] == a
        ca, cb = p82.comps[a], p82.comps[b]
        assert (ca.card, ca.ind) == (cb.card, cb.ind)
    swapped = sorted(p82.comps[a].card for a, b in pairs.items() if a != b)
    assert swapped == [60, 60, 94, 94, 336, 336, 844, 844, 1648, 1648]


def test_involution_minus_on_states(p81):
    for v in p81.graph.nodes[::97]:
        w = involution_minus(v)
        assert problems(w) == []
        assert involution_minus(w).same_data(v)
        assert p81.graph.lookup(w) is not None


def test_involution_domains():
    with pytest.raises(ValueError):
        involution_minus(synthetic_x9_2())
    with pytest.raises(ValueError):
        involution_ze(builtin_seed("p82-mat"))


def test_involution_ze_on_walks():
    rng = np.random.default_rng(11)
    for _, _, v in flip_walks(synthetic_x9_2(), 30, 20, rng):
        w = involution_ze(v)
        assert ind(w) == -3 - ind(v)
        assert involution_ze(w).same_data(v)


def test_involution_x91_on_walks():
    m = -2 * np.eye(9, dtype=np.int64)
    seed = VirtualFunction.from_canonical("X9^1", (0, 1, 1, 0, 1, 1, 0, 1, 2), 5, 0, m)
    assert problems(seed) == []
    rng = np.random.default_rng(5)
    for _, _, v in flip_walks(seed, 30, 20, rng):
        w = involution_x91(v)
        assert ind(v) + ind(w) == -1
        assert involution_x91(w).same_data(v)
    with pytest.raises(ValueError):
        involution_x91(synthetic_x9_2())


def test_stats_rows(p82):
    rows = stats(p82.graph, p82.comps)
    assert [r.ind for r in rows] == sorted(r.ind for r in rows)
    ids = {r.component_id for r in rows}
    assert len(ids) == 15 and all(r.partner_id in ids for r in rows)
    assert [r.card for r in rows if r.ind == -3] == [258, 156, 60, 60]


def test_flip_walks_steps():
    steps = flip_walks(builtin_seed("p81-base"), 3, 5, np.random.default_rng(0))
    assert len(steps) == 15
    for v, f, w in steps:
        assert f in available_flips(v)
        assert apply_flip(v, f).same_data(w)
        assert canonicalize(w).same_data(w)


def test_hi_examples():
    assert hi_candidates((1, 0, 0, 0)) == {(1, 0, 0)}
    assert hi_candidates((1, 3, 0, 0)) == {(0, 2, 0), (1, 3, 0)}
    assert hi_candidates((0, 0, 1, 0)) == {(0, 0, 1)}
    with pytest.raises(InconsistentCounts):
        hi_candidates((0, 0, 0, 1))
    with pytest.raises(ValueError):
        hi_candidates((1, 0, 0, 0), cls="X9+")


@given(st.lists(st.integers(0, 4), min_size=4, max_size=4))
def test_hi_candidates_obey_morse_inequalities(c):
    try:
        out = hi_candidates(c)
    except InconsistentCounts:
        assert c[3] > c[2]
        return
    for b in out:
        assert all(0 <= b[i] <= c[i] for i in range(3))
        assert b[0] - b[1] + b[2] == c[0] - c[1] + c[2] - c[3]
