import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strata.flips import (Flip, FlipError, apply_flip, available_flips, canonicalize, state_key,
                          successors)
from strata.lattice import form_invariants
from strata.seeds import builtin_names, builtin_seed
from strata.state import VirtualFunction, class_info, eps, ind, problems, real_string_formula

SEEDS = {n: builtin_seed(n) for n in builtin_names()}


def walk(seed, picks):
    v, out = seed, []
    for k in picks:
        fl = available_flips(v)
        if not fl:
            break
        f = fl[k % len(fl)]
        w = apply_flip(v, f)
        out.append((v, f, w))
        v = w
    return out


def state_with_pairs(seed="p82-mat"):
    v = SEEDS[seed]
    rng = np.random.default_rng(3)
    while v.pairs == 0:
        fl = available_flips(v)
        deaths = [f for f in fl if f.kind == "death"]
        v = apply_flip(v, deaths[0] if deaths else fl[rng.integers(len(fl))])
    return v


def test_eps_signs():
    assert (eps(0, True), eps(1, True), eps(0, False), eps(1, False)) == (1, -1, -1, 1)


def test_class_aliases():
    assert class_info("p8_2").name == "P8^2"
    assert class_info("X9^2").euler == -3


def test_seed_states_are_valid():
    for v in SEEDS.values():
        assert problems(v) == []
        assert canonicalize(v).same_data(v)


def test_real_string_formula_on_seed():
    v = SEEDS["p82-mat"]
    assert np.array_equal(real_string_formula(v.gram, v.morse, v.zero_position),
                          v.rstring[:v.n_real])


def test_corrupted_state_is_diagnosed():
    v = SEEDS["p82-mat"]
    bad_r = v.replace(rstring=v.rstring + np.eye(v.mu, dtype=np.int64)[0])
    assert any(p.startswith("real_string") for p in problems(bad_r))
    g = v.gram.copy()
    g[0, 1] = g[0, 1] + 1
    assert any(p.startswith("symmetry") for p in problems(v.replace(gram=g)))
    assert any(p.startswith("morse") for p in problems(v.replace(morse=(5,) + v.morse[1:])))


def test_x9_2_euler_check():
    m = -2 * np.eye(9, dtype=np.int64)
    good = VirtualFunction.from_canonical("X9^2", (0, 1, 1, 0, 1, 1, 0, 1, 1), 4, 0, m)
    assert problems(good) == []
    bad = VirtualFunction.from_canonical("X9^2", (0,) * 9, 4, 0, m)
    assert any(p.startswith("euler") for p in problems(bad))


def test_unavailable_flip_names_reason():
    v = SEEDS["p82-mat"]
    with pytest.raises(FlipError, match="transposition"):
        apply_flip(v, Flip("transposition", 40))
    with pytest.raises(FlipError, match="pair_move"):
        apply_flip(v, Flip("pair_move", 0))


def test_flip_labels():
    assert Flip("birth", 1, 2, -1).label() == "B1.2-"
    assert Flip("transposition", 3).label() == "T3"
    assert Flip("zero_crossing", 0, 1).discriminant


def test_state_key_needs_canonical_form():
    v = state_with_pairs()
    a = v.n_real
    d = np.ones(v.mu, dtype=np.int64)
    d[a] = d[a + 1] = -1
    turned = v.replace(gram=v.gram * np.outer(d, d), rstring=v.rstring * d)
    if turned.same_data(v):
        pytest.skip("pair has no orienting entry")
    with pytest.raises(FlipError):
        state_key(turned)
    assert canonicalize(turned).same_data(v)
    assert len(state_key(v)) == 64


def test_successors_follow_catalogue():
    v = SEEDS["p81-base"]
    assert [f for f, _ in successors(v)] == available_flips(v)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(sorted(SEEDS)), st.lists(st.integers(0, 10**6), min_size=1, max_size=30))
def test_walk_preserves_invariants(name, picks):
    seed = SEEDS[name]
    inv = form_invariants(seed.gram)
    for v, f, w in walk(seed, picks):
        assert problems(w) == []
        assert form_invariants(w.gram) == inv
        assert canonicalize(w).same_data(w)
        di = ind(w) - ind(v)
        assert abs(di) == 1 if f.discriminant else di == 0


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(sorted(SEEDS)), st.lists(st.integers(0, 10**6), min_size=1, max_size=20))
def test_every_flip_has_an_inverse(name, picks):
    for v, f, w in walk(SEEDS[name], picks):
        back = [g for g, u in successors(w) if u.same_data(v)]
        assert back, f"no flip undoes {f.label()}"
