import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strata.flips import available_flips, apply_flip, state_key
from strata.seeds import (FORMAT_VERSION, PlaceholderSeed, SeedError, builtin_class,
                          builtin_is_placeholder, builtin_names, builtin_seed, builtin_text,
                          format_seed, from_json, load_seed, parse_seed, resolve_seed, save_seed,
                          to_json, validate_seed)

P82 = builtin_text("p82-mat")


def test_registry():
    assert builtin_names() == ["p81-base", "p82-fig7-e258", "p82-mat"]
    allnames = builtin_names(include_placeholders=True)
    assert {"x9-plus", "x9-minus", "x9-1", "x9-2", "j10-1", "j10-3"} <= set(allnames)
    assert builtin_is_placeholder("j10-3") and not builtin_is_placeholder("p82-mat")
    assert builtin_class("x9-2") == "X9^2"


@pytest.mark.parametrize("name", ["x9-plus", "x9-minus", "x9-1", "x9-2", "j10-1", "j10-3"])
def test_placeholders_refuse_to_build(name):
    with pytest.raises(PlaceholderSeed, match="placeholder"):
        builtin_seed(name)


def test_unknown_builtin():
    with pytest.raises(SeedError, match="unknown builtin"):
        resolve_seed("builtin:nosuch")


def test_p82_seed_shape():
    v = builtin_seed("p82-mat")
    assert (v.cls, v.mu, v.n_real, v.zero_position) == ("P8^2", 8, 8, 5)
    assert v.matrix[3, 4] == -2


def test_text_round_trip():
    v = builtin_seed("p82-mat")
    again = parse_seed(format_seed(v, "copy")).build()
    assert again.same_data(v)


def test_json_round_trip(tmp_path):
    v = builtin_seed("p81-base")
    p = tmp_path / "s.json"
    save_seed(v, p, note="n")
    data = json.loads(p.read_text())
    assert data["format_version"] == FORMAT_VERSION
    assert state_key(load_seed(p)) == state_key(v)


def test_text_file_round_trip(tmp_path):
    v = builtin_seed("p82-fig7-e258")
    p = tmp_path / "s.seed"
    save_seed(v, p)
    assert load_seed(p).same_data(v)


def test_json_version_checked():
    d = to_json(builtin_seed("p82-mat"))
    d["format_version"] = 99
    with pytest.raises(SeedError, match="format_version"):
        from_json(d)


def test_json_syntax_error_has_line(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{\n "class": }')
    with pytest.raises(SeedError, match="line 2"):
        load_seed(p)


@pytest.mark.parametrize("edit, match", [
    (lambda t: t.replace("mu: 8", "mu: 9"), "mu"),
    (lambda t: t.replace("zero_position: 5", "zero_position: 4"), "ordering"),
    (lambda t: t.replace("class: P8^2", "class: P9"), "line 1"),
    (lambda t: t.replace("real(-,1) real(-,1)", "real(-,1) rael(-,1)", 1), "markers"),
    (lambda t: t + "color: red\n", "unknown field"),
    (lambda t: t.replace("  -2  0  0  1  1  1  0  0", "  -2  0  0  1  1  1  0  x"), "line 6"),
    (lambda t: t.replace("  -2  0  0  1  1  1  0  0", "  -2  0  0  1  1  1  0  1"), "symmetry"),
])
def test_bad_seed_diagnostics(edit, match):
    with pytest.raises(SeedError, match=match):
        parse_seed(edit(P82)).build()


def test_pair_numbering():
    text = P82.replace("real(+,0) real(+,0) real(+,0)", "real(+,0) pair(8,7)")
    with pytest.raises(SeedError, match="pair"):
        parse_seed(text).build()


def test_validate_seed_lists_problems():
    v = builtin_seed("p82-mat")
    assert validate_seed(v) == []
    broken = v.replace(rstring=v.rstring + 1)
    assert any("real_string" in p for p in validate_seed(broken))


@settings(max_examples=20, deadline=None)
@given(st.lists(st.integers(0, 10**6), min_size=1, max_size=25))
def test_round_trip_along_walks(picks):
    v = builtin_seed("p82-mat")
    for k in picks:
        fl = available_flips(v)
        v = apply_flip(v, fl[k % len(fl)])
    assert parse_seed(format_seed(v)).build().same_data(v)
    assert from_json(json.loads(json.dumps(to_json(v)))).same_data(v)
    assert np.array_equal(to_json(v)["matrix"], v.matrix)
