"""Conjunctive filter queries over formal graphs, stored as YAML/JSON data.

A query is a mapping with an optional ``name`` and a list ``all`` of
clauses; a state matches when every clause holds.  Each clause is a
one-key mapping:

``real_count: n``          number of real critical values
``negative_count: n``      real values below zero
``positive_count: n``      real values above zero
``pair_count: n``          conjugate pairs
``ind: n``                 the Ind invariant
``morse_count: {morse: even|odd|k, count: n}``
``signed_morse: {sign: "+"|"-", morse: even|odd|k}``
                           every real value of that sign has that Morse datum
``extremum: minimum|maximum``
                           a minimum-like (maximum-like) real cycle exists, see below
``order: odd_below_even``  every odd real value lies below every even one
``entry: [i, j, v]``       canonical matrix entry, 1-based cycle numbers
``block: [[...], ...]``    leading square block of the canonical matrix

A real cycle is minimum-like when its datum is even, every odd real value
lies above it, and it meets every odd real cycle.  Maximum-like is the
mirror image: an odd cycle above all even ones meeting each of them.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Callable

import numpy as np
import yaml

from .graph import FormalGraph
from .state import VirtualFunction, ind


class QueryError(ValueError):
    pass


def _parity_test(spec) -> Callable[[int], bool]:
    if spec == "even":
        return lambda m: m % 2 == 0
    if spec == "odd":
        return lambda m: m % 2 == 1
    if isinstance(spec, int) and not isinstance(spec, bool):
        return lambda m: m == spec
    raise QueryError(f"morse selector must be 'even', 'odd' or an integer, got {spec!r}")


def _int(v, what) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise QueryError(f"{what} needs an integer, got {v!r}")
    return v


def _minimum_like(vf: VirtualFunction) -> bool:
    g, ms = vf.gram, vf.morse
    odd = [i for i, m in enumerate(ms) if m % 2]
    return any(ms[j] % 2 == 0 and all(i > j and g[j, i] != 0 for i in odd)
               for j in range(vf.n_real))


def _maximum_like(vf: VirtualFunction) -> bool:
    g, ms = vf.gram, vf.morse
    even = [i for i, m in enumerate(ms) if m % 2 == 0]
    return any(ms[j] % 2 and all(i < j and g[j, i] != 0 for i in even)
               for j in range(vf.n_real))


def _clause(key: str, arg) -> Callable[[VirtualFunction], bool]:
    if key == "real_count":
        n = _int(arg, key)
        return lambda v: v.n_real == n
    if key == "negative_count":
        n = _int(arg, key)
        return lambda v: v.negative_count == n
    if key == "positive_count":
        n = _int(arg, key)
        return lambda v: v.positive_count == n
    if key == "pair_count":
        n = _int(arg, key)
        return lambda v: v.pairs == n
    if key == "ind":
        n = _int(arg, key)
        return lambda v: ind(v) == n
    if key == "morse_count":
        if not isinstance(arg, dict) or set(arg) != {"morse", "count"}:
            raise QueryError("morse_count needs {morse, count}")
        t, n = _parity_test(arg["morse"]), _int(arg["count"], "morse_count.count")
        return lambda v: sum(map(t, v.morse)) == n
    if key == "signed_morse":
        if not isinstance(arg, dict) or set(arg) != {"sign", "morse"} or arg["sign"] not in "+-":
            raise QueryError("signed_morse needs {sign: '+' or '-', morse}")
        t, neg = _parity_test(arg["morse"]), arg["sign"] == "-"

        def signed(v):
            idx = range(v.zero_position) if neg else range(v.zero_position, v.n_real)
            return all(t(v.morse[j]) for j in idx)
        return signed
    if key == "extremum":
        if arg == "minimum":
            return _minimum_like
        if arg == "maximum":
            return _maximum_like
        raise QueryError(f"extremum must be 'minimum' or 'maximum', got {arg!r}")
    if key == "order":
        if arg != "odd_below_even":
            raise QueryError(f"unknown order constraint {arg!r}")

        def order(v):
            odd = [j for j, m in enumerate(v.morse) if m % 2]
            even = [j for j, m in enumerate(v.morse) if m % 2 == 0]
            return not odd or not even or max(odd) < min(even)
        return order
    if key == "entry":
        if not isinstance(arg, list) or len(arg) != 3:
            raise QueryError("entry needs [i, j, value]")
        i, j, val = (_int(x, "entry") for x in arg)
        if i < 1 or j < 1:
            raise QueryError("entry cycle numbers start at 1")
        return lambda v: max(i, j) <= v.mu and int(v.matrix[i - 1, j - 1]) == val
    if key == "block":
        try:
            b = np.array(arg, dtype=np.int64)
        except (TypeError, ValueError):
            raise QueryError("block needs a square integer matrix") from None
        if b.ndim != 2 or b.shape[0] != b.shape[1] or b.size == 0:
            raise QueryError("block needs a square integer matrix")
        k = b.shape[0]
        return lambda v: v.mu >= k and np.array_equal(v.matrix[:k, :k], b)
    raise QueryError(f"unknown clause {key!r}")


class Query:
    def __init__(self, data):
        if not isinstance(data, dict) or "all" not in data or not isinstance(data["all"], list):
            raise QueryError("a query is a mapping with a list under 'all'")
        self.name = str(data.get("name", ""))
        self.data = data
        self.tests = []
        for n, c in enumerate(data["all"], 1):
            if not isinstance(c, dict) or len(c) != 1:
                raise QueryError(f"clause {n}: expected a mapping with exactly one key")
            (key, arg), = c.items()
            try:
                self.tests.append(_clause(key, arg))
            except QueryError as e:
                raise QueryError(f"clause {n}: {e}") from None

    def __call__(self, vf: VirtualFunction) -> bool:
        return all(t(vf) for t in self.tests)

    def prefix(self, k: int) -> "Query":
        """Query made of the first ``k`` clauses."""
        return Query({"name": f"{self.name}[:{k}]", "all": self.data["all"][:k]})


def load_query(path) -> Query:
    path = Path(path)
    text = path.read_text()
    try:
        data = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise QueryError(f"{path}: {e}") from None
    return Query(data)


def builtin_query(name: str) -> Query:
    from importlib import resources
    f = resources.files("strata") / "data" / "queries" / f"{name}.yaml"
    if not f.is_file():
        raise QueryError(f"unknown builtin query {name!r}")
    return Query(yaml.safe_load(f.read_text()))


def filter_vf(g: FormalGraph, predicate) -> list[int]:
    """Indices of matching nodes, in ascending state-key order."""
    if not isinstance(predicate, Query):
        predicate = Query(predicate)
    hits = [i for i, v in enumerate(g.nodes) if predicate(v)]
    return sorted(hits, key=g.keys.__getitem__)
