"""Formal graphs: closure of seed states under all flips, and their components."""
from __future__ import annotations

import hashlib
import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .flips import Flip, canonicalize, raw_key, successors
from .state import VirtualFunction, conjugation, ind, real_string_formula

DEFAULT_BUDGET = 10**6


class BudgetExceeded(RuntimeError):
    """The closure has more states than the configured cap."""


@dataclass
class FormalGraph:
    nodes: list[VirtualFunction] = field(default_factory=list)
    keys: list[str] = field(default_factory=list)
    edges: list[tuple[int, Flip, int]] = field(default_factory=list)
    index: dict[bytes, int] = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return len(self.nodes)

    def lookup(self, vf: VirtualFunction) -> int | None:
        return self.index.get(raw_key(canonicalize(vf)))

    def add(self, vf: VirtualFunction) -> int:
        rk = raw_key(vf)
        i = self.index.get(rk)
        if i is None:
            i = len(self.nodes)
            self.index[rk] = i
            self.nodes.append(vf)
            self.keys.append(hashlib.sha256(rk).hexdigest())
        return i


@dataclass(frozen=True)
class VirtualComponent:
    members: tuple[int, ...]
    card: int
    ind: int
    name: str  # smallest member key


def explore(seeds, budget: int = DEFAULT_BUDGET, threads: int = 1) -> FormalGraph:
    """Close ``seeds`` under every flip, level by level.

    Successors of a level are computed (optionally on a thread pool) and then
    merged in a fixed order, so the node numbering does not depend on the
    number of threads.
    """
    g = FormalGraph()
    frontier = []
    for s in seeds:
        s = canonicalize(s)
        if raw_key(s) not in g.index:
            frontier.append(g.add(s))
    if len(g) > budget:
        raise BudgetExceeded(f"state budget {budget} exceeded by the seeds alone")
    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    try:
        while frontier:
            nodes = [g.nodes[i] for i in frontier]
            results = list(pool.map(successors, nodes)) if pool else [successors(v) for v in nodes]
            nxt = []
            for src, succ in zip(frontier, results):
                for f, vf in succ:
                    before = len(g)
                    dst = g.add(vf)
                    if len(g) > before:
                        nxt.append(dst)
                        if len(g) > budget:
                            raise BudgetExceeded(f"state budget {budget} exceeded")
                    g.edges.append((src, f, dst))
            frontier = nxt
    finally:
        if pool:
            pool.shutdown()
    return g


def virtual_components(g: FormalGraph) -> list[VirtualComponent]:
    """Connected pieces after deleting the edges that cross the discriminant."""
    h = nx.Graph()
    h.add_nodes_from(range(len(g)))
    h.add_edges_from((a, b) for a, f, b in g.edges if not f.discriminant)
    comps = []
    for cc in nx.connected_components(h):
        members = tuple(sorted(cc))
        comps.append(VirtualComponent(members, len(members), ind(g.nodes[members[0]]),
                                      min(g.keys[i] for i in members)))
    comps.sort(key=lambda c: (c.ind, c.card, c.name))
    return comps


def component_of(comps: list[VirtualComponent]) -> dict[int, int]:
    return {m: ci for ci, c in enumerate(comps) for m in c.members}


# ---------------------------------------------------------------------------
# involutions
# ---------------------------------------------------------------------------

def _mirror(vf: VirtualFunction, morse_map) -> VirtualFunction:
    """Data of the function ``-f``: values reversed, cycles replaced by conjugates."""
    n, z, k = vf.n_real, vf.zero_position, vf.pairs
    s = conjugation(vf)
    eye = np.eye(vf.mu, dtype=np.int64)
    rows = [s[j] for j in reversed(range(n))]
    for p in reversed(range(k)):
        rows += [eye[n + 2 * p + 1], eye[n + 2 * p]]
    c = np.array(rows, dtype=np.int64)
    gram = c @ vf.gram @ c.T
    morse = tuple(morse_map(m) for m in reversed(vf.morse))
    r = c @ vf.rstring
    r[:n] = real_string_formula(gram, morse, n - z)
    return canonicalize(VirtualFunction(vf.cls, morse, n - z, k, gram, r))


def involution_minus(vf: VirtualFunction) -> VirtualFunction:
    """Action of ``f(x,y,z) -> -f(-x,-y,-z)`` on three-variable data."""
    if vf.info.nvars != 3:
        raise ValueError(f"involution_minus acts on three-variable classes, not {vf.cls}")
    if vf.info.full_index:
        return _mirror(vf, lambda m: 3 - m)
    return _mirror(vf, lambda m: 1 - m)


def involution_ze(vf: VirtualFunction) -> VirtualFunction:
    """Action of ``f -> -f`` composed with a plane rotation, on X9^2 data.

    A rotation leaves the data untouched, so only the sign change matters.
    In two variables the Morse index of ``-f`` at a point is ``2 - k``.
    """
    if vf.cls != "X9^2":
        raise ValueError(f"involution_ze acts on X9^2 data, not {vf.cls}")
    return _mirror(vf, lambda m: 2 - m)


def involution_x91(vf: VirtualFunction) -> VirtualFunction:
    """Action of ``f(x,y) -> -f(x,-y)`` on X9^1 data.

    The reflection in ``y`` leaves the data untouched, as for involution_ze.
    Since Ind(v) + Ind(-v) is the alternating Morse sum, the two Ind values
    of a partner pair always add up to -1 on this class.
    """
    if vf.cls != "X9^1":
        raise ValueError(f"involution_x91 acts on X9^1 data, not {vf.cls}")
    return _mirror(vf, lambda m: 2 - m)


def involution_pairs(g: FormalGraph, comps, op=involution_minus) -> dict[int, int]:
    """Component index -> partner component index under ``op``."""
    where = component_of(comps)
    out = {}
    for ci, c in enumerate(comps):
        j = g.lookup(op(g.nodes[c.members[0]]))
        out[ci] = where[j] if j is not None else -1
    return out


# ---------------------------------------------------------------------------
# statistics and homology-index candidates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StatRow:
    cls: str
    component_id: str
    ind: int
    card: int
    partner_id: str


def stats(g: FormalGraph, comps: list[VirtualComponent], op=involution_minus) -> list[StatRow]:
    order = sorted(range(len(comps)), key=lambda i: (comps[i].ind, -comps[i].card, comps[i].name))
    try:
        partners = involution_pairs(g, comps, op)
    except ValueError:
        partners = {}
    rows = []
    for i in order:
        c = comps[i]
        p = partners.get(i, -1)
        cls = g.nodes[c.members[0]].cls
        rows.append(StatRow(cls, c.name[:12], c.ind, c.card, comps[p].name[:12] if p >= 0 else ""))
    return rows


class InconsistentCounts(ValueError):
    pass


def hi_candidates(counts, cls: str = "P8^2") -> set[tuple[int, int, int]]:
    """Betti triples of the relative sublevel pair allowed by Morse theory.

    ``counts[i]`` is the number of real critical points with Morse index
    ``i`` and negative value.  The cells of the pair form a chain complex;
    each choice of boundary ranks gives Betti numbers.  The relative group
    in degree three must vanish, because the far sublevel set of either P8
    class has no two-dimensional homology.
    """
    if cls not in ("P8^1", "P8^2"):
        raise ValueError(f"homology index is defined here for P8 classes, not {cls}")
    c = list(counts) + [0] * (4 - len(counts))
    if len(c) > 4 or any(x < 0 for x in c):
        raise InconsistentCounts(f"counts must be four non-negative integers, got {counts}")
    out = set()
    for r1 in range(min(c[0], c[1]) + 1):
        for r2 in range(min(c[1] - r1, c[2]) + 1):
            for r3 in range(min(c[2] - r2, c[3]) + 1):
                if c[3] - r3 == 0:
                    out.add((c[0] - r1, c[1] - r1 - r2, c[2] - r2 - r3))
    if not out:
        raise InconsistentCounts(f"no Betti triple is compatible with counts {tuple(c)}")
    return out


def flip_walks(seed: VirtualFunction, walks: int, length: int, rng) -> "itertools.chain":
    """Random flip sequences from ``seed``; yields (state, flip, next state)."""
    from .flips import apply_flip, available_flips
    steps = []
    for _ in range(walks):
        v = canonicalize(seed)
        for _ in range(length):
            fl = available_flips(v)
            if not fl:
                break
            f = fl[rng.integers(len(fl))]
            w = apply_flip(v, f, check=False)
            steps.append((v, f, w))
            v = w
    return steps
