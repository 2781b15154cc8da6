"""Serialization of enumeration results: CSV, JSON, DOT and figures.

Everything here is byte-deterministic for a given input, which keeps the
outputs usable as regression baselines.
"""
from __future__ import annotations

import csv
import io
import json
from collections import Counter
from pathlib import Path

from .graph import FormalGraph, StatRow, VirtualComponent
from .seeds import FORMAT_VERSION, to_json
from .state import VirtualFunction, ind

CSV_COLUMNS = ("class", "component_id", "ind", "card", "partner_id")

# Reference counts for the P8 classes, used to flag convention divergence.
REFERENCE_COUNTS = {
    "P8^1": {"states": 6503, "components": 7, "ind": [-3, -3, -2, -1, 0, 1, 1]},
    "P8^2": {
        "states": 9174,
        "components": 15,
        "cards": [258, 156, 60, 60, 1216, 336, 336, 1318, 844, 844, 1648, 1648, 262, 94, 94],
        "ind": [-3] * 4 + [-2] * 3 + [-1] * 3 + [0] * 2 + [1] * 3,
    },
}


def stats_csv(rows: list[StatRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow((r.cls, r.component_id, r.ind, r.card, r.partner_id))
    return buf.getvalue()


def stats_json(rows: list[StatRow], states: int) -> str:
    doc = {
        "format_version": FORMAT_VERSION,
        "states": states,
        "components": [{"class": r.cls, "component_id": r.component_id, "ind": r.ind,
                        "card": r.card, "partner_id": r.partner_id} for r in rows],
    }
    return json.dumps(doc, indent=2) + "\n"


def nodes_json(g: FormalGraph, comps: list[VirtualComponent]) -> str:
    """Full dump: every state in seed JSON form, tagged with key and component."""
    where = {m: c.name[:12] for c in comps for m in c.members}
    order = sorted(range(len(g)), key=g.keys.__getitem__)
    doc = {
        "format_version": FORMAT_VERSION,
        "nodes": [{"key": g.keys[i], "component_id": where[i], "ind": ind(g.nodes[i]),
                   "state": to_json(g.nodes[i])} for i in order],
    }
    return json.dumps(doc, indent=1) + "\n"


def divergence(rows: list[StatRow], states: int) -> list[str]:
    """Differences between an enumeration and the reference counts, if any."""
    if not rows:
        return []
    ref = REFERENCE_COUNTS.get(rows[0].cls)
    if ref is None:
        return []
    out = []
    if states != ref["states"]:
        out.append(f"states: {states} != {ref['states']}")
    if len(rows) != ref["components"]:
        out.append(f"components: {len(rows)} != {ref['components']}")
    got_ind = sorted(r.ind for r in rows)
    if got_ind != sorted(ref["ind"]):
        out.append(f"Ind multiset: {got_ind} != {sorted(ref['ind'])}")
    if "cards" in ref:
        want = Counter(zip(ref["ind"], ref["cards"]))
        got = Counter((r.ind, r.card) for r in rows)
        if got != want:
            extra = sorted((got - want).elements())
            missing = sorted((want - got).elements())
            out.append(f"(Ind, Card) pairs: unexpected {extra}, missing {missing}")
    return out


# ---------------------------------------------------------------------------
# DOT
# ---------------------------------------------------------------------------

def coxeter_dot(vf: VirtualFunction, name: str = "state") -> str:
    """Coxeter-Dynkin graph of a state in canonical orientation.

    Vertices are cycles numbered from 1; boxes mark odd Morse data, circles
    even ones, diamonds the cycles of conjugate pairs.  Edges carry the
    intersection index.
    """
    m = vf.matrix
    lines = [f'graph "{name}" {{', "  node [fontsize=10];"]
    for j in range(vf.mu):
        if j < vf.n_real:
            shape = "box" if vf.morse[j] % 2 else "circle"
            sign = "-" if j < vf.zero_position else "+"
            label = f"{j + 1}\\n{sign}{vf.morse[j]}"
        else:
            shape, label = "diamond", f"{j + 1}"
        lines.append(f'  v{j + 1} [shape={shape}, label="{label}"];')
    for i in range(vf.mu):
        for j in range(i + 1, vf.mu):
            w = int(m[i, j])
            if w:
                style = ", style=dashed" if w < 0 else ""
                lines.append(f'  v{i + 1} -- v{j + 1} [label="{w}"{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def component_dot(g: FormalGraph, comps: list[VirtualComponent]) -> str:
    """Components as vertices, joined when a zero crossing connects them."""
    where = {m: ci for ci, c in enumerate(comps) for m in c.members}
    links = Counter()
    for a, f, b in g.edges:
        if f.discriminant and where[a] != where[b]:
            links[tuple(sorted((where[a], where[b])))] += 1
    lines = ['graph "components" {', "  node [shape=box, fontsize=10];"]
    for ci, c in enumerate(comps):
        lines.append(f'  c{ci} [label="{c.name[:12]}\\nInd {c.ind}, Card {c.card}"];')
    for (a, b), n in sorted(links.items()):
        lines.append(f'  c{a} -- c{b} [label="{n}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# figures
# ---------------------------------------------------------------------------

def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def _save(fig, path: Path) -> Path:
    fig.savefig(path, dpi=100, metadata={"Software": None})
    return path


def stats_figure(rows: list[StatRow], path) -> Path:
    """Bar chart of component sizes, grouped and colored by Ind."""
    plt = _pyplot()
    path = Path(path)
    fig, ax = plt.subplots(figsize=(max(4, 0.5 * len(rows) + 2), 3.5))
    inds = sorted({r.ind for r in rows})
    cmap = plt.get_cmap("viridis", max(len(inds), 2))
    colors = [cmap(inds.index(r.ind)) for r in rows]
    ax.bar(range(1, len(rows) + 1), [r.card for r in rows], color=colors)
    for k, r in enumerate(rows, 1):
        ax.annotate(str(r.ind), (k, r.card), ha="center", va="bottom", fontsize=8)
    ax.set_xticks(range(1, len(rows) + 1))
    ax.set_xlabel("component (labels: Ind)")
    ax.set_ylabel("Card")
    ax.set_title(f"{rows[0].cls}: {len(rows)} components" if rows else "no components")
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)
    return path


def fixture_figure(results, path) -> Path:
    """Real critical values of each checked fixture, marked by Morse index."""
    plt = _pyplot()
    path = Path(path)
    shown = [r for r in results if r.report is not None and r.report.points]
    fig, ax = plt.subplots(figsize=(6, max(2.5, 0.3 * len(shown) + 1)))
    marks = {0: "v", 1: "o", 2: "^", 3: "s", "degenerate": "x"}
    for y, res in enumerate(shown):
        for c in res.report.points:
            ax.scatter([c.value], [y], marker=marks.get(c.morse_index, "."),
                       color="black" if res.passed else "red", s=18)
    ax.set_yticks(range(len(shown)))
    ax.set_yticklabels([r.name for r in shown], fontsize=7)
    ax.set_xscale("symlog", linthresh=1e-3)
    ax.axvline(0, color="grey", lw=0.5)
    ax.set_xlabel("critical value (v min, o index 1, ^ index 2, s max, x degenerate)")
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)
    return path

