"""Seed states: a small text format, its JSON twin, and the builtin registry.

Text format (one field per line, ``matrix`` rows indented below the key)::

    class: P8^2
    mu: 8
    markers: real(-,1) real(-,1) real(-,0) real(+,0) pair(5,6) ...
    zero_position: 3
    matrix:
      -2 0 1 ...
    real_string: auto
    note: free text

Markers list the real critical values in ascending order followed by the
conjugate pairs, which carry no position among the reals.  Cycle numbers in
``pair(a,b)`` are 1-based and must follow the real cycles in order.
``real_string: auto`` fills the real entries from the real-string formula.
Matrix and real string are given in canonical orientation.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .flips import canonicalize
from .lattice import LatticeError
from .state import CLASSES, VirtualFunction, class_info, problems

FORMAT_VERSION = 1
_FIELDS = ("class", "mu", "markers", "zero_position", "matrix", "real_string", "note")
_TOKEN = re.compile(r"real\(\s*([+-])\s*,\s*(\d+)\s*\)|pair\(\s*(\d+)\s*,\s*(\d+)\s*\)")


class SeedError(ValueError):
    """Malformed or invalid seed data; the message names the line or invariant."""


class PlaceholderSeed(SeedError):
    """The seed file is a documented placeholder without morsification data."""


@dataclass(frozen=True)
class SeedSpec:
    cls: str
    mu: int
    signs: tuple
    morse: tuple
    pairs: tuple  # 1-based cycle numbers
    zero_position: int
    matrix: tuple
    real_string: tuple | None  # None means "auto"
    note: str = ""

    def build(self) -> VirtualFunction:
        info = class_info(self.cls)
        if self.mu != info.mu:
            raise SeedError(f"mu: class {info.name} has mu={info.mu}, file declares {self.mu}")
        m = np.array(self.matrix, dtype=np.int64)
        if m.shape != (self.mu, self.mu):
            raise SeedError(f"matrix: expected {self.mu}x{self.mu}, got {m.shape[0]} rows")
        n = len(self.morse)
        for p, (a, b) in enumerate(self.pairs):
            if (a, b) != (n + 2 * p + 1, n + 2 * p + 2):
                raise SeedError(f"markers: pair({a},{b}) must be pair({n + 2 * p + 1},{n + 2 * p + 2})")
        want = tuple("-" if j < self.zero_position else "+" for j in range(n))
        if tuple(self.signs) != want:
            raise SeedError(f"ordering: signs {''.join(self.signs)} do not match "
                            f"zero_position {self.zero_position} (expected {''.join(want)})")
        rs = None if self.real_string is None else list(self.real_string)
        if rs is not None and len(rs) != self.mu:
            raise SeedError(f"real_string: expected {self.mu} entries, got {len(rs)}")
        vf = VirtualFunction.from_canonical(self.cls, self.morse, self.zero_position,
                                            len(self.pairs), m, rs)
        if rs is None and self.pairs:
            raise SeedError("real_string: 'auto' only covers real cycles; give it explicitly with pairs")
        diag = problems(vf)
        if diag:
            raise SeedError("; ".join(diag))
        return canonicalize(vf)


def _spec_of(vf: VirtualFunction, note: str = "") -> SeedSpec:
    n = vf.n_real
    return SeedSpec(vf.cls, vf.mu, tuple("-" if j < vf.zero_position else "+" for j in range(n)),
                    vf.morse, tuple((n + 2 * p + 1, n + 2 * p + 2) for p in range(vf.pairs)),
                    vf.zero_position, tuple(map(tuple, vf.matrix.tolist())),
                    tuple(vf.real_string.tolist()), note)


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------

def _ints(text: str, lineno: int, what: str) -> list[int]:
    try:
        return [int(t) for t in text.split()]
    except ValueError:
        raise SeedError(f"line {lineno}: {what}: expected integers, got {text.strip()!r}") from None


def parse_seed(text: str) -> SeedSpec:
    fields: dict[str, tuple[int, str]] = {}
    rows: list[list[int]] = []
    in_matrix = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip()
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if in_matrix and raw[:1].isspace():
            rows.append(_ints(line, lineno, "matrix"))
            continue
        in_matrix = False
        key, sep, val = line.partition(":")
        key = key.strip()
        if not sep or key not in _FIELDS:
            raise SeedError(f"line {lineno}: unknown field {key!r}; expected one of {', '.join(_FIELDS)}")
        if key in fields:
            raise SeedError(f"line {lineno}: duplicate field {key!r}")
        fields[key] = (lineno, val.strip())
        if key == "matrix":
            in_matrix = True
            if val.strip():
                raise SeedError(f"line {lineno}: matrix rows go on the following indented lines")
    for key in ("class", "mu", "markers", "zero_position"):
        if key not in fields:
            raise SeedError(f"missing field {key!r}")
    if fields["markers"][1] == "placeholder":
        raise PlaceholderSeed(f"{fields['class'][1]} seed is a placeholder: "
                              "supply a matrix from a real morsification")
    if "matrix" not in fields:
        raise SeedError("missing field 'matrix'")
    cls_line, cls = fields["class"]
    if cls not in CLASSES:
        try:
            cls = class_info(cls).name
        except LatticeError as e:
            raise SeedError(f"line {cls_line}: {e}") from None
    mu = _ints(fields["mu"][1], fields["mu"][0], "mu")
    zp = _ints(fields["zero_position"][1], fields["zero_position"][0], "zero_position")
    if len(mu) != 1 or len(zp) != 1:
        raise SeedError("mu and zero_position take a single integer")
    lineno, mtext = fields["markers"]
    signs, morse, pairs = [], [], []
    pos = 0
    for tok in _TOKEN.finditer(mtext):
        if mtext[pos:tok.start()].strip():
            raise SeedError(f"line {lineno}: markers: cannot parse {mtext[pos:tok.start()].strip()!r}")
        pos = tok.end()
        if tok.group(1):
            if pairs:
                raise SeedError(f"line {lineno}: markers: real tokens must precede pair tokens")
            signs.append(tok.group(1))
            morse.append(int(tok.group(2)))
        else:
            pairs.append((int(tok.group(3)), int(tok.group(4))))
    if mtext[pos:].strip():
        raise SeedError(f"line {lineno}: markers: cannot parse {mtext[pos:].strip()!r}")
    rs = None
    if "real_string" in fields and fields["real_string"][1] != "auto":
        rs = tuple(_ints(fields["real_string"][1], fields["real_string"][0], "real_string"))
    if any(len(r) != len(rows) for r in rows):
        raise SeedError("matrix: rows have unequal length")
    return SeedSpec(cls, mu[0], tuple(signs), tuple(morse), tuple(pairs), zp[0],
                    tuple(map(tuple, rows)), rs, fields.get("note", (0, ""))[1])


def format_seed(vf: VirtualFunction, note: str = "") -> str:
    s = _spec_of(vf, note)
    toks = [f"real({g},{m})" for g, m in zip(s.signs, s.morse)]
    toks += [f"pair({a},{b})" for a, b in s.pairs]
    width = max(len(str(x)) for row in s.matrix for x in row)
    lines = [f"class: {s.cls}", f"mu: {s.mu}", "markers: " + " ".join(toks),
             f"zero_position: {s.zero_position}", "matrix:"]
    lines += ["  " + " ".join(str(x).rjust(width) for x in row) for row in s.matrix]
    lines.append("real_string: " + " ".join(map(str, s.real_string)))
    lines.append(f"note: {note}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# JSON twin
# ---------------------------------------------------------------------------

def to_json(vf: VirtualFunction, note: str = "") -> dict:
    s = _spec_of(vf, note)
    return {
        "format_version": FORMAT_VERSION,
        "class": s.cls,
        "mu": s.mu,
        "markers": [{"kind": "real", "sign": g, "morse": m} for g, m in zip(s.signs, s.morse)]
                   + [{"kind": "pair", "cycles": [a, b]} for a, b in s.pairs],
        "zero_position": s.zero_position,
        "matrix": [list(r) for r in s.matrix],
        "real_string": list(s.real_string),
        "note": note,
    }


def from_json(data: dict) -> VirtualFunction:
    if data.get("format_version") != FORMAT_VERSION:
        raise SeedError(f"format_version {data.get('format_version')!r} is not supported")
    try:
        reals = [m for m in data["markers"] if m["kind"] == "real"]
        pairs = [tuple(m["cycles"]) for m in data["markers"] if m["kind"] == "pair"]
        rs = data.get("real_string")
        spec = SeedSpec(data["class"], int(data["mu"]), tuple(m["sign"] for m in reals),
                        tuple(int(m["morse"]) for m in reals), tuple(pairs),
                        int(data["zero_position"]), tuple(map(tuple, data["matrix"])),
                        None if rs in (None, "auto") else tuple(rs), data.get("note", ""))
    except (KeyError, TypeError) as e:
        raise SeedError(f"JSON seed: missing or malformed field {e}") from None
    return spec.build()


# ---------------------------------------------------------------------------
# files and registry
# ---------------------------------------------------------------------------

def load_seed(path) -> VirtualFunction:
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        try:
            return from_json(json.loads(text))
        except json.JSONDecodeError as e:
            raise SeedError(f"line {e.lineno}: {e.msg}") from None
    return parse_seed(text).build()


def save_seed(vf: VirtualFunction, path, note: str = "") -> None:
    path = Path(path)
    if path.suffix == ".json":
        path.write_text(json.dumps(to_json(vf, note), indent=2) + "\n")
    else:
        path.write_text(format_seed(vf, note))


def validate_seed(vf: VirtualFunction) -> list[str]:
    """Violated invariants of a constructed state; empty means valid."""
    out = []
    try:
        info = class_info(vf.cls)
    except LatticeError as e:
        return [str(e)]
    if vf.mu != info.mu:
        out.append(f"mu: class {info.name} has mu={info.mu}, state has {vf.mu}")
    return out + [p for p in problems(vf) if not p.startswith("mu:")]


def _seed_dir():
    return resources.files("strata") / "data" / "seeds"


def _builtin_file(name: str):
    for ext in (".seed", ".placeholder"):
        f = _seed_dir() / f"{name}{ext}"
        if f.is_file():
            return f
    return None


def builtin_names(include_placeholders: bool = False) -> list[str]:
    exts = (".seed", ".placeholder") if include_placeholders else (".seed",)
    return sorted(p.name.rsplit(".", 1)[0] for p in _seed_dir().iterdir()
                  if p.name.endswith(exts))


def builtin_is_placeholder(name: str) -> bool:
    f = _builtin_file(name)
    return f is not None and f.name.endswith(".placeholder")


def builtin_text(name: str) -> str:
    f = _builtin_file(name)
    if f is None:
        known = ", ".join(builtin_names(include_placeholders=True))
        raise SeedError(f"unknown builtin seed {name!r}; known: {known}")
    return f.read_text()


def builtin_class(name: str) -> str:
    for line in builtin_text(name).splitlines():
        if line.startswith("class:"):
            return line.partition(":")[2].strip()
    return ""


def builtin_seed(name: str) -> VirtualFunction:
    return parse_seed(builtin_text(name)).build()


def resolve_seed(source: str) -> VirtualFunction:
    """``builtin:NAME`` or a path to a seed file."""
    if source.startswith("builtin:"):
        return builtin_seed(source[len("builtin:"):])
    return load_seed(source)
