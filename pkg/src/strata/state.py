"""Virtual functions: the combinatorial shadow of a generic real perturbation.

A state records the real critical values in ascending order with their Morse
data, the number of negative ones, the conjugate pairs of non-real critical
values (ordered by argument), the intersection form of the distinguished
basis of vanishing cycles, and the intersection numbers of those cycles with
the real part of the zero level.

Cycle numbering: reals ``0..n-1`` in value order, then for pair ``p`` the
cycle in the upper half plane at ``n + 2p`` and its conjugate at ``n + 2p + 1``.

Two orientation conventions are kept apart:

* the *canonical* orientation is the one used in seed files and exports;
* the *working* orientation negates every real cycle of odd Morse datum.
  All flip arithmetic happens there because the conjugation and the real
  string take their simplest form in it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .lattice import LatticeError, matrix_problems, reflect


class ClassInfo(NamedTuple):
    name: str
    mu: int
    nvars: int
    full_index: bool  # False: only parities of Morse indices are tracked
    euler: int | None  # alternating sum of Morse data over all real points


CLASSES: dict[str, ClassInfo] = {
    "P8^1": ClassInfo("P8^1", 8, 3, False, None),
    "P8^2": ClassInfo("P8^2", 8, 3, False, None),
    "X9+": ClassInfo("X9+", 9, 2, True, None),
    "X9-": ClassInfo("X9-", 9, 2, True, None),
    "X9^1": ClassInfo("X9^1", 9, 2, True, -1),
    "X9^2": ClassInfo("X9^2", 9, 2, True, -3),
    "J10^1": ClassInfo("J10^1", 10, 2, True, None),
    "J10^3": ClassInfo("J10^3", 10, 2, True, None),
}

ALIASES = {
    "p8_1": "P8^1", "p8_2": "P8^2", "x9_plus": "X9+", "x9_minus": "X9-",
    "x9_1": "X9^1", "x9_2": "X9^2", "j10_1": "J10^1", "j10_3": "J10^3",
}


def class_info(name: str) -> ClassInfo:
    key = ALIASES.get(name, name)
    try:
        return CLASSES[key]
    except KeyError:
        raise LatticeError(f"unknown singularity class {name!r}") from None


class RealSlot(NamedTuple):
    sign: str  # "-" or "+"
    morse: int  # parity bit for P8, full index otherwise
    cycle: int


class PairSlot(NamedTuple):
    cycle_a: int
    cycle_b: int


def eps(parity: int, negative: bool) -> int:
    """Sign by which conjugation acts on a real vanishing cycle in working orientation."""
    e = 1 if parity % 2 == 0 else -1
    return e if negative else -e


def flip_signs(morse) -> np.ndarray:
    return np.array([1 if m % 2 == 0 else -1 for m in morse], dtype=np.int64)


@dataclass(frozen=True, eq=False)
class VirtualFunction:
    cls: str
    morse: tuple
    zero_position: int
    pairs: int
    gram: np.ndarray = field(repr=False)
    rstring: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "cls", class_info(self.cls).name)
        object.__setattr__(self, "morse", tuple(int(m) for m in self.morse))
        g = np.array(self.gram, dtype=np.int64)
        r = np.array(self.rstring, dtype=np.int64)
        g.setflags(write=False)
        r.setflags(write=False)
        object.__setattr__(self, "gram", g)
        object.__setattr__(self, "rstring", r)

    # -- shape ---------------------------------------------------------
    @property
    def info(self) -> ClassInfo:
        return CLASSES[self.cls]

    @property
    def mu(self) -> int:
        return self.gram.shape[0]

    @property
    def n_real(self) -> int:
        return len(self.morse)

    @property
    def parities(self) -> tuple:
        return tuple(m % 2 for m in self.morse)

    @property
    def negative_count(self) -> int:
        return self.zero_position

    @property
    def positive_count(self) -> int:
        return self.n_real - self.zero_position

    @property
    def markers(self) -> list:
        out: list = [RealSlot("-" if j < self.zero_position else "+", m, j)
                     for j, m in enumerate(self.morse)]
        n = self.n_real
        out += [PairSlot(n + 2 * p, n + 2 * p + 1) for p in range(self.pairs)]
        return out

    # -- orientation conventions -------------------------------------------
    def orientation(self) -> np.ndarray:
        return np.concatenate([flip_signs(self.morse),
                               np.ones(2 * self.pairs, dtype=np.int64)])

    @property
    def matrix(self) -> np.ndarray:
        """Intersection matrix in canonical orientation."""
        d = self.orientation()
        return self.gram * np.outer(d, d)

    @property
    def real_string(self) -> np.ndarray:
        return self.rstring * self.orientation()

    @classmethod
    def from_canonical(cls, klass, morse, zero_position, pairs, matrix, real_string=None):
        """Build a state from data in canonical orientation.

        Without a real string the real entries are filled in by the
        real-string formula; pair entries then default to zero.
        """
        morse = tuple(int(m) for m in morse)
        m = np.array(matrix, dtype=np.int64)
        d = np.concatenate([flip_signs(morse), np.ones(2 * pairs, dtype=np.int64)])
        g = m * np.outer(d, d)
        if real_string is None:
            r = np.zeros(len(d), dtype=np.int64)
            r[:len(morse)] = real_string_formula(g, morse, zero_position)
        else:
            r = np.array(real_string, dtype=np.int64) * d
        return cls(klass, morse, zero_position, pairs, g, r)

    def replace(self, **kw) -> "VirtualFunction":
        data = dict(cls=self.cls, morse=self.morse, zero_position=self.zero_position,
                    pairs=self.pairs, gram=self.gram, rstring=self.rstring)
        data.update(kw)
        return VirtualFunction(**data)

    def same_data(self, other: "VirtualFunction") -> bool:
        return (self.cls == other.cls and self.morse == other.morse
                and self.zero_position == other.zero_position and self.pairs == other.pairs
                and np.array_equal(self.gram, other.gram)
                and np.array_equal(self.rstring, other.rstring))


def intermediates(j: int, zpos: int) -> list[int]:
    """Real cycles whose values lie strictly between value ``j`` and zero, nearest to ``j`` first."""
    if j < zpos:
        return list(range(j + 1, zpos))
    return list(range(j - 1, zpos - 1, -1))


def real_string_formula(g: np.ndarray, morse, zpos: int) -> np.ndarray:
    """Real-string entries of the real cycles, working orientation.

    Each real cycle meets the real zero level in its own local contribution
    ``1 + eps`` plus the corrections picked up while it is carried to zero
    past the critical values in between.
    """
    n = len(morse)
    out = np.zeros(n, dtype=np.int64)
    for j in range(n):
        neg = j < zpos
        v = 1 + eps(morse[j], neg)
        for i in intermediates(j, zpos):
            v -= eps(morse[i], i < zpos) * int(g[j, i])
        out[j] = v
    return out


def conjugation(vf: VirtualFunction) -> np.ndarray:
    """Matrix whose row ``j`` is the complex conjugate of cycle ``j``."""
    g, n, z = vf.gram, vf.n_real, vf.zero_position
    eye = np.eye(vf.mu, dtype=np.int64)
    s = np.zeros_like(eye)
    for j in range(n):
        v = eye[j].copy()
        for i in intermediates(j, z):
            v = reflect(g, v, eye[i])
        s[j] = eps(vf.morse[j], j < z) * v
    for p in range(vf.pairs):
        a = n + 2 * p
        s[a], s[a + 1] = eye[a + 1], eye[a]
    return s


def ind(vf: VirtualFunction) -> int:
    """Even-negative minus odd-negative real critical points; pairs ignored."""
    return sum(1 if m % 2 == 0 else -1 for m in vf.morse[:vf.zero_position])


def problems(vf: VirtualFunction) -> list[str]:
    """Every violated state invariant, as human-readable diagnostics."""
    out = []
    info = vf.info
    g = vf.gram
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        return [f"matrix: not square, shape {g.shape}"]
    if vf.n_real + 2 * vf.pairs != vf.mu:
        out.append(f"count: {vf.n_real} reals + 2*{vf.pairs} pairs != mu={vf.mu}")
        return out
    if vf.mu != info.mu:
        out.append(f"mu: class {info.name} needs mu={info.mu}, got {vf.mu}")
    if not 0 <= vf.zero_position <= vf.n_real:
        out.append(f"ordering: zero_position {vf.zero_position} outside 0..{vf.n_real}")
        return out
    if vf.rstring.shape != (vf.mu,):
        out.append(f"real_string: length {vf.rstring.shape} != mu={vf.mu}")
        return out
    limit = 3 if info.full_index else 1
    for j, m in enumerate(vf.morse):
        if not 0 <= m <= limit:
            out.append(f"morse: datum {m} of real cycle {j + 1} outside 0..{limit}")
    if info.euler is not None:
        chi = sum((-1) ** m for m in vf.morse)
        if chi != info.euler:
            out.append(f"euler: alternating Morse sum {chi} != {info.euler} for class {info.name}")
    out += matrix_problems(vf.matrix)
    if out:
        return out
    s = conjugation(vf)
    if not np.array_equal(s @ s, np.eye(vf.mu, dtype=np.int64)):
        out.append("conjugation: not an involution on the cycle basis")
    if not np.array_equal(s @ g @ s.T, g):
        out.append("conjugation: does not preserve the intersection form")
    if not np.array_equal(s @ vf.rstring, vf.rstring):
        out.append("real_string: not fixed by conjugation")
    expect = real_string_formula(g, vf.morse, vf.zero_position)
    bad = [j + 1 for j in np.flatnonzero(expect != vf.rstring[:vf.n_real])]
    if bad:
        out.append(f"real_string: entries of real cycles {bad} disagree with the real-string formula")
    return out
