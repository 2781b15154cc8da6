"""Standard flips between virtual functions, canonical forms and state keys.

A flip is one elementary surgery of a generic real function:

``transposition``
    two neighbouring real values on one side of zero pass each other.  In
    real three-space this happens generically only when the two vanishing
    cycles are orthogonal, so it is a pure relabelling.
``zero_crossing``
    the real value nearest to zero changes sign.  This is the only flip that
    crosses the discriminant.
``death`` / ``birth``
    two neighbouring real critical points of adjacent Morse data collide and
    leave into the complex domain as a conjugate pair, or the reverse.
``pair_move``
    two conjugate pairs with neighbouring arguments trade places (a Hurwitz
    move on their upper cycles).
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .lattice import reflect
from .state import VirtualFunction, conjugation, eps, real_string_formula

KINDS = ("transposition", "zero_crossing", "death", "birth", "pair_move")


class FlipError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Flip:
    kind: str
    pos: int
    arg: int = 0  # gap for births, direction for zero crossings, variant for pair moves
    side: int = 0  # births only: -1 lands on the negative half-axis, +1 on the positive

    @property
    def discriminant(self) -> bool:
        return self.kind == "zero_crossing"

    def label(self) -> str:
        short = {"transposition": "T", "zero_crossing": "Z", "death": "D",
                 "birth": "B", "pair_move": "H"}[self.kind]
        tail = f".{self.arg}" if self.kind in ("birth", "pair_move", "zero_crossing") else ""
        if self.kind == "birth":
            tail += "-" if self.side < 0 else "+"
        return f"{short}{self.pos}{tail}"


# ---------------------------------------------------------------------------
# canonical form
# ---------------------------------------------------------------------------

def canonicalize(vf: VirtualFunction) -> VirtualFunction:
    """Fix the orientations of the non-real cycles.

    Real cycles already carry a canonical orientation (the real sphere with
    its local orientation), so only each conjugate pair may be flipped as a
    whole.  Pairs are fixed one at a time: the first pair with a nonzero
    entry among (real string, intersections with the real cycles,
    intersections with pairs fixed so far) is turned so that entry is
    positive.  A pair with no such entry keeps its orientation.
    """
    n, k = vf.n_real, vf.pairs
    if k == 0:
        return vf
    g, r = vf.gram, vf.rstring
    signs = [0] * k
    fixed: list[int] = []
    while len(fixed) < k:
        chosen = None
        for p in range(k):
            if signs[p]:
                continue
            a = n + 2 * p
            feats = [r[a], *g[a, :n], *g[a + 1, :n]]
            for q in fixed:
                b = n + 2 * q
                feats += [signs[q] * g[a, b], signs[q] * g[a, b + 1],
                          signs[q] * g[a + 1, b], signs[q] * g[a + 1, b + 1]]
            lead = next((f for f in feats if f != 0), 0)
            if lead:
                chosen, sign = p, (1 if lead > 0 else -1)
                break
        if chosen is None:
            chosen, sign = signs.index(0), 1
        signs[chosen] = sign
        fixed.append(chosen)
    d = np.ones(vf.mu, dtype=np.int64)
    for p, s in enumerate(signs):
        d[n + 2 * p] = d[n + 2 * p + 1] = s
    if np.all(d == 1):
        return vf
    return vf.replace(gram=vf.gram * np.outer(d, d), rstring=vf.rstring * d)


def raw_key(vf: VirtualFunction) -> bytes:
    head = f"{vf.cls}|{','.join(map(str, vf.morse))}|{vf.zero_position}|{vf.pairs}|".encode()
    return head + vf.gram.astype("<i8").tobytes() + vf.rstring.astype("<i8").tobytes()


def state_key(vf: VirtualFunction) -> str:
    """Stable fingerprint of a canonical state (hex SHA-256)."""
    if not canonicalize(vf).same_data(vf):
        raise FlipError("state_key needs a canonical state; call canonicalize first")
    return hashlib.sha256(raw_key(vf)).hexdigest()


# ---------------------------------------------------------------------------
# flip catalogue
# ---------------------------------------------------------------------------

def _rebase(vf, rows, morse=None, zpos=None, pairs=None) -> VirtualFunction:
    c = np.asarray(rows, dtype=np.int64)
    return VirtualFunction(vf.cls, vf.morse if morse is None else morse,
                           vf.zero_position if zpos is None else zpos,
                           vf.pairs if pairs is None else pairs,
                           c @ vf.gram @ c.T, c @ vf.rstring)


def _newborn_morse(vf: VirtualFunction, lower_parity: int) -> tuple[int, int]:
    """Morse data (lower value first) of two points born from a real collision."""
    if not vf.info.full_index:
        return lower_parity, 1 - lower_parity
    return (0, 1) if lower_parity == 0 else (1, 2)


def _death_ok(vf: VirtualFunction, i: int) -> bool:
    a, b = vf.morse[i], vf.morse[i + 1]
    if vf.info.full_index:
        return abs(a - b) == 1
    return a != b


def _transpositions(vf):
    z = vf.zero_position
    for i in range(vf.n_real - 1):
        if i != z - 1 and vf.gram[i, i + 1] == 0:
            yield Flip("transposition", i)


def _apply_transposition(vf, i):
    perm = list(range(vf.mu))
    perm[i], perm[i + 1] = perm[i + 1], perm[i]
    morse = list(vf.morse)
    morse[i], morse[i + 1] = morse[i + 1], morse[i]
    return _rebase(vf, np.eye(vf.mu, dtype=np.int64)[perm], morse=tuple(morse))


def _crossing_target(vf, direction):
    # direction 0: the largest negative value becomes positive; 1: the reverse
    z = vf.zero_position
    return (z - 1, z - 1) if direction == 0 else (z, z + 1)


def _zero_crossings(vf):
    for direction in (0, 1):
        c, _ = _crossing_target(vf, direction)
        if 0 <= c < vf.n_real:
            yield Flip("zero_crossing", c, direction)


def _apply_zero_crossing(vf, direction):
    c, nz = _crossing_target(vf, direction)
    n, k, g = vf.n_real, vf.pairs, vf.gram
    eye = np.eye(vf.mu, dtype=np.int64)
    rows = [eye[j] for j in range(n)]
    for p in range(k):
        rows += [eye[n + 2 * p], reflect(g, eye[n + 2 * p + 1], eye[c])]
    out = _rebase(vf, rows, zpos=nz)
    m = -eps(vf.morse[c], c < vf.zero_position)
    return out.replace(rstring=out.rstring - m * out.gram[:, c])


def _deaths(vf):
    z = vf.zero_position
    for i in range(vf.n_real - 1):
        if i != z - 1 and vf.gram[i, i + 1] == -1 and _death_ok(vf, i):
            yield Flip("death", i)


def _apply_death(vf, i):
    g, n, z, k = vf.gram, vf.n_real, vf.zero_position, vf.pairs
    eye = np.eye(vf.mu, dtype=np.int64)
    neg = i < z
    far, near = (i, i + 1) if neg else (i + 1, i)
    w = reflect(g, eye[far], eye[near])
    wbar = w @ conjugation(vf)
    rows, morse = [], []
    for j in range(n):
        if j in (i, i + 1):
            continue
        beyond = j < i if neg else j > i + 1
        rows.append(reflect(g, eye[j], w) if beyond else eye[j])
        morse.append(vf.morse[j])
    pairs = [(eye[n + 2 * p], eye[n + 2 * p + 1]) for p in range(k)]
    if neg:
        pairs.append((w, wbar))
    else:
        pairs.insert(0, (w, wbar))
    for a, b in pairs:
        rows += [a, b]
    return _rebase(vf, rows, morse=tuple(morse), zpos=z - 2 if neg else z, pairs=k + 1)


def _birth_sides(vf):
    k = vf.pairs
    if k:
        yield k - 1, True
        yield 0, False


def _birth_gaps(vf, neg):
    z = vf.zero_position
    return range(0, z + 1) if neg else range(z, vf.n_real + 1)


def _birth_candidates(vf, p, neg, gap):
    """States produced by the pair ``p`` landing on the real axis at ``gap``."""
    g, n, z, k = vf.gram, vf.n_real, vf.zero_position, vf.pairs
    eye = np.eye(vf.mu, dtype=np.int64)
    a = n + 2 * p
    w, wbar = eye[a], eye[a + 1]
    mids = range(gap, z) if neg else range(z, gap)
    order = sorted(mids, reverse=True) if neg else sorted(mids)
    lower = wbar.copy()
    for i in order:
        lower = reflect(g, lower, eye[i])
    t = int(w @ g @ lower)
    if abs(t) != 1:
        return []
    e_far = -t
    if neg:
        par_far = 0 if e_far == 1 else 1
    else:
        par_far = 1 if e_far == 1 else 0
    if neg:
        m_far, m_near = _newborn_morse(vf, par_far)
    else:
        m_near, m_far = _newborn_morse(vf, 1 - par_far)
    out = []
    for s_far in (1, -1):
        s_near = -s_far * e_far
        far = s_far * lower
        near = s_near * reflect(g, w, lower)
        reals = []
        for j in range(n):
            beyond = j < gap if neg else j >= gap
            reals.append((reflect(g, eye[j], w) if beyond else eye[j], vf.morse[j]))
        born = [(far, m_far), (near, m_near)] if neg else [(near, m_near), (far, m_far)]
        reals = reals[:gap] + born + reals[gap:]
        rows = [v for v, _ in reals]
        for q in range(k):
            if q != p:
                rows += [eye[n + 2 * q], eye[n + 2 * q + 1]]
        cand = _rebase(vf, rows, morse=tuple(m for _, m in reals),
                       zpos=z + 2 if neg else z, pairs=k - 1)
        if np.array_equal(real_string_formula(cand.gram, cand.morse, cand.zero_position),
                          cand.rstring[:cand.n_real]):
            out.append(cand)
    return out


def _births(vf):
    for p, neg in _birth_sides(vf):
        for gap in _birth_gaps(vf, neg):
            if _birth_candidates(vf, p, neg, gap):
                yield Flip("birth", p, gap, -1 if neg else 1)


def _apply_birth(vf, p, gap, side):
    cands = _birth_candidates(vf, p, side < 0, gap)
    if not cands:
        raise FlipError(f"birth: pair {p} cannot land at gap {gap}")
    return cands[0]


def _pair_moves(vf):
    for p in range(vf.pairs - 1):
        yield Flip("pair_move", p, 0)
        yield Flip("pair_move", p, 1)


def _apply_pair_move(vf, p, variant):
    g, n, k = vf.gram, vf.n_real, vf.pairs
    eye = np.eye(vf.mu, dtype=np.int64)
    u1, u2 = eye[n + 2 * p], eye[n + 2 * p + 2]
    new = [reflect(g, u2, u1), u1] if variant == 0 else [u2, reflect(g, u1, u2)]
    s = conjugation(vf)
    rows = [eye[j] for j in range(n)]
    for q in range(k):
        if q == p:
            rows += [new[0], new[0] @ s]
        elif q == p + 1:
            rows += [new[1], new[1] @ s]
        else:
            rows += [eye[n + 2 * q], eye[n + 2 * q + 1]]
    return _rebase(vf, rows)


def available_flips(vf: VirtualFunction) -> list[Flip]:
    """All flips applicable to ``vf``, ordered by kind then position."""
    flips = [*_transpositions(vf), *_zero_crossings(vf), *_deaths(vf),
             *_births(vf), *_pair_moves(vf)]
    return sorted(flips, key=lambda f: (KINDS.index(f.kind), f.pos, f.arg, f.side))


def _raw_apply(vf: VirtualFunction, f: Flip) -> VirtualFunction:
    if f.kind == "transposition":
        return _apply_transposition(vf, f.pos)
    if f.kind == "zero_crossing":
        return _apply_zero_crossing(vf, f.arg)
    if f.kind == "death":
        return _apply_death(vf, f.pos)
    if f.kind == "birth":
        return _apply_birth(vf, f.pos, f.arg, f.side)
    if f.kind == "pair_move":
        return _apply_pair_move(vf, f.pos, f.arg)
    raise FlipError(f"unknown flip kind {f.kind!r}")


def _why_not(vf: VirtualFunction, f: Flip) -> str:
    z, n = vf.zero_position, vf.n_real
    if f.kind in ("transposition", "death"):
        if not 0 <= f.pos < n - 1:
            return f"{f.kind}: no neighbouring real values at position {f.pos}"
        if f.pos == z - 1:
            return f"{f.kind}: values at {f.pos},{f.pos + 1} lie on opposite sides of zero"
        if f.kind == "transposition":
            return f"transposition: cycles {f.pos + 1},{f.pos + 2} are not orthogonal"
        if vf.gram[f.pos, f.pos + 1] != -1:
            return f"death: working intersection of cycles {f.pos + 1},{f.pos + 2} is not -1"
        return "death: Morse data of the colliding points are not adjacent"
    if f.kind == "zero_crossing":
        return f"zero_crossing: no real value next to zero in direction {f.arg}"
    if f.kind == "birth":
        return (f"birth: pair {f.pos} cannot land at gap {f.arg}: it is not next to that half-axis "
                "or its cycle and the conjugate do not meet with index +-1")
    if f.kind == "pair_move":
        return f"pair_move: pairs {f.pos},{f.pos + 1} do not exist"
    return f"unknown flip kind {f.kind!r}"


def apply_flip(vf: VirtualFunction, f: Flip, *, check: bool = True) -> VirtualFunction:
    """Apply ``f`` and return the canonical successor."""
    if check and f not in available_flips(vf):
        raise FlipError(_why_not(vf, f))
    return canonicalize(_raw_apply(vf, f))


def successors(vf: VirtualFunction) -> list[tuple[Flip, VirtualFunction]]:
    """Every (flip, canonical successor) pair, in catalogue order."""
    return [(f, canonicalize(_raw_apply(vf, f))) for f in available_flips(vf)]
