"""Integer intersection forms on bases of vanishing cycles.

Matrices are plain ``numpy.int64`` arrays; every operation returns fresh
arrays and never mutates its input.  Arithmetic is checked against int64
overflow and fails loudly instead of wrapping.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

_LIMIT = 2**62


class LatticeError(ValueError):
    """Raised for malformed matrices, strings or indices."""


@dataclass(frozen=True)
class FormInvariants:
    rank: int
    abs_det: int


def as_matrix(entries) -> np.ndarray:
    m = np.array(entries, dtype=np.int64)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise LatticeError(f"intersection matrix must be square and non-empty, got shape {m.shape}")
    return m


def matrix_problems(m: np.ndarray) -> list[str]:
    """Return the violated matrix invariants (empty list means valid)."""
    out = []
    if not np.array_equal(m, m.T):
        out.append("symmetry: matrix is not symmetric")
    if not np.all(np.diag(m) == -2):
        bad = [i + 1 for i in np.flatnonzero(np.diag(m) != -2)]
        out.append(f"diagonal: entries at cycles {bad} differ from -2")
    return out


def check_matrix(m: np.ndarray) -> np.ndarray:
    m = as_matrix(m)
    problems = matrix_problems(m)
    if problems:
        raise LatticeError("; ".join(problems))
    return m


def _checked(a: np.ndarray) -> np.ndarray:
    if a.size and int(np.abs(a).max()) >= _LIMIT:
        raise OverflowError("integer entry left the safe int64 range")
    return a


def _index(m: np.ndarray, i: int) -> int:
    if not 0 <= i < m.shape[0]:
        raise LatticeError(f"cycle index {i} out of range 0..{m.shape[0] - 1}")
    return i


def basis_change_add(m, r, i: int, j: int, s: int = 1):
    """Replace cycle ``i`` by its image under the Picard-Lefschetz operator of cycle ``j``.

    The new cycle is ``D_i + <D_i, D_j> D_j``.  ``s`` picks the direction of
    the loop (over/under).  The fibres here have even complex dimension, so
    the monodromy operator is a reflection and both directions give the same
    substitution; the sign is still validated so callers cannot pass junk.
    Indices are 0-based.
    """
    m = as_matrix(m)
    _index(m, i)
    _index(m, j)
    if i == j:
        raise LatticeError("basis_change_add needs two distinct cycles")
    if s not in (1, -1):
        raise LatticeError(f"direction sign must be +1 or -1, got {s}")
    c = np.eye(m.shape[0], dtype=np.int64)
    c[i, j] = m[i, j]
    return congruence(m, r, c)


def congruence(m, r, c):
    """Apply the basis change whose rows are the new cycles in the old basis."""
    m = np.asarray(m, dtype=np.int64)
    c = np.asarray(c, dtype=np.int64)
    m2 = _checked(c @ m @ c.T)
    r2 = _checked(c @ np.asarray(r, dtype=np.int64)) if r is not None else None
    return m2, r2


def reorder(m, r, perm: Sequence[int]):
    """Relabel cycles: new cycle ``i`` is old cycle ``perm[i]`` (0-based)."""
    m = as_matrix(m)
    perm = list(perm)
    if sorted(perm) != list(range(m.shape[0])):
        raise LatticeError(f"not a permutation of 0..{m.shape[0] - 1}: {perm}")
    p = np.array(perm)
    r2 = None if r is None else np.asarray(r, dtype=np.int64)[p]
    return m[np.ix_(p, p)].copy(), r2


def negate_cycle(m, r, i: int):
    m = as_matrix(m)
    _index(m, i)
    d = np.ones(m.shape[0], dtype=np.int64)
    d[i] = -1
    r2 = None if r is None else np.asarray(r, dtype=np.int64) * d
    return m * np.outer(d, d), r2


def form_invariants(m) -> FormInvariants:
    """Rank and absolute determinant, computed exactly over the integers.

    Fraction-free (Bareiss) elimination on Python integers, with row and
    column pivoting so rank-deficient forms are handled.
    """
    a = [[int(x) for x in row] for row in as_matrix(m).tolist()]
    n = len(a)
    prev, rank, sign = 1, 0, 1
    for k in range(n):
        piv = next(((i, j) for j in range(k, n) for i in range(k, n) if a[i][j]), None)
        if piv is None:
            break
        i, j = piv
        if i != k:
            a[k], a[i] = a[i], a[k]
            sign = -sign
        if j != k:
            for row in a:
                row[k], row[j] = row[j], row[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
        rank += 1
    det = prev * sign if rank == n else 0
    return FormInvariants(rank=rank, abs_det=abs(det))


def reflect(g: np.ndarray, v: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Image of ``v`` under the reflection in the vanishing cycle ``d``."""
    return v + int(v @ g @ d) * d
