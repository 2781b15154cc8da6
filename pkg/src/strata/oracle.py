"""Numerical Morse oracle for explicit real polynomials in two or three variables.

Real critical points come from multi-start Newton on the gradient; non-real
ones are counted by complex Newton from random starts.  Points whose Hessian
is numerically singular are reported as degenerate with their value, never
given a Morse index.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np
import sympy

X, Y, Z = sympy.symbols("x y z")
VARS = (X, Y, Z)


class OracleError(ValueError):
    pass


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

class _Compiled:
    """Dense float evaluation of a sparse polynomial on batches of points."""

    def __init__(self, terms: dict, nvars: int):
        if terms:
            self.exps = np.array(list(terms), dtype=np.int64).reshape(len(terms), nvars)
            self.coefs = np.array([complex(c) for c in terms.values()])
        else:
            self.exps = np.zeros((0, nvars), dtype=np.int64)
            self.coefs = np.zeros(0, dtype=complex)
        self.real = bool(np.all(self.coefs.imag == 0))
        if self.real:
            self.coefs = self.coefs.real

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        if not len(self.coefs):
            return np.zeros(pts.shape[0], dtype=pts.dtype)
        mons = np.prod(pts[:, None, :] ** self.exps[None, :, :], axis=2)
        return mons @ self.coefs


@dataclass(frozen=True)
class Polynomial:
    """Sparse real polynomial; ``terms`` maps exponent tuples to sympy numbers."""
    nvars: int
    terms: tuple  # sorted ((exps, coef), ...)

    @classmethod
    def from_expr(cls, expr, nvars: int | None = None) -> "Polynomial":
        expr = sympy.sympify(expr)
        free = expr.free_symbols
        if nvars is None:
            nvars = 3 if Z in free else 2
        if nvars not in (2, 3):
            raise OracleError(f"polynomials in {nvars} variables are not supported")
        extra = free - set(VARS[:nvars])
        if extra:
            raise OracleError(f"unbound symbols {sorted(map(str, extra))} in polynomial")
        poly = sympy.Poly(sympy.expand(expr), *VARS[:nvars])
        terms = tuple(sorted((tuple(int(e) for e in m), sympy.nsimplify(c) if c.is_Rational else c)
                             for m, c in poly.terms() if c != 0))
        return cls(nvars, terms)

    @cached_property
    def expr(self):
        v = VARS[:self.nvars]
        return sympy.Add(*[c * sympy.Mul(*[s**e for s, e in zip(v, m)]) for m, c in self.terms])

    @property
    def degree(self) -> int:
        return max((sum(m) for m, _ in self.terms), default=0)

    def coefficient(self, exps) -> sympy.Expr:
        return dict(self.terms).get(tuple(exps), sympy.Integer(0))

    def __add__(self, other) -> "Polynomial":
        o = other.expr if isinstance(other, Polynomial) else sympy.sympify(other)
        return Polynomial.from_expr(self.expr + o, self.nvars)

    def __sub__(self, other) -> "Polynomial":
        o = other.expr if isinstance(other, Polynomial) else sympy.sympify(other)
        return Polynomial.from_expr(self.expr - o, self.nvars)

    def substitute(self, mapping: dict) -> "Polynomial":
        return Polynomial.from_expr(self.expr.subs(mapping, simultaneous=True), self.nvars)

    def __str__(self) -> str:
        return str(self.expr)

    # numeric evaluation
    @cached_property
    def _f(self):
        return _Compiled(dict(self.terms), self.nvars)

    @cached_property
    def _grad(self):
        v = VARS[:self.nvars]
        return [_Compiled(dict(Polynomial.from_expr(sympy.diff(self.expr, s), self.nvars).terms), self.nvars)
                for s in v]

    @cached_property
    def _hess(self):
        v = VARS[:self.nvars]
        return [[_Compiled(dict(Polynomial.from_expr(sympy.diff(self.expr, a, b), self.nvars).terms),
                           self.nvars) for b in v] for a in v]

    def value(self, pts) -> np.ndarray:
        pts = np.atleast_2d(pts)
        return self._f(pts)

    def gradient(self, pts) -> np.ndarray:
        pts = np.atleast_2d(pts)
        return np.stack([g(pts) for g in self._grad], axis=-1)

    def hessian(self, pts) -> np.ndarray:
        pts = np.atleast_2d(pts)
        return np.stack([np.stack([h(pts) for h in row], axis=-1) for row in self._hess], axis=-2)


# ---------------------------------------------------------------------------
# families and translations
# ---------------------------------------------------------------------------

_RANGES: dict[str, Callable[[float], bool]] = {
    "X9+": lambda a: abs(a) < 1, "X9-": lambda a: abs(a) < 1, "X9^1": lambda a: abs(a) < 1,
    "X9^2": lambda a: a < -1, "J10^1": lambda a: True, "J10^3": lambda a: abs(a) < 1,
    "P8^1": lambda a: a < 1, "P8^2": lambda a: a > 1,
}


def normal_form(cls: str, A) -> sympy.Expr:
    from .state import class_info
    name = class_info(cls).name
    A = sympy.nsimplify(A)
    if not _RANGES[name](float(A)):
        raise OracleError(f"modulus A={A} outside the range of class {name}")
    if name in ("X9+", "X9^2"):
        return X**4 + 2 * A * X**2 * Y**2 + Y**4
    if name == "X9-":
        return -(X**4 + 2 * A * X**2 * Y**2 + Y**4)
    if name == "X9^1":
        return X * Y * (X**2 + 2 * A * X * Y + Y**2)
    if name == "J10^1":
        return (X - A * Y**2) * (X**2 + Y**4)
    if name == "J10^3":
        return (X - A * Y**2) * (X**2 - Y**4)
    return X**3 + Y**3 + Z**3 - 3 * A * X * Y * Z


_VERSAL = {
    "X9": [1, X, Y, X**2, X * Y, Y**2, X**2 * Y, X * Y**2],
    "J10^1": [1, Y, Y**2, Y**3, Y**4, X, X * Y, X * Y**2, (X**2 + 3 * Y**4) * Y],
    "J10^3": [1, Y, Y**2, Y**3, Y**4, X, X * Y, X * Y**2, (X**2 - 3 * Y**4) * Y],
    "P8": [1, X, Y, Z, X * Y, X * Z, Y * Z],
}


def _family(name: str) -> str:
    return "X9" if name.startswith("X9") else "P8" if name.startswith("P8") else name


def versal_polynomial(cls: str, A, lambdas: Sequence = ()) -> Polynomial:
    """Member of the standard versal family of ``cls`` with modulus ``A``."""
    from .state import class_info
    info = class_info(cls)
    basis = _VERSAL[_family(info.name)]
    lambdas = list(lambdas) or [0] * len(basis)
    if len(lambdas) != len(basis):
        raise OracleError(f"class {info.name} takes {len(basis)} deformation parameters, got {len(lambdas)}")
    expr = normal_form(info.name, A) + sum(sympy.nsimplify(l) * b for l, b in zip(lambdas, basis))
    return Polynomial.from_expr(expr, info.nvars)


_KILL = {
    "X9": [(3, 0), (0, 3)],
    "P8": [(2, 0, 0), (0, 2, 0), (0, 0, 2)],
}


def t_translate(p: Polynomial, cls: str) -> Polynomial:
    """Translate ``p`` so that the monomials absent from the versal family vanish.

    For the X9 classes these are ``x^3`` and ``y^3``; for P8 they are
    ``x^2, y^2, z^2``.  Their coefficients after a shift are affine in the
    shift vector, so the translation solves a linear system.
    """
    from .state import class_info
    info = class_info(cls)
    fam = _family(info.name)
    if fam not in _KILL:
        raise OracleError(f"no normalizing translation is defined for class {info.name}")
    want_deg = 4 if fam == "X9" else 3
    if p.nvars != info.nvars or p.degree != want_deg:
        raise OracleError(f"principal part of degree {p.degree} in {p.nvars} variables "
                          f"does not match class {info.name}")
    v = VARS[:p.nvars]
    shift = sympy.symbols(f"s0:{p.nvars}")
    moved = sympy.Poly(sympy.expand(p.expr.subs({a: a + s for a, s in zip(v, shift)}, simultaneous=True)), *v)
    eqs = [moved.coeff_monomial(m) for m in _KILL[fam]]
    sol = sympy.solve(eqs, shift, dict=True)
    if len(sol) != 1 or len(sol[0]) != p.nvars:
        raise OracleError("principal part does not determine a unique normalizing translation")
    return Polynomial.from_expr(moved.as_expr().subs(sol[0]), p.nvars)


# ---------------------------------------------------------------------------
# critical points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CriticalPoint:
    coords: tuple
    value: float
    hessian_signature: tuple  # (n_neg, n_zero, n_pos)
    morse_index: int | str  # "degenerate" when the Hessian is singular
    residual: float

    @property
    def degenerate(self) -> bool:
        return self.morse_index == "degenerate"


@dataclass
class CriticalReport:
    points: list
    expected_mu: int
    complex_count: int
    nonreal_values: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    nonreal_degenerate: int = 0

    @property
    def real_count(self) -> int:
        return len(self.points)

    @property
    def degenerate_multiplicity(self) -> int | None:
        """Milnor number carried by the degenerate real points together (None if unknown)."""
        if self.nonreal_degenerate:
            return None
        return self.expected_mu - self.complex_count - sum(not p.degenerate for p in self.points)

    @property
    def ind(self):
        try:
            return ind_of_report(self)
        except OracleError:
            return "undefined"


def _newton(p: Polynomial, pts: np.ndarray, iters: int) -> np.ndarray:
    """Damped Newton on the gradient; diverging starts are dropped."""
    bound = 1e6
    n = pts.shape[1]
    reg = 1e-13 * np.eye(n)
    done = np.zeros(len(pts), dtype=bool)
    for _ in range(iters):
        act = np.flatnonzero(~done)
        if not len(act):
            break
        q = pts[act]
        h, g = p.hessian(q) + reg, p.gradient(q)
        try:
            step = np.linalg.solve(h, g[..., None])[..., 0]
        except np.linalg.LinAlgError:
            step = np.einsum("nij,nj->ni", np.linalg.pinv(h, rcond=1e-13), g)
        norm = np.linalg.norm(step, axis=1)
        big = norm > 1.0
        step[big] /= norm[big, None]
        pts[act] = q - step
        done[act] = norm < 1e-15 * (1 + np.abs(q).max(axis=1))
        bad = ~(np.isfinite(pts).all(axis=1) & (np.abs(pts).max(axis=1) < bound))
        pts[bad] = 0
        done |= bad
        if bad.any():
            pts, done = pts[~bad], done[~bad]
    return pts


def _signature(h: np.ndarray, zero_tol: float) -> tuple:
    ev = np.linalg.eigvalsh(h)
    scale = max(1.0, float(np.abs(ev).max()))
    neg = int(np.sum(ev < -zero_tol * scale))
    pos = int(np.sum(ev > zero_tol * scale))
    return neg, len(ev) - neg - pos, pos


def _cluster(pts: np.ndarray, res: np.ndarray, radius: float) -> list[int]:
    reps: list[int] = []
    for i in np.argsort(res, kind="stable"):
        if all(np.linalg.norm(pts[i] - pts[j]) > radius for j in reps):
            reps.append(int(i))
    return reps


def _complex_run(p: Polynomial, box: float, starts: int, tol: float, rng):
    """Complex Newton from random starts: (real-looking points, distinct non-real points)."""
    n = p.nvars
    z = rng.uniform(-box, box, (starts, n)) + 1j * rng.uniform(-box, box, (starts, n))
    z = _newton(p, z, 100)
    if not len(z):
        return np.zeros((0, n)), []
    res = np.linalg.norm(p.gradient(z), axis=1)
    z, res = z[res < tol], res[res < tol]
    im = np.abs(z.imag).max(axis=1)
    real_like = z[im <= 1e-6].real
    z, res = z[im > 1e-6], res[im > 1e-6]
    return real_like, [z[i] for i in _cluster(z, res, 1e-5)]


def critical_points(p: Polynomial, box: float = 5.0, grid_n: int = 12, newton_tol: float = 1e-10,
                    expected_mu: int | None = None, hess_zero: float = 1e-7,
                    complex_starts: int | None = None, seed: int = 0) -> CriticalReport:
    """Real critical points of ``p`` in ``[-box, box]^n`` plus a count of non-real ones.

    Real starts come from a uniform grid and from complex Newton runs that
    landed on the real locus; non-real points are counted once each.
    """
    if grid_n < 8:
        raise OracleError("grid_n must be at least 8")
    n = p.nvars
    if expected_mu is None:
        expected_mu = (p.degree - 1) ** n
    rng = np.random.default_rng(seed)
    cstarts = complex_starts or (600 if n == 2 else 1200)
    real_like, cps = _complex_run(p, box, cstarts, max(newton_tol, 1e-9), rng)
    axis = np.linspace(-box, box, grid_n)
    starts = np.array(np.meshgrid(*[axis] * n, indexing="ij")).reshape(n, -1).T
    # fixed offset keeps grid nodes off symmetry planes where Newton stalls
    starts = np.vstack([starts + 1e-3 * np.arange(1, n + 1), real_like])
    pts = _newton(p, starts.astype(float), 150)
    res = np.linalg.norm(p.gradient(pts), axis=1) if len(pts) else np.zeros(0)
    keep = (res < newton_tol) & (np.abs(pts).max(axis=1) <= box * 1.5) if len(pts) else res > 0
    pts, res = pts[keep], res[keep]
    hs = p.hessian(pts) if len(pts) else np.zeros((0, n, n))
    sigs = [_signature(h, hess_zero) for h in hs]
    degen = np.array([s[1] > 0 for s in sigs], dtype=bool)
    reps = []
    for mask, radius in ((~degen, 1e-6), (degen, 1e-3)):
        idx = np.flatnonzero(mask)
        reps += [int(idx[i]) for i in _cluster(pts[idx], res[idx], radius)]
    # a degenerate cluster absorbs Morse-looking stragglers that converged next to it
    dpts = [pts[i] for i in reps if degen[i]]
    reps = [i for i in reps if degen[i] or all(np.linalg.norm(pts[i] - d) > 1e-3 for d in dpts)]
    points = []
    for i in reps:
        neg, zero, pos = sigs[i]
        points.append(CriticalPoint(tuple(float(c) for c in pts[i]), float(p.value(pts[i])[0].real),
                                    sigs[i], "degenerate" if zero else neg, float(res[i])))
    points.sort(key=lambda c: (c.value, c.coords))
    # complex runs stall next to degenerate real points; those are not new points
    dreal = [np.array(c.coords) for c in points if c.degenerate]
    cps = [z for z in cps if all(np.linalg.norm(z - d) > 1e-3 for d in dreal)]
    report = CriticalReport(points, expected_mu, len(cps),
                            sorted((complex(p.value(z)[0]) for z in cps), key=lambda c: (c.real, c.imag)))
    cdeg = [z for z in cps if np.abs(np.linalg.eigvals(p.hessian(z)[0])).min() < 1e-6]
    if cdeg:
        report.nonreal_degenerate = len(cdeg)
        report.warnings.append(f"{len(cdeg)} non-real points are degenerate; multiplicities not resolved")
        return report
    nondeg = sum(not c.degenerate for c in points)
    if not any(c.degenerate for c in points):
        if nondeg + report.complex_count != expected_mu:
            report.warnings.append(f"found {nondeg} real and {report.complex_count} non-real points, "
                                   f"expected {expected_mu} in total")
    elif report.degenerate_multiplicity < sum(c.degenerate for c in points):
        report.warnings.append("degenerate points cannot absorb the missing multiplicity")
    if report.complex_count % 2:
        report.warnings.append("odd number of non-real critical points: some were probably missed")
    return report


def ind_of_report(r: CriticalReport, shift: float = 0.0, value_tol: float = 1e-9) -> int:
    """Ind of ``f - shift``: even-index minus odd-index points with value below ``shift``."""
    if any(c.degenerate for c in r.points):
        raise OracleError("Ind is undefined: degenerate critical point present")
    if any(abs(c.value - shift) <= value_tol for c in r.points):
        raise OracleError("Ind is undefined: a critical value equals the level")
    return sum(1 if c.morse_index % 2 == 0 else -1 for c in r.points if c.value < shift)


def index_counts_below(r: CriticalReport, shift: float = 0.0, nvars: int = 3) -> tuple:
    counts = [0] * (nvars + 1)
    for c in r.points:
        if c.degenerate:
            raise OracleError("degenerate critical point present")
        if c.value < shift:
            counts[c.morse_index] += 1
    return tuple(counts)


# ---------------------------------------------------------------------------
# family scans and the modulus equation
# ---------------------------------------------------------------------------

@dataclass
class ScanReport:
    samples: list  # (parameter, min |critical value|, touched)
    zero_tol: float

    @property
    def touches(self) -> list:
        return [s for s in self.samples if s[2]]

    @property
    def clear(self) -> bool:
        return not self.touches

    @property
    def min_abs_value(self) -> float:
        return min((s[1] for s in self.samples), default=math.inf)


def family_scan(family: Callable[[float], Polynomial], params: Iterable[float],
                zero_tol: float = 1e-6, **kw) -> ScanReport:
    """Check that no member of a one-parameter family has a real critical value near zero."""
    kw.setdefault("complex_starts", 50)
    samples = []
    for t in params:
        r = critical_points(family(t), **kw)
        m = min((abs(c.value) for c in r.points), default=math.inf)
        samples.append((float(t), m, m <= zero_tol))
    return ScanReport(samples, zero_tol)


def solve_j_equation(tol: float = 1e-9) -> list[float]:
    """Real roots ``A < -1`` of ``(A^2+3)^3 = 135 (A^2-1)^2``."""
    a = sympy.Symbol("A", real=True)
    poly = sympy.Poly((a**2 + 3) ** 3 - 135 * (a**2 - 1) ** 2, a)
    out = []
    for root in poly.real_roots():
        v = float(root.evalf(30))
        if v < -1:
            lhs = (v**2 + 3) ** 3 / (27 * (v**2 - 1) ** 2)
            if abs(lhs - 5) > tol:
                raise OracleError(f"root {v} has residual {abs(lhs - 5)}")
            out.append(v)
    return sorted(out)
