"""Registry of explicit polynomials with known critical data, stored as YAML.

Fixture fields:

``expr``        polynomial in x, y (and z), sympy syntax
``subs``        values for the free parameters of ``expr``
``translate``   class whose normalizing translation is applied first
``expected_mu`` total number of complex critical points
``far_complex`` non-real points known to lie far outside the box; not searched for
``box``, ``grid_n``, ``value_tol``
``expect``      any of

  ``real_count``               number of real critical points
  ``points``                   list of ``{value, index, coords?, tol?}``, matched in value order;
                               ``index`` is an integer or ``degenerate``
  ``contains``                 points that must be present among others
  ``complex_count``            distinct non-real critical points
  ``nonreal_values``           list of ``{value, tol}``
  ``degenerate_multiplicity``  Milnor number carried by the degenerate real points
  ``others_positive``          every Morse point has a positive value
  ``ind``                      Ind of the polynomial itself
  ``ind_scan``                 list of ``{shift, ind}``: Ind of ``f - shift``
  ``hi``                       list of ``{shift, candidates}`` for homology-index candidates
  ``generic``                  only Morse points, none at level zero, none missing

Scans (``kind: scan``) carry ``param``, ``range`` and ``samples`` and
expect no member of the family to touch the discriminant.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

import numpy as np
import sympy
import yaml

from .oracle import (CriticalReport, OracleError, Polynomial, critical_points, family_scan,
                     ind_of_report, index_counts_below, t_translate)


class FixtureError(KeyError):
    pass


@dataclass
class FixtureResult:
    name: str
    passed: bool
    diffs: list = field(default_factory=list)
    report: CriticalReport | None = None

    def line(self) -> str:
        status = "pass" if self.passed else "FAIL"
        tail = "" if self.passed else ": " + "; ".join(self.diffs)
        return f"{self.name}: {status}{tail}"


def _dir():
    return resources.files("strata") / "data" / "fixtures"


def fixture_names() -> list[str]:
    return sorted(p.name[:-5] for p in _dir().iterdir() if p.name.endswith(".yaml"))


def load_fixture(name: str) -> dict:
    f = _dir() / f"{name}.yaml"
    if not f.is_file():
        raise FixtureError(f"unknown fixture {name!r}")
    data = yaml.safe_load(f.read_text())
    data.setdefault("name", name)
    return data


def num(v) -> float:
    """Evaluate an exact or symbolic number written as a string."""
    return float(sympy.sympify(str(v)))


def fixture_polynomial(fx: dict, subs: dict | None = None) -> Polynomial:
    s = {sympy.Symbol(k): sympy.sympify(str(v)) for k, v in {**fx.get("subs", {}), **(subs or {})}.items()}
    expr = sympy.sympify(fx["expr"]).subs(s)
    p = Polynomial.from_expr(expr, fx.get("vars"))
    if fx.get("translate"):
        p = t_translate(p, fx["translate"])
    return p


def _run(fx: dict, subs=None) -> CriticalReport:
    return critical_points(fixture_polynomial(fx, subs), box=float(fx.get("box", 5.0)),
                           grid_n=int(fx.get("grid_n", 12)), expected_mu=_reachable_mu(fx))


def _reachable_mu(fx: dict):
    mu = fx.get("expected_mu")
    return None if mu is None else mu - int(fx.get("far_complex", 0))


def _match_point(c, want, tol) -> str | None:
    t = float(want.get("tol", tol))
    v = num(want["value"])
    if abs(c.value - v) > t:
        return f"value {c.value:.10g} != {v:.10g}"
    idx = want.get("index")
    if idx is not None and c.morse_index != idx:
        return f"index {c.morse_index} != {idx} at value {v:.6g}"
    if "coords" in want:
        w = np.array([num(x) for x in want["coords"]])
        if np.abs(np.array(c.coords) - w).max() > max(t, 1e-6):
            return f"point {np.round(c.coords, 8).tolist()} != {w.tolist()}"
    return None


def check_report(r: CriticalReport, expect: dict, tol: float) -> list[str]:
    diffs = []
    if "real_count" in expect and r.real_count != expect["real_count"]:
        diffs.append(f"real_count {r.real_count} != {expect['real_count']}")
    if "points" in expect:
        want = sorted(expect["points"], key=lambda w: num(w["value"]))
        if len(want) != r.real_count:
            diffs.append(f"{r.real_count} real points, expected {len(want)}")
        else:
            # equal values may come in any index order
            got = sorted(r.points, key=lambda c: (round(c.value, 6), str(c.morse_index)))
            want = sorted(want, key=lambda w: (round(num(w["value"]), 6), str(w.get("index"))))
            diffs += [d for c, w in zip(got, want) if (d := _match_point(c, w, tol))]
    for w in expect.get("contains", []):
        if all(_match_point(c, w, tol) for c in r.points):
            diffs.append(f"no point with value {w['value']} and index {w.get('index')}")
    if "complex_count" in expect and r.complex_count != expect["complex_count"]:
        diffs.append(f"complex_count {r.complex_count} != {expect['complex_count']}")
    for w in expect.get("nonreal_values", []):
        v, t = num(w["value"]), float(w.get("tol", tol))
        if not any(abs(z - v) <= t for z in r.nonreal_values):
            diffs.append(f"no non-real critical value near {v}")
    if "degenerate_multiplicity" in expect and r.degenerate_multiplicity != expect["degenerate_multiplicity"]:
        diffs.append(f"degenerate multiplicity {r.degenerate_multiplicity} != {expect['degenerate_multiplicity']}")
    if expect.get("others_positive"):
        bad = [c.value for c in r.points if not c.degenerate and c.value <= 0]
        if bad:
            diffs.append(f"non-positive Morse values {bad}")
    if "ind" in expect and r.ind != expect["ind"]:
        diffs.append(f"Ind {r.ind} != {expect['ind']}")
    for s in expect.get("ind_scan", []):
        try:
            got = ind_of_report(r, num(s["shift"]))
        except OracleError as e:
            got = str(e)
        if got != s["ind"]:
            diffs.append(f"Ind(f - {s['shift']}) = {got}, expected {s['ind']}")
    for h in expect.get("hi", []):
        from .graph import hi_candidates
        got = hi_candidates(index_counts_below(r, num(h["shift"])), h.get("class", "P8^2"))
        if got != {tuple(c) for c in h["candidates"]}:
            diffs.append(f"HI candidates at {h['shift']}: {sorted(got)} != {h['candidates']}")
    if expect.get("generic"):
        if any(c.degenerate for c in r.points):
            diffs.append("degenerate real point in a generic fixture")
        if any(abs(c.value) <= tol for c in r.points):
            diffs.append("critical value at zero in a generic fixture")
        diffs += r.warnings
    return diffs


def fixture_check(name: str) -> FixtureResult:
    fx = load_fixture(name)
    tol = float(fx.get("value_tol", 1e-8))
    if fx.get("kind") == "scan":
        lo, hi = (num(v) for v in fx["range"])
        sym = fx["param"]
        grid = np.linspace(lo, hi, int(fx["samples"]))
        scan = family_scan(lambda t: fixture_polynomial(fx, {sym: sympy.Float(t, 30)}), grid,
                           zero_tol=float(fx.get("zero_tol", 1e-6)), box=float(fx.get("box", 5.0)),
                           grid_n=int(fx.get("grid_n", 12)))
        diffs = [f"{sym}={t:.6g}: critical value {m:.3g} touches zero" for t, m, _ in scan.touches]
        want_min = fx.get("expect", {}).get("min_abs_value")
        if want_min is not None and abs(scan.min_abs_value - num(want_min)) > tol:
            diffs.append(f"min |value| {scan.min_abs_value} != {want_min}")
        return FixtureResult(name, not diffs, diffs)
    r = _run(fx)
    diffs = check_report(r, fx.get("expect", {}), tol)
    return FixtureResult(name, not diffs, diffs, r)
