"""Command-line interface.

Exit codes: 0 success, 1 mismatch (failed fixture or divergent counts),
2 usage or invalid input, 3 state budget exceeded, 4 I/O failure.
"""
from __future__ import annotations

import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import click

from . import __version__
from .fixtures import FixtureError, fixture_check, fixture_names
from .graph import (DEFAULT_BUDGET, BudgetExceeded, component_of, explore, stats,
                    virtual_components)
from .lattice import LatticeError
from .query import QueryError, builtin_query, filter_vf, load_query
from .report import (component_dot, coxeter_dot, divergence, fixture_figure, nodes_json,
                     stats_csv, stats_figure, stats_json)
from .seeds import (PlaceholderSeed, SeedError, builtin_class, builtin_is_placeholder,
                    builtin_names, load_seed, resolve_seed, to_json, validate_seed)
from .state import class_info

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_BUDGET, EXIT_IO = 0, 1, 2, 3, 4


class Failure(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class RunConfig:
    command: str
    cls: str | None
    seed: str
    budget: int
    threads: int = 1
    out: Path | None = None
    fmt: str = "csv"

    def __post_init__(self):
        if self.budget <= 0:
            raise Failure(EXIT_USAGE, f"budget must be positive, got {self.budget}")
        if self.threads <= 0:
            raise Failure(EXIT_USAGE, f"thread count must be positive, got {self.threads}")


def _budget(option: int | None) -> int:
    if option is not None:
        return option
    env = os.environ.get("STRATA_BUDGET")
    if env is None:
        return DEFAULT_BUDGET
    try:
        return int(env)
    except ValueError:
        raise Failure(EXIT_USAGE, f"STRATA_BUDGET must be an integer, got {env!r}") from None


def _load(cfg: RunConfig):
    try:
        vf = resolve_seed(cfg.seed)
    except PlaceholderSeed as e:
        raise Failure(EXIT_USAGE, str(e)) from None
    except (SeedError, LatticeError) as e:
        raise Failure(EXIT_USAGE, f"invalid seed {cfg.seed}: {e}") from None
    except OSError as e:
        raise Failure(EXIT_IO, f"cannot read seed: {e}") from None
    if cfg.cls is not None:
        try:
            want = class_info(cfg.cls).name
        except LatticeError as e:
            raise Failure(EXIT_USAGE, str(e)) from None
        if vf.cls != want:
            raise Failure(EXIT_USAGE, f"seed {cfg.seed} has class {vf.cls}, not {want}")
    return vf


def _enumerate(cfg: RunConfig):
    vf = _load(cfg)
    try:
        g = explore([vf], budget=cfg.budget, threads=cfg.threads)
    except BudgetExceeded as e:
        raise Failure(EXIT_BUDGET, f"{e}; raise it with --budget or STRATA_BUDGET") from None
    return g, virtual_components(g)


def _write(path: Path | None, text: str) -> None:
    if path is None:
        click.echo(text, nl=False)
        return
    try:
        path.write_text(text)
    except OSError as e:
        raise Failure(EXIT_IO, f"cannot write {path}: {e}") from None


def _figure(fn, data, path: Path) -> None:
    try:
        fn(data, path)
    except OSError as e:
        raise Failure(EXIT_IO, f"cannot write {path}: {e}") from None
    click.echo(f"figure: {path}", err=True)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

_seed_opt = click.option("--seed", required=True, help="builtin:NAME or a seed file (.seed or .json)")
_class_opt = click.option("--class", "cls", help="expected class, e.g. p8_2 or P8^2")
_budget_opt = click.option("--budget", type=int, help=f"state cap (default STRATA_BUDGET or {DEFAULT_BUDGET})")
_threads_opt = click.option("--threads", type=int, default=1, show_default=True)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="strata")
def cli():
    """Enumerate virtual components of parabolic singularities and check explicit polynomials."""


@cli.command()
@_class_opt
@_seed_opt
@_budget_opt
@_threads_opt
@click.option("--out", type=click.Path(path_type=Path), help="statistics file; stdout if omitted")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("--dump", type=click.Path(path_type=Path), help="write every state as JSON")
@click.option("--check/--no-check", default=False, help="compare with the reference counts; exit 1 on divergence")
@click.option("--figures/--no-figures", default=True, help="render a Card/Ind chart next to --out")
def enumerate(cls, seed, budget, threads, out, fmt, dump, check, figures):
    """Explore the flip graph of a seed and list its virtual components."""
    cfg = RunConfig("enumerate", cls, seed, _budget(budget), threads, out, fmt)
    g, comps = _enumerate(cfg)
    rows = stats(g, comps)
    _write(out, stats_csv(rows) if fmt == "csv" else stats_json(rows, len(g)))
    if dump:
        _write(dump, nodes_json(g, comps))
    if out is not None and figures:
        _figure(stats_figure, rows, out.with_suffix(".png"))
    click.echo(f"{rows[0].cls}: {len(g)} states, {len(comps)} components", err=True)
    if check:
        diffs = divergence(rows, len(g))
        if diffs:
            click.echo("convention divergence from the reference counts:", err=True)
            for d in diffs:
                click.echo(f"  {d}", err=True)
            raise Failure(EXIT_MISMATCH, "enumeration does not match the reference counts")
        click.echo("counts match the reference values", err=True)


@cli.command()
@click.option("--fixture", "names", multiple=True, help="fixture name (repeatable)")
@click.option("--all", "run_all", is_flag=True, help="check every registered fixture")
@click.option("--out", type=click.Path(path_type=Path), help="CSV table of results, plus a figure")
@click.option("--figures/--no-figures", default=True)
def verify(names, run_all, out, figures):
    """Check explicit polynomials against their recorded critical data."""
    if run_all == bool(names):
        raise Failure(EXIT_USAGE, "give --fixture NAME or --all")
    todo = fixture_names() if run_all else list(names)
    known = set(fixture_names())
    unknown = [n for n in todo if n not in known]
    if unknown:
        raise Failure(EXIT_USAGE, f"unknown fixture {', '.join(unknown)}")
    results = []
    for n in todo:
        try:
            r = fixture_check(n)
        except FixtureError as e:
            raise Failure(EXIT_USAGE, str(e)) from None
        results.append(r)
        click.echo(r.line())
    failed = sum(not r.passed for r in results)
    click.echo(f"{len(results)} checked, {failed} failed")
    if out is not None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("fixture", "status", "detail"))
        for r in results:
            w.writerow((r.name, "pass" if r.passed else "fail", "; ".join(r.diffs)))
        _write(out, buf.getvalue())
        if figures:
            _figure(fixture_figure, results, out.with_suffix(".png"))
    if failed:
        raise Failure(EXIT_MISMATCH, f"{failed} fixture(s) failed")


@cli.command("filter")
@_class_opt
@_seed_opt
@_budget_opt
@_threads_opt
@click.option("--query", required=True, help="query file (.yaml/.json) or builtin:NAME")
@click.option("--stages", is_flag=True, help="report the match count after each clause")
@click.option("--out", type=click.Path(path_type=Path), help="CSV of matching states; stdout if omitted")
def filter_cmd(cls, seed, budget, threads, query, stages, out):
    """Select states of the flip graph by a conjunctive query."""
    cfg = RunConfig("filter", cls, seed, _budget(budget), threads, out)
    try:
        q = builtin_query(query[len("builtin:"):]) if query.startswith("builtin:") else load_query(query)
    except QueryError as e:
        raise Failure(EXIT_USAGE, str(e)) from None
    except OSError as e:
        raise Failure(EXIT_IO, f"cannot read query: {e}") from None
    g, comps = _enumerate(cfg)
    if stages:
        for k in range(1, len(q.data["all"]) + 1):
            click.echo(f"after clause {k}: {len(filter_vf(g, q.prefix(k)))}", err=True)
    hits = filter_vf(g, q)
    where = component_of(comps)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("key", "component_id", "ind", "card"))
    for i in hits:
        c = comps[where[i]]
        w.writerow((g.keys[i], c.name[:12], c.ind, c.card))
    _write(out, buf.getvalue())
    click.echo(f"{len(hits)} matching states", err=True)


@cli.command()
@_seed_opt
@_budget_opt
@_threads_opt
@click.option("--dot", type=click.Path(path_type=Path), help="Coxeter-Dynkin graph of the seed state")
@click.option("--json", "json_path", type=click.Path(path_type=Path), help="seed state in JSON form")
@click.option("--components", type=click.Path(path_type=Path), help="DOT of the component graph (enumerates)")
def export(seed, budget, threads, dot, json_path, components):
    """Write DOT and JSON views of a seed state or its component graph."""
    if not (dot or json_path or components):
        raise Failure(EXIT_USAGE, "nothing to export: give --dot, --json or --components")
    cfg = RunConfig("export", None, seed, _budget(budget), threads)
    vf = _load(cfg)
    if dot:
        _write(dot, coxeter_dot(vf))
    if json_path:
        _write(json_path, json.dumps(to_json(vf), indent=2) + "\n")
    if components:
        g, comps = _enumerate(cfg)
        _write(components, component_dot(g, comps))


@cli.group()
def seeds():
    """Builtin seed registry and seed file validation."""


@seeds.command("list")
def seeds_list():
    """List builtin seeds; placeholders carry no data yet."""
    for n in builtin_names(include_placeholders=True):
        tag = "placeholder" if builtin_is_placeholder(n) else "ok"
        click.echo(f"{n}\t{builtin_class(n)}\t{tag}")


@seeds.command("validate")
@click.argument("paths", nargs=-1, required=True)
def seeds_validate(paths):
    """Check seed files (or builtin:NAME) and report every violated invariant."""
    bad = 0
    for p in paths:
        try:
            vf = resolve_seed(p) if p.startswith("builtin:") else load_seed(p)
            issues = validate_seed(vf)
        except (SeedError, LatticeError) as e:
            issues = [str(e)]
        except OSError as e:
            raise Failure(EXIT_IO, f"cannot read {p}: {e}") from None
        bad += bool(issues)
        click.echo(f"{p}: " + ("ok" if not issues else "; ".join(issues)))
    if bad:
        raise Failure(EXIT_USAGE, f"{bad} invalid seed file(s)")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, prog_name="strata", standalone_mode=False)
    except Failure as e:
        click.echo(f"error: {e}", err=True)
        return e.code
    except click.exceptions.Abort:
        return EXIT_USAGE
    except click.ClickException as e:
        e.show()
        return EXIT_USAGE
    except OSError as e:
        click.echo(f"error: {e}", err=True)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
