"""Command-line interface: run rules, verify axioms, benchmark, rank.

Exit codes: 0 success / axiom pass, 1 parse or usage error, 2 rule contract
error, 3 axiom violations found, 4 instance too large for brute force.
"""

from __future__ import annotations

import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import click

from . import axioms
from .config import DEFAULT_CONFIG, DEFAULT_KAPPA, DEFAULT_SIGMA, RuleConfig
from .constraints import (
    Budget,
    Cardinality,
    Conjunction,
    ConstraintSpec,
    ExclusionPairs,
    ExplicitFamily,
    PartitionMatroid,
)
from .errors import ContractError, InputError, ParseError, PropselectError, ScaleRefusal
from .metrics import benchmark
from .pabulib import parse_pabulib, to_election, write_outcome
from .proprank import run_proprank_ranking
from .registry import RULE_NAMES, run_rule
from .registry import benchmark_runner


@dataclass(frozen=True)
class RunRequest:
    """Resolved CLI configuration for one invocation."""

    rule: str
    kappa: float
    sigma: int
    tolerance: float
    utility_mode: str
    seed: int | None = None

    def rule_config(self) -> RuleConfig:
        return RuleConfig(tolerance=self.tolerance)


def spec_from_file(path: str) -> ConstraintSpec:
    """Constraint side file: JSON object with a "kind" discriminator."""
    with open(path, "rb") as fh:
        doc = json.load(fh)
    return spec_from_dict(doc)


def spec_from_dict(doc: dict) -> ConstraintSpec:
    kind = doc.get("kind")
    if kind == "budget":
        return Budget(int(doc["budget"]))
    if kind == "cardinality":
        return Cardinality(int(doc["k"]))
    if kind == "partition_matroid":
        return PartitionMatroid(doc["groups"], doc["caps"])
    if kind == "exclusion_pairs":
        return ExclusionPairs(doc["pairs"])
    if kind == "explicit":
        return ExplicitFamily(doc["family"])
    if kind == "conjunction":
        return Conjunction([spec_from_dict(part) for part in doc["parts"]])
    raise InputError(f"unknown constraint kind {kind!r}")


def _load(instance_path: str, utility_mode: str):
    with open(instance_path, "rb") as fh:
        instance = parse_pabulib(fh.read())
    return to_election(instance, utility_mode)


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


@click.group()
def main():
    """Proportional candidate selection under feasibility constraints."""


@main.command("run")
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.option("--rule", type=click.Choice(RULE_NAMES), default="proprank")
@click.option("--kappa", type=float, default=DEFAULT_KAPPA, show_default=True)
@click.option("--sigma", type=int, default=DEFAULT_SIGMA, show_default=True)
@click.option("--utility-mode", type=click.Choice(["cost_utility", "unit", "points"]),
              default="cost_utility", show_default=True)
@click.option("--constraint", "constraint_path", type=click.Path(exists=True),
              help="JSON side file overriding the instance's budget constraint.")
@click.option("--tolerance", type=float, default=DEFAULT_CONFIG.tolerance)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json")
@click.option("--out", type=click.Path(), help="Write here instead of stdout.")
def cli_run(instance, rule, kappa, sigma, utility_mode, constraint_path, tolerance, fmt, out):
    """Run a selection rule on a PabuLib instance."""
    if not 0.0 <= kappa <= 1.0:
        _fail(1, f"kappa must lie in [0, 1], got {kappa}")
    if sigma < 1:
        _fail(1, f"sigma must be at least 1, got {sigma}")
    request = RunRequest(rule, kappa, sigma, tolerance, utility_mode)
    try:
        election, spec = _load(instance, utility_mode)
        if constraint_path:
            spec = spec_from_file(constraint_path)
        outcome = run_rule(rule, election, spec, kappa=kappa, sigma=sigma,
                           config=request.rule_config())
    except (ParseError, InputError, json.JSONDecodeError) as exc:
        _fail(1, str(exc))
    except ContractError as exc:
        _fail(2, str(exc))
    payload = write_outcome(outcome, election, fmt)
    if out:
        Path(out).write_bytes(payload)
    else:
        click.echo(payload.decode(), nl=False)


AXIOM_NAMES = ("ejr", "weak-ejr", "pjr-degree", "ejrplus", "ranking-ejr")


@main.command("verify")
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.option("--axiom", type=click.Choice(AXIOM_NAMES), required=True)
@click.option("--rule", type=click.Choice(RULE_NAMES), default="proprank",
              help="Rule whose outcome is verified.")
@click.option("--kappa", type=float, default=DEFAULT_KAPPA, show_default=True)
@click.option("--sigma", type=int, default=DEFAULT_SIGMA, show_default=True)
@click.option("--utility-mode", type=click.Choice(["cost_utility", "unit", "points"]),
              default="cost_utility", show_default=True)
@click.option("--constraint", "constraint_path", type=click.Path(exists=True))
@click.option("--max-n", type=int, default=axioms.DEFAULT_MAX_N, show_default=True)
@click.option("--max-m", type=int, default=axioms.DEFAULT_MAX_M, show_default=True)
def cli_verify(instance, axiom, rule, kappa, sigma, utility_mode, constraint_path,
               max_n, max_m):
    """Verify an axiom on a rule's outcome (brute force where needed)."""
    try:
        election, spec = _load(instance, utility_mode)
        if constraint_path:
            spec = spec_from_file(constraint_path)
        if axiom == "ranking-ejr":
            ranking = run_proprank_ranking(election, kappa)
            report = axioms.check_ranking_ejr(
                election, ranking,
                lambda e, b, w: axioms.check_pjr_degree(
                    e, Budget(b), w, kappa, cohesion="pb", max_n=max_n, max_m=max_m
                ),
            )
        else:
            outcome = run_rule(rule, election, spec, kappa=kappa, sigma=sigma)
            if axiom == "ejr":
                report = axioms.check_ejr(election, spec, outcome.selected,
                                          "ordinary", max_n, max_m)
            elif axiom == "weak-ejr":
                report = axioms.check_ejr(election, spec, outcome.selected,
                                          "weak", max_n, max_m)
            elif axiom == "pjr-degree":
                report = axioms.check_pjr_degree(election, spec, outcome.selected,
                                                 kappa, max_n=max_n, max_m=max_m)
            else:  # ejrplus
                if not isinstance(spec, Budget):
                    _fail(2, "ejrplus needs a Budget constraint")
                report = axioms.check_ejr_plus_up_to_one(
                    election, spec.budget, outcome.selected
                )
    except (ParseError, InputError, json.JSONDecodeError) as exc:
        _fail(1, str(exc))
    except ScaleRefusal as exc:
        _fail(4, str(exc))
    except ContractError as exc:
        _fail(2, str(exc))
    click.echo(f"axiom: {report.axiom}")
    click.echo(f"checked groups: {report.checked_groups}")
    if report.ok:
        click.echo("result: PASS")
        sys.exit(0)
    click.echo(f"result: FAIL ({len(report.violations)} violations)")
    for v in report.violations[:20]:
        click.echo(f"  {v}")
    sys.exit(3)


@main.command("bench")
@click.argument("corpus_dir", required=False,
                type=click.Path(exists=True, file_okay=False))
@click.option("--rules", default="greedy,proprank",
              help='Comma list of rules, or "all".')
@click.option("--kappa", type=float, default=DEFAULT_KAPPA, show_default=True)
@click.option("--utility-mode", type=click.Choice(["cost_utility", "unit", "points"]),
              default="cost_utility", show_default=True)
@click.option("--out", type=click.Path(), help="CSV output path.")
def cli_bench(corpus_dir, rules, kappa, utility_mode, out):
    """Run rules over a directory of .pb files; CSV rows + bucket averages."""
    corpus_dir = corpus_dir or os.environ.get("PROPSELECT_CORPUS")
    if not corpus_dir:
        _fail(1, "no corpus directory given (argument or PROPSELECT_CORPUS)")
    names = RULE_NAMES if rules == "all" else tuple(r.strip() for r in rules.split(","))
    for name in names:
        if name not in RULE_NAMES:
            _fail(1, f"unknown rule {name!r}")
    corpus = []
    for path in sorted(Path(corpus_dir).glob("*.pb")):
        try:
            with open(path, "rb") as fh:
                instance = parse_pabulib(fh.read())
            election, spec = to_election(instance, utility_mode)
        except (ParseError, InputError) as exc:
            click.echo(f"skipping {path.name}: {exc}", err=True)
            continue
        corpus.append((path.stem, election, spec.budget))
    runners = {name: benchmark_runner(name, kappa=kappa) for name in names}
    if "greedy" not in runners:
        runners["greedy"] = benchmark_runner("greedy")
    report = benchmark(corpus, runners, reference_rule="greedy")
    for instance_id, rule, err in report.failures:
        click.echo(f"failure: {instance_id} / {rule}: {err}", err=True)
    if out:
        Path(out).write_text(report.to_csv())
    else:
        click.echo(report.to_csv(), nl=False)
    click.echo("")
    click.echo(report.bucket_table())
    sys.exit(0)


@main.command("rank")
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.option("--kappa", type=float, default=DEFAULT_KAPPA, show_default=True)
@click.option("--utility-mode", type=click.Choice(["cost_utility", "unit", "points"]),
              default="cost_utility", show_default=True)
@click.option("--verify-prefixes", is_flag=True,
              help="Check the PJR degree of every prefix (brute-force scale).")
@click.option("--max-n", type=int, default=axioms.DEFAULT_MAX_N, show_default=True)
@click.option("--max-m", type=int, default=axioms.DEFAULT_MAX_M, show_default=True)
def cli_rank(instance, kappa, utility_mode, verify_prefixes, max_n, max_m):
    """Print the proportional ranking with purchase timestamps."""
    if not 0.0 <= kappa <= 1.0:
        _fail(1, f"kappa must lie in [0, 1], got {kappa}")
    try:
        election, _ = _load(instance, utility_mode)
        ranking = run_proprank_ranking(election, kappa)
    except (ParseError, InputError) as exc:
        _fail(1, str(exc))
    except ContractError as exc:
        _fail(2, str(exc))
    for pos, cand in enumerate(ranking.order, start=1):
        click.echo(f"{pos:>3}  {cand}  t={ranking.timestamps[cand]:.9f}")
    if verify_prefixes:
        try:
            report = axioms.check_ranking_ejr(
                election, ranking,
                lambda e, b, w: axioms.check_pjr_degree(
                    e, Budget(b), w, kappa, cohesion="pb", max_n=max_n, max_m=max_m
                ),
            )
        except ScaleRefusal as exc:
            _fail(4, str(exc))
        if report.ok:
            click.echo("prefix verification: PASS")
        else:
            click.echo(f"prefix verification: FAIL ({len(report.violations)})")
            sys.exit(3)
    sys.exit(0)


if __name__ == "__main__":
    main()
