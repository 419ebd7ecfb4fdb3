"""Uniform rule registry used by the CLI and the benchmark harness."""

from __future__ import annotations

from typing import Callable

from .baselines import run_greedy_pb, run_mes_pb_add1, run_phragmen_approval
from .bos import run_bos_general
from .config import DEFAULT_CONFIG
from .constraints import Budget, ConstraintSpec
from .election import Election
from .errors import ContractError
from .heuristics import run_proprank_backtrack, run_proprank_rem
from .mes import run_mes_general
from .outcome import Outcome
from .proprank import run_proprank

RULE_NAMES = (
    "proprank",
    "proprank-rem",
    "proprank-backtrack",
    "mes",
    "bos",
    "greedy",
    "mes-pb",
    "phragmen",
)


def _need_budget(spec: ConstraintSpec, rule: str) -> int:
    if not isinstance(spec, Budget):
        raise ContractError(f"rule {rule!r} needs a Budget constraint")
    return spec.budget


def run_rule(
    name: str,
    election: Election,
    spec: ConstraintSpec,
    kappa: float = 1.0,
    sigma: int = 2,
    config=DEFAULT_CONFIG,
) -> Outcome:
    """Dispatch a rule by registry name."""
    if name == "proprank":
        return run_proprank(election, spec, kappa, config)
    if name == "proprank-rem":
        return run_proprank_rem(election, spec, kappa, config)
    if name == "proprank-backtrack":
        return run_proprank_backtrack(election, spec, kappa, sigma, config)
    if name == "mes":
        return run_mes_general(election, spec, kappa, config)
    if name == "bos":
        return run_bos_general(election, spec, config)
    if name == "greedy":
        return run_greedy_pb(election, _need_budget(spec, name))
    if name == "mes-pb":
        return run_mes_pb_add1(election, _need_budget(spec, name))
    if name == "phragmen":
        return run_phragmen_approval(election, spec)
    raise ContractError(f"unknown rule {name!r}")


def benchmark_runner(name: str, kappa: float = 1.0, sigma: int = 2) -> Callable:
    """(election, budget) -> Outcome adapter for the metrics harness."""

    def run(election: Election, budget: int) -> Outcome:
        return run_rule(name, election, Budget(budget), kappa=kappa, sigma=sigma)

    return run
