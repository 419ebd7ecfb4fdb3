"""Restart and backtrack variants of PropRank that reduce unspent budget.

Both variants change only which candidates feed the local scaling factors
(the foresight pool); purchases always range over all available candidates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .config import DEFAULT_CONFIG, DEFAULT_SIGMA, RuleConfig, tol_abs
from .constraints import ConstraintSpec
from .election import Election, ensure_valid
from .engine import PurchaseEngine
from .errors import ContractError, InternalError
from .outcome import Outcome
from .proprank import _check_kappa


def run_proprank_rem(
    election: Election,
    spec: ConstraintSpec,
    kappa: float = 1.0,
    config: RuleConfig = DEFAULT_CONFIG,
) -> Outcome:
    """PropRank with restarts: a removed candidate stops driving the scalings.

    Whenever a run removes a candidate that is not yet excluded, the whole
    procedure restarts with that candidate excluded from the scaling pool
    (it stays purchasable until constraints remove it). Each restart excludes
    exactly one more candidate, so there are at most m restarts. Candidates
    infeasible before the first purchase never enter the scaling pool, so
    their removal cannot trigger a restart.
    """
    ensure_valid(election)
    _check_kappa(kappa)
    oracle = spec.bind(election)
    excluded: set[int] = set()
    for _ in range(election.m + 1):
        engine = PurchaseEngine(election, oracle, kappa, config)
        pre_pruned = {j for j, _ in engine.removed}
        trigger = None
        while trigger is None:
            pool = [j for j in engine.avail if j not in excluded]
            ev = engine.next_event(pool)
            if ev is None:
                break
            before = len(engine.removed)
            engine.commit(ev)
            new_removals = sorted(
                j for j, _ in engine.removed[before:]
                if j not in excluded and j not in pre_pruned
            )
            if new_removals:
                trigger = new_removals[0]
        if trigger is None:
            return engine.outcome()
        excluded.add(trigger)
    raise InternalError("PropRankRem exceeded its restart bound")


@dataclass
class BacktrackState:
    """Bookkeeping across PropRank executions of the backtrack heuristic."""

    wait_set: set[int]
    sigma: int
    entries: dict[int, int] = field(default_factory=dict)
    prev_run: Outcome | None = None
    runs: int = 0


def _dual_run(election, oracle, kappa, config, pool_prev, pool_new):
    """One execution that mirrors the previous one until the new scaling pool
    triggers a purchase at a strictly earlier timestamp; from that point on
    only the new pool is used and the previous execution is discarded."""
    engine = PurchaseEngine(election, oracle, kappa, config)
    mirroring = True
    while True:
        if not mirroring:
            ev = engine.next_event([j for j in engine.avail if j in pool_new])
            if ev is None:
                break
            engine.commit(ev)
            continue
        ev_prev = engine.next_event([j for j in engine.avail if j in pool_prev])
        if ev_prev is None:
            break
        ev_new = engine.next_event([j for j in engine.avail if j in pool_new])
        tie = 2.0 * tol_abs(config, max(ev_prev.time, ev_new.time))
        if ev_new.time < ev_prev.time - tie:
            engine.commit(ev_new)
            mirroring = False
        else:
            engine.commit(ev_prev)
    return engine


def run_proprank_backtrack(
    election: Election,
    spec: ConstraintSpec,
    kappa: float = 1.0,
    sigma: int = DEFAULT_SIGMA,
    config: RuleConfig = DEFAULT_CONFIG,
) -> Outcome:
    """Iterated PropRank over a shrinking waiting set C_wait.

    After each run C_wait gains the run's selected candidates (a candidate may
    enter C_wait at most ``sigma`` times, counting its initial membership) and
    loses the earliest-removed C_wait member; when no C_wait member was
    removed (C_wait is a subset of the selection) the previous selection is
    returned. Re-runs mirror the previous execution until the new waiting set
    triggers an earlier purchase. Total executions are capped at sigma*m + 1.
    """
    ensure_valid(election)
    _check_kappa(kappa)
    if sigma < 1:
        raise ContractError(f"sigma must be at least 1, got {sigma}")
    oracle = spec.bind(election)
    m = election.m
    state = BacktrackState(wait_set=set(range(m)), sigma=sigma)
    state.entries = {j: 1 for j in range(m)}
    prev_pool: set[int] | None = None
    max_runs = sigma * m + 1

    while True:
        if state.runs >= max_runs:
            raise InternalError("PropRankBacktrack exceeded its run bound")
        state.runs += 1
        if prev_pool is None:
            engine = PurchaseEngine(election, oracle, kappa, config)
            engine.run(lambda avail: [j for j in avail if j in state.wait_set])
        else:
            engine = _dual_run(
                election, oracle, kappa, config, prev_pool, state.wait_set
            )
        outcome = engine.outcome()
        selected_idx = set(engine.selected)

        pool_used = set(state.wait_set)
        for j in sorted(selected_idx - state.wait_set):
            if state.entries[j] < sigma:
                state.entries[j] += 1
                state.wait_set.add(j)
        removals = sorted(engine.removed, key=lambda jt: (jt[1], jt[0]))
        dropped = next((j for j, _ in removals if j in state.wait_set), None)
        if dropped is None:
            return outcome
        state.wait_set.discard(dropped)
        state.prev_run = outcome
        prev_pool = pool_used
