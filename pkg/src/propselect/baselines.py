"""Reference rules: Greedy-PB, Equal Shares with ADD1 completion, Phragmén.

Phragmén is implemented independently of the PropRank engine on purpose: the
approval reduction (PropRank on 0/1 ballots equals sequential Phragmén) is
verified by comparing the two implementations.
"""

from __future__ import annotations

import math

import numpy as np

from . import _kernels as K
from .constraints import ConstraintSpec
from .election import Election, ensure_valid
from .errors import ContractError
from .outcome import Outcome, PurchaseRecord


def run_greedy_pb(election: Election, budget: int) -> Outcome:
    """Take candidates by descending total utility while the cost fits."""
    ensure_valid(election)
    order = sorted(
        election.candidates, key=lambda c: (-election.total_utility(c), c)
    )
    remaining = budget
    selected = []
    records = []
    removed = []
    for pos, c in enumerate(order):
        if election.cost[c] <= remaining:
            remaining -= election.cost[c]
            selected.append(c)
            records.append(PurchaseRecord(c, float(pos), 0.0, {}))
        else:
            removed.append((c, float(pos)))
    return Outcome(
        selected=tuple(selected),
        ledger=tuple(records),
        removed=tuple(removed),
        unspent={v: 0.0 for v in election.voters},
    )


def _mes_core(election: Election, endowment: float):
    """Classic Method of Equal Shares with per-voter budget ``endowment``.

    Repeatedly buys the candidate with minimal rho (the level at which
    sum_i min(b_i, u_i * rho) covers the cost), charging min(b_i, u_i * rho).
    Kept independent of the general-constraints subroutine for cross-checks.
    """
    core = election.core()
    bal = np.full(core.n, float(endowment))
    remaining = list(range(core.m))
    purchases = []
    while remaining:
        best = None
        for j in remaining:
            lo, hi = int(core.indptr[j]), int(core.indptr[j + 1])
            caps = np.array([bal[core.sup[k]] for k in range(lo, hi)])
            rho = K.sweep_rho(caps, core.uts[lo:hi], hi - lo,
                              float(core.cost[j]), float(core.total_u[j]))
            if rho < math.inf and (best is None or rho < best[0]):
                best = (rho, j)
        if best is None:
            break
        rho, j = best
        lo, hi = int(core.indptr[j]), int(core.indptr[j + 1])
        pay = {}
        for k in range(lo, hi):
            v = int(core.sup[k])
            amount = min(bal[v], core.uts[k] * rho)
            bal[v] -= amount
            pay[election.voters[v]] = float(amount)
        purchases.append((j, rho, pay))
        remaining.remove(j)
    return purchases, bal


def run_mes_pb_add1(election: Election, budget: int) -> Outcome:
    """Equal Shares with ADD1 completion.

    Start from endowment budget/n and re-run with the endowment increased by
    one unit per voter while the selection stays within budget; return the
    last within-budget outcome.
    """
    ensure_valid(election)
    if election.n == 0:
        raise ContractError("MES-PB needs at least one voter")
    base = budget / election.n

    def total_cost(purchases):
        return sum(election.cost[election.candidates[j]] for j, _, _ in purchases)

    purchases, bal = _mes_core(election, base)
    endowment = base
    step = 0
    limit = sum(election.cost.values()) + 2
    while step <= limit:
        step += 1
        trial, trial_bal = _mes_core(election, base + step)
        if total_cost(trial) > budget:
            break
        purchases, bal, endowment = trial, trial_bal, base + step
        if len(purchases) == election.m:
            break

    records = tuple(
        PurchaseRecord(election.candidates[j], float(pos), rho, pay)
        for pos, (j, rho, pay) in enumerate(purchases)
    )
    selected = tuple(election.candidates[j] for j, _, _ in purchases)
    chosen = {j for j, _, _ in purchases}
    removed = tuple(
        (election.candidates[j], float(len(purchases)))
        for j in range(election.m)
        if j not in chosen
    )
    unspent = {
        election.voters[v]: float(max(bal[v], 0.0)) for v in range(election.n)
    }
    return Outcome(selected=selected, ledger=records, removed=removed, unspent=unspent)


def _approval_profile(election: Election):
    """Approval sets, accepting 0/1 or cost-scaled (u = cost) utilities."""
    unit = all(
        u == 1.0 for row in election.utilities.values() for u in row.values()
    )
    cost_scaled = all(
        u == float(election.cost[c])
        for row in election.utilities.values()
        for c, u in row.items()
    )
    if not (unit or cost_scaled):
        raise ContractError(
            "Phragmén needs approval ballots: utilities must be 0/1 or equal "
            "to the candidate's cost"
        )
    return {c: list(election.supporters[c]) for c in election.candidates}


def run_phragmen_approval(election: Election, spec: ConstraintSpec) -> Outcome:
    """Sequential Phragmén: buy a candidate the moment its supporters' money
    covers the cost, zeroing the buyers' accounts; remove per the constraints.

    Simultaneous-purchase ties prefer the smallest maximal individual payment,
    then the lowest candidate id (the order PropRank induces on approvals).
    """
    ensure_valid(election)
    _approval_profile(election)
    oracle = spec.bind(election)
    spent = {v: 0.0 for v in election.voters}
    t = 0.0
    selected: list[str] = []
    sel_idx: frozenset[int] = frozenset()
    records = []
    removed = []
    avail = []
    for j, c in enumerate(election.candidates):
        if oracle.feasible_with(sel_idx, j):
            avail.append(j)
        else:
            removed.append((c, 0.0))

    while avail:
        events = []
        for j in avail:
            c = election.candidates[j]
            sup = election.supporters[c]
            tc = (election.cost[c] + sum(spent[v] for v in sup)) / len(sup)
            events.append((max(tc, t), j))
        t_star = min(tc for tc, _ in events)
        contenders = [j for tc, j in events if tc == t_star]
        # rho = the largest single payment this purchase would require
        def rho_of(j):
            sup = election.supporters[election.candidates[j]]
            return t_star - min(spent[v] for v in sup)

        j = min(contenders, key=lambda j: (rho_of(j), j))
        c = election.candidates[j]
        rho = rho_of(j)
        payments = {}
        for v in election.supporters[c]:
            payments[v] = t_star - spent[v]
            spent[v] = t_star
        t = t_star
        selected.append(c)
        sel_idx = sel_idx | {j}
        records.append(PurchaseRecord(c, t_star, rho, payments))
        keep = []
        for other in avail:
            if other == j:
                continue
            if oracle.feasible_with(sel_idx, other):
                keep.append(other)
            else:
                removed.append((election.candidates[other], t_star))
        avail = keep

    unspent = {v: float(max(t - spent[v], 0.0)) for v in election.voters}
    return Outcome(
        selected=tuple(selected),
        ledger=tuple(records),
        removed=tuple(removed),
        unspent=unspent,
    )
