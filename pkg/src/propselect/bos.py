"""Equal Shares with Bounded Overspending for general constraints.

Each iteration searches for the largest entitlement t at which the BOS
purchasing pass stays *valid*: the pass repeatedly funds the feasible
candidate minimizing rho/alpha (rho scanned over the balance breakpoints,
alpha the funded cost fraction), and is declared invalid as soon as some
candidate that became infeasible during the pass could be fully funded
without overspending at a better rate than the chosen feasible option.
"""

from __future__ import annotations

import math
from typing import Iterable, Mapping

import numpy as np

from . import _kernels as K
from .config import DEFAULT_CONFIG, RuleConfig, tol_abs
from .constraints import ConstraintSpec
from .election import Election, ensure_valid
from .errors import ContractError, InternalError
from .outcome import Outcome, PurchaseRecord


class _BosResult:
    __slots__ = ("purchases", "valid")

    def __init__(self, purchases, valid):
        self.purchases = purchases  # list of (cand idx, rho, alpha, payments ndarray)
        self.valid = valid

    @property
    def selected(self):
        return [j for j, _, _, _ in self.purchases]


def _bos_pass(core, oracle, base_sel, spent, t, pool):
    """One BOS execution at entitlement ``t`` (Algorithm-3 subroutine).

    Returns the purchases made before any invalidity was detected; ``valid``
    is False when an infeasible-but-fully-fundable candidate beat the best
    feasible rho*/alpha*.
    """
    n = len(spent)
    bal = np.maximum(t - spent, 0.0)
    sel = base_sel
    purchases = []
    remaining = list(pool)
    for _ in range(len(pool) + 1):
        feas, infeas = [], []
        for j in remaining:
            (feas if oracle.feasible_with(sel, j) else infeas).append(j)
        live = False
        for j in feas:
            lo, hi = int(core.indptr[j]), int(core.indptr[j + 1])
            if any(bal[core.sup[k]] > 0.0 for k in range(lo, hi)):
                live = True
                break
        if not live:
            return _BosResult(purchases, True)

        best = None  # (ratio, rho, j, alpha)
        for j in feas:
            ratio, rho, alpha, _ = K.bos_scan(
                core.indptr, core.sup, core.uts, j, bal, float(core.cost[j])
            )
            if ratio == math.inf:
                continue
            if best is None or (ratio, rho, j) < (best[0], best[1], best[2]):
                best = (ratio, rho, j, alpha)
        if best is None:
            raise InternalError("no fundable feasible candidate despite positive balances")

        for j in infeas:
            lo, hi = int(core.indptr[j]), int(core.indptr[j + 1])
            if not any(bal[core.sup[k]] > 0.0 for k in range(lo, hi)):
                continue
            _, _, _, rho_full = K.bos_scan(
                core.indptr, core.sup, core.uts, j, bal, float(core.cost[j])
            )
            if rho_full < best[0]:
                return _BosResult(purchases, False)

        _, rho, j, alpha = best
        lo, hi = int(core.indptr[j]), int(core.indptr[j + 1])
        pay = np.empty(hi - lo)
        for k in range(hi - lo):
            v = int(core.sup[lo + k])
            amount = core.uts[lo + k] * rho
            if amount > bal[v]:
                amount = bal[v]
            pay[k] = amount
            bal[v] -= amount
            if bal[v] < 0.0:
                bal[v] = 0.0
        purchases.append((j, rho, alpha, pay))
        sel = sel | {j}
        remaining.remove(j)
    raise InternalError("BOS pass failed to terminate")


def bos_subroutine(
    election: Election,
    spec: ConstraintSpec,
    spent: Mapping[str, float],
    t: float,
    selected_so_far: Iterable[str] = (),
):
    """Public wrapper for one BOS execution at entitlement ``t``.

    Returns (selected ids, payments by candidate, valid). An invalid
    execution commits nothing and returns an empty selection.
    """
    ensure_valid(election)
    core = election.core()
    oracle = spec.bind(election)
    base_sel = frozenset(election.cand_index[c] for c in selected_so_far)
    spent_arr = np.zeros(core.n)
    for v, amount in spent.items():
        if v not in election.voter_index:
            raise ContractError(f"unknown voter {v!r}")
        spent_arr[election.voter_index[v]] = amount
    if (spent_arr > t + 1e-12).any():
        raise ContractError("every spent_i must be at most t")
    pool = [
        j for j in range(core.m)
        if j not in base_sel and oracle.feasible_with(base_sel, j)
    ]
    res = _bos_pass(core, oracle, base_sel, spent_arr, t, pool)
    if not res.valid:
        return [], {}, False
    payments = {}
    for j, _, _, pay in res.purchases:
        lo, hi = int(core.indptr[j]), int(core.indptr[j + 1])
        payments[election.candidates[j]] = {
            election.voters[int(core.sup[lo + k])]: float(pay[k])
            for k in range(hi - lo)
        }
    return [election.candidates[j] for j in res.selected], payments, True


def run_bos_general(
    election: Election,
    spec: ConstraintSpec,
    config: RuleConfig = DEFAULT_CONFIG,
) -> Outcome:
    """BOS for general constraints: largest-valid-entitlement main loop."""
    ensure_valid(election)
    oracle = spec.bind(election)
    core = election.core()
    n, m = core.n, core.m

    spent = np.zeros(n)
    selected: list[int] = []
    sel_set: frozenset[int] = frozenset()
    records: list[PurchaseRecord] = []
    removed: list[tuple[int, float]] = []
    t_last = 0.0

    pool: list[int] = []
    for j in range(m):
        if oracle.feasible_with(sel_set, j):
            pool.append(j)
        else:
            removed.append((j, 0.0))

    def commit(res, t, keep=None):
        nonlocal sel_set, t_last
        kept = 0
        for j, rho, alpha, pay in res.purchases:
            if keep is not None and j not in keep:
                continue
            lo, hi = int(core.indptr[j]), int(core.indptr[j + 1])
            payments = {}
            for k in range(hi - lo):
                v = int(core.sup[lo + k])
                spent[v] += pay[k]
                payments[election.voters[v]] = float(pay[k])
            selected.append(j)
            sel_set = sel_set | {j}
            records.append(
                PurchaseRecord(election.candidates[j], t, rho, payments, alpha=alpha)
            )
            kept += 1
        t_last = max(t_last, t)
        return kept

    guard = m + 2
    while pool:
        guard -= 1
        if guard < 0:
            raise InternalError("BOS main loop failed to make progress")
        lo = float(spent.max()) if n else 0.0
        res_lo = _bos_pass(core, oracle, sel_set, spent, lo, pool)
        if not res_lo.valid:
            raise InternalError("BOS must be valid at the bracket bottom")
        hi = lo + float(sum(core.cost[j] for j in pool)) + 1.0
        res_hi = _bos_pass(core, oracle, sel_set, spent, hi, pool)
        if res_hi.valid:
            commit(res_hi, hi)
        else:
            best_lo, best_res = lo, res_lo
            while hi - best_lo > tol_abs(config, hi):
                mid = 0.5 * (best_lo + hi)
                if mid <= best_lo or mid >= hi:
                    break
                res_mid = _bos_pass(core, oracle, sel_set, spent, mid, pool)
                if res_mid.valid:
                    best_lo, best_res = mid, res_mid
                else:
                    hi = mid
            if best_res.purchases:
                commit(best_res, best_lo)
            else:
                # Progress fallback: run just above t_max ignoring validity and
                # keep the largest feasible prefix of its partial selections.
                eps = 10.0 * tol_abs(config, max(1.0, best_lo))
                res_eps = _bos_pass(core, oracle, sel_set, spent, best_lo + eps, pool)
                keep = set()
                acc = sel_set
                for j, _, _, _ in res_eps.purchases:
                    if oracle.feasible_with(acc, j):
                        keep.add(j)
                        acc = acc | {j}
                kept = commit(res_eps, best_lo + eps, keep=keep)
                if kept == 0:
                    raise InternalError("BOS progress fallback kept no candidate")
        still = []
        for j in pool:
            if j in sel_set:
                continue
            if oracle.feasible_with(sel_set, j):
                still.append(j)
            else:
                removed.append((j, t_last))
        pool = still

    unspent = {
        election.voters[v]: float(max(t_last - spent[v], 0.0)) for v in range(n)
    }
    return Outcome(
        selected=tuple(election.candidates[j] for j in selected),
        ledger=tuple(records),
        removed=tuple((election.candidates[j], t) for j, t in removed),
        unspent=unspent,
    )
