"""Method of Equal Shares for general constraints.

The main loop searches for the largest per-voter entitlement t such that an
equal-shares-with-foresight subroutine, run with balances t - spent_i, buys a
set that together with the current selection stays feasible. Committed
purchases update spent, infeasible candidates are pruned, and the process
repeats; every iteration adds at least one candidate.
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
from .proprank import _check_kappa


def rho_best(election: Election, pool: Iterable[str]) -> float:
    """Best possible payment-per-utility over the pool with unlimited money:
    min over pool candidates of cost(c) / sum_j u_j(c)."""
    idx = sorted({election.cand_index[c] for c in pool})
    if not idx:
        raise ContractError("pool must be non-empty")
    core = election.core()
    return _rho_best(core, idx)


def _rho_best(core, pool_idx):
    best = math.inf
    for j in pool_idx:
        tu = core.total_u[j]
        if tu <= 0:
            raise ContractError("pool candidate has no supporters")
        r = core.cost[j] / tu
        if r < best:
            best = r
    return best


def mes_cap(p: float, u: float, lam: float, kappa: float, rho_best_val: float) -> float:
    """Equal-shares spending cap max(x, y): the PropRank cap x, and the
    efficiency cap y = min(rho_best * u * (1 + kappa), p)."""
    if u <= 0:
        raise ContractError("caps are only defined for supporters (u > 0)")
    if rho_best_val <= 0:
        raise ContractError("rho_best must be positive")
    _check_kappa(kappa)
    m = lam if lam > u else u
    x = kappa * (2.0 * p * u / (u + m)) + (1.0 - kappa) * (p * u / m)
    y = min(rho_best_val * u * (1.0 + kappa), p)
    return max(x, y)


class _SubroutineResult:
    __slots__ = ("purchases", "end_scaling")

    def __init__(self, purchases, end_scaling):
        self.purchases = purchases  # list of (cand idx, rho, payments ndarray over supporter slice)
        self.end_scaling = end_scaling

    @property
    def selected(self):
        return [j for j, _, _ in self.purchases]


def _subroutine(core, spent, t, pool, kappa, xbuf):
    """Equal shares with foresight at entitlement ``t`` (Algorithm-2 inner loop).

    Local scalings reset every round; no global factors. Spending is simulated
    on a copy of ``spent``; committing is the caller's job. Returns the
    purchases and the end-of-invocation maximal scaling factor (which must not
    exceed u_max).
    """
    spent = spent.copy()
    pool_left = list(pool)
    purchases = []
    n = len(spent)
    while pool_left:
        bal = np.maximum(t - spent, 0.0)
        lam = np.zeros(n)
        pool_arr = np.asarray(pool_left, dtype=np.int64)
        K.scalings(core.indptr, core.sup, core.uts, core.cost, bal, lam, pool_arr)
        rb = _rho_best(core, pool_left)
        rhos = np.empty(len(pool_left))
        K.rule_rhos(core.indptr, core.sup, core.uts, core.cost, core.total_u,
                    bal, lam, kappa, pool_arr, 1, rb, rhos, xbuf)
        best = -1
        for pos in range(len(pool_left)):
            if rhos[pos] < math.inf and (best < 0 or rhos[pos] < rhos[best]):
                best = pos
        if best < 0:
            break
        j = pool_left[best]
        rho = float(rhos[best])
        K.candidate_caps(core.indptr, core.sup, core.uts, j, bal, lam,
                         kappa, 1, rb, xbuf)
        lo, hi = int(core.indptr[j]), int(core.indptr[j + 1])
        pay = np.empty(hi - lo)
        for k in range(hi - lo):
            cap = xbuf[k]
            by_rho = core.uts[lo + k] * rho
            pay[k] = cap if cap < by_rho else by_rho
            spent[core.sup[lo + k]] += pay[k]
        purchases.append((j, rho, pay))
        pool_left.pop(best)

    end_scaling = 0.0
    if pool_left:
        bal = np.maximum(t - spent, 0.0)
        lam = np.zeros(n)
        K.scalings(core.indptr, core.sup, core.uts, core.cost, bal, lam,
                   np.asarray(pool_left, dtype=np.int64))
        end_scaling = float(lam.max()) if n else 0.0
    return _SubroutineResult(purchases, end_scaling)


def equal_shares_subroutine(
    election: Election,
    spec: ConstraintSpec,
    spent: Mapping[str, float],
    t: float,
    pool: Iterable[str],
    kappa: float = 1.0,
    config: RuleConfig = DEFAULT_CONFIG,
):
    """Public wrapper: greedy min-rho purchases at entitlement ``t``.

    ``spec`` is accepted for signature compatibility but never consulted:
    feasibility of the joint selection is the caller's concern. Returns the
    selected ids in purchase order and per-candidate payment maps.
    """
    del spec, config
    ensure_valid(election)
    _check_kappa(kappa)
    core = election.core()
    spent_arr = np.zeros(core.n)
    for v, amount in spent.items():
        if v not in election.voter_index:
            raise ContractError(f"unknown voter {v!r}")
        spent_arr[election.voter_index[v]] = amount
    if (spent_arr > t + 1e-12).any():
        raise ContractError("every spent_i must be at most t")
    pool_idx = sorted({election.cand_index[c] for c in pool})
    max_row = int((core.indptr[1:] - core.indptr[:-1]).max()) if core.m else 0
    res = _subroutine(core, spent_arr, t, pool_idx, kappa, np.empty(max(max_row, 1)))
    selected = [election.candidates[j] for j in res.selected]
    payments = {}
    for j, _, pay in res.purchases:
        lo, hi = int(core.indptr[j]), int(core.indptr[j + 1])
        payments[election.candidates[j]] = {
            election.voters[int(core.sup[lo + k])]: float(pay[k])
            for k in range(hi - lo)
        }
    return selected, payments


def run_mes_general(
    election: Election,
    spec: ConstraintSpec,
    kappa: float = 1.0,
    config: RuleConfig = DEFAULT_CONFIG,
) -> Outcome:
    """Equal shares for general constraints (largest-feasible-entitlement loop)."""
    ensure_valid(election)
    _check_kappa(kappa)
    oracle = spec.bind(election)
    core = election.core()
    n, m = core.n, core.m
    max_row = int((core.indptr[1:] - core.indptr[:-1]).max()) if m else 0
    xbuf = np.empty(max(max_row, 1))

    spent = np.zeros(n)
    selected: list[int] = []
    sel_set: frozenset[int] = frozenset()
    records: list[PurchaseRecord] = []
    removed: list[tuple[int, float]] = []
    max_scaling = 0.0
    t_last = 0.0

    pool: list[int] = []
    for j in range(m):
        if oracle.feasible_with(sel_set, j):
            pool.append(j)
        else:
            removed.append((j, 0.0))

    def union_feasible(res):
        extra = frozenset(res.selected)
        return oracle.feasible(sel_set | extra)

    def commit(res, t, keep=None):
        nonlocal sel_set, max_scaling, t_last
        max_scaling = max(max_scaling, res.end_scaling)
        if res.end_scaling > core.u_max * (1.0 + 1e-9) + 1e-9:
            raise InternalError(
                f"end-of-subroutine scaling {res.end_scaling} exceeds u_max {core.u_max}"
            )
        kept = 0
        for j, rho, pay in res.purchases:
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
            records.append(PurchaseRecord(election.candidates[j], t, rho, payments))
            kept += 1
        t_last = max(t_last, t)
        return kept

    def greedy_feasible(res):
        keep = set()
        acc = sel_set
        for j, _, _ in res.purchases:
            if oracle.feasible_with(acc, j):
                keep.add(j)
                acc = acc | {j}
        return keep

    guard = m + 2
    while pool:
        guard -= 1
        if guard < 0:
            raise InternalError("equal-shares main loop failed to make progress")
        lo = float(spent.max()) if n else 0.0
        res_lo = _subroutine(core, spent, lo, pool, kappa, xbuf)
        if not union_feasible(res_lo):
            # pruning enlarged rho_best: the bracket bottom itself overshoots;
            # fall back to the largest feasible prefix, which keeps >= 1.
            kept = commit(res_lo, lo, keep=greedy_feasible(res_lo))
            if kept == 0:
                raise InternalError("feasible prefix at the bracket bottom is empty")
        else:
            hi = lo + float(sum(core.cost[j] for j in pool)) + 1.0
            res_hi = _subroutine(core, spent, hi, pool, kappa, xbuf)
            if union_feasible(res_hi):
                commit(res_hi, hi)
            else:
                best_lo, best_res = lo, res_lo
                while hi - best_lo > tol_abs(config, hi):
                    mid = 0.5 * (best_lo + hi)
                    if mid <= best_lo or mid >= hi:
                        break
                    res_mid = _subroutine(core, spent, mid, pool, kappa, xbuf)
                    if union_feasible(res_mid):
                        best_lo, best_res = mid, res_mid
                    else:
                        hi = mid
                if best_res.purchases:
                    commit(best_res, best_lo)
                else:
                    eps = 10.0 * tol_abs(config, max(1.0, best_lo))
                    res_eps = _subroutine(core, spent, best_lo + eps, pool, kappa, xbuf)
                    kept = commit(res_eps, best_lo + eps, keep=greedy_feasible(res_eps))
                    if kept == 0:
                        raise InternalError(
                            "subroutine at t_max + epsilon kept no feasible candidate"
                        )
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
        max_scaling=max_scaling,
    )
