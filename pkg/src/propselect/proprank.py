"""The PropRank rule: continuous-time purchasing with spending caps.

Voters accumulate money at unit speed and agree to spend on each candidate at
most a cap blending two payment-per-utility safeguards (weighted by kappa in
[0, 1]); the cap is driven by a scaling factor anticipating the best fractional
purchase currently available. Selection mode respects feasibility constraints
and removes infeasible candidates; ranking mode never removes and orders all
candidates by purchase timestamp.
"""

from __future__ import annotations

import math
from typing import Iterable, Mapping

import numpy as np

from . import _kernels as K
from .config import DEFAULT_CONFIG, RuleConfig
from .constraints import ConstraintSpec, Unconstrained
from .election import Election, ensure_valid
from .engine import PurchaseEngine
from .errors import ContractError
from .outcome import Outcome, Ranking


def _check_kappa(kappa: float) -> float:
    if not 0.0 <= kappa <= 1.0:
        raise ContractError(f"kappa must lie in [0, 1], got {kappa}")
    return float(kappa)


def spending_cap(p: float, u: float, lam: float, kappa: float) -> float:
    """Cap on what a voter with balance ``p`` pays for a utility-``u`` candidate.

    kappa * 2pu/(u + max(lam, u)) + (1 - kappa) * pu/max(lam, u); never
    exceeds p, and equals p whenever lam <= u.
    """
    if u <= 0:
        raise ContractError("spending caps are only defined for supporters (u > 0)")
    if p < 0 or lam < 0:
        raise ContractError("balance and scaling factor must be nonnegative")
    _check_kappa(kappa)
    m = lam if lam > u else u
    return kappa * (2.0 * p * u / (u + m)) + (1.0 - kappa) * (p * u / m)


def minimal_rho(caps: Iterable[tuple[float, float]], cost: float) -> float:
    """Minimal rho with sum_i min(x_i, u_i * rho) = cost; +inf if unaffordable.

    ``caps`` is a sequence of (x_i, u_i) pairs; computed by the sorted
    saturation sweep (voters whose x_i/u_i falls below rho pay their cap).
    """
    if cost <= 0:
        raise ContractError("cost must be positive")
    pairs = list(caps)
    xs = np.array([x for x, _ in pairs], dtype=np.float64)
    us = np.array([u for _, u in pairs], dtype=np.float64)
    if (xs < 0).any():
        raise ContractError("caps must be nonnegative")
    if (us <= 0).any():
        raise ContractError("utilities must be positive")
    return float(K.min_rho(xs, us, float(cost)))


def compute_local_scalings(
    election: Election,
    balances: Mapping[str, float],
    global_factor: Mapping[str, float],
    pool: Iterable[str],
) -> dict[str, float]:
    """Local scaling factors lambda_i given balances and global floors g_i.

    For each pool candidate the supporters are processed by increasing
    utility with the running money starting at the supporters' total balance;
    lambda_i is the running maximum of mu * u over everything processed so
    far, floored by g_i.
    """
    pool = sorted({election.cand_index[c] for c in pool})
    if not pool:
        raise ContractError("pool must be non-empty")
    for j in pool:
        if not election.supporters[election.candidates[j]]:
            raise ContractError(
                f"pool candidate {election.candidates[j]!r} has no supporters"
            )
    core = election.core()
    bal = np.zeros(core.n)
    lam = np.zeros(core.n)
    for v, i in election.voter_index.items():
        bal[i] = balances.get(v, 0.0)
        lam[i] = global_factor.get(v, 0.0)
    if (bal < 0).any():
        raise ContractError("balances must be nonnegative")
    K.scalings(core.indptr, core.sup, core.uts, core.cost, bal, lam,
               np.asarray(pool, dtype=np.int64))
    return {v: float(lam[i]) for v, i in election.voter_index.items()}


def start_run(
    election: Election,
    spec: ConstraintSpec,
    kappa: float = 1.0,
    config: RuleConfig = DEFAULT_CONFIG,
) -> PurchaseEngine:
    """Validated, initialized PropRank run (drive with next_event/commit)."""
    ensure_valid(election)
    _check_kappa(kappa)
    return PurchaseEngine(election, spec.bind(election), kappa, config)


def next_event(engine: PurchaseEngine):
    """Earliest purchase event at or after the engine's time, or None.

    Returns (time, candidate id, rho, payments by voter id); pure search,
    apply with ``engine.commit``.
    """
    ev = engine.next_event()
    if ev is None:
        return None
    core = engine.core
    lo = int(core.indptr[ev.cand])
    payments = {
        engine.election.voters[int(core.sup[lo + k])]: float(ev.payments[k])
        for k in range(len(ev.payments))
    }
    return ev.time, engine.election.candidates[ev.cand], ev.rho, payments


def run_proprank(
    election: Election,
    spec: ConstraintSpec,
    kappa: float = 1.0,
    config: RuleConfig = DEFAULT_CONFIG,
) -> Outcome:
    """PropRank selection under feasibility constraints."""
    return start_run(election, spec, kappa, config).run().outcome()


def run_proprank_ranking(
    election: Election,
    kappa: float = 1.0,
    config: RuleConfig = DEFAULT_CONFIG,
) -> Ranking:
    """Proportional ranking: run without removals, order by purchase time."""
    engine = start_run(election, Unconstrained(), kappa, config).run()
    out = engine.outcome()
    if len(out.selected) != election.m:
        raise ContractError("ranking requires every candidate to be purchasable")
    return Ranking(
        order=out.selected,
        timestamps={rec.candidate: rec.time for rec in out.ledger},
    )
