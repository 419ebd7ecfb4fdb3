"""Pure-Python kernels (reference implementation).

The compiled core in ``_fastcore.pyx`` mirrors these functions operation for
operation; both backends must produce bit-identical results, so every
accumulation below is an explicit left-to-right loop and every sort uses the
deterministic (key, position) order.
"""

from __future__ import annotations

import math

import numpy as np

INF = math.inf


def scalings(indptr, sup, uts, cost, balances, lam, pool):
    """Fold the local scaling-factor pass over ``pool`` into ``lam`` (in place).

    Supporters of each candidate arrive sorted by utility ascending; the
    running money starts at the pool candidate's total supporter balance and
    drops by each processed supporter's balance.
    """
    for j in pool:
        lo = int(indptr[j])
        hi = int(indptr[j + 1])
        money = 0.0
        for k in range(lo, hi):
            money += balances[sup[k]]
        scal = 0.0
        cj = cost[j]
        for k in range(lo, hi):
            mu = money / cj
            s = mu * uts[k]
            if s > scal:
                scal = s
            v = sup[k]
            if scal > lam[v]:
                lam[v] = scal
            money -= balances[v]


def _cap(p, u, lam_v, kappa):
    m = lam_v if lam_v > u else u
    return kappa * (2.0 * p * u / (u + m)) + (1.0 - kappa) * (p * u / m)


def candidate_caps(indptr, sup, uts, j, balances, lam, kappa, mes_mode, rho_best, out):
    """Per-supporter spending caps for candidate ``j``; returns their sum.

    ``mes_mode`` switches to the equal-shares cap max(x, y) with
    y = min(rho_best * u * (1 + kappa), p); either way the cap never exceeds
    the supporter's balance.
    """
    lo = int(indptr[j])
    hi = int(indptr[j + 1])
    total = 0.0
    for k in range(lo, hi):
        v = sup[k]
        u = uts[k]
        p = balances[v]
        x = _cap(p, u, lam[v], kappa)
        if mes_mode:
            y = rho_best * u * (1.0 + kappa)
            if y > p:
                y = p
            if y > x:
                x = y
            if x > p:
                x = p
        out[k - lo] = x
        total += x
    return total


def sweep_rho(xs, us, count, cost, total_u):
    """Minimal rho with sum_k min(xs[k], us[k] * rho) = cost.

    Returns +inf when the caps cannot cover the cost. ``total_u`` is the
    precomputed sum of ``us[:count]``.
    """
    total = 0.0
    for k in range(count):
        total += xs[k]
    # Relative slack: with kappa = 0 a candidate can sit at exact equality
    # sum(caps) == cost for every time past its crossing, where rounding
    # would otherwise make affordability flicker.
    if total < cost - cost * 1e-12:
        return INF
    order = sorted(range(count), key=lambda k: (xs[k] / us[k], k))
    p = cost
    u = total_u
    last_ratio = 0.0
    for k in order:
        if xs[k] * u >= p * us[k]:
            return p / u
        p -= xs[k]
        u -= us[k]
        last_ratio = xs[k] / us[k]
    return last_ratio  # unreachable in exact arithmetic; float-noise guard


def rule_rhos(
    indptr, sup, uts, cost, total_u, balances, lam, kappa, pool,
    mes_mode, rho_best, out_rho, xbuf,
):
    """rho(c) for every pool candidate (+inf where unaffordable)."""
    for pos, j in enumerate(pool):
        total = candidate_caps(
            indptr, sup, uts, j, balances, lam, kappa, mes_mode, rho_best, xbuf
        )
        cnt = int(indptr[j + 1]) - int(indptr[j])
        if total < cost[j] - cost[j] * 1e-12:
            out_rho[pos] = INF
        else:
            out_rho[pos] = sweep_rho(
                xbuf, uts[int(indptr[j]):int(indptr[j + 1])], cnt, cost[j], total_u[j]
            )


def min_rho(xs, us, cost):
    """Public sweep over explicit (cap, utility) arrays."""
    total_u = 0.0
    for k in range(len(us)):
        total_u += us[k]
    return sweep_rho(xs, us, len(xs), cost, total_u)


def bos_scan(indptr, sup, uts, j, balances, cj):
    """Best partial-funding step for candidate ``j`` given balances.

    Scans rho over the breakpoint grid {b_i/u_i : b_i > 0} plus the
    full-funding rho' (when it exists), with alpha = min(covered/cost, 1).
    Returns (best rho/alpha, best rho, best alpha, rho').
    """
    lo = int(indptr[j])
    hi = int(indptr[j + 1])
    pairs = []
    total_b = 0.0
    total_u = 0.0
    for k in range(lo, hi):
        b = balances[sup[k]]
        u = uts[k]
        if b > 0.0:
            pairs.append((b / u, k - lo, b, u))
            total_b += b
            total_u += u
    if not pairs:
        return INF, INF, 1.0, INF

    pairs.sort(key=lambda t: (t[0], t[1]))
    if total_b >= cj:
        p = cj
        u = total_u
        rho_full = pairs[-1][0]
        for ratio, _, b, uu in pairs:
            if b * u >= p * uu:
                rho_full = p / u
                break
            p -= b
            u -= uu
    else:
        rho_full = INF

    best_ratio = INF
    best_rho = INF
    best_alpha = 1.0
    # prefix sums over the sorted order: covered(rho) = sum b (saturated) + rho * sum u (rest)
    pref_b = 0.0
    suf_u = total_u
    for ratio, _, b, uu in pairs:
        suf_u -= uu
        pref_b += b
        covered = pref_b + ratio * suf_u
        alpha = covered / cj
        if alpha > 1.0:
            alpha = 1.0
        if alpha > 0.0:
            r = ratio / alpha
            if r < best_ratio or (r == best_ratio and ratio < best_rho):
                best_ratio = r
                best_rho = ratio
                best_alpha = alpha
    if rho_full < INF and rho_full < best_ratio:
        best_ratio = rho_full
        best_rho = rho_full
        best_alpha = 1.0
    return best_ratio, best_rho, best_alpha, rho_full


def cohesive_value(feas, popcnt, score, nsubsets, beta, num, den, exact_size):
    """min over qualifying feasible T of max over X of score[X].

    T qualifies iff feas[T] and |T| * den < num; when no T qualifies the bound
    is vacuous and T = empty-set alone is used. X must satisfy feas[X | T] and
    |X| <= beta (|X| == beta when ``exact_size``); the empty X scores 0 in the
    <=-mode, and a missing X in ==-mode contributes 0.
    """
    feas = np.asarray(feas, dtype=bool)
    popcnt = np.asarray(popcnt)
    score = np.asarray(score, dtype=np.float64)
    masks = np.arange(nsubsets, dtype=np.int64)
    if exact_size:
        x_ok = popcnt == beta
    else:
        x_ok = popcnt <= beta
    xs = masks[x_ok]
    xscore = score[x_ok]

    t_ok = feas & (popcnt.astype(np.int64) * den < num)
    ts = masks[t_ok]
    if ts.size == 0:
        ts = np.array([0], dtype=np.int64)

    best = INF
    for t in ts:
        ok = feas[xs | t]
        if ok.any():
            mx = float(xscore[ok].max())
        else:
            mx = 0.0
        if mx < best:
            best = mx
    return best
