# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels; operation-for-operation mirror of ``_pycore``.

Both backends must stay bit-identical: accumulations run left to right in the
same order and every sort uses the total order (key ascending, position
ascending).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY
from libc.stdlib cimport free, malloc

ctypedef cnp.int64_t i64
ctypedef cnp.int32_t i32
ctypedef cnp.uint8_t u8
ctypedef cnp.float64_t f64


cdef void _merge_sort(f64* key, i64* idx, f64* tk, i64* ti, Py_ssize_t n) noexcept nogil:
    """Iterative bottom-up mergesort of (key, idx) pairs by (key, idx)."""
    cdef Py_ssize_t width, lo, mid, hi, a, b, k
    cdef bint take_a
    width = 1
    while width < n:
        lo = 0
        while lo < n:
            mid = lo + width
            if mid > n:
                mid = n
            hi = lo + 2 * width
            if hi > n:
                hi = n
            a = lo
            b = mid
            k = lo
            while a < mid and b < hi:
                if key[a] < key[b] or (key[a] == key[b] and idx[a] <= idx[b]):
                    take_a = True
                else:
                    take_a = False
                if take_a:
                    tk[k] = key[a]; ti[k] = idx[a]; a += 1
                else:
                    tk[k] = key[b]; ti[k] = idx[b]; b += 1
                k += 1
            while a < mid:
                tk[k] = key[a]; ti[k] = idx[a]; a += 1; k += 1
            while b < hi:
                tk[k] = key[b]; ti[k] = idx[b]; b += 1; k += 1
            for k in range(lo, hi):
                key[k] = tk[k]
                idx[k] = ti[k]
            lo += 2 * width
        width *= 2


def scalings(i64[::1] indptr, i32[::1] sup, f64[::1] uts, f64[::1] cost,
             f64[::1] balances, f64[::1] lam, i64[::1] pool):
    cdef Py_ssize_t pi, j, lo, hi, k, v
    cdef double money, scal, mu, s, cj
    for pi in range(pool.shape[0]):
        j = pool[pi]
        lo = indptr[j]
        hi = indptr[j + 1]
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


cdef inline double _cap(double p, double u, double lam_v, double kappa) noexcept nogil:
    cdef double m = lam_v if lam_v > u else u
    return kappa * (2.0 * p * u / (u + m)) + (1.0 - kappa) * (p * u / m)


cdef double _candidate_caps(i64[::1] indptr, i32[::1] sup, f64[::1] uts,
                            Py_ssize_t j, f64[::1] balances, f64[::1] lam,
                            double kappa, int mes_mode, double rho_best,
                            f64[::1] out) noexcept:
    cdef Py_ssize_t lo = indptr[j]
    cdef Py_ssize_t hi = indptr[j + 1]
    cdef Py_ssize_t k, v
    cdef double total = 0.0
    cdef double u, p, x, y
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


def candidate_caps(i64[::1] indptr, i32[::1] sup, f64[::1] uts, j,
                   f64[::1] balances, f64[::1] lam, double kappa, int mes_mode,
                   double rho_best, f64[::1] out):
    return _candidate_caps(indptr, sup, uts, j, balances, lam, kappa,
                           mes_mode, rho_best, out)


cdef double _sweep(f64* xs, f64* us, Py_ssize_t count, double cost,
                   double total_u) noexcept:
    cdef double total = 0.0
    cdef Py_ssize_t k
    for k in range(count):
        total += xs[k]
    # Matches _pycore: slack for the kappa = 0 exact-equality knife edge.
    if total < cost - cost * 1e-12:
        return INFINITY
    cdef f64* key = <f64*> malloc(count * sizeof(f64))
    cdef i64* idx = <i64*> malloc(count * sizeof(i64))
    cdef f64* tk = <f64*> malloc(count * sizeof(f64))
    cdef i64* ti = <i64*> malloc(count * sizeof(i64))
    cdef double p, u, last_ratio, result
    cdef Py_ssize_t pos, kk
    cdef bint done = False
    result = 0.0
    for k in range(count):
        key[k] = xs[k] / us[k]
        idx[k] = k
    _merge_sort(key, idx, tk, ti, count)
    p = cost
    u = total_u
    last_ratio = 0.0
    for pos in range(count):
        kk = idx[pos]
        if xs[kk] * u >= p * us[kk]:
            result = p / u
            done = True
            break
        p -= xs[kk]
        u -= us[kk]
        last_ratio = xs[kk] / us[kk]
    if not done:
        result = last_ratio
    free(key); free(idx); free(tk); free(ti)
    return result


def sweep_rho(f64[::1] xs, f64[::1] us, count, double cost, double total_u):
    cdef Py_ssize_t n = count
    if n == 0:
        return INFINITY if cost > 0 else 0.0
    return _sweep(&xs[0], &us[0], n, cost, total_u)


def rule_rhos(i64[::1] indptr, i32[::1] sup, f64[::1] uts, f64[::1] cost,
              f64[::1] total_u, f64[::1] balances, f64[::1] lam, double kappa,
              i64[::1] pool, int mes_mode, double rho_best, f64[::1] out_rho,
              f64[::1] xbuf):
    cdef Py_ssize_t pi, j, cnt
    cdef double total
    for pi in range(pool.shape[0]):
        j = pool[pi]
        total = _candidate_caps(indptr, sup, uts, j, balances, lam, kappa,
                                mes_mode, rho_best, xbuf)
        cnt = indptr[j + 1] - indptr[j]
        if total < cost[j] - cost[j] * 1e-12:
            out_rho[pi] = INFINITY
        else:
            out_rho[pi] = _sweep(&xbuf[0], &uts[indptr[j]], cnt, cost[j], total_u[j])


def min_rho(f64[::1] xs, f64[::1] us, double cost):
    cdef Py_ssize_t n = xs.shape[0]
    cdef double total_u = 0.0
    cdef Py_ssize_t k
    if n == 0:
        return INFINITY if cost > 0 else 0.0
    for k in range(n):
        total_u += us[k]
    return _sweep(&xs[0], &us[0], n, cost, total_u)


def bos_scan(i64[::1] indptr, i32[::1] sup, f64[::1] uts, j,
             f64[::1] balances, double cj):
    cdef Py_ssize_t lo = indptr[j]
    cdef Py_ssize_t hi = indptr[j + 1]
    cdef Py_ssize_t cnt = hi - lo
    cdef f64* key = <f64*> malloc(cnt * sizeof(f64))
    cdef i64* idx = <i64*> malloc(cnt * sizeof(i64))
    cdef f64* bb = <f64*> malloc(cnt * sizeof(f64))
    cdef f64* uu = <f64*> malloc(cnt * sizeof(f64))
    cdef f64* tk = <f64*> malloc(cnt * sizeof(f64))
    cdef i64* ti = <i64*> malloc(cnt * sizeof(i64))
    cdef Py_ssize_t k, npos, pos, kk
    cdef double b, u, total_b, total_u
    npos = 0
    total_b = 0.0
    total_u = 0.0
    for k in range(lo, hi):
        b = balances[sup[k]]
        u = uts[k]
        if b > 0.0:
            key[npos] = b / u
            idx[npos] = k - lo
            bb[k - lo] = b
            uu[k - lo] = u
            npos += 1
            total_b += b
            total_u += u
    if npos == 0:
        free(key); free(idx); free(bb); free(uu); free(tk); free(ti)
        return INFINITY, INFINITY, 1.0, INFINITY

    _merge_sort(key, idx, tk, ti, npos)

    cdef double rho_full, p, uacc
    if total_b >= cj:
        p = cj
        uacc = total_u
        rho_full = key[npos - 1]
        for pos in range(npos):
            kk = idx[pos]
            if bb[kk] * uacc >= p * uu[kk]:
                rho_full = p / uacc
                break
            p -= bb[kk]
            uacc -= uu[kk]
    else:
        rho_full = INFINITY

    cdef double best_ratio = INFINITY
    cdef double best_rho = INFINITY
    cdef double best_alpha = 1.0
    cdef double pref_b = 0.0
    cdef double suf_u = total_u
    cdef double ratio, covered, alpha, r
    for pos in range(npos):
        kk = idx[pos]
        ratio = key[pos]
        suf_u -= uu[kk]
        pref_b += bb[kk]
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
    if rho_full < INFINITY and rho_full < best_ratio:
        best_ratio = rho_full
        best_rho = rho_full
        best_alpha = 1.0
    free(key); free(idx); free(bb); free(uu); free(tk); free(ti)
    return best_ratio, best_rho, best_alpha, rho_full


def cohesive_value(u8[::1] feas, u8[::1] popcnt, f64[::1] score, nsubsets,
                   beta, num, den, exact_size):
    cdef Py_ssize_t nsub = nsubsets
    cdef i64 bb = beta
    cdef i64 nn = num
    cdef i64 dd = den
    cdef bint exact = exact_size
    cdef double best = INFINITY
    cdef double mx
    cdef bint found_t = False
    cdef bint found_x
    cdef Py_ssize_t t, x
    for t in range(nsub):
        if not feas[t]:
            continue
        if (<i64> popcnt[t]) * dd >= nn:
            continue
        found_t = True
        mx = 0.0
        found_x = False
        for x in range(nsub):
            if exact:
                if popcnt[x] != bb:
                    continue
            else:
                if popcnt[x] > bb:
                    continue
            if not feas[x | t]:
                continue
            if not found_x or score[x] > mx:
                mx = score[x]
                found_x = True
        if not found_x:
            mx = 0.0
        if mx < best:
            best = mx
    if not found_t:
        mx = 0.0
        found_x = False
        for x in range(nsub):
            if exact:
                if popcnt[x] != bb:
                    continue
            else:
                if popcnt[x] > bb:
                    continue
            if not feas[x]:
                continue
            if not found_x or score[x] > mx:
                mx = score[x]
                found_x = True
        if not found_x:
            mx = 0.0
        best = mx
    return best
