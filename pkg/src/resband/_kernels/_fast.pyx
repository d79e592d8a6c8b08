# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled stepping kernels, mirroring ``resband._kernels.pyref``.

The reference module documents the shared conventions (variate consumption
order, expression association, the ARG_FLOOR gate); the two implementations
must stay in lockstep so that identical seeds give bit-identical paths.
"""

from libc.math cimport exp, isfinite, sqrt, tanh
from libc.stdint cimport int8_t, int32_t, int64_t

import numpy as np

cdef double ARG_FLOOR = -40.0

cdef int DOWN = 0
cdef int UP = 1
cdef int FREE = 2


def simulate_conditioned(
    double mu,
    double alpha,
    double eps,
    double guard,
    double dt,
    Py_ssize_t n_steps,
    int n_forced,
    int max_reject,
    int early_stop_i0,
    object draw,
    double[::1] x,
    double[::1] db,
    int8_t[::1] phase,
    int32_t[::1] i0,
):
    """Euler path of the band-conditioned log price; see pyref for contract."""
    cdef double sqrt_dt = sqrt(dt)
    cdef double mu_dt = mu * dt
    cdef double guard_lvl = eps - guard
    cdef double neg_alpha = -alpha
    cdef double[::1] g_buf = None
    cdef Py_ssize_t g_pos = 0, g_len = 0
    cdef double xv = 0.0
    cdef double drift_dt, dx, g
    cdef int cnt = 0
    cdef int forced = 0
    cdef int ph = DOWN if n_forced > 0 else FREE
    cdef Py_ssize_t k = 1
    cdef Py_ssize_t t_eps = -1
    cdef int a
    cdef bint ok
    x[0] = 0.0
    phase[0] = <int8_t>ph
    i0[0] = 0
    while k <= n_steps:
        if ph == DOWN:
            drift_dt = (-mu / tanh(mu * (eps - xv))) * dt
            dx = 0.0
            ok = False
            for a in range(max_reject):
                if g_pos >= g_len:
                    g_buf = draw()
                    g_len = g_buf.shape[0]
                    g_pos = 0
                g = g_buf[g_pos]
                g_pos += 1
                dx = drift_dt + sqrt_dt * g
                if xv + dx < guard_lvl:
                    ok = True
                    break
            if not ok:
                dx = drift_dt - 0.5 * sqrt_dt
                forced += 1
            xv = xv + dx
            if not isfinite(xv):
                raise RuntimeError(f"non-finite state at step {k}")
            if xv <= neg_alpha:
                cnt += 1
                ph = FREE if cnt >= n_forced else UP
        else:
            if g_pos >= g_len:
                g_buf = draw()
                g_len = g_buf.shape[0]
                g_pos = 0
            g = g_buf[g_pos]
            g_pos += 1
            dx = mu_dt + sqrt_dt * g
            xv = xv + dx
            if not isfinite(xv):
                raise RuntimeError(f"non-finite state at step {k}")
            if ph == UP:
                if xv >= 0.0:
                    if xv >= guard_lvl:
                        raise RuntimeError(
                            f"up-phase step landed inside the guard strip at step {k}"
                        )
                    ph = DOWN
            else:
                if t_eps < 0 and xv >= eps:
                    t_eps = k
        x[k] = xv
        db[k - 1] = dx - mu_dt
        phase[k] = <int8_t>ph
        i0[k] = cnt
        if early_stop_i0 > 0 and cnt >= early_stop_i0:
            return t_eps, k, forced
        k += 1
    return t_eps, n_steps, forced


def simulate_crossings(
    double mu,
    double alpha,
    double eps,
    double dt,
    Py_ssize_t max_steps,
    object draw_g,
    object draw_u,
    int64_t[::1] probe_idx,
    double[::1] probe_x,
    int32_t[::1] probe_i0,
    int8_t[::1] probe_leg,
):
    """Unconditioned walk with exact crossing bookkeeping; see pyref."""
    cdef double sqrt_dt = sqrt(dt)
    cdef double mu_dt = mu * dt
    cdef double neg_alpha = -alpha
    cdef double[::1] g_buf = None
    cdef Py_ssize_t g_pos = 0, g_len = 0
    cdef double[::1] u_buf = None
    cdef Py_ssize_t u_pos = 0, u_len = 0
    cdef double xv = 0.0
    cdef double x_new, dx, g, arg, u
    cdef int leg = DOWN
    cdef int cnt = 0
    cdef Py_ssize_t hit = -1, gfd = -1, ghit = -1
    cdef Py_ssize_t k = 0
    cdef Py_ssize_t n_probe = probe_idx.shape[0], pp = 0
    cdef bint crossed, broke
    while pp < n_probe and probe_idx[pp] == 0:
        probe_x[pp] = xv
        probe_i0[pp] = cnt
        probe_leg[pp] = <int8_t>leg
        pp += 1
    while k < max_steps and not (hit >= 0 and (gfd >= 0 or ghit >= 0)):
        if g_pos >= g_len:
            g_buf = draw_g()
            g_len = g_buf.shape[0]
            g_pos = 0
        g = g_buf[g_pos]
        g_pos += 1
        dx = mu_dt + sqrt_dt * g
        x_new = xv + dx
        k += 1
        if not isfinite(x_new):
            raise RuntimeError(f"non-finite state at step {k}")
        if gfd < 0 and x_new <= neg_alpha:
            gfd = k
        if ghit < 0 and x_new >= eps:
            ghit = k
        if hit < 0:
            if leg == DOWN:
                crossed = x_new <= neg_alpha
                if not crossed:
                    arg = (-2.0 * (xv + alpha) * (x_new + alpha)) / dt
                    if arg > ARG_FLOOR:
                        if u_pos >= u_len:
                            u_buf = draw_u()
                            u_len = u_buf.shape[0]
                            u_pos = 0
                        u = u_buf[u_pos]
                        u_pos += 1
                        crossed = u < exp(arg)
                if crossed:
                    cnt += 1
                    leg = UP
                else:
                    broke = x_new >= eps
                    if not broke:
                        arg = (-2.0 * (eps - xv) * (eps - x_new)) / dt
                        if arg > ARG_FLOOR:
                            if u_pos >= u_len:
                                u_buf = draw_u()
                                u_len = u_buf.shape[0]
                                u_pos = 0
                            u = u_buf[u_pos]
                            u_pos += 1
                            broke = u < exp(arg)
                    if broke:
                        hit = k
                        leg = FREE
            elif leg == UP:
                crossed = x_new >= 0.0
                if not crossed:
                    arg = (-2.0 * xv * x_new) / dt
                    if arg > ARG_FLOOR:
                        if u_pos >= u_len:
                            u_buf = draw_u()
                            u_len = u_buf.shape[0]
                            u_pos = 0
                        u = u_buf[u_pos]
                        u_pos += 1
                        crossed = u < exp(arg)
                if crossed:
                    leg = DOWN
                    if x_new >= eps:
                        hit = k
                        leg = FREE
        xv = x_new
        while pp < n_probe and probe_idx[pp] == k:
            probe_x[pp] = xv
            probe_i0[pp] = cnt
            probe_leg[pp] = <int8_t>leg
            pp += 1
    while pp < n_probe:
        probe_x[pp] = xv
        probe_i0[pp] = cnt
        probe_leg[pp] = <int8_t>leg
        pp += 1
    return cnt, hit, gfd, ghit, k
