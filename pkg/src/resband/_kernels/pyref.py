"""Reference stepping kernels in numpy.

These are the semantics the compiled kernels in ``_fast.pyx`` mirror.  Any
change here must be reflected there: the two backends consume variates from
the caller-supplied block generators in exactly the same order and evaluate
every floating-point expression with the same association, so identical
seeds give bit-identical outputs.

Conventions shared by both backends:

* one standard normal per attempted step (rejected proposals included);
* bridge uniforms are drawn only when the crossing test is live, gated by
  the pure-arithmetic condition ``arg > ARG_FLOOR`` on the exponent of the
  bridge probability exp(arg), never on exp(arg) itself (libm-free, so the
  draw decisions agree bit for bit across backends);
* grid states are written after the phase transition at that step.

Phase codes: 0 down, 1 up, 2 free/done.
"""

import math

import numpy as np

DOWN = 0
UP = 1
FREE = 2

# Bridge tests with exp(arg) below exp(ARG_FLOOR) ~ 4e-18 are skipped without
# drawing; the neglected crossing mass over the largest experiment in the
# test-suite is below 1e-9 of one path.
ARG_FLOOR = -40.0


class _Stream:
    """Buffered access to a block-drawing callable, refilled lazily."""

    __slots__ = ("draw", "buf", "pos")

    def __init__(self, draw):
        self.draw = draw
        self.buf = None
        self.pos = 0

    def next(self):
        if self.buf is None or self.pos >= self.buf.shape[0]:
            self.buf = self.draw()
            self.pos = 0
        v = self.buf[self.pos]
        self.pos += 1
        return v

    def view(self, limit):
        """Nonempty view of up to ``limit`` buffered variates, not consumed."""
        if self.buf is None or self.pos >= self.buf.shape[0]:
            self.buf = self.draw()
            self.pos = 0
        take = min(self.buf.shape[0] - self.pos, limit)
        return self.buf[self.pos : self.pos + take]

    def advance(self, n):
        self.pos += n


def simulate_conditioned(
    mu,
    alpha,
    eps,
    guard,
    dt,
    n_steps,
    n_forced,
    max_reject,
    early_stop_i0,
    draw,
    x,
    db,
    phase,
    i0,
):
    """Euler path of the band-conditioned log price.

    Starts at 0 in the Down phase (Free when ``n_forced`` is 0).  Down steps
    use the conditioned drift -mu*coth(mu*(eps - x)) and resample proposals
    landing at or above ``eps - guard`` up to ``max_reject`` times, after
    which a forced half-step down is taken.  Up and Free steps are plain
    drifted Brownian increments.  Transitions: Down -> Up (or Free once all
    crossings are done) at the first grid point at or below ``-alpha``;
    Up -> Down at the first grid point at or above 0.

    Outputs are written into ``x`` (n_steps+1), ``db`` (n_steps), ``phase``
    and ``i0`` (n_steps+1).  ``db[k]`` is the driving Brownian increment
    x[k+1] - x[k] - mu*dt.  Returns ``(t_eps_idx, end_idx, forced_steps)``:
    first Free-phase grid index at or above ``eps`` (-1 if none), the last
    filled grid index (smaller than ``n_steps`` only when ``early_stop_i0``
    fired), and the number of forced half-steps.
    """
    sqrt_dt = math.sqrt(dt)
    mu_dt = mu * dt
    guard_lvl = eps - guard
    neg_alpha = -alpha
    gs = _Stream(draw)
    xv = 0.0
    cnt = 0
    ph = DOWN if n_forced > 0 else FREE
    x[0] = xv
    phase[0] = ph
    i0[0] = cnt
    t_eps = -1
    forced = 0
    k = 1
    while k <= n_steps:
        if ph == DOWN:
            drift_dt = (-mu / math.tanh(mu * (eps - xv))) * dt
            dx = 0.0
            ok = False
            for _ in range(max_reject):
                g = gs.next()
                dx = drift_dt + sqrt_dt * g
                if xv + dx < guard_lvl:
                    ok = True
                    break
            if not ok:
                dx = drift_dt - 0.5 * sqrt_dt
                forced += 1
            xv = xv + dx
            if not math.isfinite(xv):
                raise RuntimeError(f"non-finite state at step {k}")
            if xv <= neg_alpha:
                cnt += 1
                ph = FREE if cnt >= n_forced else UP
            x[k] = xv
            db[k - 1] = dx - mu_dt
            phase[k] = ph
            i0[k] = cnt
            if early_stop_i0 > 0 and cnt >= early_stop_i0:
                return t_eps, k, forced
            k += 1
        else:
            # Up and Free phases are unconditioned; run them chunked.
            g_chunk = gs.view(n_steps - k + 1)
            m = g_chunk.shape[0]
            dxs = mu_dt + sqrt_dt * g_chunk
            xs = np.cumsum(np.concatenate(((xv,), dxs)))[1:]
            stop = m
            flip = False
            if ph == UP:
                hits = np.nonzero(xs >= 0.0)[0]
                if hits.size:
                    stop = int(hits[0]) + 1
                    flip = True
            elif t_eps < 0:
                hits = np.nonzero(xs >= eps)[0]
                if hits.size:
                    t_eps = k + int(hits[0])
            if not np.isfinite(xs[stop - 1]):
                raise RuntimeError(f"non-finite state at step {k + stop - 1}")
            x[k : k + stop] = xs[:stop]
            db[k - 1 : k - 1 + stop] = dxs[:stop] - mu_dt
            phase[k : k + stop] = ph
            i0[k : k + stop] = cnt
            xv = float(xs[stop - 1])
            gs.advance(stop)
            if flip:
                if xv >= guard_lvl:
                    raise RuntimeError(
                        f"up-phase step landed inside the guard strip at step {k + stop - 1}"
                    )
                ph = DOWN
                phase[k + stop - 1] = ph
            k += stop
    return t_eps, n_steps, forced


def simulate_crossings(
    mu,
    alpha,
    eps,
    dt,
    max_steps,
    draw_g,
    draw_u,
    probe_idx,
    probe_x,
    probe_i0,
    probe_leg,
):
    """Unconditioned walk from 0 with exact crossing bookkeeping.

    Counts completed downcrossings (0 to -alpha) before the breakout at
    ``eps``, detecting crossings both at grid points and inside steps via
    Brownian-bridge sampling, so counts are exact in distribution.  Within a
    down leg the -alpha test runs before the eps test and short-circuits it.
    Grid-only first-passage indices are tracked independently for
    discretization-matched comparisons.

    Runs until the exact machine has seen the breakout and the grid-level
    race (first grid point at or below -alpha vs at or above eps) is
    resolved, or ``max_steps`` is reached.  State snapshots (x, exact count,
    leg) are recorded at the sorted grid indices in ``probe_idx``; probes
    beyond the stopping step repeat the final state.

    Returns ``(n_down, exact_hit_idx, grid_first_down_idx, grid_hit_idx,
    steps_used)`` with -1 for events that never happened.
    """
    sqrt_dt = math.sqrt(dt)
    mu_dt = mu * dt
    neg_alpha = -alpha
    gs = _Stream(draw_g)
    us = _Stream(draw_u)
    xv = 0.0
    leg = DOWN
    cnt = 0
    hit = -1
    gfd = -1
    ghit = -1
    n_probe = probe_idx.shape[0]
    pp = 0
    while pp < n_probe and probe_idx[pp] == 0:
        probe_x[pp] = xv
        probe_i0[pp] = cnt
        probe_leg[pp] = leg
        pp += 1
    k = 0
    while k < max_steps and not (hit >= 0 and (gfd >= 0 or ghit >= 0)):
        g_chunk = gs.view(max_steps - k)
        m = g_chunk.shape[0]
        dxs = mu_dt + sqrt_dt * g_chunk
        xs = np.cumsum(np.concatenate(((xv,), dxs)))[1:]
        prev = np.empty_like(xs)
        prev[0] = xv
        prev[1:] = xs[:-1]
        if not np.isfinite(xs[m - 1]):
            raise RuntimeError(f"non-finite state at step {k + m}")
        # Bridge exponents, association matching the scalar/compiled form.
        arg_d = (-2.0 * (prev + alpha) * (xs + alpha)) / dt
        arg_e = (-2.0 * (eps - prev) * (eps - xs)) / dt
        arg_u = (-2.0 * prev * xs) / dt
        ev_down = np.nonzero(
            (xs <= neg_alpha) | (xs >= eps) | (arg_d > ARG_FLOOR) | (arg_e > ARG_FLOOR)
        )[0]
        ev_up = np.nonzero((xs >= 0.0) | (arg_u > ARG_FLOOR))[0]
        gd_cand = np.nonzero(xs <= neg_alpha)[0] if gfd < 0 else None
        gh_cand = np.nonzero(xs >= eps)[0] if ghit < 0 else None
        pos = 0
        while pos < m:
            if hit >= 0 and (gfd >= 0 or ghit >= 0):
                break
            j = m
            if hit < 0:
                ev = ev_down if leg == DOWN else ev_up
                a = np.searchsorted(ev, pos)
                if a < ev.shape[0]:
                    j = min(j, int(ev[a]))
            if gfd < 0:
                a = np.searchsorted(gd_cand, pos)
                if a < gd_cand.shape[0]:
                    j = min(j, int(gd_cand[a]))
            if ghit < 0:
                a = np.searchsorted(gh_cand, pos)
                if a < gh_cand.shape[0]:
                    j = min(j, int(gh_cand[a]))
            if pp < n_probe:
                nxt = probe_idx[pp] - (k + 1)
                if pos <= nxt < j:
                    j = int(nxt)
            if j >= m:
                pos = m
                break
            x_new = float(xs[j])
            x_old = float(prev[j])
            # grid tracking first, as in the scalar order
            if gfd < 0 and x_new <= neg_alpha:
                gfd = k + 1 + j
            if ghit < 0 and x_new >= eps:
                ghit = k + 1 + j
            # exact machine
            if hit < 0:
                if leg == DOWN:
                    crossed = x_new <= neg_alpha
                    if not crossed:
                        arg = (-2.0 * (x_old + alpha) * (x_new + alpha)) / dt
                        if arg > ARG_FLOOR:
                            crossed = us.next() < math.exp(arg)
                    if crossed:
                        cnt += 1
                        leg = UP
                    else:
                        broke = x_new >= eps
                        if not broke:
                            arg = (-2.0 * (eps - x_old) * (eps - x_new)) / dt
                            if arg > ARG_FLOOR:
                                broke = us.next() < math.exp(arg)
                        if broke:
                            hit = k + 1 + j
                            leg = FREE
                elif leg == UP:
                    crossed = x_new >= 0.0
                    if not crossed:
                        arg = (-2.0 * x_old * x_new) / dt
                        if arg > ARG_FLOOR:
                            crossed = us.next() < math.exp(arg)
                    if crossed:
                        leg = DOWN
                        if x_new >= eps:
                            hit = k + 1 + j
                            leg = FREE
            while pp < n_probe and probe_idx[pp] == k + 1 + j:
                probe_x[pp] = x_new
                probe_i0[pp] = cnt
                probe_leg[pp] = leg
                pp += 1
            pos = j + 1
        if pos > 0:
            xv = float(xs[pos - 1])
            gs.advance(pos)
            k += pos
    while pp < n_probe:
        probe_x[pp] = xv
        probe_i0[pp] = cnt
        probe_leg[pp] = leg
        pp += 1
    return cnt, hit, gfd, ghit, k
