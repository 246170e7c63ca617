"""Hot numeric loops, with a numba path and a plain numpy/Python path.

Which path runs is fixed at import time by :data:`leo_ntn._accel.USE_NUMBA`.
The ``*_py`` names always point at the uncompiled versions, so tests and the
benchmark can compare both paths in one process.
"""

import math

import numpy as np

from ._accel import USE_NUMBA, maybe_njit

# strategy codes understood by harq_slot_loop
FULL, MULTIBIT, CAPPED, REPLICATION = 0, 1, 2, 3


def cos_apparent_elevation(d, cos_el, rb):
    """Cosine of the elevation seen through a position error ``rb``.

    ``(d cos(el) + rb) / sqrt(d^2 + rb^2 + 2 rb d cos(el))``.
    """
    num = d * cos_el + rb
    den = math.sqrt(d * d + rb * rb + 2.0 * rb * d * cos_el)
    return min(1.0, num / den)


def residual_surface_py(scale, cos_el, slant, errors):
    """Vectorised residual Doppler over (elevation, error); rows follow ``cos_el``."""
    c = cos_el[:, None]
    d = slant[:, None]
    rb = errors[None, :]
    num = d * c + rb
    den = np.sqrt(d * d + rb * rb + 2.0 * rb * d * c)
    cos_est = np.minimum(1.0, num / den)
    true = np.broadcast_to(scale * c, cos_est.shape).copy()
    est = scale * cos_est
    return true, est, np.abs(true - est)


@maybe_njit(fallback=residual_surface_py)
def residual_surface(scale, cos_el, slant, errors):
    n_el = cos_el.shape[0]
    n_rb = errors.shape[0]
    true = np.empty((n_el, n_rb))
    est = np.empty((n_el, n_rb))
    res = np.empty((n_el, n_rb))
    for i in range(n_el):
        c = cos_el[i]
        d = slant[i]
        t = scale * c
        for j in range(n_rb):
            rb = errors[j]
            num = d * c + rb
            den = np.sqrt(d * d + rb * rb + 2.0 * rb * d * c)
            ce = num / den
            if ce > 1.0:
                ce = 1.0
            e = scale * ce
            true[i, j] = t
            est[i, j] = e
            res[i, j] = abs(t - e)
    return true, est, res


def harq_slot_loop_py(strategy, n_proc, max_tx, k_rep, tti, t_harq, tp, t1,
                      horizon, probs, level_cum, u_dec, u_lvl):
    """Slot-synchronous HARQ engine driven by pre-drawn uniforms.

    All times are integer ticks. ``probs[0, a]`` is the success probability
    of attempt ``a + 1`` with 1-bit feedback; ``probs[1 + L, a]`` is the same
    after a NACK carrying margin level ``L`` (multibit only). The slot index
    selects the uniforms, so any strategy sees the same channel draws.

    Returns ``(tx, tb, counters)``. ``tx`` columns are slot, process, attempt,
    success, level. ``tb`` columns are first tick, done tick, transmissions,
    delivered, buffer acquire tick, buffer release tick, process. ``counters`` holds
    tx count, TB count, busy slots within the horizon, and an overflow flag.
    """
    n_slots = u_dec.shape[0]
    tx = np.zeros((n_slots, 5), dtype=np.int64)
    tb = np.zeros((n_slots, 7), dtype=np.int64)
    n_tx = 0
    n_tb = 0
    busy = 0
    overflow = 0

    if strategy == REPLICATION:
        k = 0
        while k < horizon:
            if k + k_rep > n_slots:
                overflow = 1
                break
            ok = 0
            for c in range(k_rep):
                slot = k + c
                hit = 1 if u_dec[slot] < probs[0, 0] else 0
                ok = ok | hit
                tx[n_tx, 0] = slot
                tx[n_tx, 1] = 0
                tx[n_tx, 2] = c + 1
                tx[n_tx, 3] = hit
                tx[n_tx, 4] = -1
                n_tx += 1
                if slot < horizon:
                    busy += 1
            start = k * tti
            done = (k + k_rep) * tti + tp + t1
            tb[n_tb, 0] = start
            tb[n_tb, 1] = done
            tb[n_tb, 2] = k_rep
            tb[n_tb, 3] = ok
            tb[n_tb, 4] = start + tp
            tb[n_tb, 5] = done
            tb[n_tb, 6] = 0
            n_tb += 1
            k += k_rep
        counters = np.array([n_tx, n_tb, busy, overflow], dtype=np.int64)
        return tx[:n_tx], tb[:n_tb], counters

    ready = np.zeros(n_proc, dtype=np.int64)
    cur_tb = np.full(n_proc, -1, dtype=np.int64)
    attempt = np.zeros(n_proc, dtype=np.int64)
    level = np.zeros(n_proc, dtype=np.int64)
    rr = n_proc - 1
    k = 0
    while True:
        if k >= n_slots:
            overflow = 1
            break
        now = k * tti
        accepting = k < horizon
        chosen = -1
        for j in range(n_proc):
            p = (rr + 1 + j) % n_proc
            if ready[p] <= now and (cur_tb[p] >= 0 or accepting):
                chosen = p
                break
        if chosen < 0:
            nxt = -1
            for p in range(n_proc):
                if cur_tb[p] >= 0 or accepting:
                    if nxt < 0 or ready[p] < nxt:
                        nxt = ready[p]
            if nxt < 0:
                break
            k_next = (nxt + tti - 1) // tti
            k = k_next if k_next > k else k + 1
            continue

        p = chosen
        if cur_tb[p] < 0:
            cur_tb[p] = n_tb
            tb[n_tb, 0] = now
            tb[n_tb, 4] = now + tp
            tb[n_tb, 6] = p
            n_tb += 1
            attempt[p] = 1
        else:
            attempt[p] += 1
        a = attempt[p]
        if strategy == MULTIBIT and a > 1:
            prob = probs[1 + level[p], a - 1]
        else:
            prob = probs[0, a - 1]
        hit = 1 if u_dec[k] < prob else 0
        end = now + tti
        ack = end + t_harq
        lvl = -1
        if hit == 0 and strategy == MULTIBIT:
            lvl = 3
            for q in range(4):
                if u_lvl[k] < level_cum[q]:
                    lvl = q
                    break
            level[p] = lvl
        tx[n_tx, 0] = k
        tx[n_tx, 1] = p
        tx[n_tx, 2] = a
        tx[n_tx, 3] = hit
        tx[n_tx, 4] = lvl
        n_tx += 1
        if accepting:
            busy += 1
        if hit == 1 or a >= max_tx:
            i = cur_tb[p]
            tb[i, 1] = ack
            tb[i, 2] = a
            tb[i, 3] = hit
            tb[i, 5] = end + tp + t1
            cur_tb[p] = -1
        ready[p] = ack
        rr = p
        k += 1

    counters = np.array([n_tx, n_tb, busy, overflow], dtype=np.int64)
    return tx[:n_tx], tb[:n_tb], counters


harq_slot_loop = maybe_njit()(harq_slot_loop_py)

__all__ = [
    "USE_NUMBA",
    "FULL", "MULTIBIT", "CAPPED", "REPLICATION",
    "cos_apparent_elevation",
    "residual_surface", "residual_surface_py",
    "harq_slot_loop", "harq_slot_loop_py",
]
