"""
Compiled change recorders
-------------------------
Both recorders walk the packed words of a region of interest, XOR the
previous and current generation, and touch only cells that changed. A cell
gets a slot the first time it changes; slot_map[y, x] holds the slot index
(or -1) in region-local coordinates and slot_xy[slot] the local (x, y).

Window index t is 0-based: a change seen at window index t means the cell's
series value s(t) differs from s(t-1), with s(-1) the state when the window
opened.
"""

import numpy as np
from numba import njit

ONE = np.uint64(1)


@njit(cache=True)
def count_new_changes(prev, cur, x0, y0, rw, rh, slot_map):
    """Changed cells in the region that do not have a slot yet."""
    count = 0
    w_first = x0 // 64
    w_last = (x0 + rw - 1) // 64
    for y in range(y0, y0 + rh):
        for wd in range(w_first, w_last + 1):
            diff = prev[y, wd] ^ cur[y, wd]
            if diff == 0:
                continue
            lo = max(x0 - wd * 64, 0)
            hi = min(x0 + rw - wd * 64, 64)
            for b in range(lo, hi):
                if (diff >> np.uint64(b)) & ONE:
                    if slot_map[y - y0, wd * 64 + b - x0] < 0:
                        count += 1
    return count


@njit(cache=True)
def record_toggles(prev, cur, x0, y0, rw, rh, slot_map, slot_xy, n_slots, toggles, t):
    """Set bit t of every changed cell's toggle row, allocating slots on first change."""
    byte = t >> 3
    bit = np.uint8(1 << (t & 7))
    w_first = x0 // 64
    w_last = (x0 + rw - 1) // 64
    for y in range(y0, y0 + rh):
        for wd in range(w_first, w_last + 1):
            diff = prev[y, wd] ^ cur[y, wd]
            if diff == 0:
                continue
            lo = max(x0 - wd * 64, 0)
            hi = min(x0 + rw - wd * 64, 64)
            for b in range(lo, hi):
                if (diff >> np.uint64(b)) & ONE:
                    ly = y - y0
                    lx = wd * 64 + b - x0
                    slot = slot_map[ly, lx]
                    if slot < 0:
                        slot = n_slots
                        slot_map[ly, lx] = slot
                        slot_xy[slot, 0] = lx
                        slot_xy[slot, 1] = ly
                        n_slots += 1
                    if toggles.shape[1] > 0:
                        toggles[slot, byte] |= bit
    return n_slots


@njit(cache=True)
def accumulate_probe(prev, cur, x0, y0, rw, rh, slot_map, slot_xy, n_slots, t, T,
                     freqs, twiddles, acc, net, dc):
    """
    Streaming single-bin accumulation driven by changes.

    For a change of sign d at index t: acc[slot, j] += d * exp(-2πi f_j t / T),
    net[slot] += d and dc[slot] += d * (T - t). The spectrum follows in closed
    form once the window is complete.
    """
    nf = freqs.shape[0]
    w_first = x0 // 64
    w_last = (x0 + rw - 1) // 64
    for y in range(y0, y0 + rh):
        for wd in range(w_first, w_last + 1):
            diff = prev[y, wd] ^ cur[y, wd]
            if diff == 0:
                continue
            lo = max(x0 - wd * 64, 0)
            hi = min(x0 + rw - wd * 64, 64)
            for b in range(lo, hi):
                if (diff >> np.uint64(b)) & ONE:
                    ly = y - y0
                    lx = wd * 64 + b - x0
                    slot = slot_map[ly, lx]
                    if slot < 0:
                        slot = n_slots
                        slot_map[ly, lx] = slot
                        slot_xy[slot, 0] = lx
                        slot_xy[slot, 1] = ly
                        n_slots += 1
                    d = 1 if (cur[y, wd] >> np.uint64(b)) & ONE else -1
                    net[slot] += d
                    dc[slot] += d * (T - t)
                    for j in range(nf):
                        acc[slot, j] += d * twiddles[(freqs[j] * t) % T]
    return n_slots
