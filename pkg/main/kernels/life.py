"""
Compiled Life kernels
---------------------
Cells are packed 64 per uint64 word, row-major, least significant bit first:
bit b of word w in row y is cell (64*w + b, y). Everything outside the field
is dead, so neighbour words past the edges read as zero and the padding bits
of the last word in each row are cleared after every step.

All constants are np.uint64 so numba never promotes the word arithmetic to
float64.
"""

import numba
import numpy as np
from numba import njit, prange

ZERO = np.uint64(0)
ONE = np.uint64(1)
SHIFT_CARRY = np.uint64(63)


@njit(cache=True)
def _advance_rows(src, dst, y0, y1, last_mask):
    height, nwords = src.shape
    for y in range(y0, y1):
        for w in range(nwords):
            mid = src[y, w]
            mid_l = src[y, w - 1] if w > 0 else ZERO
            mid_r = src[y, w + 1] if w < nwords - 1 else ZERO
            if y > 0:
                up = src[y - 1, w]
                up_l = src[y - 1, w - 1] if w > 0 else ZERO
                up_r = src[y - 1, w + 1] if w < nwords - 1 else ZERO
            else:
                up = ZERO
                up_l = ZERO
                up_r = ZERO
            if y < height - 1:
                dn = src[y + 1, w]
                dn_l = src[y + 1, w - 1] if w > 0 else ZERO
                dn_r = src[y + 1, w + 1] if w < nwords - 1 else ZERO
            else:
                dn = ZERO
                dn_l = ZERO
                dn_r = ZERO

            # west neighbour of cell x is x-1: shift toward higher bits
            n1 = (up << ONE) | (up_l >> SHIFT_CARRY)
            n2 = up
            n3 = (up >> ONE) | (up_r << SHIFT_CARRY)
            n4 = (mid << ONE) | (mid_l >> SHIFT_CARRY)
            n5 = (mid >> ONE) | (mid_r << SHIFT_CARRY)
            n6 = (dn << ONE) | (dn_l >> SHIFT_CARRY)
            n7 = dn
            n8 = (dn >> ONE) | (dn_r << SHIFT_CARRY)

            # carry-save full adders: neighbour count modulo 8 in (ones, twos, fours)
            s1 = n1 ^ n2 ^ n3
            c1 = (n1 & n2) | (n3 & (n1 ^ n2))
            s2 = n4 ^ n5 ^ n6
            c2 = (n4 & n5) | (n6 & (n4 ^ n5))
            s3 = n7 ^ n8
            c3 = n7 & n8
            ones = s1 ^ s2 ^ s3
            c4 = (s1 & s2) | (s3 & (s1 ^ s2))
            t1 = c1 ^ c2 ^ c3
            d1 = (c1 & c2) | (c3 & (c1 ^ c2))
            twos = t1 ^ c4
            d2 = t1 & c4
            fours = d1 ^ d2

            # F(0,3) = F(1,2) = F(1,3) = 1
            nxt = twos & ~fours & (ones | mid)
            if w == nwords - 1:
                nxt &= last_mask
            dst[y, w] = nxt


@njit(cache=True)
def step_serial(src, dst, last_mask):
    _advance_rows(src, dst, 0, src.shape[0], last_mask)


@njit(parallel=True, cache=True)
def step_banded(src, dst, nbands, last_mask):
    """Row-band partitioning: band b owns rows [b*h/n, (b+1)*h/n)."""
    height = src.shape[0]
    for b in prange(nbands):
        band = np.int64(b)
        y0 = band * height // nbands
        y1 = (band + 1) * height // nbands
        _advance_rows(src, dst, y0, y1, last_mask)


@njit(cache=True)
def step_naive(cells, out):
    """Per-cell reference rule over an unpacked uint8 field."""
    height, width = cells.shape
    for y in range(height):
        for x in range(width):
            n = 0
            for dy in range(-1, 2):
                yy = y + dy
                if yy < 0 or yy >= height:
                    continue
                for dx in range(-1, 2):
                    if dx == 0 and dy == 0:
                        continue
                    xx = x + dx
                    if xx < 0 or xx >= width:
                        continue
                    n += cells[yy, xx]
            if cells[y, x] == 1:
                out[y, x] = 1 if (n == 2 or n == 3) else 0
            else:
                out[y, x] = 1 if n == 3 else 0


@njit(cache=True)
def popcount(words):
    total = 0
    m1 = np.uint64(0x5555555555555555)
    m2 = np.uint64(0x3333333333333333)
    m4 = np.uint64(0x0F0F0F0F0F0F0F0F)
    h01 = np.uint64(0x0101010101010101)
    for y in range(words.shape[0]):
        for w in range(words.shape[1]):
            v = words[y, w]
            v = v - ((v >> ONE) & m1)
            v = (v & m2) + ((v >> np.uint64(2)) & m2)
            v = (v + (v >> np.uint64(4))) & m4
            total += np.int64((v * h01) >> np.uint64(56))
    return total


def set_workers(workers: int) -> int:
    """Clamp a worker request to the numba thread pool and apply it."""
    usable = max(1, min(int(workers), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(usable)
    return usable
