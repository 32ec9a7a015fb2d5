"""numpy implementation of the degree-sequence kernels.

Drop-in replacement for the compiled ``_kernels`` module, used when the
extension is not built.  It consumes the random stream in exactly the same
order, so both backends return identical samples for the same generator
state.
"""
from __future__ import annotations

import numpy as np

# Upper bound on raw 64-bit draws held in memory at once.
_CHUNK_RAWS = 1 << 21

_ALL_ONES = np.uint64(0xFFFFFFFFFFFFFFFF)


def _row_words(n: int) -> tuple[int, np.ndarray]:
    nwords = (n + 63) >> 6
    first = (np.arange(n - 1) + 1) >> 6
    return nwords, first


def dense_degrees(bit_generator, n: int, digits: np.ndarray, out: np.ndarray) -> None:
    nwords, first = _row_words(n)
    ndig = len(digits)
    counts = nwords - first
    cols = np.zeros(nwords * 64, dtype=np.int64)
    rows_per_chunk = max(1, _CHUNK_RAWS // max(1, nwords * ndig))
    for r0 in range(0, n - 1, rows_per_chunk):
        r1 = min(n - 1, r0 + rows_per_chunk)
        c = counts[r0:r1]
        total = int(c.sum())
        raws = bit_generator.random_raw(total * ndig).reshape(total, ndig)
        word = np.zeros(total, dtype=np.uint64)
        for col in range(ndig):
            # column `col` of the draws belongs to digit ndig - 1 - col
            if digits[ndig - 1 - col]:
                word |= raws[:, col]
            else:
                word &= raws[:, col]
        rows = np.repeat(np.arange(r0, r1), c)
        starts = np.cumsum(c) - c
        w = first[rows] + (np.arange(total) - np.repeat(starts, c))
        mask = np.full(total, _ALL_ONES, dtype=np.uint64)
        lead = w == first[rows]
        low = ((rows[lead] + 1) & 63).astype(np.uint64)
        mask[lead] = mask[lead] << low
        high = n - ((nwords - 1) << 6)
        if high < 64:
            mask[w == nwords - 1] &= np.uint64((1 << high) - 1)
        word &= mask
        out[:n] += np.bincount(rows, weights=np.bitwise_count(word),
                               minlength=n).astype(np.int64)[:n]
        bits = np.unpackbits(word.astype("<u8").view(np.uint8).reshape(total, 8),
                             axis=1, bitorder="little")
        acc = np.zeros((nwords, 64), dtype=np.int64)
        np.add.at(acc, w, bits)
        cols += acc.reshape(-1)
    out[:n] += cols[:n]


def walk_gaps(gaps: np.ndarray, n: int, i: int, j: int, out: np.ndarray) -> tuple[int, int]:
    if i >= n - 1:
        return i, j
    # row offsets of the row-major upper-triangular pair index
    rows = np.arange(n - 1, dtype=np.int64)
    offsets = rows * (n - 1) - rows * (rows - 1) // 2
    total_pairs = n * (n - 1) // 2
    pos = offsets[i] + (j - i - 1)
    positions = pos + np.cumsum(gaps, dtype=np.int64)
    inside = positions < total_pairs
    done = not bool(inside[-1]) if positions.size else False
    positions = positions[inside]
    if positions.size:
        r = np.searchsorted(offsets, positions, side="right") - 1
        c = positions - offsets[r] + r + 1
        out[:n] += np.bincount(r, minlength=n)[:n]
        out[:n] += np.bincount(c, minlength=n)[:n]
        i, j = int(r[-1]), int(c[-1])
    if done:
        return n - 1, 0
    return i, j
