# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled degree-sequence kernels.

Both kernels accumulate vertex degrees of one G(n, p) sample into ``out``
without materializing the adjacency structure.  Their random-stream
consumption is specified exactly so that ``_purepy`` reproduces them bit for
bit.
"""
from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from libc.stdint cimport int64_t, uint8_t, uint64_t
from numpy.random cimport bitgen_t

import numpy as np

cdef extern from *:
    """
    /* SWAR popcount: avoids the libgcc call emitted without -mpopcnt. */
    static inline int gnp_popcount64(unsigned long long x) {
        x = x - ((x >> 1) & 0x5555555555555555ULL);
        x = (x & 0x3333333333333333ULL) + ((x >> 2) & 0x3333333333333333ULL);
        x = (x + (x >> 4)) & 0x0F0F0F0F0F0F0F0FULL;
        return (int)((x * 0x0101010101010101ULL) >> 56);
    }
    """
    int gnp_popcount64(unsigned long long x) nogil


cdef bitgen_t* _bitgen(object bit_generator) except NULL:
    capsule = bit_generator.capsule
    if not PyCapsule_IsValid(capsule, "BitGenerator"):
        raise ValueError("object does not expose a numpy BitGenerator capsule")
    return <bitgen_t*> PyCapsule_GetPointer(capsule, "BitGenerator")


def dense_degrees(object bit_generator, int64_t n, const uint8_t[::1] digits,
                  int64_t[::1] out):
    """Bit-parallel sampler: 64 vertex pairs per machine word.

    Row ``i`` of the upper triangle occupies words ``(i+1)//64 .. W-1`` where
    bit ``b`` of word ``w`` is column ``64 w + b``.  Each word is a vector of
    Bernoulli(p) bits built from ``len(digits)`` raw 64-bit draws, one per
    binary digit of ``p`` (least significant digit first).  Row degrees come
    from popcounts, column degrees from bit-sliced counters.
    """
    cdef bitgen_t* rng = _bitgen(bit_generator)
    cdef Py_ssize_t ndig = digits.shape[0]
    cdef int64_t nwords = (n + 63) >> 6
    cdef int nbits = max(1, int(n).bit_length())
    planes = np.zeros((nwords, nbits), dtype=np.uint64)
    cdef uint64_t[:, ::1] pl = planes
    cdef int64_t i, w, w0, c, low, high
    cdef int b
    cdef Py_ssize_t d
    cdef uint64_t r, mask, carry, tmp, total
    if out.shape[0] < n:
        raise ValueError("out is shorter than n")
    with bit_generator.lock, nogil:
        for i in range(n - 1):
            w0 = (i + 1) >> 6
            for w in range(w0, nwords):
                r = 0
                for d in range(ndig - 1, -1, -1):
                    if digits[d]:
                        r = r | rng.next_uint64(rng.state)
                    else:
                        r = r & rng.next_uint64(rng.state)
                mask = ~(<uint64_t> 0)
                if w == w0:
                    low = (i + 1) & 63
                    mask = mask << low
                if w == nwords - 1:
                    high = n - (w << 6)
                    if high < 64:
                        mask = mask & (((<uint64_t> 1) << high) - 1)
                r = r & mask
                out[i] += gnp_popcount64(r)
                carry = r
                b = 0
                while carry:
                    tmp = pl[w, b] & carry
                    pl[w, b] = pl[w, b] ^ carry
                    carry = tmp
                    b += 1
        for c in range(n):
            w = c >> 6
            low = c & 63
            total = 0
            for b in range(nbits):
                total += ((pl[w, b] >> low) & 1) << b
            out[c] += total


def walk_gaps(const int64_t[::1] gaps, int64_t n, int64_t i, int64_t j,
              int64_t[::1] out):
    """Advance the pair cursor ``(i, j)`` by geometric gaps, counting endpoints.

    Pairs are visited row-major over ``i < j``; the cursor ``(0, 0)`` sits just
    before the first pair.  Returns the new cursor, with ``i == n - 1`` once
    the last pair has been passed.
    """
    cdef Py_ssize_t g
    cdef Py_ssize_t ngaps = gaps.shape[0]
    if i >= n - 1:
        return i, j
    with nogil:
        for g in range(ngaps):
            j += gaps[g]
            while j >= n:
                i += 1
                if i >= n - 1:
                    break
                j = j - n + i + 1
            if i >= n - 1:
                break
            out[i] += 1
            out[j] += 1
    if i >= n - 1:
        return n - 1, 0
    return i, j
