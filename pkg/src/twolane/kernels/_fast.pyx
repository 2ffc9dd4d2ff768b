# cython: language_level=3
"""Compiled hashing kernels.

Must agree bit-for-bit with twolane.kernels.pure; the equivalence is
enforced by tests/test_kernels.py over random unicode inputs.
"""

import numpy as np

cimport cython
from cpython.unicode cimport PyUnicode_READ_CHAR

BACKEND = "cython"

cdef unsigned long long FNV_OFFSET = 0xCBF29CE484222325ULL
cdef unsigned long long FNV_PRIME = 0x100000001B3ULL

DEF PAD_START_CP = 0x02
DEF PAD_END_CP = 0x03


cdef inline unsigned long long _mix_codepoint(unsigned long long h, unsigned int cp) nogil:
    cdef int k
    for k in range(4):
        h ^= (cp >> (8 * k)) & 0xFF
        h *= FNV_PRIME
    return h


def fnv1a64(bytes data):
    """FNV-1a 64-bit hash of a byte string."""
    cdef unsigned long long h = FNV_OFFSET
    cdef unsigned char b
    for b in data:
        h ^= b
        h *= FNV_PRIME
    return h


@cython.boundscheck(False)
@cython.wraparound(False)
def trigram_counts(str text, int dim):
    """Bucketed character-trigram counts of `text` (already case-folded)."""
    cdef Py_ssize_t n = len(text)
    counts = np.zeros(dim, dtype=np.float64)
    cdef double[::1] view = counts
    cdef unsigned long long h
    cdef unsigned int a, b, c
    cdef Py_ssize_t i
    # Padded sequence: STX, text[0..n), ETX -> n trigram windows for n >= 1.
    for i in range(n):
        a = PAD_START_CP if i == 0 else <unsigned int> PyUnicode_READ_CHAR(text, i - 1)
        b = <unsigned int> PyUnicode_READ_CHAR(text, i)
        c = PAD_END_CP if i == n - 1 else <unsigned int> PyUnicode_READ_CHAR(text, i + 1)
        h = _mix_codepoint(_mix_codepoint(_mix_codepoint(FNV_OFFSET, a), b), c)
        view[<Py_ssize_t> (h % <unsigned long long> dim)] += 1.0
    return counts
