# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled trace-matrix kernels; same contracts as ``_pykernels``."""

from libc.stdint cimport uint64_t
from libc.stdlib cimport malloc, free
from libc.string cimport memcpy
from cpython.bytes cimport PyBytes_FromStringAndSize

cdef uint64_t ODD = 0xAAAAAAAAAAAAAAAAULL


cdef inline uint64_t _maxcomb(uint64_t x, uint64_t y) nogil:
    if x == 0 or y == 0:
        return 0
    cdef uint64_t lx = x & (~x + 1)
    cdef uint64_t ly = y & (~y + 1)
    return (x & ~(ly - 1)) | (y & ~(lx - 1))


def maxcomb(x, y):
    return _maxcomb(x, y)


cdef void _load(object m, uint64_t* buf, int rows, int cols):
    cdef int i, j
    for i in range(rows):
        row = m[i]
        for j in range(cols):
            buf[i * cols + j] = row[j]


cdef object _dump(uint64_t* buf, int rows, int cols):
    cdef int i, j
    out = []
    for i in range(rows):
        out.append(tuple([buf[i * cols + j] for j in range(cols)]))
    return tuple(out)


cdef void _mul(uint64_t* a, uint64_t* b, uint64_t* c, int n, int k, int m) nogil:
    cdef int i, j, l
    cdef uint64_t x, acc
    for i in range(n):
        for j in range(m):
            c[i * m + j] = 0
        for l in range(k):
            x = a[i * k + l]
            if x == 0:
                continue
            for j in range(m):
                c[i * m + j] |= _maxcomb(x, b[l * m + j])


def identity(int n):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def compose(a, b, ncols=None):
    cdef int n = len(a)
    cdef int k = len(b)
    cdef int m = (len(b[0]) if k else 0) if ncols is None else ncols
    if n == 0 or m == 0:
        return tuple(tuple([0] * m) for _ in range(n))
    cdef uint64_t* ba = <uint64_t*> malloc(n * k * sizeof(uint64_t) + 1)
    cdef uint64_t* bb = <uint64_t*> malloc(k * m * sizeof(uint64_t) + 1)
    cdef uint64_t* bc = <uint64_t*> malloc(n * m * sizeof(uint64_t))
    try:
        _load(a, ba, n, k)
        _load(b, bb, k, m)
        _mul(ba, bb, bc, n, k, m)
        return _dump(bc, n, m)
    finally:
        free(ba)
        free(bb)
        free(bc)


def union(a, b):
    return tuple(tuple(x | y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def step(support, m):
    cdef uint64_t s = support
    cdef uint64_t out = 0
    cdef int i = 0
    cdef int j
    while s:
        if s & 1:
            row = m[i]
            for j in range(len(row)):
                if row[j]:
                    out |= (<uint64_t> 1) << j
        s >>= 1
        i += 1
    return out


def has_mu_trace(support, loop):
    cdef int n = len(loop)
    if n == 0:
        return False
    cdef uint64_t* e = <uint64_t*> malloc(n * n * sizeof(uint64_t))
    cdef uint64_t* p = <uint64_t*> malloc(n * n * sizeof(uint64_t))
    cdef uint64_t* q = <uint64_t*> malloc(n * n * sizeof(uint64_t))
    cdef uint64_t reach = support
    cdef uint64_t nxt
    cdef int i, j, h
    cdef bint found = False
    try:
        _load(loop, e, n, n)
        while True:
            nxt = reach
            for i in range(n):
                if reach >> i & 1:
                    for j in range(n):
                        if e[i * n + j]:
                            nxt |= (<uint64_t> 1) << j
            if nxt == reach:
                break
            reach = nxt
        if reach == 0:
            return False
        memcpy(p, e, n * n * sizeof(uint64_t))
        seen = set()
        while True:
            key = PyBytes_FromStringAndSize(<char*> p, n * n * sizeof(uint64_t))
            if key in seen:
                break
            seen.add(key)
            for h in range(n):
                if reach >> h & 1 and p[h * n + h] & ODD:
                    found = True
                    break
            if found:
                break
            _mul(p, e, q, n, n, n)
            memcpy(p, q, n * n * sizeof(uint64_t))
        return found
    finally:
        free(e)
        free(p)
        free(q)
