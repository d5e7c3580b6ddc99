# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: subgroup closure and F_q linear algebra on lookup tables.

Field elements are integers in ``range(q)``; ``add``/``mul`` are q-by-q tables,
``neg``/``inv`` length-q tables (``inv[0]`` unused).
"""
import numpy as np
cimport numpy as cnp

ctypedef cnp.int64_t i64


def closure_mask(const i64[:, ::1] mul, const i64[::1] gens):
    cdef Py_ssize_t n = mul.shape[0]
    cdef Py_ssize_t ng = gens.shape[0]
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] seen = np.zeros(n, dtype=np.uint8)
    cdef i64[::1] queue = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t head = 0, tail = 1, j
    cdef i64 x, y
    seen[0] = 1
    queue[0] = 0
    while head < tail:
        x = queue[head]
        head += 1
        for j in range(ng):
            y = mul[x, gens[j]]
            if not seen[y]:
                seen[y] = 1
                queue[tail] = y
                tail += 1
    return seen


def fq_rref(i64[:, ::1] m, const i64[:, ::1] add, const i64[:, ::1] mul,
            const i64[::1] neg, const i64[::1] inv):
    """Reduce ``m`` in place to reduced row echelon form; return pivot columns."""
    cdef Py_ssize_t rows = m.shape[0], cols = m.shape[1]
    cdef Py_ssize_t r = 0, c, i, j, piv
    cdef i64 s, f
    pivots = []
    for c in range(cols):
        if r == rows:
            break
        piv = -1
        for i in range(r, rows):
            if m[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(cols):
                s = m[r, j]
                m[r, j] = m[piv, j]
                m[piv, j] = s
        s = inv[m[r, c]]
        if s != 1:
            for j in range(c, cols):
                m[r, j] = mul[s, m[r, j]]
        for i in range(rows):
            if i == r:
                continue
            f = m[i, c]
            if f == 0:
                continue
            f = neg[f]
            for j in range(c, cols):
                if m[r, j] != 0:
                    m[i, j] = add[m[i, j], mul[f, m[r, j]]]
        pivots.append(c)
        r += 1
    return pivots


def fq_matmul(const i64[:, ::1] a, const i64[:, ::1] b,
              const i64[:, ::1] add, const i64[:, ::1] mul):
    cdef Py_ssize_t n = a.shape[0], k = a.shape[1], p = b.shape[1]
    cdef cnp.ndarray[i64, ndim=2] out = np.zeros((n, p), dtype=np.int64)
    cdef i64[:, ::1] o = out
    cdef Py_ssize_t i, j, t
    cdef i64 x
    for i in range(n):
        for t in range(k):
            x = a[i, t]
            if x == 0:
                continue
            for j in range(p):
                if b[t, j] != 0:
                    o[i, j] = add[o[i, j], mul[x, b[t, j]]]
    return out
