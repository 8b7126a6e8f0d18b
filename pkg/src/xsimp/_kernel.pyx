# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled int64 kernels: diagonalisation and rank mod p."""
import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef long long LIMIT = 1LL << 31


cdef inline long long _abs(long long v) nogil:
    return -v if v < 0 else v


def diagonalise(cnp.int64_t[:, ::1] A):
    """Diagonal entries reached by unimodular row/column elimination.

    Raises ``OverflowError`` as soon as an intermediate entry leaves the
    range where products are safe in 64 bits.
    """
    cdef Py_ssize_t m = A.shape[0], n = A.shape[1]
    cdef cnp.int64_t[:, ::1] S = A.copy()
    cdef char[:] rdone = np.zeros(m, dtype=np.int8)
    cdef char[:] cdone = np.zeros(n, dtype=np.int8)
    cdef Py_ssize_t i, j, pi, pj
    cdef long long best, v, q, p
    cdef bint again
    out = []
    while True:
        best = 0
        pi = -1
        pj = -1
        for i in range(m):
            if rdone[i]:
                continue
            for j in range(n):
                if cdone[j]:
                    continue
                v = _abs(S[i, j])
                if v and (best == 0 or v < best):
                    best = v
                    pi = i
                    pj = j
        if pi < 0:
            break
        while True:
            p = S[pi, pj]
            again = False
            for i in range(m):
                if rdone[i] or i == pi or S[i, pj] == 0:
                    continue
                q = S[i, pj] // p
                if q:
                    for j in range(n):
                        if not cdone[j] and S[pi, j]:
                            S[i, j] -= q * S[pi, j]
                            if _abs(S[i, j]) >= LIMIT:
                                raise OverflowError("entry growth")
                if S[i, pj]:
                    again = True
            for j in range(n):
                if cdone[j] or j == pj or S[pi, j] == 0:
                    continue
                q = S[pi, j] // p
                if q:
                    for i in range(m):
                        if not rdone[i] and S[i, pj]:
                            S[i, j] -= q * S[i, pj]
                            if _abs(S[i, j]) >= LIMIT:
                                raise OverflowError("entry growth")
                if S[pi, j]:
                    again = True
            if not again:
                break
            best = 0
            for i in range(m):
                if not rdone[i] and S[i, pj] and (best == 0 or _abs(S[i, pj]) < best):
                    best = _abs(S[i, pj])
                    pi = i
            for j in range(n):
                if not cdone[j] and S[pi, j] and _abs(S[pi, j]) < best:
                    best = _abs(S[pi, j])
                    pj = j
        out.append(S[pi, pj])
        rdone[pi] = 1
        cdone[pj] = 1
    return out


def rank_mod_p(cnp.int64_t[:, ::1] A, long long p):
    """Rank over the prime field with ``p`` elements."""
    cdef Py_ssize_t m = A.shape[0], n = A.shape[1]
    cdef cnp.int64_t[:, ::1] S = A.copy()
    cdef Py_ssize_t r = 0, c, i, j, piv
    cdef long long inv, f, t
    for c in range(n):
        piv = -1
        for i in range(r, m):
            if S[i, c] % p:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(n):
                t = S[r, j]
                S[r, j] = S[piv, j]
                S[piv, j] = t
        inv = pow(int(S[r, c] % p), -1, int(p))
        for j in range(n):
            S[r, j] = (S[r, j] * inv) % p
        for i in range(m):
            if i != r:
                f = S[i, c] % p
                if f:
                    for j in range(n):
                        S[i, j] = (S[i, j] - f * S[r, j]) % p
        r += 1
        if r == m:
            break
    return r
