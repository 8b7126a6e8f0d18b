"""Exact integer and mod-p matrix algebra.

Matrices are numpy arrays of dtype ``object`` holding Python ints, so every
operation is exact.  ``ring`` is ``0`` for the integers or a prime ``p``.
The hot routines (elementary divisors, rank mod p) dispatch to a compiled
kernel when it is importable and the entries fit in 64-bit arithmetic.
"""
from __future__ import annotations

import os
from math import gcd

import numpy as np

try:  # pragma: no cover - exercised when the extension is built
    if os.environ.get("XSIMP_PURE"):
        raise ImportError
    from . import _kernel  # type: ignore
except ImportError:  # pragma: no cover
    _kernel = None

BACKEND = "cython" if _kernel is not None else "python"


def as_matrix(M, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    A = np.array(M, dtype=object)
    if A.size == 0:
        r = rows if rows is not None else (A.shape[0] if A.ndim >= 1 else 0)
        c = cols if cols is not None else (A.shape[1] if A.ndim == 2 else 0)
        return np.zeros((r, c), dtype=object)
    if A.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    return A


def zeros(r: int, c: int) -> np.ndarray:
    return np.zeros((r, c), dtype=object)


def eye(n: int) -> np.ndarray:
    A = zeros(n, n)
    for i in range(n):
        A[i, i] = 1
    return A


def _residues(A: np.ndarray, p: int) -> np.ndarray:
    """Entries of ``A`` mod ``p`` as an int64 array."""
    try:
        return np.asarray(A, dtype=np.int64) % p
    except OverflowError:
        return np.asarray(np.vectorize(lambda v: v % p, otypes=[object])(A), dtype=np.int64)


def reduce(A: np.ndarray, ring: int) -> np.ndarray:
    if ring:
        return _residues(A, ring).astype(object) if A.size else A.copy()
    return A


def matmul(A: np.ndarray, B: np.ndarray, ring: int = 0) -> np.ndarray:
    if A.shape[1] != B.shape[0]:
        raise ValueError(f"shape mismatch {A.shape} x {B.shape}")
    if A.shape[1] == 0:
        return zeros(A.shape[0], B.shape[1])
    if ring and ring * ring * A.shape[1] < 2 ** 62:
        C = (_residues(A, ring) @ _residues(B, ring)) % ring
        return C.astype(object)
    C = A.dot(B)
    return reduce(C, ring) if ring else C


def is_zero(A: np.ndarray, ring: int = 0) -> bool:
    if A.size == 0:
        return True
    if ring:
        return not _residues(A, ring).any()
    return not A.any()


def equal(A: np.ndarray, B: np.ndarray, ring: int = 0) -> bool:
    return A.shape == B.shape and is_zero(A - B, ring)


# ---------------------------------------------------------------------------
# Smith normal form (pure Python, with transforms)


def smith(M) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(U, S, V)`` with ``U @ M @ V == S`` in Smith normal form.

    ``U`` and ``V`` are unimodular; the nonzero diagonal entries of ``S`` are
    positive and each divides the next.
    """
    S = as_matrix(M).copy()
    m, n = S.shape
    U, V = eye(m), eye(n)
    t = 0
    while t < min(m, n):
        nz = [(abs(S[i, j]), i, j) for i in range(t, m) for j in range(t, n) if S[i, j] != 0]
        if not nz:
            break
        _, pi, pj = min(nz)
        S[[t, pi]] = S[[pi, t]]
        U[[t, pi]] = U[[pi, t]]
        S[:, [t, pj]] = S[:, [pj, t]]
        V[:, [t, pj]] = V[:, [pj, t]]
        while True:
            done = True
            for i in range(t + 1, m):
                if S[i, t]:
                    q = S[i, t] // S[t, t]
                    S[i] -= q * S[t]
                    U[i] -= q * U[t]
                    if S[i, t]:
                        done = False
            for j in range(t + 1, n):
                if S[t, j]:
                    q = S[t, j] // S[t, t]
                    S[:, j] -= q * S[:, t]
                    V[:, j] -= q * V[:, t]
                    if S[t, j]:
                        done = False
            if not done:
                nz = [(abs(S[i, t]), i, 0) for i in range(t, m) if S[i, t]]
                nz += [(abs(S[t, j]), t, j) for j in range(t + 1, n) if S[t, j]]
                _, pi, pj = min(nz)
                if pj:
                    S[:, [t, pj]] = S[:, [pj, t]]
                    V[:, [t, pj]] = V[:, [pj, t]]
                else:
                    S[[t, pi]] = S[[pi, t]]
                    U[[t, pi]] = U[[pi, t]]
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if S[i, j] % S[t, t]), None)
            if bad is None:
                break
            S[t] += S[bad[0]]
            U[t] += U[bad[0]]
        if S[t, t] < 0:
            S[t] = -S[t]
            U[t] = -U[t]
        t += 1
    return U, S, V


def _normalise_diagonal(d: list[int]) -> list[int]:
    """Turn an arbitrary nonzero diagonal into invariant-factor order."""
    d = sorted(abs(x) for x in d if x)
    changed = True
    while changed:
        changed = False
        for i in range(len(d)):
            for j in range(i + 1, len(d)):
                if d[j] % d[i]:
                    g = gcd(d[i], d[j])
                    d[i], d[j] = g, d[i] * d[j] // g
                    changed = True
        d.sort()
    return d


def _divisors_python(A: np.ndarray) -> list[int]:
    S = [list(r) for r in A]
    m = len(S)
    n = len(S[0]) if m else 0
    diag = []
    rows, cols = list(range(m)), list(range(n))
    while rows and cols:
        best = None
        for i in rows:
            for j in cols:
                v = S[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        _, pi, pj = best
        while True:
            p = S[pi][pj]
            again = False
            for i in rows:
                if i != pi and S[i][pj]:
                    q = S[i][pj] // p
                    if q:
                        Si, Sp = S[i], S[pi]
                        for j in cols:
                            if Sp[j]:
                                Si[j] -= q * Sp[j]
                    if S[i][pj]:
                        again = True
            for j in cols:
                if j != pj and S[pi][j]:
                    q = S[pi][j] // p
                    if q:
                        for i in rows:
                            if S[i][pj]:
                                S[i][j] -= q * S[i][pj]
                    if S[pi][j]:
                        again = True
            if not again:
                break
            best = None
            for i in rows:
                if S[i][pj] and (best is None or abs(S[i][pj]) < best[0]):
                    best = (abs(S[i][pj]), i, pj)
            for j in cols:
                if S[pi][j] and (best is None or abs(S[pi][j]) < best[0]):
                    best = (abs(S[pi][j]), pi, j)
            _, pi, pj = best
        diag.append(S[pi][pj])
        rows.remove(pi)
        cols.remove(pj)
    return diag


def _rank_mod_p_python(A: np.ndarray, p: int) -> int:
    S = [[v % p for v in r] for r in A]
    m = len(S)
    n = len(S[0]) if m else 0
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if S[i][c]), None)
        if piv is None:
            continue
        S[r], S[piv] = S[piv], S[r]
        inv = pow(S[r][c], -1, p)
        S[r] = [(v * inv) % p for v in S[r]]
        for i in range(m):
            if i != r and S[i][c]:
                f = S[i][c]
                S[i] = [(a - f * b) % p for a, b in zip(S[i], S[r])]
        r += 1
        if r == m:
            break
    return r


_I64_SAFE = 1 << 31


def _fits(A: np.ndarray) -> bool:
    return all(-_I64_SAFE < v < _I64_SAFE for v in A.flat)


def elementary_divisors(M, backend: str | None = None) -> list[int]:
    """Nonzero invariant factors of an integer matrix (divisibility order)."""
    A = as_matrix(M)
    if A.size == 0:
        return []
    use = backend or BACKEND
    if use == "cython" and _kernel is not None and _fits(A):
        try:
            diag = list(_kernel.diagonalise(np.ascontiguousarray(A.astype(np.int64))))
            return _normalise_diagonal(diag)
        except OverflowError:
            pass
    return _normalise_diagonal(_divisors_python(A))


def rank(M, ring: int = 0, backend: str | None = None) -> int:
    A = as_matrix(M)
    if A.size == 0:
        return 0
    if ring == 0:
        return len(elementary_divisors(A, backend))
    use = backend or BACKEND
    if use == "cython" and _kernel is not None and ring < _I64_SAFE:
        B = np.ascontiguousarray(np.array([[v % ring for v in r] for r in A], dtype=np.int64))
        return int(_kernel.rank_mod_p(B, ring))
    return _rank_mod_p_python(A, ring)


# ---------------------------------------------------------------------------
# kernels, solving, inverses


def _rref_mod_p(A: np.ndarray, p: int):
    """Reduced row echelon form mod ``p``: (rows as lists of ints, pivot columns)."""
    S = _residues(as_matrix(A), p) if np.size(A) else np.zeros(np.shape(A), dtype=np.int64)
    if p * p >= 2 ** 62:
        return _rref_mod_p_big(S.tolist(), p, S.shape[1] if S.ndim == 2 else 0)
    m, n = S.shape
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(S[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            S[[r, piv]] = S[[piv, r]]
        S[r] = (S[r] * pow(int(S[r, c]), -1, p)) % p
        f = S[:, c].copy()
        f[r] = 0
        if f.any():
            S = (S - np.outer(f, S[r])) % p
        pivots.append(c)
        r += 1
    return S.tolist(), pivots


def _rref_mod_p_big(S, p: int, n: int):
    m = len(S)
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if S[i][c]), None)
        if piv is None:
            continue
        S[r], S[piv] = S[piv], S[r]
        inv = pow(S[r][c], -1, p)
        S[r] = [(v * inv) % p for v in S[r]]
        for i in range(m):
            if i != r and S[i][c]:
                f = S[i][c]
                S[i] = [(a - f * b) % p for a, b in zip(S[i], S[r])]
        pivots.append(c)
        r += 1
    return S, pivots


def kernel(M, ring: int = 0, cols: int | None = None) -> np.ndarray:
    """Basis of ``ker M`` as columns; over ZZ the basis is saturated."""
    A = as_matrix(M, cols=cols)
    n = A.shape[1]
    if A.shape[0] == 0:
        return eye(n)
    if ring:
        S, pivots = _rref_mod_p(A, ring)
        free = [c for c in range(n) if c not in pivots]
        K = zeros(n, len(free))
        for k, f in enumerate(free):
            K[f, k] = 1
            for r, c in enumerate(pivots):
                K[c, k] = (-S[r][f]) % ring
        return K
    _, S, V = smith(A)
    r = sum(1 for i in range(min(S.shape)) if S[i, i] != 0)
    return V[:, r:].copy()


def inverse(M, ring: int = 0) -> np.ndarray:
    """Inverse of a square matrix invertible over the ring."""
    A = as_matrix(M)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("inverse of non-square matrix")
    if n == 0:
        return zeros(0, 0)
    if ring:
        aug = np.concatenate([A, eye(n)], axis=1)
        S, pivots = _rref_mod_p(aug, ring)
        if pivots[:n] != list(range(n)):
            raise ValueError("matrix is singular mod p")
        return as_matrix([row[n:] for row in S[:n]])
    U, S, V = smith(A)
    if any(S[i, i] != 1 for i in range(n)):
        raise ValueError("matrix is not unimodular")
    return matmul(V, U)


def is_invertible(M, ring: int = 0) -> bool:
    A = as_matrix(M)
    n = A.shape[0]
    if A.shape != (n, n):
        return False
    if n == 0:
        return True
    if ring:
        return rank(A, ring) == n
    d = elementary_divisors(A)
    return len(d) == n and all(v == 1 for v in d)


def left_inverse(K, ring: int = 0) -> np.ndarray:
    """``L`` with ``L @ K == I`` for a split-injective (saturated) ``K``."""
    A = as_matrix(K)
    m, k = A.shape
    if k == 0:
        return zeros(0, m)
    if ring:
        # solve via rref on K^T augmented
        S, pivots = _rref_mod_p(A, ring)
        if len(pivots) != k:
            raise ValueError("columns are dependent")
        rows = _row_basis_mod_p(A, ring)
        sub = A[rows, :]
        inv = inverse(sub, ring)
        L = zeros(k, m)
        for a, r in enumerate(rows):
            L[:, r] = inv[:, a]
        return L
    U, S, V = smith(A)
    if any(S[i, i] != 1 for i in range(k)):
        raise ValueError("column span is not saturated")
    return matmul(V, U[:k, :])


def _row_basis_mod_p(A: np.ndarray, p: int) -> list[int]:
    S, pivots = _rref_mod_p(A.T.copy(), p)
    return pivots


def solve(A, B, ring: int = 0) -> np.ndarray:
    """Some ``X`` with ``A @ X == B``; raises ``ValueError`` if none exists."""
    A = as_matrix(A)
    B = as_matrix(B, rows=A.shape[0])
    m, n = A.shape
    k = B.shape[1]
    if ring:
        aug = np.concatenate([A, B], axis=1)
        S, pivots = _rref_mod_p(aug, ring)
        if any(c >= n for c in pivots):
            raise ValueError("inconsistent system")
        X = zeros(n, k)
        for r, c in enumerate(pivots):
            for j in range(k):
                X[c, j] = S[r][n + j]
        return X
    U, S, V = smith(A)
    UB = matmul(U, B)
    Y = zeros(n, k)
    for i in range(m):
        d = S[i, i] if i < n else 0
        for j in range(k):
            v = UB[i, j]
            if d:
                if v % d:
                    raise ValueError("no integer solution")
                Y[i, j] = v // d
            elif v:
                raise ValueError("inconsistent system")
    return matmul(V, Y)


def hstack(blocks, rows: int) -> np.ndarray:
    blocks = [as_matrix(b, rows=rows) for b in blocks]
    if not blocks:
        return zeros(rows, 0)
    return np.concatenate(blocks, axis=1)


def vstack(blocks, cols: int) -> np.ndarray:
    blocks = [as_matrix(b, cols=cols) for b in blocks]
    if not blocks:
        return zeros(0, cols)
    return np.concatenate(blocks, axis=0)


def block(rows_sizes, cols_sizes, entries: dict) -> np.ndarray:
    """Assemble a block matrix from ``{(i, j): M_ij}``."""
    R, C = sum(rows_sizes), sum(cols_sizes)
    out = zeros(R, C)
    ro = np.cumsum([0] + list(rows_sizes))
    co = np.cumsum([0] + list(cols_sizes))
    for (i, j), M in entries.items():
        if M is None:
            continue
        out[ro[i]:ro[i + 1], co[j]:co[j + 1]] += as_matrix(M, rows=rows_sizes[i], cols=cols_sizes[j])
    return out
