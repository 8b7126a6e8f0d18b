"""Duchain complexes, cyclic Dold-Kan, cyclic and Hochschild homology, mixed complexes.

Conventions.  On a cyclic module ``t`` is the left action of the rotation,
so ``d_0 t = d_n`` and ``d_i t = t d_{i-1}``.  The normalised complex is the
Moore complex ``N_n`` (kernels of ``d_1..d_n``) with ``del = d_0``, and

    delta = P t s_n   restricted to N_{n},   N_n -> N_{n+1},

where ``P`` projects onto the Moore complex along the degenerate part.  The
rotation is recovered from ``(del, delta)``: its Moore component on ``N_n``
is ``(-1)^n (1 - delta del - del delta)`` and the degenerate remainder is
fixed by the face relations.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from . import csg
from . import smith as sm
from .chain import ChainComplex, HomologyGroups, homology
from .csg import CYCLIC
from .dgset import Report
from .modules import DeltaGModule, dk_inverse, gamma_n_map, module_iso_check, moore, validate_module


class CyclicError(ValueError):
    pass


# ---------------------------------------------------------------------------
# duchain complexes


@dataclass
class DuchainComplex:
    """Modules ``X_0..X_top`` with ``del_n : X_n -> X_{n-1}`` and ``delta_n : X_n -> X_{n+1}``.

    ``delta`` is only stored for ``n < top``.
    """

    ring: int
    ranks: list[int]
    boundaries: dict = field(default_factory=dict)
    deltas: dict = field(default_factory=dict)

    def __post_init__(self):
        top = len(self.ranks) - 1
        self.boundaries = {n: sm.as_matrix(self.boundaries.get(n, sm.zeros(self.ranks[n - 1], self.ranks[n])),
                                           self.ranks[n - 1], self.ranks[n]) for n in range(1, top + 1)}
        self.deltas = {n: sm.as_matrix(self.deltas.get(n, sm.zeros(self.ranks[n + 1], self.ranks[n])),
                                       self.ranks[n + 1], self.ranks[n]) for n in range(top)}
        if self.ring:
            self.boundaries = {n: sm.reduce(m, self.ring) for n, m in self.boundaries.items()}
            self.deltas = {n: sm.reduce(m, self.ring) for n, m in self.deltas.items()}

    @property
    def top(self) -> int:
        return len(self.ranks) - 1

    def d(self, n: int) -> np.ndarray:
        if 1 <= n <= self.top:
            return self.boundaries[n]
        return sm.zeros(self.ranks[n - 1] if 0 <= n - 1 <= self.top else 0,
                        self.ranks[n] if 0 <= n <= self.top else 0)

    def delta(self, n: int) -> np.ndarray:
        if 0 <= n < self.top:
            return self.deltas[n]
        return sm.zeros(self.ranks[n + 1] if 0 <= n + 1 <= self.top else 0,
                        self.ranks[n] if 0 <= n <= self.top else 0)

    def chain_complex(self) -> ChainComplex:
        return ChainComplex(self.ring, self.ranks, dict(self.boundaries))

    def copy(self) -> DuchainComplex:
        return DuchainComplex(self.ring, list(self.ranks),
                              {n: m.copy() for n, m in self.boundaries.items()},
                              {n: m.copy() for n, m in self.deltas.items()})


def validate_duchain(C: DuchainComplex) -> Report:
    rep = Report()
    R = C.ring
    for n in range(2, C.top + 1):
        if not sm.is_zero(sm.matmul(C.d(n - 1), C.d(n), R), R):
            rep.add(f"del^2 != 0 at degree {n}")
    for n in range(C.top - 1):
        if not sm.is_zero(sm.matmul(C.delta(n + 1), C.delta(n), R), R):
            rep.add(f"delta^2 != 0 at degree {n}")
    return rep


def f_poly(i: int) -> list[int]:
    """Coefficients (ascending) of ``(1 + (-1)^i t)^(i+1)``."""
    s = -1 if i % 2 else 1
    return [comb(i + 1, k) * s ** k for k in range(i + 2)]


def _polymul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _poly_eval(coeffs, A: np.ndarray, ring: int) -> np.ndarray:
    n = A.shape[0]
    out, power = sm.zeros(n, n), sm.eye(n)
    for c in coeffs:
        out = out + c * power
        power = sm.matmul(power, A, ring)
    return sm.reduce(out, ring) if ring else out


def validate_cyclic_chain(C: DuchainComplex) -> Report:
    """Duchain identities plus ``f_{n-1} f_n(delta del) = id`` on ``X_n`` and ``f_0(delta del) = id`` on ``X_0``."""
    rep = validate_duchain(C)
    R = C.ring
    for n in range(C.top + 1):
        if C.ranks[n] == 0:
            continue
        u = sm.matmul(C.delta(n - 1), C.d(n), R) if n >= 1 else sm.zeros(C.ranks[0], C.ranks[0])
        poly = f_poly(0) if n == 0 else _polymul(f_poly(n - 1), f_poly(n))
        if not sm.equal(_poly_eval(poly, u, R), sm.eye(C.ranks[n]), R):
            rep.add(f"cyclic unit identity fails at degree {n}")
    return rep


# ---------------------------------------------------------------------------
# cyclic Dold-Kan


def _require_cyclic(M: DeltaGModule):
    if M.family != CYCLIC:
        raise CyclicError(f"expected a cyclic module, got family {M.family}")


def _moore_projections(M: DeltaGModule, mo) -> list[np.ndarray]:
    """``P_n : M_n -> N_n`` vanishing on degenerate elements (``P K = 1``)."""
    R = M.ring
    out = [sm.eye(M.ranks[0])]
    for n in range(1, M.truncation + 1):
        degen = sm.hstack([M.degeneracies[n - 1][i] for i in range(n)], M.ranks[n])
        if R:
            S, piv = sm._rref_mod_p(degen.T.copy(), R)
            basis = sm.as_matrix([[S[r][c] for r in range(len(piv))] for c in range(M.ranks[n])],
                                 M.ranks[n], len(piv))
        else:
            basis = _image_basis(degen)
        B = sm.hstack([mo.inclusions[n], basis], M.ranks[n])
        if B.shape[0] != B.shape[1]:
            raise CyclicError(f"normalisation splitting failed at level {n}")
        out.append(sm.inverse(B, R)[:mo.inclusions[n].shape[1], :])
    return out


def _image_basis(A: np.ndarray) -> np.ndarray:
    """Basis of the column span of an integer matrix, assumed to be a direct summand."""
    U, S, V = sm.smith(A)
    r = sum(1 for i in range(min(S.shape)) if S[i, i] != 0)
    Uinv = sm.inverse(U)
    return Uinv[:, :r].copy()


def cyclic_dold_kan(M: DeltaGModule) -> DuchainComplex:
    """Normalised duchain complex of a cyclic module (levels ``0..D``)."""
    _require_cyclic(M)
    R, D = M.ring, M.truncation
    mo = moore(M)
    P = _moore_projections(M, mo)
    deltas = {}
    for n in range(D):
        ts = sm.matmul(M.actions[n + 1]["t"], M.degeneracies[n][n], R)
        deltas[n] = sm.matmul(P[n + 1], sm.matmul(ts, mo.inclusions[n], R), R)
    C = mo.complex
    return DuchainComplex(R, C.ranks, dict(C.boundaries), deltas)


def _surjection_drop(op: csg.SimplicialOperator, j: int) -> csg.SimplicialOperator:
    img = op.image[:j + 1] + op.image[j + 2:]
    return csg.SimplicialOperator(img, op.target)


def cdk_inverse(C: DuchainComplex, D: int | None = None, validate: bool = True) -> DeltaGModule:
    """Cyclic module with normalised duchain ``C`` (levels ``0..D``).

    Raises :class:`CyclicError` naming the degree where the rotation cannot
    be completed consistently, or when the completed rotation breaks a
    cyclic identity (``validate``).
    """
    D = C.top if D is None else D
    R = C.ring
    cc = ChainComplex(R, C.ranks, dict(C.boundaries)) if D <= C.top else ChainComplex(
        R, C.ranks + [0] * (D - C.top), dict(C.boundaries))
    G = dk_inverse(cc, D)
    taus = [sm.eye(G.ranks[0])]
    for n in range(1, D + 1):
        taus.append(_rotation_level(C, G, taus[n - 1], n))
    G.family = CYCLIC
    G.actions = [{"t": sm.reduce(t, R) if R else t} for t in taus]
    rep = validate_module(G) if validate else Report()
    if not rep.ok:
        raise CyclicError("duchain data is not the normalisation of a cyclic module: "
                          + "; ".join(rep.violations[:3]))
    return G


def _rotation_level(C: DuchainComplex, G: DeltaGModule, tau_prev: np.ndarray, n: int) -> np.ndarray:
    R = C.ring
    rank = G.ranks[n]
    summ, offs = G.summands[n], G.offsets[n]
    ident = csg.identity_op(n)
    last = csg.codegeneracy(n - 1, n - 1)
    T = sm.zeros(rank, rank)
    nk = C.ranks[n] if n <= C.top else 0
    # Moore component of the rotation on N_n
    if nk:
        u = sm.matmul(C.delta(n - 1), C.d(n), R)
        v = sm.matmul(C.d(n + 1), C.delta(n), R) if n < C.top else sm.zeros(nk, nk)
        A = ((-1) ** n) * (sm.eye(nk) - u - v)
    pending = []  # (column, Moore part as vector in N_n coordinates)
    for op, k in summ:
        o = offs[op]
        for e in range(C.ranks[k]):
            col = o + e
            if op == ident:
                y = A[:, e]
                pending.append((col, y))
            elif op == last:
                y = C.delta(n - 1)[:, e] if C.ranks[n] else sm.zeros(0, 1)[:, 0]
                pending.append((col, y))
            else:
                j = next(i for i in range(n - 1) if op.image[i] == op.image[i + 1])
                sub = _surjection_drop(op, j)
                src = sm.zeros(G.ranks[n - 1], 1)
                src[G.offsets[n - 1][sub] + e, 0] = 1
                v_ = sm.matmul(G.degeneracies[n - 1][j + 1], sm.matmul(tau_prev, src, R), R)
                T[:, col] = v_[:, 0]
    if pending:
        _complete_columns(C, G, tau_prev, n, T, pending)
    return sm.reduce(T, R) if R else T


def _complete_columns(C, G, tau_prev, n, T, pending):
    """Fill rotation columns from their Moore part and the face relations."""
    R = C.ring
    rank = G.ranks[n]
    ident = csg.identity_op(n)
    o_id = G.offsets[n][ident]
    nk = C.ranks[n] if n <= C.top else 0
    deg_cols = [c for c in range(rank) if not (o_id <= c < o_id + nk)]
    faces = G.faces[n]
    F = sm.vstack([faces[i] for i in range(n + 1)], rank)
    Fdeg = F[:, deg_cols]
    rhs_cols = []
    for col, y in pending:
        w = sm.zeros(rank, 1)
        w[col, 0] = 1
        target = [sm.matmul(faces[n], w, R)]
        for i in range(1, n + 1):
            target.append(sm.matmul(tau_prev, sm.matmul(faces[i - 1], w, R), R))
        tvec = sm.vstack(target, 1)
        ycol = sm.zeros(rank, 1)
        for a in range(nk):
            ycol[o_id + a, 0] = y[a]
        rhs_cols.append(tvec - sm.matmul(F, ycol, R))
        T[:, col] = ycol[:, 0]
    rhs = sm.hstack(rhs_cols, F.shape[0])
    try:
        Z = sm.solve(Fdeg, rhs, R)
    except ValueError:
        raise CyclicError(f"rotation cannot be completed at degree {n}") from None
    for idx, (col, _) in enumerate(pending):
        for a, c in enumerate(deg_cols):
            T[c, col] += Z[a, idx]


def cdk_roundtrip(M: DeltaGModule, levels: int | None = None) -> bool:
    """``cdk_inverse(cyclic_dold_kan(M))`` is isomorphic to ``M`` on levels ``<= levels``.

    The top level of ``M`` lacks the data for ``delta`` out of it, so the
    default window stops one below the truncation.
    """
    _require_cyclic(M)
    top = M.truncation - 1 if levels is None else levels
    C = cyclic_dold_kan(M)
    # an isomorphism onto the valid module M already certifies B on the window
    B = cdk_inverse(C, M.truncation, validate=False)
    mo = moore(M)
    maps = gamma_n_map(M, mo, B)
    Mt = _truncate_module(M, top)
    Bt = _truncate_module(B, top)
    return module_iso_check(Mt, Bt, maps[:top + 1])


def _truncate_module(M: DeltaGModule, top: int) -> DeltaGModule:
    out = DeltaGModule(M.family, top, M.ring, M.ranks[:top + 1], M.faces[:top + 1],
                       M.degeneracies[:top] + [[]], M.actions[:top + 1], M.coefficients)
    for attr in ("summands", "offsets"):
        if hasattr(M, attr):
            setattr(out, attr, getattr(M, attr)[:top + 1])
    return out


# ---------------------------------------------------------------------------
# Hochschild and cyclic homology


def _b(M: DeltaGModule, n: int, prime: bool = False) -> np.ndarray:
    R = M.ring
    top = n - 1 if prime else n
    out = sm.zeros(M.ranks[n - 1], M.ranks[n])
    for i in range(top + 1):
        out = out + ((-1) ** i) * M.faces[n][i]
    return sm.reduce(out, R) if R else out


def _T(M: DeltaGModule, n: int) -> np.ndarray:
    t = M.actions[n]["t"]
    return t if n % 2 == 0 else -t


def _norm(M: DeltaGModule, n: int) -> np.ndarray:
    R = M.ring
    T = _T(M, n)
    out, power = sm.zeros(M.ranks[n], M.ranks[n]), sm.eye(M.ranks[n])
    for _ in range(n + 1):
        out = out + power
        power = sm.matmul(T, power, R)
    return sm.reduce(out, R) if R else out


def check_bicomplex_identities(M: DeltaGModule) -> Report:
    """``(1-T) b' = b (1-T)`` and ``b' N = N b`` on every level."""
    rep = Report()
    R = M.ring
    for n in range(1, M.truncation + 1):
        one_minus_T_n = sm.eye(M.ranks[n]) - _T(M, n)
        one_minus_T_m = sm.eye(M.ranks[n - 1]) - _T(M, n - 1)
        if not sm.equal(sm.matmul(one_minus_T_m, _b(M, n, True), R), sm.matmul(_b(M, n), one_minus_T_n, R), R):
            rep.add(f"(1-T) b' != b (1-T) at level {n}")
        if not sm.equal(sm.matmul(_b(M, n, True), _norm(M, n), R), sm.matmul(_norm(M, n - 1), _b(M, n), R), R):
            rep.add(f"b' N != N b at level {n}")
    return rep


def hochschild_complex(M: DeltaGModule) -> ChainComplex:
    return ChainComplex(M.ring, M.ranks, {n: _b(M, n) for n in range(1, M.truncation + 1)},
                        trust=M.truncation - 1, coefficients=M.coefficients)


def cyclic_bicomplex_total(M: DeltaGModule, n_max: int) -> ChainComplex:
    """Total complex of the cyclic bicomplex through total degree ``n_max + 1``."""
    top = min(n_max + 1, M.truncation)
    R = M.ring
    cells = [[(p, q) for p in range(k + 1) for q in [k - p]] for k in range(top + 1)]
    ranks = [sum(M.ranks[q] for _, q in cells[k]) for k in range(top + 1)]
    bds = {}
    for k in range(1, top + 1):
        rows = [M.ranks[q] for _, q in cells[k - 1]]
        cols = [M.ranks[q] for _, q in cells[k]]
        ent = {}
        for j, (p, q) in enumerate(cells[k]):
            if q >= 1:
                i = p  # same column, row q-1
                ent[(i, j)] = _b(M, q) if p % 2 == 0 else -_b(M, q, True)
            if p >= 1:
                i = p - 1  # column p-1, same row
                ent[(i, j)] = (sm.eye(M.ranks[q]) - _T(M, q)) if p % 2 == 1 else _norm(M, q)
        bds[k] = sm.block(rows, cols, ent)
    return ChainComplex(R, ranks, bds, trust=min(n_max, M.truncation - 1), coefficients=M.coefficients)


def cyclic_homology(M: DeltaGModule, n_max: int) -> tuple[HomologyGroups, HomologyGroups]:
    """``(HC, HH)`` through degree ``n_max``; degrees ``< truncation`` are trusted."""
    _require_cyclic(M)
    rep = check_bicomplex_identities(M)
    if not rep.ok:
        raise CyclicError("; ".join(rep.violations[:3]))
    HC = homology(cyclic_bicomplex_total(M, n_max), n_max)
    HH = homology(hochschild_complex(M), n_max)
    return HC, HH


# ---------------------------------------------------------------------------
# mixed complexes


@dataclass
class MixedComplex:
    ring: int
    ranks: list[int]
    b: dict
    B: dict
    coefficients: list | None = None

    @property
    def top(self) -> int:
        return len(self.ranks) - 1


def extra_degeneracy(M: DeltaGModule, n: int) -> np.ndarray:
    """``s = t s_n : M_n -> M_{n+1}``, a contraction of ``b'``."""
    return sm.matmul(M.actions[n + 1]["t"], M.degeneracies[n][n], M.ring)


def mixed_complex(M: DeltaGModule) -> MixedComplex:
    """Normalised mixed complex: Moore complex with ``b = d_0`` and ``B = P (1-T) s N``."""
    _require_cyclic(M)
    R, D = M.ring, M.truncation
    mo = moore(M)
    P = _moore_projections(M, mo)
    K = mo.inclusions
    bs = dict(mo.complex.boundaries)
    Bs = {}
    for n in range(D):
        full = sm.matmul(sm.eye(M.ranks[n + 1]) - _T(M, n + 1),
                         sm.matmul(extra_degeneracy(M, n), _norm(M, n), R), R)
        Bs[n] = sm.matmul(P[n + 1], sm.matmul(full, K[n], R), R)
    return MixedComplex(R, mo.complex.ranks, bs, Bs, M.coefficients)


def validate_mixed(X: MixedComplex) -> Report:
    rep = Report()
    R = X.ring
    top = X.top
    for n in range(2, top + 1):
        if not sm.is_zero(sm.matmul(X.b[n - 1], X.b[n], R), R):
            rep.add(f"b^2 != 0 at degree {n}")
    for n in range(top - 1):
        if not sm.is_zero(sm.matmul(X.B[n + 1], X.B[n], R), R):
            rep.add(f"B^2 != 0 at degree {n}")
    for n in range(top):
        lhs = sm.matmul(X.B[n - 1], X.b[n], R) if n >= 1 else sm.zeros(X.ranks[n], X.ranks[n])
        rhs = sm.matmul(X.b[n + 1], X.B[n], R) if n + 1 <= top else sm.zeros(X.ranks[n], X.ranks[n])
        if not sm.is_zero(lhs + rhs, R):
            rep.add(f"bB + Bb != 0 at degree {n}")
    return rep


def mixed_total(X: MixedComplex, n_max: int) -> ChainComplex:
    """``Tot_n = M_n + M_{n-2} + ...`` with differential ``b + B``."""
    top = min(n_max + 1, X.top)
    R = X.ring
    cells = [[k - 2 * j for j in range(k // 2 + 1)] for k in range(top + 1)]
    ranks = [sum(X.ranks[q] for q in cells[k]) for k in range(top + 1)]
    bds = {}
    for k in range(1, top + 1):
        rows = [X.ranks[q] for q in cells[k - 1]]
        cols = [X.ranks[q] for q in cells[k]]
        ent = {}
        for j, q in enumerate(cells[k]):
            if q >= 1:
                ent[(cells[k - 1].index(q - 1), j)] = X.b[q]
            if q + 1 in cells[k - 1] and q < X.top:
                ent[(cells[k - 1].index(q + 1), j)] = X.B[q]
        bds[k] = sm.block(rows, cols, ent)
    return ChainComplex(R, ranks, bds, trust=min(n_max, X.top - 1), coefficients=X.coefficients)


def mixed_cyclic_homology(M: DeltaGModule, n_max: int) -> HomologyGroups:
    return homology(mixed_total(mixed_complex(M), n_max), n_max)


def trivial_cyclic_module(D: int, ring: int = 0) -> DeltaGModule:
    """Constant cyclic module: every face and degeneracy is the identity, ``t = 1``."""
    from .modules import constant_module
    return constant_module(CYCLIC, D, ring)
