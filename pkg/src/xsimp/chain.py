"""Chain complexes of free modules, homology, and simplicial chains."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

import numpy as np

from . import smith as sm
from .dgset import DGMap, DGSet


class ComplexError(ValueError):
    pass


def _fmt_group(rank: int, torsion: list[int], ring: int = 0) -> str:
    if ring:
        return "0" if rank == 0 else (f"F{ring}" if rank == 1 else f"F{ring}^{rank}")
    parts = []
    if rank:
        parts.append("Z" if rank == 1 else f"Z^{rank}")
    parts += [f"Z/{q}" for q in torsion]
    return "+".join(parts) if parts else "0"


def invariant_factors(orders) -> list[int]:
    """Invariant factors of a direct sum of cyclic groups of the given orders."""
    return sm._normalise_diagonal([q for q in orders if q not in (0, 1)])


@dataclass
class HomologyGroups:
    """Per-degree rank, invariant factors (each dividing the next) and trust flag."""

    ring: int
    ranks: list[int]
    torsion: list[list[int]]
    trusted: list[bool]

    def __len__(self):
        return len(self.ranks)

    def group(self, k: int) -> tuple[int, tuple[int, ...]]:
        return self.ranks[k], tuple(self.torsion[k])

    def groups(self) -> list[tuple[int, tuple[int, ...]]]:
        return [self.group(k) for k in range(len(self))]

    def trusted_groups(self) -> list[tuple[int, tuple[int, ...]]]:
        return [self.group(k) for k in range(len(self)) if self.trusted[k]]

    def label(self, k: int) -> str:
        return _fmt_group(self.ranks[k], self.torsion[k], self.ring)

    def labels(self) -> list[str]:
        return [self.label(k) for k in range(len(self))]

    def to_json(self) -> list[dict]:
        return [{"degree": k, "rank": self.ranks[k], "torsion": list(self.torsion[k]),
                 "trusted": bool(self.trusted[k])} for k in range(len(self))]

    def __repr__(self):
        body = ", ".join(lab + ("" if t else "?") for lab, t in zip(self.labels(), self.trusted))
        return f"H({body})"


@dataclass
class ChainComplex:
    """Free chain complex over ZZ (``ring=0``) or ZZ/p.

    ``boundaries[n]`` is the matrix of ``C_n -> C_{n-1}`` for ``1 <= n <= top``.
    ``trust`` is the highest degree whose homology is determined by the data.
    """

    ring: int
    ranks: list[int]
    boundaries: dict = field(default_factory=dict)
    trust: int | None = None
    basis: list | None = None
    coefficients: list | None = None

    def __post_init__(self):
        self.ranks = list(self.ranks)
        top = len(self.ranks) - 1
        if self.trust is None:
            self.trust = top
        bd = {}
        for n in range(1, top + 1):
            M = self.boundaries.get(n)
            M = sm.zeros(self.ranks[n - 1], self.ranks[n]) if M is None else sm.as_matrix(
                M, self.ranks[n - 1], self.ranks[n])
            if M.shape != (self.ranks[n - 1], self.ranks[n]):
                raise ComplexError(f"boundary {n} has shape {M.shape}, expected "
                                   f"{(self.ranks[n - 1], self.ranks[n])}")
            bd[n] = sm.reduce(M, self.ring) if self.ring else M
        self.boundaries = bd
        for n in range(2, top + 1):
            if not sm.is_zero(sm.matmul(bd[n - 1], bd[n]), self.ring):
                raise ComplexError(f"boundary composite d{n - 1} d{n} is nonzero")

    @property
    def top(self) -> int:
        return len(self.ranks) - 1

    def d(self, n: int) -> np.ndarray:
        if 1 <= n <= self.top:
            return self.boundaries[n]
        lo = self.ranks[n - 1] if 0 <= n - 1 <= self.top else 0
        hi = self.ranks[n] if 0 <= n <= self.top else 0
        return sm.zeros(lo, hi)

    def truncate(self, top: int) -> ChainComplex:
        top = min(top, self.top)
        return ChainComplex(self.ring, self.ranks[:top + 1],
                            {n: self.boundaries[n] for n in range(1, top + 1)},
                            trust=min(self.trust, top - 1 if top < self.top else top))

    def dual(self) -> CochainComplex:
        """``Hom(C, R)``; ``coboundaries[n]`` is the transpose of ``d_n``."""
        return CochainComplex(self.ring, self.ranks,
                              {n: self.boundaries[n].T.copy() for n in range(1, self.top + 1)},
                              trust=self.trust)


@dataclass
class CochainComplex:
    """``coboundaries[n]`` is the matrix of ``C^{n-1} -> C^n``."""

    ring: int
    ranks: list[int]
    coboundaries: dict = field(default_factory=dict)
    trust: int | None = None

    def __post_init__(self):
        top = len(self.ranks) - 1
        if self.trust is None:
            self.trust = top
        cb = {}
        for n in range(1, top + 1):
            M = self.coboundaries.get(n)
            M = sm.zeros(self.ranks[n], self.ranks[n - 1]) if M is None else sm.as_matrix(
                M, self.ranks[n], self.ranks[n - 1])
            cb[n] = sm.reduce(M, self.ring) if self.ring else M
        self.coboundaries = cb
        for n in range(2, top + 1):
            if not sm.is_zero(sm.matmul(cb[n], cb[n - 1]), self.ring):
                raise ComplexError(f"coboundary composite at degree {n} is nonzero")

    @property
    def top(self) -> int:
        return len(self.ranks) - 1


def _rank_and_divisors(M: np.ndarray, ring: int) -> tuple[int, list[int]]:
    if M.size == 0:
        return 0, []
    if ring:
        return sm.rank(M, ring), []
    d = sm.elementary_divisors(M)
    return len(d), d


def homology(C: ChainComplex, n_max: int | None = None, coefficients=None) -> HomologyGroups:
    """Homology ``ker d_n / im d_{n+1}`` for ``0 <= n <= n_max``.

    ``coefficients`` (integer complexes only) is an invariant-factor list for
    a finitely generated abelian group ``A``, ``0`` standing for ``ZZ``; the
    result is ``H_*(C tensor A)`` via universal coefficients.
    """
    top = C.top if n_max is None else min(n_max, C.top)
    if coefficients is None:
        coefficients = C.coefficients
    if coefficients is not None:
        if C.ring:
            raise ComplexError("coefficient groups apply to integral complexes")
        plain = ChainComplex(C.ring, C.ranks, C.boundaries, trust=C.trust)
        return _uct(homology(plain, top), list(coefficients))
    info = {n: _rank_and_divisors(C.d(n), C.ring) for n in range(0, top + 2)}
    ranks, tors, trusted = [], [], []
    for n in range(top + 1):
        rk_out = info[n][0] if n >= 1 else 0
        rk_in, div_in = info[n + 1] if n + 1 <= C.top else (0, [])
        ranks.append(C.ranks[n] - rk_out - rk_in)
        tors.append([q for q in div_in if q > 1])
        trusted.append(n <= C.trust)
    return HomologyGroups(C.ring, ranks, tors, trusted)


def _uct(H: HomologyGroups, coeff: list[int]) -> HomologyGroups:
    ranks, tors = [], []
    for n in range(len(H)):
        r, t = 0, []
        for a in coeff:
            if a == 0:
                r += H.ranks[n]
                t += H.torsion[n]
            else:
                t += [a] * H.ranks[n]
                t += [gcd(q, a) for q in H.torsion[n]]
                if n >= 1:
                    t += [gcd(q, a) for q in H.torsion[n - 1]]
        ranks.append(r)
        tors.append(invariant_factors(t))
    return HomologyGroups(0, ranks, tors, list(H.trusted))


def cohomology(C: ChainComplex, n_max: int | None = None) -> HomologyGroups:
    """Cohomology of ``Hom(C, R)``, by the universal coefficient theorem over ZZ."""
    top = C.top if n_max is None else min(n_max, C.top)
    H = homology(C, min(top + 1, C.top))
    if C.ring:
        return HomologyGroups(C.ring, H.ranks[:top + 1], [[] for _ in range(top + 1)],
                              H.trusted[:top + 1])
    ranks = H.ranks[:top + 1]
    tors = [list(H.torsion[n - 1]) if n >= 1 else [] for n in range(top + 1)]
    return HomologyGroups(0, ranks, tors, H.trusted[:top + 1])


def cochain_cohomology(K: CochainComplex, n_max: int | None = None) -> HomologyGroups:
    """``ker delta^{n+1} / im delta^n`` computed directly by Smith reduction."""
    top = K.top if n_max is None else min(n_max, K.top)
    ranks, tors, trusted = [], [], []
    for n in range(top + 1):
        out = K.coboundaries.get(n + 1)
        rk_out = _rank_and_divisors(out, K.ring)[0] if out is not None else 0
        inc = K.coboundaries.get(n)
        rk_in, div = _rank_and_divisors(inc, K.ring) if inc is not None else (0, [])
        ranks.append(K.ranks[n] - rk_out - rk_in)
        tors.append([q for q in div if q > 1])
        trusted.append(n <= K.trust)
    return HomologyGroups(K.ring, ranks, tors, trusted)


# ---------------------------------------------------------------------------
# simplicial chains


def simplex_basis(X: DGSet, reduced: bool = False) -> list[list[str]]:
    if reduced and not X.pointed:
        raise ComplexError("reduced chains need a pointed object")
    out = []
    for n in range(X.truncation + 1):
        nd = X.nondegenerate(n)
        if reduced:
            nd = [x for x in nd if x not in X.base[n]]
        out.append(nd)
    return out


def chains(X: DGSet, reduced: bool = False, ring: int = 0) -> ChainComplex:
    """Normalised chains on nondegenerate simplices of the underlying simplicial set.

    With ``reduced`` the base sub-object is collapsed (relative chains).
    Degrees ``< truncation`` are trusted.
    """
    basis = simplex_basis(X, reduced)
    index = [{x: j for j, x in enumerate(b)} for b in basis]
    bds = {}
    for n in range(1, X.truncation + 1):
        M = sm.zeros(len(basis[n - 1]), len(basis[n]))
        for j, x in enumerate(basis[n]):
            for i, y in enumerate(X.faces[n][x]):
                r = index[n - 1].get(y)
                if r is not None:
                    M[r, j] += -1 if i % 2 else 1
        bds[n] = M
    return ChainComplex(ring, [len(b) for b in basis], bds, trust=X.truncation - 1, basis=basis)


def chain_map(f: DGMap, reduced: bool = False, ring: int = 0) -> tuple[ChainComplex, ChainComplex, dict]:
    """Induced map on normalised chains, as per-degree matrices."""
    CX, CY = chains(f.source, reduced, ring), chains(f.target, reduced, ring)
    top = min(CX.top, CY.top, f.truncation)
    idx = [{y: j for j, y in enumerate(b)} for b in CY.basis]
    maps = {}
    for n in range(top + 1):
        M = sm.zeros(CY.ranks[n], CX.ranks[n])
        for j, x in enumerate(CX.basis[n]):
            r = idx[n].get(f.maps[n][x])
            if r is not None:
                M[r, j] = 1
        maps[n] = M
    return CX, CY, maps


def mapping_cone(CX: ChainComplex, CY: ChainComplex, maps: dict) -> ChainComplex:
    """Cone with ``Cone_n = X_{n-1} + Y_n`` and ``d(x, y) = (-dx, f x + dy)``."""
    top = min(CX.top + 1, CY.top)
    ranks = [(CX.ranks[n - 1] if n >= 1 else 0) + CY.ranks[n] for n in range(top + 1)]
    bds = {}
    for n in range(1, top + 1):
        xs_src = CX.ranks[n - 1]
        xs_tgt = CX.ranks[n - 2] if n >= 2 else 0
        bds[n] = sm.block([xs_tgt, CY.ranks[n - 1]], [xs_src, CY.ranks[n]],
                          {(0, 0): -CX.d(n - 1) if n >= 2 else None,
                           (1, 0): maps[n - 1], (1, 1): CY.d(n)})
    trust = min(CX.trust + 1, CY.trust)
    return ChainComplex(CX.ring, ranks, bds, trust=trust)


def tensor(C: ChainComplex, E: ChainComplex) -> ChainComplex:
    """Tensor product with the Koszul sign, up to ``min`` of the tops."""
    if C.ring != E.ring:
        raise ComplexError("ring mismatch")
    top = min(C.top, E.top)
    pieces = [[(p, n - p) for p in range(n + 1)] for n in range(top + 1)]
    ranks = [sum(C.ranks[p] * E.ranks[q] for p, q in pieces[n]) for n in range(top + 1)]
    bds = {}
    for n in range(1, top + 1):
        rows = [C.ranks[p] * E.ranks[q] for p, q in pieces[n - 1]]
        cols = [C.ranks[p] * E.ranks[q] for p, q in pieces[n]]
        ent = {}
        for j, (p, q) in enumerate(pieces[n]):
            if p >= 1:
                i = p - 1
                ent[(i, j)] = np.kron(C.d(p), sm.eye(E.ranks[q])).astype(object)
            if q >= 1:
                i = p
                ent[(i, j)] = ((-1) ** p) * np.kron(sm.eye(C.ranks[p]), E.d(q)).astype(object)
        bds[n] = sm.block(rows, cols, ent)
    return ChainComplex(C.ring, ranks, bds, trust=min(C.trust, E.trust))


def cyclic_complex(q: int, top: int) -> ChainComplex:
    """Periodic free resolution oracle: ``Z <-0- Z <-q- Z <-0- Z ...``."""
    bds = {n: [[q if n % 2 == 0 else 0]] for n in range(1, top + 1)}
    return ChainComplex(0, [1] * (top + 1), bds, trust=top - 1)
