"""Delta-G-modules, Dold-Kan in both directions, Eilenberg-MacLane objects."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product as _iproduct

import numpy as np

from . import csg
from . import dgset as dg
from . import smith as sm
from .chain import ChainComplex, HomologyGroups, chains, homology, tensor
from .csg import CrossedFamily, GroupElement, TRIVIAL
from .dgset import Report


class UnsupportedError(NotImplementedError):
    pass


@dataclass
class DeltaGModule:
    """Levelwise free module with structure matrices.

    ``faces[n][i]`` maps level ``n`` to ``n-1``; ``degeneracies[n][i]`` maps
    level ``n`` to ``n+1``; ``actions[n][gen]`` is the left action of a family
    generator.  ``coefficients`` (integral modules only) is an invariant-factor
    list ``A``; the module then stands for ``A`` tensored with the free one.
    """

    family: CrossedFamily
    truncation: int
    ring: int
    ranks: list[int]
    faces: list[list[np.ndarray]]
    degeneracies: list[list[np.ndarray]]
    actions: list[dict]
    coefficients: list[int] | None = None
    basis: list[list[str]] | None = field(default=None, repr=False)

    @property
    def D(self) -> int:
        return self.truncation

    def act(self, g: GroupElement) -> np.ndarray:
        n = g.n
        M = sm.eye(self.ranks[n])
        if g.e:
            gen = "b" if self.family.kind == "quaternionic" else "w"
            M = self.actions[n][gen]
        for _ in range(g.k):
            M = sm.matmul(self.actions[n]["t"], M, self.ring)
        return M

    def pull(self, op: csg.SimplicialOperator) -> np.ndarray:
        """Matrix of ``X(op) : X_target -> X_source``."""
        M = sm.eye(self.ranks[op.target])
        for kind, i, level in op.elementary():
            step = self.faces[level][i] if kind == "d" else self.degeneracies[level][i]
            M = sm.matmul(step, M, self.ring)
        return M

    def underlying(self) -> DeltaGModule:
        return DeltaGModule(TRIVIAL, self.truncation, self.ring, self.ranks, self.faces,
                            self.degeneracies, [{} for _ in self.ranks], self.coefficients, self.basis)


def module_from_tables(family, D, ring, ranks, faces, degeneracies, actions=None, coefficients=None):
    ranks = list(ranks)
    F = [[]] + [[sm.as_matrix(faces[n][i], ranks[n - 1], ranks[n]) for i in range(n + 1)]
                for n in range(1, D + 1)]
    S = [[sm.as_matrix(degeneracies[n][i], ranks[n + 1], ranks[n]) for i in range(n + 1)]
         for n in range(D)] + [[]]
    if actions is None:
        actions = [{} for _ in range(D + 1)]
    A = [{g: sm.as_matrix(m, ranks[n], ranks[n]) for g, m in actions[n].items()} for n in range(D + 1)]
    if ring:
        F = [[sm.reduce(m, ring) for m in lv] for lv in F]
        S = [[sm.reduce(m, ring) for m in lv] for lv in S]
        A = [{g: sm.reduce(m, ring) for g, m in a.items()} for a in A]
    return DeltaGModule(family, D, ring, ranks, F, S, A, coefficients)


def validate_module(M: DeltaGModule) -> Report:
    """Simplicial, group and crossed identities as matrix identities."""
    rep = Report()
    D, R, F, S = M.truncation, M.ring, M.faces, M.degeneracies
    eq = lambda a, b: sm.equal(a, b, R)  # noqa: E731
    mm = lambda a, b: sm.matmul(a, b, R)  # noqa: E731
    for n in range(2, D + 1):
        for j in range(n + 1):
            for i in range(j):
                if not eq(mm(F[n - 1][i], F[n][j]), mm(F[n - 1][j - 1], F[n][i])):
                    rep.add(f"d{i}d{j} = d{j - 1}d{i} fails at level {n}")
    for n in range(D - 1):
        for j in range(n + 1):
            for i in range(j + 1):
                if not eq(mm(S[n + 1][i], S[n][j]), mm(S[n + 1][j + 1], S[n][i])):
                    rep.add(f"s{i}s{j} = s{j + 1}s{i} fails at level {n}")
    for n in range(D):
        I = sm.eye(M.ranks[n])
        for j in range(n + 1):
            for i in range(n + 2):
                lhs = mm(F[n + 1][i], S[n][j])
                if i in (j, j + 1):
                    rhs = I
                elif n == 0:
                    continue
                elif i < j:
                    rhs = mm(S[n - 1][j - 1], F[n][i])
                else:
                    rhs = mm(S[n - 1][j], F[n][i - 1])
                if not eq(lhs, rhs):
                    rep.add(f"d{i}s{j} identity fails at level {n}")
    fam = M.family
    for n in range(D + 1):
        I = sm.eye(M.ranks[n])
        if fam.has_rotation:
            R_ = fam.rotation_order(n)
            if not eq(mm(M.act(csg.GroupElement(fam, n, R_ - 1, 0)), M.actions[n]["t"]), I):
                rep.add(f"relation t^{R_}=1 fails at level {n}")
        if fam.has_reflection:
            gen = "b" if fam.kind == "quaternionic" else "w"
            r = M.actions[n][gen]
            if fam.kind == "quaternionic":
                half = M.act(csg.GroupElement(fam, n, fam.rotation_order(n) // 2, 0))
                if not eq(mm(r, r), half):
                    rep.add(f"relation b^2=t^half fails at level {n}")
            elif not eq(mm(r, r), I):
                rep.add(f"relation w^2=1 fails at level {n}")
        for gen in fam.generators:
            g = fam.generator(gen, n)
            G = M.actions[n][gen]
            if n >= 1:
                for i in range(n + 1):
                    h, j = csg.crossed_twist(g, "face", i)
                    if not eq(mm(F[n][i], G), mm(M.act(h), F[n][j])):
                        rep.add(f"crossed face relation d{i} {gen} fails at level {n}")
            if n < D:
                for i in range(n + 1):
                    h, j = csg.crossed_twist(g, "degeneracy", i)
                    if not eq(mm(S[n][i], G), mm(M.act(h), S[n][j])):
                        rep.add(f"crossed degeneracy relation s{i} {gen} fails at level {n}")
    if fam.has_reflection and fam.has_rotation:
        gen = "b" if fam.kind == "quaternionic" else "w"
        for n in range(D + 1):
            T, W = M.actions[n]["t"], M.actions[n][gen]
            Tinv = M.act(csg.GroupElement(fam, n, fam.rotation_order(n) - 1, 0))
            if not eq(mm(W, T), mm(Tinv, W)):
                rep.add(f"relation {gen}t = t^-1 {gen} fails at level {n}")
    return rep


# ---------------------------------------------------------------------------
# free modules


def free_abelian(X: dg.DGSet, reduced: bool = False, ring: int = 0, coefficients=None) -> DeltaGModule:
    """Linearisation of ``X``; with ``reduced`` the base sub-object goes to zero."""
    if reduced and not X.pointed:
        raise dg.ConstructionError("reduced linearisation needs a pointed object")
    D = X.truncation
    basis = [[x for x in X.simplices[n] if not (reduced and x in X.base[n])] for n in range(D + 1)]
    idx = [{x: j for j, x in enumerate(b)} for b in basis]
    ranks = [len(b) for b in basis]

    def linear(table, src, tgt):
        M = sm.zeros(ranks[tgt], ranks[src])
        for j, x in enumerate(basis[src]):
            r = idx[tgt].get(table(x))
            if r is not None:
                M[r, j] = 1
        return M

    faces = [[]] + [[linear(lambda x, i=i, n=n: X.faces[n][x][i], n, n - 1) for i in range(n + 1)]
                    for n in range(1, D + 1)]
    degens = [[linear(lambda x, i=i, n=n: X.degeneracies[n][x][i], n, n + 1) for i in range(n + 1)]
              for n in range(D)] + [[]]
    actions = [{g: linear(lambda x, g=g, n=n: X.actions[n][g][x], n, n) for g in X.family.generators}
               for n in range(D + 1)]
    M = DeltaGModule(X.family, D, ring, ranks, faces, degens, actions,
                     None if coefficients is None else list(coefficients), basis)
    return M


def constant_module(family: CrossedFamily, D: int, ring: int = 0) -> DeltaGModule:
    return free_abelian(dg.point(family, D), ring=ring)


def zero_module(family: CrossedFamily, D: int, ring: int = 0) -> DeltaGModule:
    return free_abelian(dg.empty(family, D), ring=ring)


def random_basis_change(M: DeltaGModule, rng, steps: int = 3) -> DeltaGModule:
    """Conjugate every level by a random invertible matrix (elementary ops)."""
    R = M.ring
    Ps, Pinv = [], []
    for r in M.ranks:
        P, Q = sm.eye(r), sm.eye(r)
        for _ in range(steps * max(r, 1)):
            if r < 2:
                break
            a, b = rng.sample(range(r), 2)
            c = rng.randint(-2, 2)
            P[a] += c * P[b]          # row op: P <- E P
            Q[:, b] -= c * Q[:, a]    # Q <- Q E^-1
        Ps.append(sm.reduce(P, R) if R else P)
        Pinv.append(sm.reduce(Q, R) if R else Q)
    mm = lambda *ms: _chain(ms, R)  # noqa: E731
    D = M.truncation
    F = [[]] + [[mm(Ps[n - 1], f, Pinv[n]) for f in M.faces[n]] for n in range(1, D + 1)]
    S = [[mm(Ps[n + 1], s, Pinv[n]) for s in M.degeneracies[n]] for n in range(D)] + [[]]
    A = [{g: mm(Ps[n], a, Pinv[n]) for g, a in M.actions[n].items()} for n in range(D + 1)]
    return DeltaGModule(M.family, D, R, M.ranks, F, S, A, M.coefficients)


def _chain(ms, ring):
    out = ms[0]
    for m in ms[1:]:
        out = sm.matmul(out, m, ring)
    return out


# ---------------------------------------------------------------------------
# Dold-Kan


@dataclass
class MooreComplex:
    """Normalised complex plus the inclusion ``K_n : N_n -> M_n`` and a retraction."""

    complex: ChainComplex
    inclusions: list[np.ndarray]
    retractions: list[np.ndarray]


def moore(A: DeltaGModule) -> MooreComplex:
    R, D = A.ring, A.truncation
    K, L = [], []
    for n in range(D + 1):
        if n == 0:
            Kn = sm.eye(A.ranks[0])
        else:
            stack = sm.vstack([A.faces[n][i] for i in range(1, n + 1)], A.ranks[n])
            Kn = sm.kernel(stack, R, A.ranks[n])
        K.append(Kn)
        L.append(sm.left_inverse(Kn, R))
    bds = {}
    for n in range(1, D + 1):
        img = sm.matmul(A.faces[n][0], K[n], R)
        bds[n] = sm.matmul(L[n - 1], img, R)
    C = ChainComplex(R, [k.shape[1] for k in K], bds, trust=D - 1, coefficients=A.coefficients)
    return MooreComplex(C, K, L)


def dold_kan(A: DeltaGModule) -> ChainComplex:
    """Normalised Moore complex: kernels of ``d_1..d_n`` with differential ``d_0``."""
    return moore(A).complex


def module_homology(A: DeltaGModule, n_max: int | None = None) -> HomologyGroups:
    return homology(dold_kan(A), n_max)


@lru_cache(maxsize=None)
def _surjection_index(n: int, top: int) -> tuple[tuple[csg.SimplicialOperator, ...], ...]:
    """Surjections ``[n] -> [k]`` grouped by ``k <= min(n, top)``."""
    return tuple(tuple(csg.surjections(n, k)) for k in range(min(n, top) + 1))


def _summands(C: ChainComplex, n: int):
    out = []
    for k, sigmas in enumerate(_surjection_index(n, C.top)):
        for s in sigmas:
            out.append((s, k))
    return out


def dk_inverse(C: ChainComplex, D: int) -> DeltaGModule:
    """Simplicial module with ``M_n`` the sum of ``C_k`` over surjections ``[n] -> [k]``."""
    R = C.ring
    summ = [_summands(C, n) for n in range(D + 1)]
    offs = []
    for n in range(D + 1):
        o, acc = {}, 0
        for s, k in summ[n]:
            o[s] = acc
            acc += C.ranks[k]
        offs.append((o, acc))
    ranks = [offs[n][1] for n in range(D + 1)]
    d0 = csg.coface

    def pull_matrix(theta: csg.SimplicialOperator, n_src: int) -> np.ndarray:
        # theta : [m] -> [n_src]; result maps level n_src to level m
        m = theta.source
        M = sm.zeros(ranks[m], ranks[n_src])
        for s, k in summ[n_src]:
            comp = s.compose(theta)
            mono, epi = comp.factor()
            j = epi.target
            if j == k:
                blk = sm.eye(C.ranks[k])
            elif j == k - 1 and mono == d0(k, 0):
                blk = C.d(k)
            else:
                continue
            r0, c0 = offs[m][0][epi], offs[n_src][0][s]
            M[r0:r0 + blk.shape[0], c0:c0 + blk.shape[1]] += blk
        return M

    faces = [[]] + [[pull_matrix(csg.coface(n, i), n) for i in range(n + 1)] for n in range(1, D + 1)]
    degens = [[pull_matrix(csg.codegeneracy(n, i), n) for i in range(n + 1)] for n in range(D)] + [[]]
    A = DeltaGModule(TRIVIAL, D, R, ranks, faces, degens, [{} for _ in range(D + 1)],
                     C.coefficients)
    A.summands = summ
    A.offsets = [o for o, _ in offs]
    return A


def complex_iso_check(C: ChainComplex, E: ChainComplex, maps: dict) -> bool:
    """Whether per-degree matrices form a chain isomorphism ``C -> E``."""
    R = C.ring
    top = min(C.top, E.top)
    for n in range(top + 1):
        if not sm.is_invertible(maps[n], R):
            return False
        if n >= 1 and not sm.equal(sm.matmul(E.d(n), maps[n], R), sm.matmul(maps[n - 1], C.d(n), R), R):
            return False
    return True


def dk_roundtrip_complex(C: ChainComplex, D: int) -> bool:
    """``N(Gamma C)`` is isomorphic to ``C`` through degree ``D``."""
    A = dk_inverse(C, D)
    mo = moore(A)
    maps = {}
    for n in range(min(D, C.top) + 1):
        o = A.offsets[n][csg.identity_op(n)]
        incl = sm.zeros(A.ranks[n], C.ranks[n])
        for j in range(C.ranks[n]):
            incl[o + j, j] = 1
        maps[n] = sm.matmul(mo.retractions[n], incl, C.ring)
        if not sm.equal(sm.matmul(mo.inclusions[n], maps[n], C.ring), incl, C.ring):
            return False
    return complex_iso_check(C.truncate(min(D, C.top)), mo.complex, maps)


def gamma_n_map(A: DeltaGModule, mo: MooreComplex, B: DeltaGModule) -> list[np.ndarray]:
    """Comparison ``Gamma(N A) -> A`` sending summand ``sigma`` to ``sigma^*``."""
    R = A.ring
    out = []
    for n in range(A.truncation + 1):
        M = sm.zeros(A.ranks[n], B.ranks[n])
        for s, k in B.summands[n]:
            blk = sm.matmul(A.pull(s), mo.inclusions[k], R)
            c0 = B.offsets[n][s]
            M[:, c0:c0 + blk.shape[1]] = blk
        out.append(M)
    return out


def module_iso_check(A: DeltaGModule, B: DeltaGModule, maps: list[np.ndarray]) -> bool:
    """Whether levelwise matrices ``B -> A`` form an isomorphism of simplicial modules."""
    R = A.ring
    D = min(A.truncation, B.truncation)
    for n in range(D + 1):
        if not sm.is_invertible(maps[n], R):
            return False
        if n >= 1:
            for i in range(n + 1):
                if not sm.equal(sm.matmul(A.faces[n][i], maps[n], R), sm.matmul(maps[n - 1], B.faces[n][i], R), R):
                    return False
        if n < D:
            for i in range(n + 1):
                if not sm.equal(sm.matmul(A.degeneracies[n][i], maps[n], R),
                                sm.matmul(maps[n + 1], B.degeneracies[n][i], R), R):
                    return False
        for g in A.actions[n]:
            if g in B.actions[n] and not sm.equal(sm.matmul(A.actions[n][g], maps[n], R),
                                                  sm.matmul(maps[n], B.actions[n][g], R), R):
                return False
    return True


def dk_roundtrip_module(A: DeltaGModule) -> bool:
    """``Gamma(N A)`` is isomorphic to ``A`` (as simplicial modules)."""
    mo = moore(A)
    B = dk_inverse(mo.complex, A.truncation)
    return module_iso_check(A.underlying(), B, gamma_n_map(A, mo, B))


# ---------------------------------------------------------------------------
# Eilenberg-MacLane objects


def em_object(family: CrossedFamily, A, n: int, D: int, model: str = "smash") -> DeltaGModule:
    """``A`` tensored with the reduced free module on the ``n``-sphere."""
    if D < n:
        raise dg.ConstructionError(f"truncation {D} below degree {n}")
    A = list(A)
    S = dg.sphere(family, n, D, model)
    return free_abelian(S, reduced=True, coefficients=A)


def em_homotopy(family: CrossedFamily, A, n: int, D: int, model: str = "smash") -> HomologyGroups:
    """Homotopy groups of ``K(A, n)``: homology of its normalised complex."""
    return module_homology(em_object(family, A, n, D, model))


def _finite_group_elements(A: list[int], rank: int):
    orders = [q for q in A for _ in range(rank)]
    return _iproduct(*[range(q) for q in orders])


def underlying_space(M: DeltaGModule) -> dg.DGSet:
    """The underlying simplicial set of ``A tensor M`` for a finite ``A``."""
    A = M.coefficients or []
    if any(q == 0 for q in A) or not A:
        raise UnsupportedError("underlying space enumeration needs a finite coefficient group")
    D = M.truncation

    def apply(mat, vec, src):
        # vec is laid out summand-major: coordinates for A_0 then A_1 ...
        r = src
        out = []
        for a, q in enumerate(A):
            v = np.array(vec[a * r:(a + 1) * r], dtype=object)
            w = mat.dot(v) if r else np.zeros(mat.shape[0], dtype=object)
            out += [int(x) % q for x in w]
        return tuple(out)

    def name(v):
        return "".join(str(x) if x < 10 else f"({x})" for x in v) or "0"

    levels = [list(_finite_group_elements(A, M.ranks[m])) for m in range(D + 1)]
    simplices = [[name(v) for v in lv] for lv in levels]
    faces, degens = [{}], []
    for m in range(1, D + 1):
        faces.append({name(v): tuple(name(apply(M.faces[m][i], v, M.ranks[m])) for i in range(m + 1))
                      for v in levels[m]})
    for m in range(D):
        degens.append({name(v): tuple(name(apply(M.degeneracies[m][i], v, M.ranks[m])) for i in range(m + 1))
                       for v in levels[m]})
    degens.append({})
    zero = [name(tuple([0] * (len(A) * M.ranks[m]))) for m in range(D + 1)]
    return dg.make(TRIVIAL, D, simplices, faces, degens, base=[{z} for z in zero])


def em_homology(family: CrossedFamily, A, n: int, D: int, model: str = "minimal") -> HomologyGroups:
    """Integral homology of the underlying space of ``K(A, n)`` (degrees ``< D`` trusted).

    Finite ``A`` is handled by enumerating the simplicial abelian group.  An
    infinite cyclic summand is supported for ``n = 1`` with the trivial family,
    where the circle model is weakly equivalent to ``K(ZZ, 1)``; summands are
    combined with the Eilenberg-Zilber tensor product.  The sphere model
    defaults to the minimal one; linearisation preserves weak equivalences,
    so the answer does not depend on it.
    """
    A = [int(q) for q in A]
    if D < n:
        raise dg.ConstructionError(f"truncation {D} below degree {n}")
    finite = [q for q in A if q > 1]
    free_rank = sum(1 for q in A if q == 0)
    if free_rank and not (n == 1 and family == TRIVIAL):
        raise UnsupportedError("infinite cyclic coefficients are supported only for n=1, trivial family")
    pieces = []
    if finite:
        X = underlying_space(em_object(family, finite, n, D, model))
        pieces.append(chains(X))
    for _ in range(free_rank):
        pieces.append(chains(dg.circle(D)))
    if not pieces:
        return homology(chains(dg.point(TRIVIAL, D)))
    C = pieces[0]
    for P in pieces[1:]:
        C = tensor(C, P)
    return homology(C)
