"""Finite truncated Delta-G-sets, their maps, and basic constructions."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product as _iproduct
from typing import Iterable, Mapping

from . import csg
from .csg import CrossedFamily, GroupElement, TRIVIAL

BASEPOINT = "*"


class StructuralError(ValueError):
    """Tables are malformed (dangling ids, wrong arity, missing entries)."""


class ConstructionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class DGSet:
    """Levelwise-finite Delta-G-set truncated at dimension ``truncation``.

    ``faces[n][x]`` lists ``d_0 x .. d_n x`` (``n >= 1``); ``degeneracies[n][x]``
    lists ``s_0 x .. s_n x`` (``n < truncation``); ``actions[n][gen][x]`` is the
    left action of a family generator.  ``base`` (optional) is a sub-object
    collapsed by reduced constructions; an object with a base is *pointed*.
    """

    family: CrossedFamily
    truncation: int
    simplices: tuple[tuple[str, ...], ...]
    faces: tuple[Mapping[str, tuple[str, ...]], ...]
    degeneracies: tuple[Mapping[str, tuple[str, ...]], ...]
    actions: tuple[Mapping[str, Mapping[str, str]], ...]
    base: tuple[frozenset, ...] | None = None

    # -- basic access -----------------------------------------------------

    @property
    def D(self) -> int:
        return self.truncation

    @property
    def pointed(self) -> bool:
        return self.base is not None

    def level(self, n: int) -> tuple[str, ...]:
        return self.simplices[n]

    def counts(self) -> list[int]:
        return [len(s) for s in self.simplices]

    def face(self, x: str, n: int, i: int) -> str:
        return self.faces[n][x][i]

    def degen(self, x: str, n: int, i: int) -> str:
        return self.degeneracies[n][x][i]

    def act_gen(self, gen: str, x: str, n: int) -> str:
        return self.actions[n][gen][x]

    def act(self, g: GroupElement, x: str) -> str:
        """Left action of an arbitrary level element ``g = t^k r^e``."""
        n = g.n
        if g.e:
            x = self.actions[n]["b" if self.family.kind == "quaternionic" else "w"][x]
        if g.k:
            tab = self.actions[n]["t"]
            for _ in range(g.k):
                x = tab[x]
        return x

    @cached_property
    def _degenerate(self) -> tuple[frozenset, ...]:
        out = [frozenset()]
        for n in range(1, self.truncation + 1):
            out.append(frozenset(y for ys in self.degeneracies[n - 1].values() for y in ys))
        return tuple(out)

    def is_degenerate(self, x: str, n: int) -> bool:
        return x in self._degenerate[n]

    def nondegenerate(self, n: int) -> list[str]:
        deg = self._degenerate[n]
        return [x for x in self.simplices[n] if x not in deg]

    def f_vector(self, top: int | None = None) -> list[int]:
        top = self.truncation if top is None else min(top, self.truncation)
        return [len(self.nondegenerate(n)) for n in range(top + 1)]

    def euler_characteristic(self, top: int | None = None) -> int:
        return sum((-1) ** n * c for n, c in enumerate(self.f_vector(top)))

    def basepoint(self) -> str | None:
        if self.base is None or len(self.base[0]) != 1:
            return None
        return next(iter(self.base[0]))

    def __repr__(self):
        return f"<DGSet {self.family} D={self.truncation} counts={self.counts()}>"


def make(family: CrossedFamily, truncation: int, simplices, faces, degeneracies, actions=None, base=None) -> DGSet:
    D = truncation
    simplices = tuple(tuple(s) for s in simplices)
    if len(simplices) != D + 1:
        raise StructuralError(f"expected {D + 1} levels, got {len(simplices)}")
    faces = tuple(dict(f) for f in faces)
    degeneracies = tuple(dict(d) for d in degeneracies)
    if actions is None:
        actions = [{} for _ in range(D + 1)]
    actions = tuple({g: dict(t) for g, t in a.items()} for a in actions)
    if base is not None:
        base = tuple(frozenset(b) for b in base)
    return DGSet(family, D, simplices, faces, degeneracies, actions, base)


# ---------------------------------------------------------------------------
# validation


@dataclass
class Report:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, msg: str):
        self.violations.append(msg)

    def __bool__(self):
        return self.ok


def check_structure(X: DGSet) -> None:
    """Raise :class:`StructuralError` on dangling ids or malformed tables."""
    D = X.truncation
    if not (len(X.simplices) == len(X.faces) == len(X.degeneracies) == len(X.actions) == D + 1):
        raise StructuralError("table lengths do not match truncation")
    sets = [set(s) for s in X.simplices]
    for n in range(D + 1):
        if len(sets[n]) != len(X.simplices[n]):
            raise StructuralError(f"duplicate simplex ids at level {n}")
        if n >= 1:
            for x in X.simplices[n]:
                fs = X.faces[n].get(x)
                if fs is None:
                    raise StructuralError(f"levels[{n}].faces.{x}: missing")
                if len(fs) != n + 1:
                    raise StructuralError(f"levels[{n}].faces.{x}: expected {n + 1} entries")
                for y in fs:
                    if y not in sets[n - 1]:
                        raise StructuralError(f"levels[{n}].faces.{x}: dangling id {y!r}")
        if n < D:
            for x in X.simplices[n]:
                ss = X.degeneracies[n].get(x)
                if ss is None:
                    raise StructuralError(f"levels[{n}].degeneracies.{x}: missing")
                if len(ss) != n + 1:
                    raise StructuralError(f"levels[{n}].degeneracies.{x}: expected {n + 1} entries")
                for y in ss:
                    if y not in sets[n + 1]:
                        raise StructuralError(f"levels[{n}].degeneracies.{x}: dangling id {y!r}")
        for gen in X.family.generators:
            tab = X.actions[n].get(gen)
            if tab is None:
                if X.simplices[n]:
                    raise StructuralError(f"levels[{n}].action.{gen}: missing")
                continue
            if set(tab) != sets[n] or set(tab.values()) != sets[n]:
                raise StructuralError(f"levels[{n}].action.{gen}: not a bijection of the level")
    if X.base is not None:
        if len(X.base) != D + 1:
            raise StructuralError("base has wrong number of levels")
        for n in range(D + 1):
            if not X.base[n] <= sets[n]:
                raise StructuralError(f"base at level {n} has dangling ids")


def _group_relations(X: DGSet, n: int, rep: Report):
    fam = X.family
    lvl = X.simplices[n]
    R = fam.rotation_order(n)

    def power(gen, p, x):
        for _ in range(p):
            x = X.actions[n][gen][x]
        return x

    refl = "b" if fam.kind == "quaternionic" else "w"
    for x in lvl:
        if fam.has_rotation and power("t", R, x) != x:
            rep.add(f"relation t^{R}=1 fails at level {n} on {x}")
        if fam.has_reflection:
            if fam.kind == "quaternionic":
                if power("b", 2, x) != power("t", R // 2, x):
                    rep.add(f"relation b^2=t^{R // 2} fails at level {n} on {x}")
                if power("b", 1, power("t", 1, x)) != power("t", R - 1, power("b", 1, x)):
                    rep.add(f"relation bt=t^-1 b fails at level {n} on {x}")
            else:
                if power(refl, 2, x) != x:
                    rep.add(f"relation w^2=1 fails at level {n} on {x}")
                if fam.has_rotation and power("w", 1, power("t", 1, x)) != power("t", R - 1, power("w", 1, x)):
                    rep.add(f"relation wt=t^-1 w fails at level {n} on {x}")


def validate(X: DGSet, crossed: bool = True) -> Report:
    """Exhaustively check simplicial, group and crossed identities."""
    check_structure(X)
    rep = Report()
    D = X.truncation
    F, S = X.faces, X.degeneracies
    for n in range(D + 1):
        for x in X.simplices[n]:
            if n >= 2:
                fx = F[n][x]
                for j in range(n + 1):
                    for i in range(j):
                        if F[n - 1][fx[j]][i] != F[n - 1][fx[i]][j - 1]:
                            rep.add(f"d{i}d{j} = d{j - 1}d{i} fails on {x} (level {n})")
            if n + 2 <= D:
                sx = S[n][x]
                for j in range(n + 1):
                    for i in range(j + 1):
                        if S[n + 1][sx[j]][i] != S[n + 1][sx[i]][j + 1]:
                            rep.add(f"s{i}s{j} = s{j + 1}s{i} fails on {x} (level {n})")
            if n + 1 <= D:
                sx = S[n][x]
                for j in range(n + 1):
                    for i in range(n + 2):
                        lhs = F[n + 1][sx[j]][i]
                        if i == j or i == j + 1:
                            rhs = x
                        elif n == 0:
                            continue
                        elif i < j:
                            rhs = S[n - 1][F[n][x][i]][j - 1]
                        else:
                            rhs = S[n - 1][F[n][x][i - 1]][j]
                        if lhs != rhs:
                            rep.add(f"d{i}s{j} identity fails on {x} (level {n})")
    if not X.family.generators:
        return rep
    for n in range(D + 1):
        _group_relations(X, n, rep)
    if not crossed:
        return rep
    for n in range(D + 1):
        for gen in X.family.generators:
            g = X.family.generator(gen, n)
            twists_f = [csg.crossed_twist(g, "face", i) for i in range(n + 1)] if n >= 1 else []
            twists_s = [csg.crossed_twist(g, "degeneracy", i) for i in range(n + 1)] if n < D else []
            for x in X.simplices[n]:
                gx = X.actions[n][gen][x]
                for i, (h, j) in enumerate(twists_f):
                    if F[n][gx][i] != X.act(h, F[n][x][j]):
                        rep.add(f"crossed face relation d{i}({gen} x) fails on {x} (level {n})")
                for i, (h, j) in enumerate(twists_s):
                    if S[n][gx][i] != X.act(h, S[n][x][j]):
                        rep.add(f"crossed degeneracy relation s{i}({gen} x) fails on {x} (level {n})")
    if X.base is not None:
        _check_subobject(X, X.base, rep, "base")
    return rep


def _check_subobject(X: DGSet, sub, rep: Report, name="sub-object"):
    D = X.truncation
    for n in range(D + 1):
        for x in sub[n]:
            if n >= 1 and any(y not in sub[n - 1] for y in X.faces[n][x]):
                rep.add(f"{name} not closed under faces at {x} (level {n})")
            if n < D and any(y not in sub[n + 1] for y in X.degeneracies[n][x]):
                rep.add(f"{name} not closed under degeneracies at {x} (level {n})")
            for gen in X.family.generators:
                if X.actions[n][gen][x] not in sub[n]:
                    rep.add(f"{name} not closed under action {gen} at {x} (level {n})")


def is_subobject(X: DGSet, sub) -> Report:
    rep = Report()
    _check_subobject(X, tuple(frozenset(s) for s in sub), rep)
    return rep


# ---------------------------------------------------------------------------
# maps


@dataclass(frozen=True, eq=False)
class DGMap:
    source: DGSet
    target: DGSet
    maps: tuple[Mapping[str, str], ...]

    @property
    def truncation(self) -> int:
        return len(self.maps) - 1

    def __call__(self, x: str, n: int) -> str:
        return self.maps[n][x]

    def then(self, other: DGMap) -> DGMap:
        """``other o self``."""
        top = min(self.truncation, other.truncation)
        return DGMap(self.source, other.target,
                     tuple({x: other.maps[n][y] for x, y in self.maps[n].items()} for n in range(top + 1)))


def dgmap(source: DGSet, target: DGSet, maps) -> DGMap:
    if source.family != target.family:
        raise ConstructionError("family mismatch")
    top = min(source.truncation, target.truncation)
    return DGMap(source, target, tuple(dict(maps[n]) for n in range(top + 1)))


def identity_map(X: DGSet) -> DGMap:
    return DGMap(X, X, tuple({x: x for x in X.simplices[n]} for n in range(X.truncation + 1)))


def validate_map(f: DGMap) -> Report:
    rep = Report()
    X, Y = f.source, f.target
    top = f.truncation
    for n in range(top + 1):
        m = f.maps[n]
        for x in X.simplices[n]:
            if x not in m or m[x] not in set(Y.simplices[n]):
                rep.add(f"map undefined or dangling at {x} (level {n})")
                return rep
    for n in range(top + 1):
        m = f.maps[n]
        for x in X.simplices[n]:
            y = m[x]
            if n >= 1:
                for i in range(n + 1):
                    if f.maps[n - 1][X.faces[n][x][i]] != Y.faces[n][y][i]:
                        rep.add(f"map does not commute with d{i} at {x} (level {n})")
            if n < top:
                for i in range(n + 1):
                    if f.maps[n + 1][X.degeneracies[n][x][i]] != Y.degeneracies[n][y][i]:
                        rep.add(f"map does not commute with s{i} at {x} (level {n})")
            for gen in X.family.generators:
                if m[X.actions[n][gen][x]] != Y.actions[n][gen][y]:
                    rep.add(f"map is not equivariant for {gen} at {x} (level {n})")
    return rep


# ---------------------------------------------------------------------------
# constructors


def _from_morphisms(family: CrossedFamily, D: int, levels: list[list[csg.CrossedMorphism]]) -> DGSet:
    """Sub-object of a representable given by explicit morphism lists."""
    simplices, faces, degens, actions = [], [], [], []
    for m in range(D + 1):
        mors = levels[m]
        simplices.append([f.label() for f in mors])
        fc, dg, ac = {}, {}, {}
        for f in mors:
            lab = f.label()
            if m >= 1:
                fc[lab] = tuple(csg.compose(f, csg.from_operator(family, csg.coface(m, i))).label()
                                for i in range(m + 1))
            if m < D:
                dg[lab] = tuple(csg.compose(f, csg.from_operator(family, csg.codegeneracy(m, i))).label()
                                for i in range(m + 1))
        for gen in family.generators:
            ginv = csg.from_group(family.generator(gen, m).inverse())
            ac[gen] = {f.label(): csg.compose(f, ginv).label() for f in mors}
        faces.append(fc)
        degens.append(dg)
        actions.append(ac)
    return make(family, D, simplices, faces, degens, actions)


def standard(family: CrossedFamily, n: int, D: int, boundary: bool = False) -> DGSet:
    """Representable ``Delta G[n]`` (or its boundary), truncated at ``D``."""
    if D < 0 or n < 0:
        raise ConstructionError("levels must be non-negative")
    levels = []
    for m in range(D + 1):
        mors = csg.all_morphisms(family, m, n)
        if boundary:
            mors = [f for f in mors if not f.op.is_surjective]
        levels.append(mors)
    return _from_morphisms(family, D, levels)


def simplex(n: int, D: int) -> DGSet:
    return standard(TRIVIAL, n, D)


def boundary(n: int, D: int, family: CrossedFamily = TRIVIAL) -> DGSet:
    return standard(family, n, D, boundary=True)


def horn(n: int, k: int, D: int) -> DGSet:
    """Horn ``Lambda^n_k`` inside ``Delta[n]``."""
    need = set(range(n + 1)) - {k}
    levels = [[f for f in csg.all_morphisms(TRIVIAL, m, n) if not need <= set(f.op.image)]
              for m in range(D + 1)]
    return _from_morphisms(TRIVIAL, D, levels)


def point(family: CrossedFamily, D: int, name: str = BASEPOINT) -> DGSet:
    simplices = [[name] for _ in range(D + 1)]
    faces = [{} if n == 0 else {name: (name,) * (n + 1)} for n in range(D + 1)]
    degens = [{name: (name,) * (n + 1)} if n < D else {} for n in range(D + 1)]
    actions = [{g: {name: name} for g in family.generators} for _ in range(D + 1)]
    return make(family, D, simplices, faces, degens, actions, base=[{name}] * (D + 1))


def empty(family: CrossedFamily, D: int) -> DGSet:
    return make(family, D, [[] for _ in range(D + 1)], [{} for _ in range(D + 1)],
                [{} for _ in range(D + 1)], [{g: {} for g in family.generators} for _ in range(D + 1)])


def underlying(X: DGSet) -> DGSet:
    """Forget the group actions."""
    return DGSet(TRIVIAL, X.truncation, X.simplices, X.faces, X.degeneracies,
                 tuple({} for _ in range(X.truncation + 1)), X.base)


def with_truncation(X: DGSet, D: int) -> DGSet:
    """Restrict to levels ``0..D`` (``D <= X.truncation``)."""
    if D > X.truncation:
        raise ConstructionError("cannot raise truncation")
    degens = list(X.degeneracies[:D + 1])
    degens[D] = {}
    base = None if X.base is None else X.base[:D + 1]
    return DGSet(X.family, D, X.simplices[:D + 1], X.faces[:D + 1], tuple(degens), X.actions[:D + 1], base)


def free(family: CrossedFamily, X: DGSet) -> DGSet:
    """Free Delta-G-set on a simplicial set: level ``n`` is ``G_n x X_n``."""
    if X.family != TRIVIAL:
        raise ConstructionError("free() expects a trivial-family simplicial set")
    D = X.truncation

    def lab(g, x):
        return f"({g.label()};{x})"

    simplices, faces, degens, actions = [], [], [], []
    for n in range(D + 1):
        gs = family.elements(n)
        simplices.append([lab(g, x) for g in gs for x in X.simplices[n]])
        fc, dg = {}, {}
        for g in gs:
            ftw = [csg.crossed_twist(g, "face", i) for i in range(n + 1)] if n >= 1 else []
            stw = [csg.crossed_twist(g, "degeneracy", i) for i in range(n + 1)] if n < D else []
            for x in X.simplices[n]:
                if n >= 1:
                    fc[lab(g, x)] = tuple(lab(h, X.faces[n][x][j]) for h, j in ftw)
                if n < D:
                    dg[lab(g, x)] = tuple(lab(h, X.degeneracies[n][x][j]) for h, j in stw)
        ac = {}
        for gen in family.generators:
            a = family.generator(gen, n)
            ac[gen] = {lab(g, x): lab(a * g, x) for g in gs for x in X.simplices[n]}
        faces.append(fc)
        degens.append(dg)
        actions.append(ac)
    base = None
    if X.base is not None:
        base = [{lab(g, x) for g in family.elements(n) for x in X.base[n]} for n in range(D + 1)]
    return make(family, D, simplices, faces, degens, actions, base)


def product(X: DGSet, Y: DGSet) -> DGSet:
    """Levelwise cartesian product with diagonal action."""
    if X.family != Y.family:
        raise ConstructionError("family mismatch")
    D = min(X.truncation, Y.truncation)

    def lab(x, y):
        return f"[{x},{y}]"

    simplices, faces, degens, actions = [], [], [], []
    for n in range(D + 1):
        pairs = list(_iproduct(X.simplices[n], Y.simplices[n]))
        simplices.append([lab(x, y) for x, y in pairs])
        faces.append({lab(x, y): tuple(lab(a, b) for a, b in zip(X.faces[n][x], Y.faces[n][y]))
                      for x, y in pairs} if n >= 1 else {})
        degens.append({lab(x, y): tuple(lab(a, b) for a, b in zip(X.degeneracies[n][x], Y.degeneracies[n][y]))
                       for x, y in pairs} if n < D else {})
        actions.append({g: {lab(x, y): lab(X.actions[n][g][x], Y.actions[n][g][y]) for x, y in pairs}
                        for g in X.family.generators})
    base = None
    if X.base is not None and Y.base is not None:
        base = [{lab(x, y) for x in X.base[n] for y in Y.base[n]} for n in range(D + 1)]
    return make(X.family, D, simplices, faces, degens, actions, base)


def quotient(X: DGSet, A) -> DGSet:
    """Collapse the sub-object ``A`` (per-level id collections) to a basepoint."""
    A = tuple(frozenset(a) for a in A)
    if len(A) < X.truncation + 1:
        raise ConstructionError("sub-object has too few levels")
    rep = is_subobject(X, A)
    if not rep.ok:
        raise ConstructionError("; ".join(rep.violations[:3]))
    D = X.truncation
    star = BASEPOINT
    while any(star in lvl for lvl in X.simplices):
        star += "*"

    def c(x, n):
        return star if x in A[n] else x

    simplices, faces, degens, actions = [], [], [], []
    for n in range(D + 1):
        keep = [x for x in X.simplices[n] if x not in A[n]]
        simplices.append([star] + keep)
        faces.append({**{x: tuple(c(y, n - 1) for y in X.faces[n][x]) for x in keep},
                      star: (star,) * (n + 1)} if n >= 1 else {})
        degens.append({**{x: tuple(c(y, n + 1) for y in X.degeneracies[n][x]) for x in keep},
                       star: (star,) * (n + 1)} if n < D else {})
        actions.append({g: {**{x: X.actions[n][g][x] for x in keep}, star: star} for g in X.family.generators})
    return make(X.family, D, simplices, faces, degens, actions, base=[{star}] * (D + 1))


def quotient_map(X: DGSet, A, Q: DGSet) -> DGMap:
    star = Q.basepoint()
    return DGMap(X, Q, tuple({x: (star if x in A[n] else x) for x in X.simplices[n]}
                             for n in range(X.truncation + 1)))


def product_map(f: DGMap, g: DGMap, source: DGSet | None = None, target: DGSet | None = None) -> DGMap:
    """``f x g`` between the products of sources and targets."""
    S = source or product(f.source, g.source)
    T = target or product(f.target, g.target)
    top = min(f.truncation, g.truncation, S.truncation, T.truncation)
    return DGMap(S, T, tuple({f"[{x},{y}]": f"[{f.maps[n][x]},{g.maps[n][y]}]"
                              for x in f.source.simplices[n] for y in g.source.simplices[n]}
                             for n in range(top + 1)))


def quotient_induced(f: DGMap, A, B, source: DGSet | None = None, target: DGSet | None = None) -> DGMap:
    """``X/A -> Y/B`` induced by ``f`` with ``f(A)`` inside ``B``."""
    S = source or quotient(f.source, A)
    T = target or quotient(f.target, B)
    s, t = S.basepoint(), T.basepoint()
    maps = []
    for n in range(f.truncation + 1):
        if any(f.maps[n][a] not in B[n] for a in A[n]):
            raise ConstructionError(f"map does not send the collapsed part into the target's (level {n})")
        m = {s: t}
        for x in f.source.simplices[n]:
            if x not in A[n]:
                y = f.maps[n][x]
                m[x] = t if y in B[n] else y
        maps.append(m)
    return DGMap(S, T, tuple(maps))


def smash(X: DGSet, Y: DGSet) -> DGSet:
    """Product of pointed objects with the wedge collapsed."""
    if not (X.pointed and Y.pointed):
        raise ConstructionError("smash requires pointed objects")
    P = product(X, Y)
    D = P.truncation
    wedge = [{f"[{x},{y}]" for x in X.simplices[n] for y in Y.simplices[n]
              if x in X.base[n] or y in Y.base[n]} for n in range(D + 1)]
    return quotient(P, wedge)


def circle(D: int) -> DGSet:
    """Simplicial circle ``Delta[1]/boundary``."""
    if D < 1:
        raise ConstructionError("circle needs truncation >= 1")
    return quotient(simplex(1, D), boundary(1, D).simplices)


def sphere(family: CrossedFamily, n: int, D: int, model: str = "smash") -> DGSet:
    """The Delta-G ``n``-sphere.

    For the trivial family this is the ``n``-fold smash power of the
    simplicial circle (``model="smash"``) or the smaller, weakly equivalent
    ``Delta[n]/boundary`` (``model="minimal"``).  For other families it is the
    free object on that sphere, based at the free orbit of the basepoint; for
    ``n = 1`` this is ``Delta G[1]`` with its boundary folded onto ``Delta G[0]``.
    """
    if n < 1:
        raise ConstructionError("sphere dimension must be >= 1")
    if D < n:
        raise ConstructionError(f"truncation {D} below sphere dimension {n}")
    if model == "minimal":
        S = quotient(simplex(n, D), boundary(n, D).simplices)
    elif model == "smash":
        S = circle(D)
        for _ in range(n - 1):
            S = smash(S, circle(D))
    else:
        raise ConstructionError(f"unknown sphere model {model!r}")
    S = _relabel_canonical(S)
    if family == TRIVIAL:
        return S
    return free(family, S)


def _relabel_canonical(X: DGSet) -> DGSet:
    """Short deterministic ids ``v{n}_{j}``; the basepoint keeps ``*``."""
    mapping = []
    for n, lvl in enumerate(X.simplices):
        m, j = {}, 0
        for x in lvl:
            if X.base is not None and x in X.base[n] and len(X.base[n]) == 1:
                m[x] = BASEPOINT
            else:
                m[x] = f"v{n}_{j}"
                j += 1
        mapping.append(m)
    return rename(X, mapping)


def rename(X: DGSet, mapping) -> DGSet:
    """Apply a levelwise id bijection."""
    D = X.truncation
    simplices = [[mapping[n][x] for x in X.simplices[n]] for n in range(D + 1)]
    faces = [{mapping[n][x]: tuple(mapping[n - 1][y] for y in fs) for x, fs in X.faces[n].items()}
             if n >= 1 else {} for n in range(D + 1)]
    degens = [{mapping[n][x]: tuple(mapping[n + 1][y] for y in ss) for x, ss in X.degeneracies[n].items()}
              if n < D else {} for n in range(D + 1)]
    actions = [{g: {mapping[n][x]: mapping[n][y] for x, y in t.items()} for g, t in X.actions[n].items()}
               for n in range(D + 1)]
    base = None if X.base is None else [{mapping[n][x] for x in X.base[n]} for n in range(D + 1)]
    return make(X.family, D, simplices, faces, degens, actions, base)


def subobject(X: DGSet, keep) -> DGSet:
    """Restriction of ``X`` to a sub-object given by per-level id collections."""
    keep = tuple(frozenset(k) for k in keep)
    rep = is_subobject(X, keep)
    if not rep.ok:
        raise ConstructionError("; ".join(rep.violations[:3]))
    D = X.truncation
    simplices = [[x for x in X.simplices[n] if x in keep[n]] for n in range(D + 1)]
    faces = [{x: X.faces[n][x] for x in simplices[n]} if n >= 1 else {} for n in range(D + 1)]
    degens = [{x: X.degeneracies[n][x] for x in simplices[n]} if n < D else {} for n in range(D + 1)]
    actions = [{g: {x: t[x] for x in simplices[n]} for g, t in X.actions[n].items()} for n in range(D + 1)]
    base = None if X.base is None else [X.base[n] & keep[n] for n in range(D + 1)]
    return make(X.family, D, simplices, faces, degens, actions, base)


def inclusion(A: DGSet, X: DGSet) -> DGMap:
    return dgmap(A, X, [{x: x for x in A.simplices[n]} for n in range(A.truncation + 1)])


def generated_subobject(X: DGSet, seeds: Iterable[tuple[str, int]]) -> list[set]:
    """Smallest sub-object containing the given ``(id, level)`` seeds."""
    D = X.truncation
    sub = [set() for _ in range(D + 1)]
    stack = list(seeds)
    while stack:
        x, n = stack.pop()
        if x in sub[n]:
            continue
        sub[n].add(x)
        if n >= 1:
            stack.extend((y, n - 1) for y in X.faces[n][x])
        if n < D:
            stack.extend((y, n + 1) for y in X.degeneracies[n][x])
        for g in X.family.generators:
            stack.append((X.actions[n][g][x], n))
    return sub


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def pushout(f: DGMap, g: DGMap) -> tuple[DGSet, DGMap, DGMap]:
    """Levelwise pushout of ``X <- A -> Y``; returns the object and both legs."""
    if f.source is not g.source and f.source.counts() != g.source.counts():
        raise ConstructionError("maps must share a source")
    A, X, Y = f.source, f.target, g.target
    if not (A.family == X.family == Y.family):
        raise ConstructionError("family mismatch")
    D = min(f.truncation, g.truncation, X.truncation, Y.truncation)
    classes = []
    for n in range(D + 1):
        uf = _UnionFind([f"X:{x}" for x in X.simplices[n]] + [f"Y:{y}" for y in Y.simplices[n]])
        for a in A.simplices[n]:
            uf.union(f"X:{f.maps[n][a]}", f"Y:{g.maps[n][a]}")
        classes.append(uf)

    def c(tag, x, n):
        return classes[n].find(f"{tag}:{x}")

    simplices, faces, degens, actions = [], [], [], []
    for n in range(D + 1):
        reps = []
        seen = set()
        for tag, Z in (("X", X), ("Y", Y)):
            for x in Z.simplices[n]:
                r = c(tag, x, n)
                if r not in seen:
                    seen.add(r)
                    reps.append(r)
        simplices.append(reps)
        fc, dg, ac = {}, {}, {g_: {} for g_ in X.family.generators}
        for tag, Z in (("X", X), ("Y", Y)):
            for x in Z.simplices[n]:
                r = c(tag, x, n)
                if n >= 1:
                    fc[r] = tuple(c(tag, y, n - 1) for y in Z.faces[n][x])
                if n < D:
                    dg[r] = tuple(c(tag, y, n + 1) for y in Z.degeneracies[n][x])
                for gen in X.family.generators:
                    ac[gen][r] = c(tag, Z.actions[n][gen][x], n)
        faces.append(fc)
        degens.append(dg)
        actions.append(ac)
    P = make(X.family, D, simplices, faces, degens, actions)
    left = DGMap(X, P, tuple({x: c("X", x, n) for x in X.simplices[n]} for n in range(D + 1)))
    right = DGMap(Y, P, tuple({y: c("Y", y, n) for y in Y.simplices[n]} for n in range(D + 1)))
    return P, left, right


def terminal_map(X: DGSet) -> DGMap:
    P = point(X.family, X.truncation)
    return DGMap(X, P, tuple({x: BASEPOINT for x in X.simplices[n]} for n in range(X.truncation + 1)))


# ---------------------------------------------------------------------------
# JSON


def to_json(X: DGSet) -> dict:
    levels = []
    for n in range(X.truncation + 1):
        lv = {"dim": n, "simplices": list(X.simplices[n]),
              "faces": {x: list(v) for x, v in X.faces[n].items()},
              "degeneracies": {x: list(v) for x, v in X.degeneracies[n].items()},
              "action": {g: dict(t) for g, t in X.actions[n].items()}}
        levels.append(lv)
    doc = {"family": X.family.to_json(), "truncation": X.truncation, "levels": levels}
    bp = X.basepoint()
    if bp is not None and all(b == {bp} for b in map(set, X.base)):
        doc["basepoint"] = bp
    elif X.base is not None:
        doc["base"] = [sorted(b) for b in X.base]
    return doc


def from_json(doc: dict) -> DGSet:
    """Parse a document; raises :class:`StructuralError` with a JSON path."""
    try:
        family = CrossedFamily.from_json(doc.get("family", "trivial"))
        D = int(doc["truncation"])
        levels = doc["levels"]
    except (KeyError, TypeError) as exc:
        raise StructuralError(f"missing top-level field: {exc}") from None
    if len(levels) != D + 1:
        raise StructuralError(f"levels: expected {D + 1} entries")
    simplices, faces, degens, actions = [], [], [], []
    for n, lv in enumerate(levels):
        if lv.get("dim", n) != n:
            raise StructuralError(f"levels[{n}].dim: expected {n}")
        ids = [str(x) for x in lv.get("simplices", [])]
        simplices.append(ids)
        fc = {str(k): tuple(map(str, v)) for k, v in lv.get("faces", {}).items()}
        dg = {str(k): tuple(map(str, v)) for k, v in lv.get("degeneracies", {}).items()}
        if n >= 1:
            for x in ids:
                if x not in fc:
                    raise StructuralError(f"levels[{n}].faces.{x}: missing")
        if n < D:
            for x in ids:
                if x not in dg:
                    raise StructuralError(f"levels[{n}].degeneracies.{x}: missing")
        faces.append(fc)
        degens.append(dg)
        actions.append({g: {str(a): str(b) for a, b in t.items()} for g, t in lv.get("action", {}).items()})
    base = None
    if "basepoint" in doc:
        bp = str(doc["basepoint"])
        base = [{bp}] * (D + 1)
    elif "base" in doc:
        base = [set(map(str, b)) for b in doc["base"]]
    X = make(family, D, simplices, faces, degens, actions, base)
    check_structure(X)
    return X


def map_to_json(f: DGMap) -> dict:
    return {"source": to_json(f.source), "target": to_json(f.target),
            "maps": [dict(m) for m in f.maps]}


def map_from_json(doc: dict) -> DGMap:
    X, Y = from_json(doc["source"]), from_json(doc["target"])
    return dgmap(X, Y, [{str(a): str(b) for a, b in m.items()} for m in doc["maps"]])
