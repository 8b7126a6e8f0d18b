"""Seeded random objects for property tests and the acceptance suite."""
from __future__ import annotations

import os
import random

from . import dgset as dg
from . import smith as sm
from .csg import CYCLIC, TRIVIAL as TRIVIAL_FAMILY
from .modules import DeltaGModule, free_abelian, random_basis_change

DEFAULT_SEED = 20240611


def seed() -> int:
    return int(os.environ.get("XSIMP_SEED", DEFAULT_SEED))


def rng(offset: int = 0) -> random.Random:
    return random.Random(seed() + offset)


def cyclic_catalogue(D: int) -> list[dg.DGSet]:
    """Small finite cyclic sets truncated at ``D``."""
    C = CYCLIC
    d1 = dg.standard(C, 1, D)
    return [
        dg.standard(C, 0, D),
        d1,
        dg.standard(C, 2, D),
        dg.boundary(1, D, C),
        dg.boundary(2, D, C),
        dg.sphere(C, 1, D),
        dg.quotient(d1, dg.boundary(1, D, C).simplices),
        dg.free(C, dg.horn(2, 1, D)),
        dg.free(C, dg.boundary(2, D)),
    ]


def direct_sum(M: DeltaGModule, N: DeltaGModule) -> DeltaGModule:
    if M.family != N.family or M.ring != N.ring or M.truncation != N.truncation:
        raise ValueError("summands must share family, ring and truncation")
    D = M.truncation

    def diag(a, b):
        return sm.block([a.shape[0], b.shape[0]], [a.shape[1], b.shape[1]], {(0, 0): a, (1, 1): b})

    faces = [[]] + [[diag(M.faces[n][i], N.faces[n][i]) for i in range(n + 1)] for n in range(1, D + 1)]
    degens = [[diag(M.degeneracies[n][i], N.degeneracies[n][i]) for i in range(n + 1)] for n in range(D)] + [[]]
    acts = [{g: diag(M.actions[n][g], N.actions[n][g]) for g in M.actions[n]} for n in range(D + 1)]
    ranks = [a + b for a, b in zip(M.ranks, N.ranks)]
    return DeltaGModule(M.family, D, M.ring, ranks, faces, degens, acts, M.coefficients)


def random_cyclic_module(r: random.Random, D: int = 4, ring: int = 5) -> DeltaGModule:
    """Linearised random cyclic set (one or two summands) after a random basis change."""
    cat = cyclic_catalogue(D)
    M = free_abelian(r.choice(cat), ring=ring)
    if r.randrange(5) < 2:
        M = direct_sum(M, free_abelian(r.choice(cat[:2] + cat[3:7]), ring=ring))
    return random_basis_change(M, r)


# ---------------------------------------------------------------------------
# presheaf maps with known ground truth


def _degenerate_vertex(X: dg.DGSet, v: str, n: int) -> str:
    for k in range(n):
        v = X.degeneracies[k][v][0]
    return v


def collapse_to_vertex(X: dg.DGSet, v: str) -> dg.DGMap:
    """Constant simplicial map ``X -> X`` onto the vertex ``v``."""
    return dg.DGMap(X, X, tuple({x: _degenerate_vertex(X, v, n) for x in X.simplices[n]}
                                for n in range(X.truncation + 1)))


def vertex_inclusion(X: dg.DGSet, v: str) -> dg.DGMap:
    sub = dg.subobject(X, dg.generated_subobject(X, [(v, 0)]))
    return dg.inclusion(sub, X)


def sub_inclusion(A: dg.DGSet, X: dg.DGSet) -> dg.DGMap:
    return dg.inclusion(dg.subobject(X, A.simplices), X)


def _collapsing_presheaf(site, X: dg.DGSet, v: str):
    """``X`` at every object; proper restrictions collapse onto ``v``."""
    from . import site as st
    c = collapse_to_vertex(X, v)
    return st.DGPresheaf(site, {x: X for x in site.objects}, {k: c for k in site.relations()})


def _objectwise(site, F, G, comp):
    from . import site as st
    return st.PresheafMap(F, G, {x: comp for x in site.objects})


def equivalence_corpus(D: int = 3) -> list:
    """Presheaf maps that are objectwise weak equivalences by construction."""
    from . import site as st
    simplex2, simplex1 = dg.simplex(2, D), dg.simplex(1, D)
    base = [
        dg.identity_map(dg.circle(D)),
        dg.identity_map(dg.boundary(3, D)),
        sub_inclusion(dg.horn(2, 1, D), simplex2),
        sub_inclusion(dg.horn(2, 0, D), simplex2),
        dg.terminal_map(simplex1),
        dg.terminal_map(simplex2),
        vertex_inclusion(simplex2, "0|k0e0"),
        vertex_inclusion(simplex1, "1|k0e0"),
    ]
    out = []
    for S in st.corpus_sites().values():
        for f in base:
            out.append(st.constant_map(S, f))
    for S in (st.chain_site(3), st.pseudocircle()):
        for X in (simplex2, simplex1):
            F = _collapsing_presheaf(S, X, "0|k0e0")
            P = st.constant_dg_presheaf(S, dg.point(TRIVIAL_FAMILY, D))
            term = dg.terminal_map(X)
            out.append(_objectwise(S, F, P, term))
    return out[:50]


def distinct_corpus(D: int = 3) -> list:
    """Presheaf maps with a homology or pi_0 difference at some object."""
    from . import site as st
    circle, simplex2 = dg.circle(D), dg.simplex(2, D)
    two_points = dg.boundary(1, D)
    base = [
        dg.terminal_map(circle),
        vertex_inclusion(circle, "*"),
        sub_inclusion(dg.boundary(2, D), simplex2),
        dg.terminal_map(dg.boundary(3, D)),
        sub_inclusion(dg.boundary(3, D), dg.simplex(3, D)),
        dg.terminal_map(two_points),
        vertex_inclusion(dg.boundary(2, D), "0|k0e0"),
        sub_inclusion(two_points, dg.simplex(1, D)),
    ]
    out = []
    for S in st.corpus_sites().values():
        for f in base:
            out.append(st.constant_map(S, f))
    for S in (st.chain_site(3), st.pseudocircle()):
        for X in (dg.boundary(2, D), dg.boundary(3, D)):
            F = _collapsing_presheaf(S, X, "0|k0e0")
            P = st.constant_dg_presheaf(S, dg.point(TRIVIAL_FAMILY, D))
            out.append(_objectwise(S, F, P, dg.terminal_map(X)))
    return out[:50]


def coupled_corpus(D: int = 3, family=CYCLIC) -> list:
    """Coupled maps ``(a, F a)`` between triples ``(A, F A, id)``; half have equivalence legs."""
    from . import site as st
    out = []
    for group in (equivalence_corpus(D), distinct_corpus(D)):
        picked = [f for f in group if len(f.source.site.objects) <= 3][:10]
        for a in picked:
            S = a.source.site
            FA = st.apply_free(family, a.source)
            FA2 = st.apply_free(family, a.target)
            src = st.CoupledPresheaf(a.source, FA, {x: dg.identity_map(FA.sections[x]) for x in S.objects})
            tgt = st.CoupledPresheaf(a.target, FA2, {x: dg.identity_map(FA2.sections[x]) for x in S.objects})
            b = st.apply_free_map(family, a, FA, FA2)
            out.append(st.CoupledMap(src, tgt, a, b))
    return out
