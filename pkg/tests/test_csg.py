import itertools

import pytest
from hypothesis import given, strategies as hs

from xsimp import csg
from xsimp.csg import (CYCLIC, DIHEDRAL, TRIVIAL, CrossedFamily, GroupElement, act_on_index,
                       all_morphisms, compose, coface, crossed_twist, group_order, hom_count,
                       identity_morphism, monotone_maps, twist)

FAMILIES = [CrossedFamily(k) for k in ("trivial", "reflexive", "cyclic", "dihedral")] + [
    CrossedFamily(k, p) for k in ("n-cyclic", "n-dihedral", "quaternionic") for p in (1, 2, 3)]


def table_order(fam, n):
    # independent transcription of the classification table
    R = {"trivial": 1, "reflexive": 1, "cyclic": n + 1, "dihedral": n + 1,
         "n-cyclic": fam.param * (n + 1), "n-dihedral": fam.param * (n + 1),
         "quaternionic": 2 * fam.param * (n + 1)}[fam.kind]
    return R * (2 if fam.kind in ("reflexive", "dihedral", "n-dihedral", "quaternionic") else 1)


def generated(fam, n):
    gens = [fam.generator(g, n) for g in fam.generators]
    seen = {fam.identity(n)}
    frontier = list(seen)
    while frontier:
        frontier = [g * h for g in frontier for h in gens if g * h not in seen]
        seen.update(frontier)
    return seen


@pytest.mark.parametrize("fam", FAMILIES, ids=str)
def test_generated_group_has_table_order(fam):
    for n in range(7):
        G = generated(fam, n)
        assert len(G) == table_order(fam, n) == group_order(fam, n) == len(fam.elements(n))


def test_order_examples():
    assert group_order(CYCLIC, 2) == 3
    assert group_order(TRIVIAL, 7) == 1
    assert group_order(CrossedFamily("quaternionic", 2), 1) == 16


def test_multiplication_examples():
    t1 = CYCLIC.generator("t", 1)
    assert (t1 * t1).is_identity
    t, w = DIHEDRAL.generator("t", 1), DIHEDRAL.generator("w", 1)
    assert w * t * w == t.inverse() == GroupElement(DIHEDRAL, 1, 1, 0) * GroupElement(DIHEDRAL, 1, 0, 0)
    Q = CrossedFamily("quaternionic", 1)
    b, a = Q.generator("b", 0), Q.generator("t", 0)
    # dicyclic group of order 4 at level 0: b^2 = a^(R/2) with R = 2
    assert b * b == a
    assert len({b, b * b, b * b * b, b * b * b * b}) == 4


def test_act_on_index_examples():
    assert act_on_index(CYCLIC.generator("t", 2), 2) == 0
    assert act_on_index(DIHEDRAL.generator("w", 3), 1) == 2
    a = CrossedFamily("n-cyclic", 2).generator("t", 2)
    assert act_on_index(csg.group_power(a, 3), 0) == 0


@pytest.mark.parametrize("fam", FAMILIES, ids=str)
def test_action_on_indices_is_a_homomorphism(fam):
    for n in range(5):
        els = fam.elements(n)
        for a, b in itertools.product(els, els):
            for i in range(n + 1):
                assert act_on_index(a * b, i) == act_on_index(a, act_on_index(b, i))


def test_twist_examples():
    g = CYCLIC.identity(2)
    assert crossed_twist(g, "face", 1) == (CYCLIC.identity(1), 1)
    # t_2 o delta_0 hits {1, 2} rotated to {2, 0}: it equals delta_1 o t_1
    op, h = twist(CYCLIC.generator("t", 2), coface(2, 0))
    assert op == coface(2, 1) and h == CYCLIC.generator("t", 1)
    w2 = DIHEDRAL.generator("w", 2)
    op, h = twist(w2, coface(2, 1))
    assert op == coface(2, 1) and h == DIHEDRAL.generator("w", 1)


def _as_map(f):
    """Underlying map of [m] -> [n]: first the automorphism, then the operator."""
    return tuple(f.op(act_on_index(f.g, x)) for x in range(f.source + 1))


@pytest.mark.parametrize("fam", FAMILIES[:7], ids=str)
def test_twist_agrees_with_underlying_maps(fam):
    for n in range(1, 4):
        for g in fam.elements(n):
            for op in monotone_maps(n - 1, n):
                op2, h = twist(g, op)
                lhs = tuple(act_on_index(g, op(x)) for x in range(n))
                rhs = tuple(op2(act_on_index(h, x)) for x in range(n))
                assert lhs == rhs


@pytest.mark.parametrize("fam", FAMILIES, ids=str)
def test_twist_confluence(fam):
    # pushing g past d_i d_j equals pushing past d_{j-1} d_i (i < j) and past the composite
    for n in range(2, 5):
        for g in fam.elements(n):
            for i, j in itertools.combinations(range(n + 1), 2):
                a = coface(n, j).compose(coface(n - 1, i))
                b = coface(n, i).compose(coface(n - 1, j - 1))
                assert a == b
                o1, g1 = twist(g, coface(n, j))
                o2, g2 = twist(g1, coface(n - 1, i))
                assert (o1.compose(o2), g2) == twist(g, a)


def test_hom_count_examples():
    assert hom_count(TRIVIAL, 1, 1) == 3
    assert hom_count(CYCLIC, 1, 1) == 6
    assert hom_count(DIHEDRAL, 0, 0) == 2


@pytest.mark.parametrize("fam", FAMILIES, ids=str)
def test_canonical_pairs_are_distinct_and_closed(fam):
    for m, n in itertools.product(range(4), repeat=2):
        pairs = [(img, g) for img in itertools.combinations_with_replacement(range(n + 1), m + 1)
                 for g in fam.elements(m)]
        mors = all_morphisms(fam, m, n)
        assert len(set(mors)) == len(pairs) == hom_count(fam, m, n)
    for m, k, n in itertools.product(range(3), repeat=3):
        homs = set(all_morphisms(fam, k, n))
        for f1 in all_morphisms(fam, m, k)[:12]:
            for f2 in all_morphisms(fam, k, n)[:12]:
                assert compose(f2, f1) in set(all_morphisms(fam, m, n))
                assert f2 in homs


def test_compose_identity():
    f = all_morphisms(CYCLIC, 1, 2)[7]
    assert compose(f, identity_morphism(CYCLIC, 1)) == f
    assert compose(identity_morphism(CYCLIC, 2), f) == f


def test_brute_force_composite_in_small_hom():
    # (delta_0, id) o (id, t_1) among the six maps [1] -> [1] ... restricted to [0] -> [1]
    d0 = csg.from_operator(CYCLIC, coface(1, 0))
    t0 = csg.from_group(CYCLIC.generator("t", 0)) if CYCLIC.rotation_order(0) > 1 else identity_morphism(CYCLIC, 0)
    out = compose(d0, t0)
    assert out in all_morphisms(CYCLIC, 0, 1)
    t1 = csg.from_group(CYCLIC.generator("t", 1))
    out = compose(t1, d0)
    assert _as_map(out) == tuple(act_on_index(CYCLIC.generator("t", 1), v) for v in _as_map(d0))


@hs.composite
def triples(draw):
    fam = draw(hs.sampled_from(FAMILIES))
    a, b, c, d = (draw(hs.integers(0, 3)) for _ in range(4))
    pick = lambda m, n: draw(hs.sampled_from(all_morphisms(fam, m, n)))
    return pick(a, b), pick(b, c), pick(c, d)


@given(triples())
def test_compose_associative(t):
    f, g, h = t
    assert compose(h, compose(g, f)) == compose(compose(h, g), f)


@given(triples())
def test_composite_underlying_map(t):
    f, g, _ = t
    assert _as_map(compose(g, f)) == tuple(_as_map(g)[v] for v in _as_map(f))


def test_family_json_roundtrip():
    for fam in FAMILIES:
        assert CrossedFamily.from_json(fam.to_json()) == fam
    with pytest.raises(csg.FamilyError):
        CrossedFamily("cyclic", 2)
    with pytest.raises(csg.FamilyError):
        CrossedFamily("heptagonal")
