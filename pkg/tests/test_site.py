import json

import pytest
from hypothesis import given, strategies as hs

from xsimp import dgset as dg
from xsimp import generators as gen
from xsimp import site as st
from xsimp import smith as sm
from xsimp.csg import CYCLIC, DIHEDRAL, TRIVIAL
from xsimp.modules import UnsupportedError

D = 3


def labels(H):
    return H.labels()


# ---------------------------------------------------------------------------
# sites and sheafification


def test_site_construction_and_json():
    S = st.pseudocircle()
    assert S.le("a", "c") and not S.le("c", "a")
    assert st.FiniteSite.from_json(json.loads(json.dumps(S.to_json()))).to_json() == S.to_json()
    with pytest.raises(st.SiteError):
        st.make_site(["a", "b"], [("a", "b"), ("b", "a")])
    with pytest.raises(st.SiteError):
        st.make_site(["a"], [("a", "z")])


def _covered_pseudocircle():
    return st.make_site(["a", "b", "c", "d"], [("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")],
                        {"c": [["a", "b"]]})


@hs.composite
def presheaves(draw):
    site = draw(hs.sampled_from([st.covered_site(), _covered_pseudocircle()]))
    ring = draw(hs.sampled_from([0, 3]))
    ranks = {x: draw(hs.integers(0, 2)) for x in site.objects}
    maps = {}
    for a, b in site.relations():
        maps[(a, b)] = sm.as_matrix([[draw(hs.integers(-1, 1)) for _ in range(ranks[b])]
                                     for _ in range(ranks[a])], ranks[a], ranks[b])
    return st.AbPresheaf(site, ring, ranks, maps)


@given(presheaves())
def test_sheafify_is_a_sheaf_and_idempotent(F):
    assert st.validate_presheaf(F).ok
    S = st.sheafify(F).sheaf
    assert st.validate_presheaf(S).ok
    assert st.is_sheaf(S).ok
    again = st.sheafify(S)
    assert again.sheaf.ranks == S.ranks
    assert all(sm.is_invertible(again.unit[x], F.ring) for x in F.site.objects)


def test_sheafify_examples():
    S = st.covered_site()
    C = st.constant_presheaf(S)
    assert not st.is_sheaf(C).ok
    assert st.sheafify(C).sheaf.ranks == {"a": 1, "b": 1, "c": 2}
    A = st.constant_presheaf(st.pseudocircle())
    assert st.is_sheaf(A).ok and st.sheafify(A).sheaf.ranks == A.ranks
    T = st.discrete_site(2)
    F = st.AbPresheaf(T, 0, {"p0": 1, "p1": 0}, {})
    assert st.sheafify(F).sheaf.ranks == F.ranks


# ---------------------------------------------------------------------------
# homotopy sheaves and the refuter


def test_homotopy_sheaves_examples():
    S = st.pseudocircle()
    P = st.constant_dg_presheaf(S, dg.point(TRIVIAL, D))
    assert set(st.homotopy_sheaves(P, 1, 0)["pi0"].values()) == {1}
    C = st.constant_dg_presheaf(S, dg.circle(D))
    assert set(st.homotopy_sheaves(C, 1, 1)["H1"].values()) == {1}
    F = st.constant_dg_presheaf(S, dg.free(CYCLIC, dg.point(TRIVIAL, 5)))
    assert set(st.homotopy_sheaves(F, 2, 0)["pi0"].values()) == {0}


def test_local_refuter_examples():
    S = st.chain_site(3)
    F = st.constant_dg_presheaf(S, dg.circle(D))
    assert not st.local_we_refuter(st.identity_presheaf_map(F)).refuted
    two = dg.boundary(1, D)
    v = st.local_we_refuter(st.constant_map(S, dg.terminal_map(two)))
    assert v.refuted and v.witness["invariant"] == "pi0"


@pytest.fixture(scope="module")
def corpora():
    return gen.equivalence_corpus(D), gen.distinct_corpus(D)


def test_refuter_soundness_and_completeness(corpora):
    eq, dist = corpora
    assert len(eq) == len(dist) == 50
    assert all(st.validate_presheaf_map(f).ok for f in eq + dist)
    assert sum(st.local_we_refuter(f).refuted for f in eq) == 0
    verdicts = [st.local_we_refuter(f) for f in dist]
    assert all(v.refuted and v.witness for v in verdicts)


def test_linearisation_preserves_non_refutation(corpora):
    eq, _ = corpora
    for f in eq[::3]:
        assert not st.local_we_refuter(f, linear=True).refuted


def test_strong_refuter_uses_fixed_points():
    S = st.point_site()
    X = dg.free(CYCLIC, dg.point(TRIVIAL, 5))
    f = st.constant_map(S, dg.terminal_map(X))
    # underlying spaces: free orbit of a point versus a point
    assert st.local_we_refuter(f, r_max=2).refuted


# ---------------------------------------------------------------------------
# cohomology


def test_site_cohomology_examples():
    assert labels(st.site_cohomology(st.point_site(), [0], 2)) == ["Z", "0", "0"]
    assert labels(st.site_cohomology(st.pseudocircle(), [0], 1)) == ["Z", "Z"]
    assert labels(st.site_cohomology(st.boundary_face_poset(3), [0], 2)) == ["Z", "0", "Z"]
    assert labels(st.site_cohomology(st.pseudocircle(), [3], 1)) == ["Z/3", "Z/3"]
    with pytest.raises(UnsupportedError):
        st.site_cohomology(st.covered_site(), [0], 1)


@pytest.mark.parametrize("name", list(st.corpus_sites()))
def test_cech_agrees_with_ordered_chains(name):
    S = st.corpus_sites()[name]
    A = st.constant_presheaf(S)
    H = st.site_cohomology(S, [0], 2)
    C = st.cech_cohomology(A, n_max=2)
    K = st.ordered_chain_cochains(A, 3)
    from xsimp import chain as ch
    O = ch.cochain_cohomology(K, 2)
    assert H.groups() == C.groups() == O.groups()


def test_cech_examples():
    S = st.discrete_site(2)
    A = st.constant_presheaf(S)
    assert st.cech_cohomology(A, ["p0", "p1"], 1).labels() == ["Z^2", "0"]
    P = st.pseudocircle()
    H = st.cech_cohomology(st.constant_presheaf(P, rank=2), ["c"], 1)
    assert H.labels() == ["Z^2", "0"]


def test_parse_group():
    assert st.parse_group("Z") == st.parse_group("0") == [0]
    assert st.parse_group("Z/3") == st.parse_group("3") == [3]
    assert st.parse_group("Z+Z/2") == [0, 2]
    assert st.parse_group("trivial") == []


def test_equivariant_cohomology_point():
    fam = CYCLIC
    assert labels(st.equivariant_cohomology_point(fam, "Z", 4)) == ["Z", "0", "Z", "0", "Z"]
    assert labels(st.equivariant_cohomology_point(fam, "Z/3", 4)) == ["Z/3", "0", "Z/3", "0", "Z/3"]
    assert st.equivariant_cohomology_point(fam, "trivial", 4).ranks == [0] * 5
    with pytest.raises(UnsupportedError):
        st.equivariant_cohomology_point(DIHEDRAL, "Z", 2)
    with pytest.raises(UnsupportedError):
        st.equivariant_cohomology_point(fam, "Z", 2, model="strong")


# ---------------------------------------------------------------------------
# coupled presheaves


def _free_pt_to_circle(S):
    pt_inc = gen.vertex_inclusion(dg.circle(D), "*")
    A = st.constant_dg_presheaf(S, pt_inc.source)
    FA = st.apply_free(CYCLIC, A)
    B2 = st.constant_dg_presheaf(S, dg.free(CYCLIC, dg.circle(D)))
    inc = {x: st.free_map(CYCLIC, pt_inc, FA.sections[x], B2.sections[x]) for x in S.objects}
    return A, FA, B2, inc


def test_coupled_identity_and_identity_legs():
    S = st.chain_site(2)
    P = st.identity_coupled(S, CYCLIC, dg.point(TRIVIAL, D))
    idm = st.CoupledMap(P, P, st.identity_presheaf_map(P.A), st.identity_presheaf_map(P.B))
    assert st.validate_coupled_map(idm).ok
    assert st.coupled_classify(idm).verdict == "weak-equivalence-candidate"
    # identity on A: the pushout is B itself and the comparison map is b
    A, FA, B2, inc = _free_pt_to_circle(S)
    src = st.CoupledPresheaf(A, FA, {x: dg.identity_map(FA.sections[x]) for x in S.objects})
    tgt = st.CoupledPresheaf(A, B2, inc)
    b = st.PresheafMap(FA, B2, inc)
    m = st.CoupledMap(src, tgt, st.identity_presheaf_map(A), b)
    assert st.validate_coupled_map(m).ok
    P, comp, ok = st.pushout_comparison(m)
    assert ok
    for x in S.objects:
        assert P[x].counts() == FA.sections[x].counts()
        assert comp[x].target is B2.sections[x]


def test_coupled_second_leg_refuted():
    S = st.point_site()
    A, FA, B, inc = _free_pt_to_circle(S)
    src = st.CoupledPresheaf(A, B, inc)
    tgt = st.CoupledPresheaf(A, FA, {x: dg.identity_map(FA.sections[x]) for x in S.objects})
    term = gen.vertex_inclusion(dg.circle(D), "*").source
    collapse = dg.dgmap(dg.circle(D), term, [{s: "*" for s in lv} for lv in dg.circle(D).simplices])
    b = st.PresheafMap(B, FA, {x: st.free_map(CYCLIC, collapse, B.sections[x], FA.sections[x])
                               for x in S.objects})
    m = st.CoupledMap(src, tgt, st.identity_presheaf_map(A), b)
    assert st.validate_coupled_map(m).ok
    v = st.coupled_classify(m)
    assert v.verdict != "weak-equivalence-candidate"
    assert not v.legs["A"].refuted and v.legs["B"].refuted


def test_coupled_corpus_conjunction():
    maps = gen.coupled_corpus(D)
    assert len(maps) == 20
    for m in maps:
        assert st.validate_coupled_map(m).ok
        v = st.coupled_classify(m)
        conj = not st.local_we_refuter(m.a).refuted and not st.local_we_refuter(m.b).refuted
        assert (v.verdict == "weak-equivalence-candidate") == conj
        assert v.comparison_valid


def test_unsupported_functor():
    S = st.point_site()
    P = st.identity_coupled(S, CYCLIC, dg.point(TRIVIAL, D))
    P.functor = "free_abelian"
    with pytest.raises(UnsupportedError):
        st.validate_coupled(P)


# ---------------------------------------------------------------------------
# documents


@pytest.mark.parametrize("k", [0, 17, 33, 49])
def test_presheaf_map_json_roundtrip(corpora, k):
    f = corpora[1][k]
    doc = json.loads(json.dumps(st.presheaf_map_to_json(f)))
    g = st.presheaf_map_from_json(doc)
    assert st.presheaf_map_to_json(g) == doc
    assert st.local_we_refuter(g).refuted == st.local_we_refuter(f).refuted


def test_presheaf_json_errors():
    F = st.constant_dg_presheaf(st.chain_site(2), dg.point(TRIVIAL, 2))
    doc = st.presheaf_to_json(F)
    doc["restrictions"] = []
    with pytest.raises(dg.StructuralError, match="restrictions"):
        st.presheaf_from_json(doc)
    doc = st.presheaf_to_json(F)
    del doc["sections"]["c1"]
    with pytest.raises(dg.StructuralError, match=r"sections\.c1"):
        st.presheaf_from_json(doc)
