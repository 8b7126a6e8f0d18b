import pytest
from hypothesis import given, strategies as hs

from xsimp import chain as ch
from xsimp import dgset as dg
from xsimp import generators as gen
from xsimp import subdivision as sd
from xsimp.csg import CYCLIC, DIHEDRAL, TRIVIAL, CrossedFamily


def corpus(D):
    return {"simplex2": dg.simplex(2, D), "boundary3": dg.boundary(3, D), "circle": dg.circle(D),
            "torus": dg.sphere(CYCLIC, 1, D)}


def discrete(fam, names, D):
    """Constant object on a finite set with every generator acting trivially."""
    ids = {x: x for x in names}
    return dg.make(fam, D, [list(names)] * (D + 1),
                   [{}] + [{x: (x,) * (n + 1) for x in names} for n in range(1, D + 1)],
                   [{x: (x,) * (n + 1) for x in names} for n in range(D)] + [{}],
                   [{g: dict(ids) for g in fam.generators} for _ in range(D + 1)])


def H(X, top=None):
    return ch.homology(ch.chains(dg.underlying(X)), top)


@pytest.mark.parametrize("name", list(corpus(5)))
@pytest.mark.parametrize("r", [1, 2, 3])
def test_edgewise_validates(name, r):
    X = corpus(5)[name]
    assert dg.validate(sd.edgewise(X, r)).ok


@pytest.mark.parametrize("name", list(corpus(5)))
def test_segal_and_dihedral_validate(name):
    X = corpus(5)[name]
    assert dg.validate(sd.segal(X)).ok
    assert dg.validate(sd.dihedral_sbd(X, 1)).ok
    assert dg.validate(sd.dihedral_sbd(corpus(7)[name], 2)).ok


@pytest.mark.parametrize("name", list(corpus(5)))
def test_homology_invariance(name):
    for D, r in ((5, 2), (8, 3)):
        X = corpus(D)[name]
        Y = sd.edgewise(X, r)
        k = Y.truncation - 1
        assert H(Y, k).groups() == H(X, k).groups()
    X = corpus(5)[name]
    Y = sd.segal(X)
    k = Y.truncation - 1
    assert H(Y, k).groups() == H(X, k).groups()


def test_figure_counts():
    for Y in (sd.edgewise(dg.simplex(2, 5), 2), sd.segal(dg.simplex(2, 5))):
        assert Y.f_vector()[:3] == [6, 9, 4]
        assert 6 - 9 + 4 == 1


def test_subdivision_examples():
    X = dg.simplex(2, 4)
    assert dg.to_json(sd.edgewise(X, 1)) == dg.to_json(X)
    assert sd.segal(dg.point(TRIVIAL, 3)).counts() == [1, 1]
    assert dg.to_json(sd.dihedral_sbd(X, 1)) == dg.to_json(sd.segal(X))
    Y = sd.dihedral_sbd(dg.simplex(2, 11), 2)
    assert Y.euler_characteristic(2) == 1
    assert H(sd.dihedral_sbd(dg.circle(11), 2), 1).labels() == ["Z", "Z"]
    assert H(sd.edgewise(dg.circle(5), 2), 1).labels() == ["Z", "Z"]
    assert H(sd.segal(dg.boundary(3, 5)), 1).labels()[:2] == ["Z", "0"]
    assert H(sd.segal(dg.boundary(3, 7)), 2).labels() == ["Z", "0", "Z"]


def test_too_small_truncation_rejected():
    with pytest.raises(dg.ConstructionError):
        sd.edgewise(dg.simplex(1, 1), 3)
    with pytest.raises(dg.ConstructionError):
        sd.segal(dg.simplex(0, 0))


# ---------------------------------------------------------------------------
# actions and fixed points


def test_edgewise_action_level_zero_is_rotation():
    for r in (2, 3):
        X = dg.standard(CYCLIC, 1, 5)
        G = sd.induced_action(X, "edgewise", r)
        assert G.generators["t"][0] == X.actions[r - 1]["t"]
        assert G.order == r


def test_free_point_action_swaps():
    X = dg.free(CYCLIC, dg.point(TRIVIAL, 3))
    G = sd.induced_action(X, "edgewise", 2)
    tab = G.generators["t"][0]
    a, b = X.simplices[1]
    assert tab[a] == b and tab[b] == a


def test_trivial_action_induces_trivial_action():
    X = discrete(CYCLIC, ["a", "b"], 5)
    G = sd.induced_action(X, "edgewise", 2)
    assert all(t[x] == x for t in G.generators["t"] for x in t)
    assert sd.fixed_points(G, ["t"]).counts() == G.space.counts()


@pytest.mark.parametrize("fam,kind,r,order", [
    (CYCLIC, "edgewise", 2, 2), (CYCLIC, "edgewise", 3, 3), (DIHEDRAL, "segal", 1, 2),
    (DIHEDRAL, "dihedral", 2, 4), (CrossedFamily("quaternionic", 1), "dihedral", 1, 4)])
def test_induced_relations_and_orders(fam, kind, r, order):
    D = 7 if kind == "dihedral" else 5
    X = dg.standard(fam, 1, D)
    G = sd.induced_action(X, kind, r)
    assert sd.validate_action(G).ok
    assert G.order == order


def _closed(S, keep):
    return dg.is_subobject(S, keep).ok


@pytest.mark.parametrize("X", [dg.standard(CYCLIC, 1, 7), dg.sphere(CYCLIC, 1, 7),
                               dg.free(CYCLIC, dg.boundary(2, 7)), discrete(CYCLIC, ["a"], 7)], ids=repr)
def test_fixed_points_are_subobjects_and_monotone(X):
    G = sd.induced_action(X, "edgewise", 2)
    whole = sd.fixed_points(G, ["e"])
    assert whole.counts() == G.space.counts()
    F1 = sd.fixed_points(G, ["t"])
    F2 = sd.fixed_points(G, ["t", "t^2"])
    assert dg.validate(F1).ok
    assert _closed(G.space, F1.simplices)
    assert all(set(b) <= set(a) for a, b in zip(F1.simplices, F2.simplices))
    assert all(set(b) <= set(a) for a, b in zip(whole.simplices, F1.simplices))


def test_fixed_point_examples():
    P = dg.point(CYCLIC, 5)
    for r in (2, 3):
        F = sd.phi(P, r)
        assert dg.validate(F).ok and F.counts() == [1] * (F.truncation + 1)
    assert sd.phi(dg.free(CYCLIC, dg.point(TRIVIAL, 5)), 2).counts() == [0, 0, 0]
    # the representable is the free object on a point, so its fixed points are empty too
    rep = dg.standard(CYCLIC, 0, 5)
    assert rep.counts() == dg.free(CYCLIC, dg.point(TRIVIAL, 5)).counts()
    assert sd.phi(rep, 2).counts() == [0, 0, 0]
    assert sd.gamma(dg.point(DIHEDRAL, 7), 1).counts() == [1] * 4


def test_so2_fix():
    assert sd.so2_fix(dg.standard(CYCLIC, 0, 3)) == []
    assert sd.so2_fix(discrete(CYCLIC, ["a", "b", "c"], 3)) == ["a", "b", "c"]
    assert sd.so2_fix(dg.point(CYCLIC, 2)) == ["*"]
    for X in (dg.simplex(1, 3), dg.boundary(2, 3), dg.circle(3)):
        assert sd.so2_fix(dg.free(CYCLIC, X)) == []


# ---------------------------------------------------------------------------
# refuter


def test_refuter_examples():
    S = dg.circle(3)
    assert not sd.we_refuter(dg.identity_map(S)).refuted
    v = sd.we_refuter(dg.terminal_map(S))
    assert v.refuted and v.witness
    assert not sd.we_refuter(gen.sub_inclusion(dg.horn(2, 1, 3), dg.simplex(2, 3))).refuted


@given(hs.integers(0, 49))
def test_refuter_is_sound_on_equivalences(k):
    f = gen.equivalence_corpus()[k]
    for x, m in f.components.items():
        assert not sd.we_refuter(m).refuted
