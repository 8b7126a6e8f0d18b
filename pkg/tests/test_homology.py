import numpy as np
import pytest
from hypothesis import given, strategies as hs

from xsimp import chain as ch
from xsimp import dgset as dg
from xsimp import generators as gen
from xsimp import modules as mod
from xsimp import smith as sm
from xsimp.chain import ChainComplex
from xsimp.csg import CYCLIC, TRIVIAL

from oracles import bar_homology

CORPUS = [dg.simplex(2, 4), dg.boundary(3, 4), dg.circle(4), dg.underlying(dg.sphere(CYCLIC, 1, 4)),
          dg.sphere(TRIVIAL, 2, 4, model="minimal"), dg.horn(2, 1, 4)]

matrices = hs.integers(1, 5).flatmap(lambda m: hs.integers(1, 5).flatmap(
    lambda n: hs.lists(hs.lists(hs.integers(-6, 6), min_size=n, max_size=n), min_size=m, max_size=m)))


def test_smith_examples():
    U, S, V = sm.smith([[2, 0], [0, 3]])
    assert S.tolist() == [[1, 0], [0, 6]]
    U, S, V = sm.smith([[0, 0], [0, 0]])
    assert not S.any()
    assert sm.smith(sm.eye(3))[1].tolist() == sm.eye(3).tolist()


@given(matrices)
def test_smith_certificate(rows):
    A = sm.as_matrix(rows)
    U, S, V = sm.smith(A)
    assert (U.dot(A).dot(V) == S).all()
    assert abs(round(np.linalg.det(U.astype(float)))) == 1 and abs(round(np.linalg.det(V.astype(float)))) == 1
    d = [S[i, i] for i in range(min(S.shape)) if S[i, i]]
    assert all(b % a == 0 for a, b in zip(d, d[1:]))
    off = S.copy()
    for i in range(min(S.shape)):
        off[i, i] = 0
    assert not off.any()


@given(matrices, hs.sampled_from([2, 3, 5, 7]))
def test_backends_agree(rows, p):
    A = sm.as_matrix(rows)
    assert sm.elementary_divisors(A, backend="cython") == sm.elementary_divisors(A, backend="python")
    assert sm.rank(A, p, backend="cython") == sm.rank(A, p, backend="python")
    assert sm.elementary_divisors(A) == [x for x in np.diag(sm.smith(A)[1]) if x]


def test_homology_examples():
    assert ch.homology(ChainComplex(0, [1, 1], {1: [[0]]})).labels() == ["Z", "Z"]
    assert ch.homology(ChainComplex(0, [1, 1], {1: [[2]]})).labels() == ["Z/2", "0"]
    assert ch.homology(ch.chains(dg.boundary(3, 4)), 2).labels() == ["Z", "0", "Z"]
    assert ch.homology(ch.chains(dg.simplex(0, 3))).labels() == ["Z", "0", "0", "0"]
    assert ch.homology(ch.chains(dg.circle(3)), 1).labels() == ["Z", "Z"]
    with pytest.raises(ch.ComplexError):
        ChainComplex(0, [1, 1, 1], {1: [[1]], 2: [[1]]})


def _hand_torus():
    # minimal torus CW-chains: one vertex, edges a, b, c, two triangles
    return ChainComplex(0, [1, 3, 2], {1: [[0, 0, 0]], 2: [[1, 1], [1, 1], [-1, -1]]})


def test_free_cyclic_circle_is_a_torus():
    H = ch.homology(ch.chains(dg.underlying(dg.sphere(CYCLIC, 1, 3))), 2)
    assert H.groups() == ch.homology(_hand_torus()).groups()


@pytest.mark.parametrize("X", CORPUS, ids=repr)
def test_boundaries_square_to_zero_and_renaming_invariance(X):
    C = ch.chains(X)
    for n in range(2, C.top + 1):
        assert sm.is_zero(sm.matmul(C.d(n - 1), C.d(n)))
    Y = dg.rename(X, [{x: f"r{n}.{x}" for x in X.simplices[n]} for n in range(X.truncation + 1)])
    assert ch.homology(ch.chains(Y)).groups() == ch.homology(C).groups()


@pytest.mark.parametrize("X", CORPUS, ids=repr)
@pytest.mark.parametrize("p", [2, 3])
def test_universal_coefficients_over_primes(X, p):
    HZ = ch.homology(ch.chains(X))
    Hp = ch.homology(ch.chains(X, ring=p))
    for k in range(HZ.ranks.__len__() - 1):
        tors = lambda j: sum(1 for q in HZ.torsion[j] if q % p == 0) if j >= 0 else 0
        assert Hp.ranks[k] == HZ.ranks[k] + tors(k) + tors(k - 1)


def test_torsion_complex_over_primes():
    C = ChainComplex(0, [1, 1, 1], {1: [[2]], 2: [[0]]})
    assert ch.homology(C).labels() == ["Z/2", "0", "Z"]
    assert ch.homology(ChainComplex(2, C.ranks, C.boundaries)).ranks == [1, 1, 1]
    assert ch.homology(ChainComplex(3, C.ranks, C.boundaries)).ranks == [0, 0, 1]


# ---------------------------------------------------------------------------
# Dold-Kan


def test_constant_module_moore_complex():
    M = mod.constant_module(TRIVIAL, 3)
    assert mod.moore(M).complex.ranks == [1, 0, 0, 0]
    L = mod.free_abelian(dg.point(TRIVIAL, 3))
    assert mod.moore(L).complex.ranks == [1, 0, 0, 0]


def test_dk_inverse_ranks():
    B = mod.dk_inverse(ChainComplex(0, [0, 1]), 2)
    assert B.ranks == [0, 1, 2]


@pytest.mark.parametrize("X", CORPUS, ids=repr)
def test_linearised_homology_matches_simplicial(X):
    M = mod.free_abelian(X)
    assert mod.module_homology(M).groups() == ch.homology(ch.chains(X)).groups()
    for lv in M.actions:
        for A in lv.values():
            assert sorted(A.sum(axis=0).tolist()) == [1] * A.shape[1]


def test_action_matrices_are_permutations():
    M = mod.free_abelian(dg.standard(CYCLIC, 1, 3))
    for lv in M.actions:
        A = lv["t"]
        assert set(A.flat) <= {0, 1}
        assert (A.sum(axis=0) == 1).all() and (A.sum(axis=1) == 1).all()


@given(hs.integers(0, 10_000))
def test_dold_kan_roundtrip_random(k):
    r = gen.rng(k)
    M = mod.random_basis_change(mod.free_abelian(r.choice(gen.cyclic_catalogue(3)), ring=5), r).underlying()
    assert mod.dk_roundtrip_module(M)


@given(hs.integers(0, 10_000))
def test_dold_kan_roundtrip_complex(k):
    r = gen.rng(k)
    ranks = [r.randint(0, 2) for _ in range(4)]
    bds = {}
    for n in range(1, 4):
        A = np.array([[r.randint(-2, 2) for _ in range(ranks[n])] for _ in range(ranks[n - 1])], dtype=object)
        bds[n] = A.reshape(ranks[n - 1], ranks[n])
    # force d^2 = 0 by zeroing later boundaries when needed
    for n in range(2, 4):
        if sm.matmul(bds[n - 1], bds[n]).any():
            bds[n] = sm.zeros(ranks[n - 1], ranks[n])
    C = ChainComplex(5, ranks, bds)
    assert mod.dk_roundtrip_complex(C, 3)


# ---------------------------------------------------------------------------
# Eilenberg-MacLane objects


def test_bar_oracle_sanity():
    assert bar_homology(2, 3) == [(1, ()), (0, (2,)), (0, ()), (0, (2,))]


@pytest.mark.parametrize("q", [2, 3])
def test_em_homology_against_bar_resolution(q):
    H = mod.em_homology(TRIVIAL, [q], 1, 4)
    assert H.trusted_groups() == bar_homology(q, 3)


def test_em_examples():
    assert mod.em_homology(TRIVIAL, [0], 1, 3).trusted_groups() == [(1, ()), (1, ()), (0, ())]
    assert mod.em_homotopy(TRIVIAL, [0], 1, 3).trusted_groups() == [(0, ()), (1, ()), (0, ())]


@pytest.mark.parametrize("A,n", [([2], 1), ([2], 2), ([3], 1), ([0], 2), ([0, 2], 2)])
def test_em_reduced_homology_vanishes_below_n(A, n):
    pi = mod.em_homotopy(TRIVIAL, A, n, 4)
    assert all(pi.group(k) == (0, ()) for k in range(n))
    expect_rank = sum(1 for q in A if q == 0)
    assert pi.group(n) == (expect_rank, tuple(sorted(q for q in A if q)))
    if all(A):
        H = mod.em_homology(TRIVIAL, A, n, 4)
        assert all(H.group(k) == (0, ()) for k in range(1, n))
