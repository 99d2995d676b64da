import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from weyldisp import build_system, cap_certificate, downward_closure, dual_class, enumerate_class
from weyldisp.errors import ClassTooLarge, NotInvolutionClass, NotTwistedInvolution
from weyldisp.twisted import (
    classify_bicapped,
    involution_classes,
    is_sigma_involution,
    twisted_commuting_subsets,
    twisted_step,
)

RANK_LE_5 = ["A2", "A3", "A4", "A5", "B2", "B3", "B4", "B5", "D4", "D5", "F4", "H3", "H4", "I2(5)", "I2(8)"]


def _involutive(S):
    return [a for a in S.diagram_automorphisms() if a.order <= 2]


def test_identity_class():
    for t in ["A3", "E6", "I2(7)"]:
        S = build_system(t)
        c = enumerate_class(S, S.identity())
        assert len(c) == 1 and S.identity() in c


def test_class_cap():
    S = build_system("E6")
    with pytest.raises(ClassTooLarge):
        enumerate_class(S, S.element_from_word([1, 2, 3, 4, 5, 6]), cap=100)


def test_is_sigma_involution():
    A3 = build_system("A3")
    assert is_sigma_involution(A3, A3.identity())
    assert is_sigma_involution(A3, A3.w0, A3.opposition())
    assert not is_sigma_involution(A3, A3.element_from_word([1, 2]))
    D4 = build_system("D4")
    assert not is_sigma_involution(D4, D4.identity(), D4.sigma_by_name("triality"))


def test_downward_closure_identity():
    S = build_system("B3")
    J, v, trace = downward_closure(S, S.identity())
    assert J == frozenset() and v == S.identity() and trace == []


def test_downward_closure_e7_already_minimal():
    E7 = build_system("E7")
    w = E7.element_from_word([3, 5, 7])
    J, v, trace = downward_closure(E7, w)
    assert J == {3, 5, 7} and trace == []
    c = enumerate_class(E7, w)
    assert c.min_length == 3


def test_downward_closure_b4_matches_classfacts_minimum():
    B4 = build_system("B4")
    # n=4, i=3: the class of s1 w_{>=4} w0, whose shortest element is s1 s4
    w = B4.multiply(B4.element_from_word([1, 4]), B4.w0)
    J, v, trace = downward_closure(B4, w)
    wJ = B4.longest_element(J)
    assert B4.multiply(B4.multiply(B4.invert(v), w), v) == wJ
    assert B4.length(wJ) == B4.length(w) - 2 * B4.length(v)
    c = enumerate_class(B4, w)
    s1s4 = B4.element_from_word([1, 4])
    assert s1s4 in c and wJ in c and B4.length(wJ) == c.min_length == 2


def test_downward_closure_rejects_non_involution():
    S = build_system("A3")
    with pytest.raises(NotTwistedInvolution):
        downward_closure(S, S.element_from_word([1, 2]))


@pytest.mark.parametrize("t", ["A4", "B4", "D5", "E6", "F4"])
def test_downward_closure_random(t):
    S = build_system(t)
    rng = random.Random(3)
    for sigma in _involutive(S):
        for _ in range(15):
            v = S.element_from_word([rng.choice(S.labels) for _ in range(10)])
            base = S.longest_element(rng.choice(twisted_commuting_subsets(S, sigma)))
            w = S.multiply(S.multiply(S.invert(v), base), S.apply_sigma(sigma, v))
            J, u, trace = downward_closure(S, w, sigma)
            wJ = S.longest_element(J)
            assert S.multiply(S.multiply(S.invert(u), w), S.apply_sigma(sigma, u)) == wJ
            assert all(twisted_step(S, wJ, s, sigma) == wJ for s in J)


def test_cap_certificate_identity_class():
    for t in ["A5", "E7", "H3"]:
        S = build_system(t)
        cert = cap_certificate(enumerate_class(S, S.identity()))
        assert cert.bicapped and cert.lower_J == frozenset()
        assert cert.fix_rank == S.rank and cert.opp_rank == 0


def test_cap_certificate_e7_d4_class():
    E7 = build_system("E7")
    c = enumerate_class(E7, E7.longest_element({2, 3, 4, 5}))
    cert = cap_certificate(c)
    assert cert.bicapped and cert.lower_J == {2, 3, 4, 5} and cert.upper_Jprime == {2, 5, 7}
    assert (cert.fix_rank, cert.opp_rank) == (3, 4)


def test_a3_flip_class_of_s1w0():
    A3 = build_system("A3")
    flip = A3.opposition()
    c = enumerate_class(A3, A3.multiply(A3.generator(1), A3.w0), flip)
    words = {tuple(A3.reduced_word(w)) for w in c}
    expected = [[2], [1, 2, 3], [3, 2, 1], [1, 2, 1, 3, 2], [1, 3, 2, 3, 1], [2, 1, 3, 2, 1]]
    assert {A3.element_from_word(w) for w in expected} == set(c)
    assert len(words) == 6
    cert = cap_certificate(c)
    # a unique shortest element (s2) but two longest ones
    assert cert.min_unique and not cert.max_unique


def test_cap_certificate_rejects_non_involutions():
    S = build_system("A3")
    with pytest.raises(NotInvolutionClass):
        cap_certificate(enumerate_class(S, S.element_from_word([1, 2])))


def test_dual_class_examples():
    E7 = build_system("E7")
    one = enumerate_class(E7, E7.identity())
    d = dual_class(one)
    assert set(d) == {E7.w0}
    c = enumerate_class(E7, E7.element_from_word([2, 5, 7]))
    dc = dual_class(c)
    assert E7.longest_element({2, 3, 4, 5}) in dc


def test_dual_class_involutive_d5():
    D5 = build_system("D5")
    rng = random.Random(11)
    G = D5.enumerate_group()
    for _ in range(20):
        w = rng.choice(G)
        sigma = rng.choice(D5.diagram_automorphisms())
        c = enumerate_class(D5, w, sigma)
        back = dual_class(dual_class(c))
        assert back.same_set(c) and back.sigma == c.sigma


@pytest.mark.parametrize("t", RANK_LE_5)
def test_minima_are_parabolic_longest_elements(t):
    S = build_system(t)
    for sigma in _involutive(S):
        for c in involution_classes(S, sigma):
            orbit_counts = set()
            for m in c.min_elements:
                J = frozenset(S.left_descents(m))
                assert S.longest_element(J) == m
                assert all(twisted_step(S, m, s, sigma) == m for s in J)
                orbit_counts.add(len(sigma.orbits(set(S.labels) - J)))
            assert len(orbit_counts) == 1


@pytest.mark.parametrize("t", ["E6", "E7"])
def test_minima_spot_check_large(t):
    S = build_system(t)
    sigma = S.identity_sigma()
    for J in [{2, 3, 4, 5}, {2, 5, 7} & set(S.labels), {1}, {1, 6}]:
        c = enumerate_class(S, S.longest_element(J), sigma, cap=10**6)
        for m in c.min_elements:
            K = frozenset(S.left_descents(m))
            assert S.longest_element(K) == m


@pytest.mark.parametrize("t", RANK_LE_5)
def test_class_invariants(t):
    S = build_system(t)
    for sigma in S.diagram_automorphisms():
        rng = random.Random(hash(t) & 0xFFFF)
        for _ in range(4):
            w = S.element_from_word([rng.choice(S.labels) for _ in range(rng.randrange(12))])
            c = enumerate_class(S, w, sigma)
            # closed, single length parity
            assert len({S.length(x) % 2 for x in c}) == 1
            for x in c:
                for s in S.labels:
                    assert twisted_step(S, x, s, sigma) in c
            # all or none are sigma-involutions
            assert len({is_sigma_involution(S, x, sigma) for x in c}) == 1
            # order of w w^sigma ... w^(sigma^(k-1)) is constant
            orders = set()
            for x in c:
                y, cur = x, x
                for _ in range(sigma.order - 1):
                    cur = S.apply_sigma(sigma, cur)
                    y = S.multiply(y, cur)
                k, z = 1, y
                while z != S.identity():
                    z = S.multiply(z, y)
                    k += 1
                orders.add(k)
            assert len(orders) == 1


def test_rigid_sets_semantic_vs_conjugation():
    """Unique minimum of Cl(w_J) agrees with the subset-conjugation test."""
    for t in ["A3", "A4", "B3", "B4", "D4", "F4", "H3", "I2(6)"]:
        S = build_system(t)
        G = S.enumerate_group()
        gens = {g.perm: i + 1 for i, g in enumerate(S.generators)}
        for sigma in _involutive(S):
            for J in twisted_commuting_subsets(S, sigma):
                rigid = True
                for w in G:
                    right = S.apply_sigma(sigma, S.invert(w))
                    K = [gens.get(S.multiply(S.multiply(w, S.generator(s)), right).perm) for s in J]
                    if None not in K and set(K) != set(J):
                        rigid = False
                        break
                c = enumerate_class(S, S.longest_element(J), sigma)
                assert (len(c.min_elements) == 1) == rigid, (t, sigma.node_perm, sorted(J))


@pytest.mark.parametrize("t", ["A5", "A6", "B5", "D6", "E6", "F4", "H4", "I2(10)"])
def test_rank_sum(t):
    S = build_system(t)
    for row in classify_bicapped(S):
        assert row.fix_rank + row.opp_rank == S.rank


@given(st.sampled_from(["A3", "B3", "H3", "D4"]), st.data())
def test_class_size_divides_group_order(t, data):
    S = build_system(t)
    word = data.draw(st.lists(st.sampled_from(S.labels), max_size=15))
    sigma = data.draw(st.sampled_from(S.diagram_automorphisms()))
    c = enumerate_class(S, S.element_from_word(word), sigma)
    assert S.order % len(c) == 0
    assert S.element_from_word(word) in c
