import numpy as np
import pytest
from hypothesis import given, strategies as st

from lefschetz import words as W
from lefschetz.mapping_class import (
    CurveSpec,
    MappingClass,
    boundary_twist_power,
    compose,
    format_twist_word,
    homology_action,
    intersection_form,
    is_symplectic,
    is_trivial_closed,
    parse_twist_word,
    standard_curve_ids,
    standard_twist,
    transvection,
    twist_about,
    twist_word_class,
)

G = 2
IDS = standard_curve_ids(G)
CHAIN = ["c1", "c2", "c3", "c4", "c5"]


def t(c, s=1, g=G):
    return standard_twist(c, s, g)


def chain_adjacent(i, j):
    return abs(i - j) == 1


def test_curve_ids():
    assert IDS == ["c1", "c2", "c3", "c4", "c5", "s1"]
    assert len(standard_curve_ids(3)) == 8
    with pytest.raises(ValueError):
        t("c6")
    with pytest.raises(ValueError):
        t("c1", 2)


@pytest.mark.parametrize("g", [2, 3])
@pytest.mark.parametrize("s", [1, -1])
def test_twists_fix_boundary(g, s):
    d = W.boundary_word(g)
    for c in standard_curve_ids(g):
        assert t(c, s, g)(d) == d


@pytest.mark.parametrize("g", [2, 3])
def test_homology_is_a_transvection(g):
    # independent check: Picard-Lefschetz on H_1 from the curve's homology class
    for c in standard_curve_ids(g):
        h = CurveSpec(c).homology(g)
        assert np.array_equal(homology_action(t(c, 1, g)), transvection(h, g))


def test_separating_twist_acts_trivially_on_homology():
    assert CurveSpec("s1").is_separating(G)
    assert np.array_equal(homology_action(t("s1")), np.eye(4, dtype=np.int64))


@pytest.mark.parametrize("g", [2, 3])
def test_braid_and_commutation(g):
    ids = [f"c{i}" for i in range(1, 2 * g + 2)]
    for i, a in enumerate(ids):
        for j, b in enumerate(ids):
            if j <= i:
                continue
            ta, tb = t(a, 1, g), t(b, 1, g)
            if chain_adjacent(i, j):
                assert ta @ tb @ ta == tb @ ta @ tb
            else:
                assert ta @ tb == tb @ ta


def test_inverse():
    for c in IDS:
        assert t(c) @ t(c, -1) == MappingClass.identity(G)


def test_chain_relations_give_one_boundary_twist():
    assert boundary_twist_power([t(c) for c in CHAIN[:4]] * 10) == 1
    assert boundary_twist_power([t(c) for c in CHAIN] * 6) == 1
    assert boundary_twist_power([t(c) for c in CHAIN[:2]] * 6) is None


def test_hyperelliptic_relation():
    word = [t(c) for c in CHAIN + CHAIN[::-1]] * 2
    assert boundary_twist_power(word) == 1


def test_is_trivial_closed_examples():
    ok, u = is_trivial_closed(MappingClass.identity(G))
    assert ok and u == ()
    ok, u = is_trivial_closed(MappingClass.boundary_twist(G, 3))
    assert ok
    assert not is_trivial_closed(t("c1"))[0]
    assert not is_trivial_closed(t("s1"))[0]
    assert not is_trivial_closed(compose([t(c) for c in CHAIN], G))[0]


def test_trivial_closed_witness_conjugates_generators():
    m = compose([t(c) for c in CHAIN] * 6, G)
    ok, u = is_trivial_closed(m)
    assert ok
    for x in range(1, 2 * G + 1):
        assert W.equal_in_surface_group(W.conjugate(u, (x,)), m((x,)), G)


# -- properties

twist_letters = st.tuples(st.sampled_from(IDS), st.sampled_from([1, -1]))
twist_words = st.lists(twist_letters, max_size=6).map(tuple)


@given(twist_words, twist_words)
def test_homology_is_a_homomorphism(u, v):
    mu, mv = twist_word_class(u, G), twist_word_class(v, G)
    assert np.array_equal(homology_action(mu @ mv), homology_action(mu) @ homology_action(mv))


@given(twist_words)
def test_homology_action_is_symplectic(u):
    assert is_symplectic(homology_action(twist_word_class(u, G)), G)


@given(twist_words, st.sampled_from(IDS))
def test_conjugated_twist_is_twist_about_image(u, c):
    # t_{h(c)} = h t_c h^-1, checked on homology against the transvection of h_*[c]
    curve = CurveSpec(c, u)
    h = homology_action(twist_word_class(u, G)) @ CurveSpec(c).homology(G)
    assert np.array_equal(homology_action(twist_about(curve, 1, G)), transvection(h, G))
    assert np.array_equal(curve.homology(G), h)


@given(twist_words, twist_words)
def test_boundary_power_additive_and_conjugation_invariant(u, v):
    hyper = [t(c) for c in CHAIN + CHAIN[::-1]] * 2
    m = twist_word_class(u, G)
    conj = [m @ x @ m.inverse() for x in hyper]
    assert boundary_twist_power(conj) == 1
    assert boundary_twist_power(hyper + conj) == 2


@given(twist_words)
def test_twist_word_text_round_trip(u):
    assert parse_twist_word(format_twist_word(u)) == u


def test_twist_word_syntax():
    assert parse_twist_word("t1 T2 s1") == (("c1", 1), ("c2", -1), ("s1", 1))
    with pytest.raises(ValueError):
        parse_twist_word("x3")


def test_intersection_form():
    J = intersection_form(G)
    a1, b1 = CurveSpec("c1").homology(G), CurveSpec("c2").homology(G)
    assert a1 @ J @ b1 == 1
    assert np.array_equal(J, -J.T)
