"""Published numbers: section squares -4 and -6 on two 120-fibre decompositions,
and the rational and K3-type pieces' Euler characteristic and signature."""

from lefschetz import fibration as Fb
from lefschetz.cli import read_fibration

SQUARE_FOUR_COPIES = -4
SQUARE_SIX_COPIES = -6
SINGULAR_FIBRES = 120
# blown-up K3 (two points): e = 24 + 2, sigma = -16 - 2
K3_BLOWN_UP = (26, -18)
# (S^2 x S^2) # 12 CP^2-bar: e = 4 + 12, sigma = 0 - 12
RATIONAL = (16, -12)

CHAIN30 = read_fibration("genus2_chain30.fib")
HYP20 = read_fibration("genus2_hyp20.fib")


def _section_squares(f):
    return {r.self_intersection for r in Fb.enumerate_sections(f).sections}


def test_four_k3_pieces():
    f = CHAIN30 * 4
    assert f.n == SINGULAR_FIBRES
    assert Fb.validate(f).k_standard == -SQUARE_FOUR_COPIES
    assert _section_squares(f) == {SQUARE_FOUR_COPIES}


def test_six_rational_pieces():
    f = HYP20 * 6
    assert f.n == SINGULAR_FIBRES
    assert Fb.validate(f).k_standard == -SQUARE_SIX_COPIES


def test_pieces_are_the_expected_manifolds():
    assert (Fb.euler_char(CHAIN30), Fb.signature_meyer(CHAIN30)) == K3_BLOWN_UP
    assert (Fb.euler_char(HYP20), Fb.signature_meyer(HYP20)) == RATIONAL


def test_two_decompositions_have_equal_invariants():
    a, b = CHAIN30 * 4, HYP20 * 6
    assert Fb.euler_char(a) == Fb.euler_char(b) == 116
    assert Fb.signature_meyer(a) == Fb.signature_meyer(b) == -72


def test_sigma_plus_e_bookkeeping():
    # for Z = W1 + W2: (s1 + e1) + (s2 + e2) = (s + e)(Z) + 2 e(F)
    eF = -2
    s, e = Fb.signature_meyer(CHAIN30), Fb.euler_char(CHAIN30)
    assert s + e == 8
    for w1, w2 in [(CHAIN30, HYP20), (HYP20, HYP20), (CHAIN30, CHAIN30)]:
        z = Fb.fibre_sum(w1, w2)
        lhs = sum(Fb.signature_meyer(w) + Fb.euler_char(w) for w in (w1, w2))
        assert lhs == Fb.signature_meyer(z) + Fb.euler_char(z) + 2 * eF
    assert Fb.split_irreducibility_scan(CHAIN30) == []


def test_trivial_fibration_has_square_zero_section():
    t = Fb.enumerate_sections(read_fibration("trivial_g2.fib"))
    assert [r.self_intersection for r in t.sections] == [0]
