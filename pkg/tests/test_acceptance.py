"""Acceptance suite: one test per criterion, each reported as PASS or FAIL in
the terminal summary (see conftest)."""

import numpy as np
import pytest

from lefschetz import fibration as Fb
from lefschetz import hyperbolic as Hy
from lefschetz import teich as T
from lefschetz import words as W
from lefschetz.cli import read_fibration
from lefschetz.fibration import Fibration
from lefschetz.mapping_class import (
    CurveSpec,
    MappingClass,
    compose,
    homology_action,
    standard_curve_ids,
    standard_twist,
    transvection,
)

G = 2
CHAIN30 = read_fibration("genus2_chain30.fib")
HYP20 = read_fibration("genus2_hyp20.fib")
CHAIN40 = read_fibration("genus2_chain40.fib")
TRIVIAL = read_fibration("trivial_g2.fib")
FIXTURES = [CHAIN30, HYP20, CHAIN40, TRIVIAL]
NONTRIVIAL = [CHAIN30, HYP20, CHAIN40]
SAMPLES = 120


def t(c):
    return standard_twist(c, 1, G)


@pytest.mark.criterion(1, "twist conventions: chain identities, braid and commutation relations")
def test_criterion_1_conventions():
    delta = MappingClass.boundary_twist(G)
    assert compose([t(f"c{i}") for i in range(1, 5)] * 10, G).aut == delta.aut
    assert compose([t(f"c{i}") for i in range(1, 6)] * 6, G).aut == delta.aut
    ids = standard_curve_ids(G)
    for a in ids:
        for b in ids:
            if a >= b:
                continue
            i = Hy.geometric_intersection(CurveSpec(a), CurveSpec(b), G)
            ta, tb = t(a), t(b)
            if i == 0:
                assert ta @ tb == tb @ ta, (a, b)
            elif i == 1:
                assert ta @ tb @ ta == tb @ ta @ tb, (a, b)


@pytest.mark.criterion(2, "section squares -4 and -6, 120 singular fibres")
def test_criterion_2_section_squares():
    assert Fb.validate(CHAIN30).k_standard == 1
    assert Fb.validate(HYP20).k_standard == 1
    four = CHAIN30 * 4
    assert four.n == 120
    assert {r.self_intersection for r in Fb.enumerate_sections(four, SAMPLES).sections} == {-4}
    six = HYP20 * 6
    assert six.n == 120
    assert -Fb.validate(six).k_standard == -6
    at_base = [r for r in Fb.enumerate_sections(six, SAMPLES).sections if r.region_id == 0]
    assert at_base and all(r.self_intersection == -6 for r in at_base)


@pytest.mark.criterion(3, "signature and Euler characteristic of fibre sums")
def test_criterion_3_invariant_arithmetic():
    eF = 2 - 2 * G
    for a in FIXTURES:
        for b in FIXTURES:
            s = Fb.fibre_sum(a, b)
            assert Fb.signature_meyer(s) == Fb.signature_meyer(a) + Fb.signature_meyer(b)
            assert Fb.euler_char(s) == Fb.euler_char(a) + Fb.euler_char(b) - 2 * eF
    assert Fb.signature_meyer(CHAIN30) + Fb.euler_char(CHAIN30) == 8


@pytest.mark.criterion(4, "no contiguous split of the 30- and 20-twist words or their Hurwitz variants")
def test_criterion_4_split_scan():
    rng = np.random.default_rng(4)
    for f in (CHAIN30, HYP20):
        assert Fb.split_irreducibility_scan(f) == []
        for _ in range(50):
            g = Fb.random_hurwitz(f, int(rng.integers(1, 4)), rng)
            assert Fb.split_irreducibility_scan(g) == []
    assert 30 in Fb.split_irreducibility_scan(CHAIN30 + CHAIN30)


def _random_fibrations(count, rng):
    out = [TRIVIAL]
    while len(out) < count:
        r = rng.random()
        if r < 0.7:
            f = NONTRIVIAL[int(rng.integers(3))]
        else:
            f = Fb.fibre_sum(NONTRIVIAL[int(rng.integers(2))], NONTRIVIAL[int(rng.integers(2))])
        out.append(Fb.random_hurwitz(f, int(rng.integers(1, 5)), rng))
    return out


@pytest.mark.criterion(5, "no section of nonnegative square except on the empty factorization")
def test_criterion_5_no_positive_square():
    rng = np.random.default_rng(5)
    fibs = _random_fibrations(200, rng)
    computed = 0
    for f in fibs:
        assert Fb.validate(f).trivial_closed
        for r in Fb.enumerate_sections(f, SAMPLES).sections:
            if r.self_intersection is None:
                continue
            computed += 1
            if f.n == 0:
                assert r.self_intersection == 0
            else:
                assert r.self_intersection <= -1, (Fb.format_fibration(f), r)
    assert computed >= 200


@pytest.mark.criterion(6, "filling arrangements and no invariant curve up to conjugator length 3")
def test_criterion_6_filling():
    chain = [CurveSpec(f"c{i}") for i in range(1, 6)]
    arr = Hy.arrangement(chain, G)
    assert (arr.V, arr.E, arr.R, arr.fills) == (4, 8, 2, True)
    arr = Hy.arrangement(chain[:4], G)
    assert arr.fills and arr.R == 1
    assert not Hy.arrangement(chain[1:4], G).fills
    assert not Hy.arrangement(chain[:1], G).fills
    for f in NONTRIVIAL:
        assert Fb.invariant_multicurve_search(f, 3) is None


def _pinned_lifts_one_signed(f):
    arr = Hy.arrangement(list(f.cycles), G)
    cidx = Fb.curve_indices(f, arr)
    twists = f.twists()
    checked = set()
    for reg in arr.regions:
        _, cr = Fb.transport_arc(arr, reg.faces[0])
        pins = Fb.region_pins(cr, cidx)
        for i, (c, p) in enumerate(zip(cidx, pins)):
            if (c, p) in checked:
                continue
            checked.add((c, p))
            cm = Hy.boundary_circle_map(twists[i].aut, G, SAMPLES, p)
            if not cm.is_one_signed():
                return False
    return True


@pytest.mark.criterion(7, "rotation number equals the boundary-twist power; pinned lifts one-signed")
def test_criterion_7_rotation():
    for f in (TRIVIAL, CHAIN30, HYP20, CHAIN30 * 4):
        k = Fb.validate(f).k_standard
        est = Hy.rotation_number([(tw.aut, ()) for tw in f.twists()], G, SAMPLES)
        assert est.integer == k and est.residual < 0.1
        if f.n:
            arr = Hy.arrangement(list(f.cycles), G)
            for r in Fb.enumerate_sections(f, SAMPLES).sections:
                est = Fb.region_rotation(f, arr, arr.regions[r.region_id], SAMPLES)
                assert est.integer == k and est.residual < 0.1
            assert _pinned_lifts_one_signed(f)


@pytest.mark.criterion(8, "finitely many section classes, checked along two transport arcs")
def test_criterion_8_sections():
    for f in NONTRIVIAL:
        table = Fb.enumerate_sections(f, SAMPLES)
        assert len(table.sections) <= table.R
        for r in table.reports:
            assert r.second_arc_agrees
            if r.has_section:
                assert W.dehn_reduce(r.obstruction, G) == ()
    table = Fb.enumerate_sections(TRIVIAL)
    assert len(table.sections) == 1 and table.sections[0].self_intersection == 0


@pytest.mark.criterion(9, "length convexity along twist paths, minimizer restarts, orbit monotonicity")
def test_criterion_9_teichmueller():
    rng = np.random.default_rng(9)
    paths = 0
    while paths < 20:
        f = Fb.random_hurwitz(CHAIN30, int(rng.integers(0, 4)), rng)
        V = list(f.cycles)
        if not T._fills(V):
            continue
        x = T.FNCoords(tuple(rng.uniform(0.5, 3.0, 3)), tuple(rng.uniform(-1.0, 1.0, 3)))
        vals = T.twist_path(V, x, int(rng.integers(3)), span=1.0, points=21)
        assert np.diff(vals, 2).min() >= -1e-6
        paths += 1
    rep = T.minimize_length([CurveSpec(f"c{i}") for i in range(1, 6)], seeds=5, seed=0)
    assert rep.gradient_norm < 1e-5
    assert max(rep.restarts) - min(rep.restarts) < 1e-4
    best = [T.length_invariant(CHAIN30, d, max_nodes=6, seeds=1).best for d in range(5)]
    assert all(b <= a + 1e-9 for a, b in zip(best, best[1:]))


@pytest.mark.criterion(10, "homological monodromy is the identity; first Betti numbers")
def test_criterion_10_homology():
    for f in FIXTURES:
        M = np.eye(4, dtype=np.int64)
        for c in f.cycles:
            M = M @ transvection(c.homology(G), G)
        assert np.array_equal(M, np.eye(4, dtype=np.int64))
        P = np.eye(4, dtype=np.int64)
        for tw in f.twists():
            P = P @ homology_action(tw)
        assert np.array_equal(P, np.eye(4, dtype=np.int64))
    assert Fb.invariant_cohomology_rank(CHAIN30) == 0
    for g in (2, 3):
        assert Fb.invariant_cohomology_rank(Fibration(g)) == 2 * g
