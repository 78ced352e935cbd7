import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lefschetz import _kernels as K
from lefschetz import fibration as Fb
from lefschetz import hyperbolic as Hy
from lefschetz import words as W
from lefschetz.cli import read_fibration
from lefschetz.mapping_class import CurveSpec, standard_curve_ids, standard_twist

from oracles import linking_intersection

G = 2
CHAIN = [CurveSpec(f"c{i}") for i in range(1, 6)]


def cw(i, g=G):
    return CurveSpec(f"c{i}").word(g)


@pytest.mark.parametrize("g", [2, 3])
def test_compact_realization(g):
    r = Hy.realize(g)
    assert np.allclose(r.relator_matrix(), np.eye(2), atol=1e-9) or \
        np.allclose(r.relator_matrix(), -np.eye(2), atol=1e-9)
    assert math.isclose(r.angle_sum, 2 * math.pi, rel_tol=1e-12)
    for M in r.gens:
        assert math.isclose(np.linalg.det(M), 1.0, abs_tol=1e-12)


@pytest.mark.parametrize("seed", Hy.PERTURBATION_SEEDS)
def test_punctured_realizations_are_parabolic_at_the_relator(seed):
    r = Hy.realize_punctured(G, seed)
    assert math.isclose(abs(np.trace(r.relator_matrix())), 2.0, abs_tol=1e-8)


def test_generator_endpoints_distinct():
    r = Hy.realize(G)
    pts = []
    for x in (1, 2):
        a, b = Hy.axis_endpoints((x,), realization=r)
        pts += [a, b]
    assert min(abs(p - q) for i, p in enumerate(pts) for q in pts[i + 1:]) > 1e-3


def test_endpoints_match_direct_eigenvectors():
    r = Hy.realize(G)
    for w in [(1,), (1, 2), (1, 3, -2), (2, 2, 4)]:
        M = r.disc_matrix(w)
        vals, vecs = np.linalg.eig(M)
        i = int(np.argmax(np.abs(vals)))
        z = vecs[0, i] / vecs[1, i]
        att, _ = Hy.axis_endpoints(w, realization=r)
        assert math.isclose(att, np.mod(np.angle(z), 2 * math.pi), abs_tol=1e-9)


def test_conjugation_moves_endpoints_by_the_conjugator():
    r = Hy.realize(G)
    w, u = (1, 2, 3), (4, -1)
    a, _ = Hy.axis_endpoints(W.conjugate(u, w), realization=r)
    expected = r.act_on_angle(u, Hy.axis_endpoints(w, realization=r)[0])
    assert math.isclose(a, float(expected), abs_tol=1e-9)


def test_lengths_symmetry_and_trace_formula():
    r = Hy.realize(G)
    assert math.isclose(Hy.geodesic_length(cw(1), realization=r), Hy.geodesic_length(cw(5), realization=r),
                        rel_tol=1e-12)
    w = (1, 2, -3)
    expected = 2 * math.acosh(abs(np.trace(r.matrix(w))) / 2)
    assert math.isclose(Hy.geodesic_length(w, realization=r), expected, rel_tol=1e-10)


def test_elliptic_or_trivial_word_is_rejected():
    with pytest.raises(Hy.DegenerateGeometry):
        Hy.geodesic_length(W.boundary_word(G), G)


def test_kernel_backends_agree():
    r = Hy.realize(G)
    ws = [w for w in Hy.sample_words(G, 300)]
    a = K.word_lengths(r.table, ws, use_numba=False)
    b = K.word_lengths(r.table, ws, use_numba=True)
    assert np.allclose(a, b, rtol=1e-10)
    e1 = K.word_endpoints(r.table, ws, use_numba=False)
    e2 = K.word_endpoints(r.table, ws, use_numba=True)
    assert np.allclose(e1[0], e2[0], atol=1e-9)


# -- intersections


def test_chain_intersection_table():
    for i in range(1, 6):
        for j in range(i + 1, 6):
            expected = 1 if j == i + 1 else 0
            assert Hy.geometric_intersection(cw(i), cw(j), G) == expected
            assert linking_intersection(cw(i), cw(j), G, radius=4) == expected


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_twist_growth(n):
    img = CurveSpec("c1", (("c2", 1),) * n)
    assert Hy.geometric_intersection(img, CurveSpec("c1"), G) == n
    if n <= 4:
        assert linking_intersection(img.word(G), cw(1), G, radius=5) == n


def test_separating_curve_intersections():
    s = CurveSpec("s1")
    assert Hy.geometric_intersection(s, CurveSpec("c3"), G) == 2
    assert Hy.geometric_intersection(s, CurveSpec("c1"), G) == 0


twist_words = st.lists(st.tuples(st.sampled_from(standard_curve_ids(G)), st.sampled_from([1, -1])),
                       max_size=4).map(tuple)


@settings(max_examples=15)
@given(twist_words, st.integers(1, 5), st.integers(1, 5))
def test_intersection_isotopy_invariant_and_symmetric(w, i, j):
    a, b = CurveSpec(f"c{i}"), CurveSpec(f"c{j}")
    base = Hy.geometric_intersection(a, b, G)
    assert Hy.geometric_intersection(a.apply(w), b.apply(w), G) == base
    assert Hy.geometric_intersection(b.apply(w), a.apply(w), G) == base


# -- arrangements


def _fills(curves):
    return Hy.arrangement(curves, G).fills


def test_chain_arrangement():
    arr = Hy.arrangement(CHAIN, G)
    assert (arr.V, arr.E, arr.R) == (4, 8, 2)
    assert arr.fills
    assert sum(r.has_basepoint for r in arr.regions) == 1


def test_four_chain_fills_with_one_region():
    arr = Hy.arrangement(CHAIN[:4], G)
    assert arr.fills and arr.R == 1


@pytest.mark.parametrize("curves", [[CHAIN[0]], CHAIN[1:4], CHAIN[:2]])
def test_not_filling(curves):
    assert not _fills(curves)


def test_duplicates_removed():
    arr = Hy.arrangement(CHAIN + CHAIN[:2], G)
    assert len(arr.curves) == 5


@settings(max_examples=10)
@given(st.lists(st.tuples(st.sampled_from(["c1", "c2", "c3", "c4", "c5", "s1"]), twist_words),
                min_size=1, max_size=4))
def test_euler_bookkeeping_and_fill_monotone(specs):
    curves = [CurveSpec(b, w) for b, w in specs]
    arr = Hy.arrangement(curves, G)
    assert arr.R >= arr.euler_bound
    assert arr.fills == (arr.R == arr.euler_bound)
    if arr.fills:
        assert _fills(curves + [CurveSpec("c3", (("c1", 1),))])
    if _fills(CHAIN):
        assert _fills(CHAIN + curves)


def test_arrangement_dump():
    text = Hy.arrangement(CHAIN, G).dump()
    assert text.splitlines()[0].startswith("genus 2  V 4  E 8  R 2")


# -- circle maps


def test_identity_circle_map():
    cm = Hy.boundary_circle_map(lambda u: tuple(u), G, 200)
    assert np.allclose(cm.angle_in, cm.angle_out, atol=1e-9)
    assert cm.degree == 1


def test_deck_transformation_fixes_its_axis_endpoints():
    u = (1,)
    conj = lambda w: W.conjugate(u, w)
    cm = Hy.boundary_circle_map(conj, G, 200)
    d = np.abs(np.angle(np.exp(1j * (cm.angle_out - cm.angle_in))))
    # powers of u share its axis, so count distinct points
    fixed = np.unique(np.round(cm.angle_in[d < 1e-8], 9))
    ends = Hy.axis_endpoints(u, G)
    assert len(fixed) == 2
    assert all(min(abs(np.exp(1j * f) - np.exp(1j * e)) for e in ends) < 1e-8 for f in fixed)


@pytest.mark.parametrize("cid", standard_curve_ids(G))
def test_positive_twist_lift_is_one_signed_and_monotone(cid):
    cm = Hy.boundary_circle_map(standard_twist(cid, 1, G).aut, G, 200)
    assert cm.degree == 1
    assert cm.is_one_signed()
    assert cm.displacement.min() >= -1e-7  # positive twists move points clockwise


def test_sparse_sampling_rejected():
    with pytest.raises(ValueError):
        Hy.boundary_circle_map(lambda u: u, G, 50)


def test_circle_map_csv():
    cm = Hy.boundary_circle_map(lambda u: tuple(u), G, 100)
    lines = cm.to_csv().splitlines()
    assert lines[0] == "angle_in,angle_out" and len(lines) == len(cm.angle_in) + 1


# -- rotation numbers


@pytest.mark.parametrize("name, k", [("trivial_g2.fib", 0), ("genus2_chain30.fib", 1),
                                     ("genus2_hyp20.fib", 1), ("genus2_chain40.fib", 1)])
def test_rotation_at_basepoint_region(name, k):
    f = read_fibration(name)
    est = Hy.rotation_number([(t.aut, ()) for t in f.twists()], G)
    assert est.integer == k == Fb.validate(f).k_standard
    assert est.residual < 0.1


def test_rotation_at_every_section_region():
    f = read_fibration("genus2_chain30.fib")
    arr = Hy.arrangement(list(f.cycles), G)
    for reg in arr.regions:
        est = Fb.region_rotation(f, arr, reg)
        assert est.integer == 1 and est.residual < 0.1


def test_rotation_of_fourfold_sum():
    f = read_fibration("genus2_chain30.fib") * 4
    est = Hy.rotation_number([(t.aut, ()) for t in f.twists()], G)
    assert est.integer == 4 and est.residual < 0.1
