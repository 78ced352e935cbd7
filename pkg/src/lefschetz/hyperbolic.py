"""Fuchsian realizations, geodesics, intersection numbers and curve arrangements.

Two realizations are built from the same regular 4g-gon with standard side
pairings.  ``realize`` gives the compact one (interior angles 2*pi/4g), a
discrete faithful image of the closed surface group.  ``realize_punctured``
uses the ideal 4g-gon: its vertices sit on the circle at infinity, the
boundary word becomes parabolic and the group is a faithful image of the free
group, i.e. the bounded surface with its boundary shrunk to a cusp.  Curves
given as free-group words are drawn as geodesics of the cusped surface, so
their position relative to the marked point is the one the algebra sees, and
no geodesic can pass through a polygon vertex.

Matrices are real SL2 acting on the upper half-plane; the disc model enters
through the Cayley map z -> (z - i)/(z + i).  Boundary points are angles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Optional, Sequence

import numpy as np

from . import _kernels as K
from . import words as W
from .ribbon import end_layout
from .words import Word

TAU = 2.0 * math.pi
MATRIX_TOL = 1e-9
TRANSVERSE_TOL = 1e-6
# regular polygon first, then seeded perturbations of the cusped metric
PERTURBATION_SEEDS = (None, 1, 2, 3, 4, 5)

_CAYLEY = np.array([[1.0, -1.0j], [1.0, 1.0j]])
_CAYLEY_INV = np.linalg.inv(_CAYLEY)


class DegenerateGeometry(ArithmeticError):
    """A numerical configuration too close to a degenerate one."""


def _rot(theta: float) -> np.ndarray:
    return np.array([[np.exp(0.5j * theta), 0], [0, np.exp(-0.5j * theta)]])


def _shift(d: float) -> np.ndarray:
    c, s = math.cosh(d / 2), math.sinh(d / 2)
    return np.array([[c, s], [s, c]], dtype=complex)


def disc_to_real(M: np.ndarray) -> np.ndarray:
    R = _CAYLEY_INV @ M @ _CAYLEY
    R = R / np.sqrt(np.linalg.det(R))
    if np.abs(R.imag).max() > 1e-8 * max(1.0, np.abs(R).max()):
        raise DegenerateGeometry("matrix is not a disc isometry")
    return R.real.copy()


def real_to_disc(M: np.ndarray) -> np.ndarray:
    return _CAYLEY @ M @ _CAYLEY_INV


def mobius(M: np.ndarray, z):
    return (M[0, 0] * z + M[0, 1]) / (M[1, 0] * z + M[1, 1])


@dataclass(frozen=True, eq=False)
class FuchsianRealization:
    genus: int
    gens: np.ndarray  # (2g, 2, 2) real SL2
    vertices: np.ndarray  # polygon vertices in the disc, counterclockwise
    ideal: bool = False
    side_letters: tuple = ()  # letter whose image carries P across side k
    vertex_angle: float = 0.0

    @cached_property
    def table(self) -> np.ndarray:
        return K.generator_table(self.gens)

    @cached_property
    def disc_gens(self) -> np.ndarray:
        return np.array([real_to_disc(g) for g in self.gens])

    @property
    def angle_sum(self) -> float:
        return len(self.vertices) * self.vertex_angle

    # -- words ---------------------------------------------------------------

    def matrix(self, w: Sequence[int]) -> np.ndarray:
        """Exact (unnormalized) product; fine for short words."""
        M = np.eye(2)
        for x in w:
            g = self.gens[abs(x) - 1]
            M = M @ (g if x > 0 else np.array([[g[1, 1], -g[0, 1]], [-g[1, 0], g[0, 0]]]))
        return M

    def disc_matrix(self, w: Sequence[int]) -> np.ndarray:
        return real_to_disc(self.matrix(w))

    def relator_matrix(self) -> np.ndarray:
        return self.matrix(W.boundary_word(self.genus))

    def traces(self, words: Sequence[Sequence[int]]) -> tuple[np.ndarray, np.ndarray]:
        """|trace| as (normalized value, log scale)."""
        flat, off = K.pack_words(words)
        mats, logs = K.word_products(self.table, flat, off)
        return np.abs(mats[:, 0, 0] + mats[:, 1, 1]), logs

    def lengths(self, words: Sequence[Sequence[int]]) -> np.ndarray:
        if not len(words):
            return np.zeros(0)
        tr, logs = self.traces(words)
        with np.errstate(divide="ignore"):
            logt = np.log(tr) + logs
        bad = logt <= math.log(2.0 + MATRIX_TOL)
        if np.any(bad):
            i = int(np.argmax(bad))
            raise DegenerateGeometry(f"word {W.format_word(words[i])} is not hyperbolic")
        return K.word_lengths(self.table, words)

    def endpoints(self, words: Sequence[Sequence[int]]) -> tuple[np.ndarray, np.ndarray]:
        if not len(words):
            return np.zeros(0), np.zeros(0)
        # x+(w) = c^-1 . x+(v) for the cyclically reduced v = c w c^-1; taking
        # the trace of a long conjugate directly loses all precision
        cores, conj = [], []
        for w in words:
            v, c = _free_core(w) if self.ideal else W._cyclic_dehn(w, self.genus)
            cores.append(v)
            conj.append(c)
        self.lengths(cores)  # hyperbolicity check
        att, rep = K.word_endpoints(self.table, cores)
        for i, c in enumerate(conj):
            if c:
                att[i], rep[i] = self.act_on_angle(W.inverse(c), [att[i], rep[i]])
        return att, rep

    def act_on_angle(self, w: Sequence[int], theta):
        z = mobius(self.disc_matrix(w), np.exp(1j * np.asarray(theta)))
        return np.mod(np.angle(z), TAU)


def _free_core(w) -> tuple[Word, Word]:
    """(v, c) with v = c w c^-1 cyclically reduced in the free group."""
    w = W.free_reduce(w)
    i = 0
    while i < len(w) - 1 - i and w[i] == -w[len(w) - 1 - i]:
        i += 1
    return w[i: len(w) - i], W.inverse(w[:i])


def _regular(genus: int, ideal: bool) -> FuchsianRealization:
    if genus < 2:
        raise ValueError("fibre genus must be at least two")
    n = 4 * genus
    if ideal:
        rho = math.acosh(1.0 / math.sin(math.pi / n))
        alpha = 0.0
        vr = 1.0
    else:
        rho = math.acosh(1.0 / math.tan(math.pi / n))
        alpha = TAU / n
        R = math.acosh(1.0 / math.tan(math.pi / n) ** 2)
        vr = math.tanh(R / 2)
    vertices = vr * np.exp(1j * TAU * np.arange(n) / n)
    ends = end_layout(genus)
    where = {e: k for k, e in enumerate(ends)}
    mid = lambda k: TAU * (k + 0.5) / n
    gens = []
    for x in range(1, 2 * genus + 1):
        s, t = where[(x, "S")], where[(x, "T")]
        gens.append(disc_to_real(_rot(mid(s)) @ _shift(2 * rho) @ _rot(math.pi - mid(t))))
    letters = tuple(g if side == "S" else -g for g, side in ends)
    return FuchsianRealization(genus, np.array(gens), vertices, ideal, letters, alpha)


@lru_cache(maxsize=None)
def realize(genus: int) -> FuchsianRealization:
    """Compact realization on the regular 4g-gon with angles 2*pi/4g."""
    r = _regular(genus, ideal=False)
    rel = r.relator_matrix()
    if min(np.abs(rel - np.eye(2)).max(), np.abs(rel + np.eye(2)).max()) > MATRIX_TOL:
        raise DegenerateGeometry("relator does not evaluate to the identity")
    return r


def _mobius3(z, w) -> np.ndarray:
    """Möbius matrix (det 1) sending the points z[0..2] to w[0..2]."""
    def to_std(p):
        z1, z2, z3 = p
        return np.array([[z3 - z2, -z1 * (z3 - z2)], [z3 - z1, -z2 * (z3 - z1)]])
    A, B = to_std(z), to_std(w)
    M = np.linalg.inv(B) @ A
    return M / np.sqrt(np.linalg.det(M))


def _perpendicular_ends(p: complex, q: complex):
    """Boundary ends (towards the origin, away from it) of the perpendicular
    dropped from the origin to the geodesic with ideal ends p, q."""
    pole = (p + q) / (1 + (p.conjugate() * q).real)
    u = pole / abs(pole)
    return -u, u


def _translation(x1: complex, x2: complex, s: float) -> np.ndarray:
    """Disc isometry translating by s along the geodesic from x1 to x2."""
    # hyperbolic Möbius maps with real multiplier preserve every circle through
    # their fixed points, the unit circle included
    B = np.array([[x2, x1], [1.0, 1.0]])
    return B @ np.diag([math.exp(s / 2), math.exp(-s / 2)]) @ np.linalg.inv(B)


def _ideal_polygon_group(genus: int, angles: np.ndarray, shears: np.ndarray) -> list[np.ndarray]:
    n = 4 * genus
    v = np.exp(1j * angles)
    ends = end_layout(genus)
    where = {e: k for k, e in enumerate(ends)}
    out = []
    for x in range(1, 2 * genus + 1):
        S, T = where[(x, "S")], where[(x, "T")]
        vT0, vT1 = v[T], v[(T + 1) % n]
        vS0, vS1 = v[S], v[(S + 1) % n]
        e_in, _ = _perpendicular_ends(vT0, vT1)
        _, e_out = _perpendicular_ends(vS0, vS1)
        g0 = _mobius3((vT0, vT1, e_in), (vS1, vS0, e_out))
        out.append(_translation(vS0, vS1, shears[x - 1]) @ g0)
    return out


def _cusp_log_multiplier(genus: int, gens_disc) -> float:
    """log of the derivative of delta at its fixed vertex (0 iff parabolic)."""
    M = np.eye(2, dtype=complex)
    for x in W.boundary_word(genus):
        g = gens_disc[abs(x) - 1]
        M = M @ (g if x > 0 else np.linalg.inv(g))
    M = M / np.sqrt(np.linalg.det(M))
    z = 1.0 + 0j
    return float(np.log(abs(1.0 / (M[1, 0] * z + M[1, 1]) ** 2)))


@lru_cache(maxsize=None)
def realize_punctured(genus: int, seed: Optional[int] = None, eps: float = 0.04) -> FuchsianRealization:
    """Cusped realization on an ideal 4g-gon; delta is parabolic.

    ``seed=None`` gives the regular polygon.  Otherwise vertex angles and side
    shears are perturbed (seeded); the shear of a1 is then solved so that the
    boundary word stays parabolic.
    """
    if seed is None:
        r = _regular(genus, ideal=True)
    else:
        n = 4 * genus
        rng = np.random.default_rng(seed)
        angles = TAU * np.arange(n) / n
        angles[1:] += eps * (TAU / n) * rng.uniform(-1, 1, n - 1)
        shears = eps * rng.uniform(-1, 1, 2 * genus)

        def resid(s1):
            sh = shears.copy()
            sh[0] = s1
            return _cusp_log_multiplier(genus, _ideal_polygon_group(genus, angles, sh))

        # the multiplier is affine in the shear; two secant steps suffice
        x0, x1 = 0.0, 0.1
        f0, f1 = resid(x0), resid(x1)
        for _ in range(20):
            x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
            x0, f0, x1, f1 = x1, f1, x2, resid(x2)
            if abs(f1) < 1e-13:
                break
        shears[0] = x1
        gd = _ideal_polygon_group(genus, angles, shears)
        ends = end_layout(genus)
        letters = tuple(g if side == "S" else -g for g, side in ends)
        r = FuchsianRealization(genus, np.array([disc_to_real(g) for g in gd]),
                                np.exp(1j * angles), True, letters, 0.0)
    if abs(abs(np.trace(r.relator_matrix())) - 2.0) > 1e-7:
        raise DegenerateGeometry("boundary word is not parabolic")
    return r


# ---------------------------------------------------------------------------
# single-curve geometry


def _as_word(c, genus: int) -> Word:
    if hasattr(c, "word"):
        return c.word(genus)
    return W.cyclic_reduce(c)


def axis_endpoints(w, genus: Optional[int] = None, realization: Optional[FuchsianRealization] = None):
    """(attracting, repelling) boundary angles of the matrix of ``w``."""
    r = realization or realize(genus)
    att, rep = r.endpoints([tuple(w)])
    return float(att[0]), float(rep[0])


def geodesic_length(w, genus: Optional[int] = None, realization: Optional[FuchsianRealization] = None) -> float:
    r = realization or realize(genus)
    if r is None:
        raise ValueError("genus or realization required")
    return float(r.lengths([tuple(w)])[0])


# ---------------------------------------------------------------------------
# Klein-model plane geometry for the cusped polygon


def to_klein(z):
    z = np.asarray(z)
    return 2 * z / (1 + np.abs(z) ** 2)


def from_klein(k):
    k = np.asarray(k)
    r2 = np.abs(k) ** 2
    return k / (1 + np.sqrt(np.maximum(1 - r2, 0.0)))


def _cross(a: complex, b: complex) -> float:
    return a.real * b.imag - a.imag * b.real


def _line_hit(p: complex, q: complex, a: complex, b: complex):
    """Parameters (s, t) with p + s(q-p) = a + t(b-a), or None if parallel."""
    d1, d2 = q - p, b - a
    den = _cross(d1, d2)
    if abs(den) < 1e-15:
        return None
    s = _cross(a - p, d2) / den
    t = _cross(a - p, d1) / den
    return s, t


@dataclass(frozen=True)
class Chord:
    """A piece of one lift of a curve's geodesic inside the polygon.

    ``deck`` is the free-group word of the deck transformation translating
    along this lift (axis oriented from ``start`` to ``end``).
    """

    curve: int
    index: int
    deck: Word
    start: complex  # Klein coordinates, entry point
    end: complex
    entry_side: int
    exit_side: int
    entry_t: float  # position along the entry side, 0..1 counterclockwise
    exit_t: float


def polygon_klein(r: FuchsianRealization) -> np.ndarray:
    return to_klein(r.vertices)


def clip_to_polygon(verts: np.ndarray, p: complex, q: complex):
    """Intersect the line through Klein points p, q with the convex polygon.

    Returns ((point, side, t) entry, (point, side, t) exit) ordered along p -> q.
    """
    n = len(verts)
    hits = []
    for k in range(n):
        a, b = verts[k], verts[(k + 1) % n]
        st = _line_hit(p, q, a, b)
        if st is None:
            continue
        s, t = st
        if -1e-12 <= t <= 1 + 1e-12:
            hits.append((s, k, min(max(t, 0.0), 1.0)))
    if len(hits) < 2:
        return None
    hits.sort()
    s0, k0, t0 = hits[0]
    s1, k1, t1 = hits[-1]
    if s1 - s0 < 1e-12:
        return None
    return (p + s0 * (q - p), k0, t0), (p + s1 * (q - p), k1, t1)


@lru_cache(maxsize=4096)
def curve_chords(word: Word, genus: int, curve: int = 0, seed: Optional[int] = None) -> tuple[Chord, ...]:
    """Chords of the cusped geodesic of a cyclically reduced word.

    Each rotation of the word is a deck element whose axis crosses the
    polygon; the crossing sequence of the geodesic is the word itself.
    """
    r = realize_punctured(genus, seed)
    word = W.cyclic_reduce(word)
    if not word:
        raise ValueError("trivial word has no geodesic")
    verts = polygon_klein(r)
    rots = [word[j:] + word[:j] for j in range(len(word))]
    att, rep = r.endpoints(rots)
    out = []
    for j, v in enumerate(rots):
        p, q = np.exp(1j * rep[j]), np.exp(1j * att[j])
        clip = clip_to_polygon(verts, p, q)
        if clip is None:
            raise DegenerateGeometry("axis misses the fundamental polygon")
        (a, ka, ta), (b, kb, tb) = clip
        if r.side_letters[kb] != v[0] or r.side_letters[ka] != -v[-1]:
            raise DegenerateGeometry("axis crossing sequence disagrees with its word")
        out.append(Chord(curve, j, v, complex(a), complex(b), ka, kb, ta, tb))
    return tuple(out)


# ---------------------------------------------------------------------------
# intersection numbers


def _chord_crossing(c1: Chord, c2: Chord):
    """Crossing parameters (s, t) along the two chords, or None."""
    st = _line_hit(c1.start, c1.end, c2.start, c2.end)
    if st is None:
        return None
    s, t = st
    inside1 = 0.0 < s < 1.0
    inside2 = 0.0 < t < 1.0
    if not (inside1 and inside2):
        return None
    tol = 1e-9
    if min(s, 1 - s, t, 1 - t) < tol:
        raise DegenerateGeometry("geodesics cross on a side of the polygon")
    d1, d2 = c1.end - c1.start, c2.end - c2.start
    sin = abs(_cross(d1, d2)) / (abs(d1) * abs(d2))
    if sin < TRANSVERSE_TOL:
        raise DegenerateGeometry("near-tangential crossing")
    return s, t


def _word_of(c, genus: int) -> Word:
    return c.word(genus) if hasattr(c, "word") else W.cyclic_reduce(tuple(c))


def geometric_intersection(alpha, beta, genus: int) -> int:
    """Geometric intersection number of two simple closed curves.

    Lifts of the two geodesics are linked exactly when their axes' endpoints
    interleave; every linked pair has one translate whose crossing point lies
    in the fundamental polygon, so the count is the number of crossing
    chord pairs there.
    """
    wa, wb = _word_of(alpha, genus), _word_of(beta, genus)
    if W.curve_key(wa, genus) == W.curve_key(wb, genus):
        return 0
    last = None
    for seed in PERTURBATION_SEEDS:
        try:
            ca = curve_chords(wa, genus, 0, seed)
            cb = curve_chords(wb, genus, 1, seed)
            return sum(1 for x in ca for y in cb if _chord_crossing(x, y) is not None)
        except DegenerateGeometry as e:
            last = e
    raise DegenerateGeometry(f"degenerate on every perturbed metric: {last}")


# ---------------------------------------------------------------------------
# arrangements


@dataclass
class Region:
    id: int
    faces: list
    euler_char: int
    circuits: list  # boundary circuits, each a list of curve indices in order
    genus: int
    has_basepoint: bool


@dataclass
class Arrangement:
    genus: int
    curves: list  # deduplicated words
    V: int
    E: int
    regions: list
    seed: Optional[int]
    # combinatorial data used by section transport
    faces: list = field(default_factory=list, repr=False)
    face_region: list = field(default_factory=list, repr=False)
    side_moves: dict = field(default_factory=dict, repr=False)
    chord_moves: dict = field(default_factory=dict, repr=False)
    chords: list = field(default_factory=list, repr=False)
    base_face: int = 0

    @property
    def R(self) -> int:
        return len(self.regions)

    @property
    def euler_bound(self) -> int:
        return (2 - 2 * self.genus) - self.V + self.E

    @property
    def fills(self) -> bool:
        return self.R == self.euler_bound

    def dump(self) -> str:
        """Plain-text region and circuit listing."""
        lines = [f"genus {self.genus}  V {self.V}  E {self.E}  R {self.R}  fills {self.fills}"
                 f"  perturbation {self.seed}"]
        for i, w in enumerate(self.curves):
            lines.append(f"curve {i}: {W.format_word(w)}")
        for reg in self.regions:
            tag = " basepoint" if reg.has_basepoint else ""
            lines.append(f"region {reg.id}{tag}: faces {len(reg.faces)} chi {reg.euler_char} "
                         f"genus {reg.genus} circuits {len(reg.circuits)}")
            for c in reg.circuits:
                lines.append("  circuit " + " ".join(str(x) for x in c))
        return "\n".join(lines)


class _UF:
    def __init__(self, n):
        self.p = list(range(n))

    def find(self, x):
        while self.p[x] != x:
            self.p[x] = self.p[self.p[x]]
            x = self.p[x]
        return x

    def union(self, a, b):
        a, b = self.find(a), self.find(b)
        if a != b:
            self.p[max(a, b)] = min(a, b)


def _dedupe(curves, genus: int) -> list:
    seen, out = set(), []
    for c in curves:
        w = _word_of(c, genus)
        k = W.curve_key(w, genus)
        if k not in seen:
            seen.add(k)
            out.append(w)
    return out


def arrangement(curves, genus: int) -> Arrangement:
    """Arrangement of the geodesics of a curve system (duplicates removed)."""
    words = _dedupe(curves, genus)
    if not words:
        raise ValueError("empty curve system")
    last = None
    for seed in PERTURBATION_SEEDS:
        try:
            return _build_arrangement(words, genus, seed)
        except DegenerateGeometry as e:
            last = e
    raise DegenerateGeometry(f"degenerate on every perturbed metric: {last}")


def _build_arrangement(words: list, genus: int, seed) -> Arrangement:
    r = realize_punctured(genus, seed)
    n = 4 * genus
    verts = polygon_klein(r)
    chords: list[Chord] = []
    for i, w in enumerate(words):
        chords.extend(curve_chords(w, genus, i, seed))
    M = len(chords)

    # points: polygon vertices, chord endpoints, crossings
    pts: list[complex] = list(verts)
    on_side: dict[int, list] = {k: [(0.0, k), (1.0, (k + 1) % n)] for k in range(n)}
    on_chord: dict[int, list] = {}
    for ci, ch in enumerate(chords):
        a = len(pts)
        pts.append(ch.start)
        b = len(pts)
        pts.append(ch.end)
        on_side[ch.entry_side].append((ch.entry_t, a))
        on_side[ch.exit_side].append((ch.exit_t, b))
        on_chord[ci] = [(0.0, a), (1.0, b)]
    # geodesics can be concurrent in every metric (c, t_b(c), t_b^-1(c) meet at
    # a Weierstrass point of the torus around c and b), so coincident crossings
    # are merged into one vertex
    cross_pts: list[int] = []
    for i in range(M):
        for j in range(i + 1, M):
            hit = _chord_crossing(chords[i], chords[j])
            if hit is None:
                continue
            if chords[i].curve == chords[j].curve:
                raise ValueError("curves in an arrangement must be simple")
            s, t = hit
            z = chords[i].start + s * (chords[i].end - chords[i].start)
            p = next((q for q in cross_pts if abs(pts[q] - z) < 1e-9), None)
            if p is None:
                p = len(pts)
                pts.append(z)
                cross_pts.append(p)
            for ci, par in ((i, s), (j, t)):
                if all(q != p for _, q in on_chord[ci]):
                    on_chord[ci].append((par, p))
    V = len(cross_pts)
    crossings_on_curve = [0] * len(words)
    for ci, lst in on_chord.items():
        crossings_on_curve[chords[ci].curve] += len(lst) - 2

    # half-edges
    he_from, he_to, he_label = [], [], []

    def add_edge(u, v, label):
        he_from.extend((u, v))
        he_to.extend((v, u))
        he_label.extend((label + (1,), label + (-1,)))

    for k, lst in on_side.items():
        lst.sort()
        for (t0, u), (t1, v) in zip(lst, lst[1:]):
            if t1 - t0 < 1e-9:
                raise DegenerateGeometry("coincident points on a polygon side")
            add_edge(u, v, ("s", k))
    for ci, lst in on_chord.items():
        lst.sort()
        for (s0, u), (s1, v) in zip(lst, lst[1:]):
            if s1 - s0 < 1e-9:
                raise DegenerateGeometry("coincident crossings (triple point)")
            add_edge(u, v, ("c", ci))
    H = len(he_from)
    P = np.array(pts)
    ang = np.angle(P[np.array(he_to)] - P[np.array(he_from)])
    out_at: dict[int, list] = {}
    for h in range(H):
        out_at.setdefault(he_from[h], []).append(h)
    for u in out_at:
        out_at[u].sort(key=lambda h: ang[h])
    pos = {}
    for u, lst in out_at.items():
        for idx, h in enumerate(lst):
            pos[h] = idx

    def twin(h):
        return h ^ 1

    def nxt(h):
        # at the head, the outgoing edge just clockwise of the reversed edge
        t = twin(h)
        lst = out_at[he_from[t]]
        return lst[(pos[t] - 1) % len(lst)]

    face_of = [-1] * H
    faces = []
    for h0 in range(H):
        if face_of[h0] != -1:
            continue
        cyc, h = [], h0
        while face_of[h] == -1:
            face_of[h] = len(faces)
            cyc.append(h)
            h = nxt(h)
        faces.append(cyc)
    areas = []
    for cyc in faces:
        z = P[[he_from[h] for h in cyc]]
        areas.append(0.5 * float(np.sum(z.real * np.roll(z.imag, -1) - np.roll(z.real, -1) * z.imag)))
    outer = [f for f, a in enumerate(areas) if a < 0]
    if len(outer) != 1:
        raise DegenerateGeometry("face tracing failed")
    outer = outer[0]
    keep = [f for f in range(len(faces)) if f != outer]
    renum = {f: i for i, f in enumerate(keep)}
    faces = [faces[f] for f in keep]
    face_of = [renum.get(f, -1) for f in face_of]

    # gluing across paired sides
    disc = r.disc_gens
    side_pair = {}
    for k, l in enumerate(r.side_letters):
        side_pair[k] = next(j for j, m in enumerate(r.side_letters) if m == -l)
    side_halfedges: dict[int, list] = {}
    for h in range(H):
        kind, k, d = he_label[h]
        if kind == "s" and d == 1:
            side_halfedges.setdefault(k, []).append(h)
    match_he = {}
    for k, hs in side_halfedges.items():
        kp = side_pair[k]
        l = r.side_letters[kp]
        g = disc[abs(l) - 1] if l > 0 else np.linalg.inv(disc[abs(l) - 1])
        a, b = verts[kp], verts[(kp + 1) % n]
        param = lambda z: ((z - a) * np.conj(b - a)).real / abs(b - a) ** 2
        spans = [(h2, sorted((param(P[he_from[h2]]), param(P[he_to[h2]]))))
                 for h2 in side_halfedges[kp]]
        for h in hs:
            mid = 0.5 * (P[he_from[h]] + P[he_to[h]])
            t = param(to_klein(mobius(g, from_klein(mid))))
            hit = [h2 for h2, (ta, tb) in spans if ta < t < tb]
            if len(hit) != 1:
                raise DegenerateGeometry("side gluing mismatch")
            match_he[h] = hit[0]
    uf = _UF(len(faces))
    side_moves: dict[int, list] = {}
    for h, h2 in match_he.items():
        f, f2 = face_of[h], face_of[h2]
        uf.union(f, f2)
        # crossing side k moves into the tile of letter side_letters[k]
        side_moves.setdefault(f, []).append((f2, r.side_letters[he_label[h][1]]))
    chord_moves: dict[int, list] = {}
    for h in range(0, H, 2):
        kind, ci, _ = he_label[h]
        if kind != "c":
            continue
        f, f2 = face_of[h], face_of[h + 1]
        chord_moves.setdefault(f, []).append((f2, ci))
        chord_moves.setdefault(f2, []).append((f, ci))

    # regions
    roots = sorted({uf.find(f) for f in range(len(faces))})
    vertex_faces = {face_of[h] for h in range(H) if he_from[h] < n and face_of[h] >= 0}
    base_face = next(face_of[h] for h in out_at[0] if face_of[h] >= 0)
    cusp_root = uf.find(base_face)
    if {uf.find(f) for f in vertex_faces} != {cusp_root}:
        raise DegenerateGeometry("cusp neighbourhood split between regions")
    # order regions: basepoint region first, then by dual-graph distance
    dist = {cusp_root: 0}
    frontier = [cusp_root]
    while frontier:
        nxt_frontier = []
        for rt in frontier:
            for f in range(len(faces)):
                if uf.find(f) != rt:
                    continue
                for f2, _ in chord_moves.get(f, []):
                    r2 = uf.find(f2)
                    if r2 not in dist:
                        dist[r2] = dist[rt] + 1
                        nxt_frontier.append(r2)
        frontier = sorted(nxt_frontier)
    order = sorted(roots, key=lambda x: (dist.get(x, 10 ** 9), x))
    rid = {rt: i for i, rt in enumerate(order)}
    face_region = [rid[uf.find(f)] for f in range(len(faces))]

    # per-region Euler characteristic: faces - glued side edges + the cusp point
    chi = [0] * len(order)
    for f in range(len(faces)):
        chi[face_region[f]] += 1
    for k, hs in side_halfedges.items():
        if k < side_pair[k]:
            for h in hs:
                chi[face_region[face_of[h]]] -= 1
    chi[0] += 1

    # boundary circuits: walk chord edges, hopping across glued sides
    seen_he = set()
    circuits = [[] for _ in order]
    for h0 in range(H):
        if he_label[h0][0] != "c" or face_of[h0] < 0 or h0 in seen_he:
            continue
        circ, h = [], h0
        while h not in seen_he:
            seen_he.add(h)
            circ.append(chords[he_label[h][1]].curve)
            h2 = nxt(h)
            while he_label[h2][0] == "s":
                h2 = nxt(match_he[h2])
            h = h2
        circuits[face_region[face_of[h0]]].append(_compress(circ))
    regions = []
    for i in range(len(order)):
        fs = [f for f in range(len(faces)) if face_region[f] == i]
        b = len(circuits[i])
        gen2 = 2 - b - chi[i]
        if gen2 < 0 or gen2 % 2:
            raise DegenerateGeometry("inconsistent region topology")
        regions.append(Region(i, fs, chi[i], circuits[i], gen2 // 2, i == 0))
    E = sum(max(m, 1) for m in crossings_on_curve)
    Vt = V + sum(1 for m in crossings_on_curve if m == 0)
    if sum(chi) != (2 - 2 * genus) - Vt + E:
        raise DegenerateGeometry("Euler characteristic bookkeeping failed")
    arr = Arrangement(genus, words, Vt, E, regions, seed)
    arr.faces = [[(he_from[h], he_label[h]) for h in cyc] for cyc in faces]
    arr.face_region = face_region
    arr.side_moves = side_moves
    arr.chord_moves = chord_moves
    arr.chords = chords
    arr.base_face = base_face
    arr.points = P
    return arr


def _compress(seq: list) -> list:
    out = []
    for x in seq:
        if not out or out[-1] != x:
            out.append(x)
    if len(out) > 1 and out[0] == out[-1]:
        out.pop()
    return out


# ---------------------------------------------------------------------------
# circle at infinity


@lru_cache(maxsize=64)
def sample_words(genus: int, count: int) -> tuple:
    """Cyclically reduced words of length <= L, L the least giving >= count."""
    rank = 2 * genus
    letters = [x for g in range(1, rank + 1) for x in (g, -g)]
    out, layer = [], [(x,) for x in letters]
    while True:
        out.extend(w for w in layer if w[0] != -w[-1])
        if len(out) >= count:
            return tuple(out)
        layer = [w + (x,) for w in layer for x in letters if x != -w[-1]]


def _reduce_for_geometry(w: Word, genus: int) -> Word:
    return W.dehn_reduce(w, genus) if len(w) > 24 else w


@dataclass
class CircleMap:
    angle_in: np.ndarray
    angle_out: np.ndarray

    @property
    def displacement(self) -> np.ndarray:
        """Clockwise displacement of a monotone lift to the line.

        Consecutive outputs (inputs sorted) are joined by their clockwise
        increment, which fixes the lift up to a multiple of 2*pi; the multiple
        is chosen so the displacements straddle zero (a lift with a fixed
        point) and lean nonnegative when they can.
        """
        x = -self.angle_in
        y = -self.angle_out
        inc = np.mod(np.diff(y) - np.diff(x) + math.pi, TAU) - math.pi
        d = (y[0] - x[0]) + np.concatenate([[0.0], np.cumsum(inc)])
        d = np.mod(d[0] + math.pi, TAU) - math.pi + (d - d[0])
        best = None
        for m in range(-3, 4):
            dm = d + m * TAU
            if dm.min() <= 1e-7 and dm.max() >= -1e-7:
                key = (dm.min() < -1e-7, abs(dm.mean()))
                if best is None or key < best[0]:
                    best = (key, dm)
        return best[1] if best is not None else d

    @property
    def degree(self) -> int:
        """Winding of the sampled map; 1 for a monotone circle homeomorphism."""
        yo = np.mod(np.diff(np.concatenate([self.angle_out, self.angle_out[:1]])) + math.pi, TAU) - math.pi
        return int(round(np.sum(yo) / TAU))

    def is_one_signed(self, tol: float = 1e-7) -> bool:
        d = self.displacement
        return bool(d.min() >= -tol or d.max() <= tol)

    def to_csv(self) -> str:
        rows = ["angle_in,angle_out"]
        rows += [f"{a:.12f},{b:.12f}" for a, b in zip(self.angle_in, self.angle_out)]
        return "\n".join(rows)


def boundary_circle_map(phi, genus: int, samples: int = 200, pin: Word = ()) -> CircleMap:
    """Sampled lift x+(u) -> pin . x+(phi(u)) of a mapping class to the circle.

    ``phi`` acts on loops based in the basepoint region; ``pin`` is the deck
    element selecting the lift that fixes another region (empty: the
    basepoint region).  Samples are sorted by input angle.
    """
    if samples < 100:
        raise ValueError("at least 100 samples are required")
    r = realize(genus)
    words = list(sample_words(genus, samples))
    images = [_reduce_for_geometry(W.conjugate(pin, phi(u)), genus) for u in words]
    a_in, _ = r.endpoints(words)
    a_out, _ = r.endpoints(images)
    order = np.argsort(a_in, kind="stable")
    a_in, a_out = a_in[order], a_out[order]
    gap = np.max(np.diff(np.concatenate([a_in, [a_in[0] + TAU]])))
    if gap > TAU / math.sqrt(samples):
        raise DegenerateGeometry("sample set too sparse on the circle")
    return CircleMap(a_in, a_out)


@dataclass
class RotationEstimate:
    value: float  # mean total clockwise displacement / 2 pi
    integer: int
    residual: float  # worst sample's distance from ``integer``
    samples: int


def rotation_number(steps, genus: int, samples: int = 200, tol: float = 1e-7) -> RotationEstimate:
    """Translation of a product of pinned lifts that equals a deck translation.

    ``steps`` lists (automorphism, pin) pairs in composition order, the last
    acting first.  Each pinned lift has fixed points, so its displacement at
    a sample is its clockwise angle change taken in [0, 2 pi).
    """
    if samples < 100:
        raise ValueError("at least 100 samples are required")
    r = realize(genus)
    cur = [tuple(u) for u in sample_words(genus, samples)]
    ang, _ = r.endpoints(cur)
    total = np.zeros(len(cur))
    for phi, pin in reversed(list(steps)):
        cur = [_reduce_for_geometry(W.conjugate(pin, phi(u)), genus) for u in cur]
        new, _ = r.endpoints(cur)
        d = np.mod(ang - new + tol, TAU) - tol
        total += d
        ang = new
    turns = total / TAU
    k = int(round(float(np.median(turns))))
    return RotationEstimate(float(turns.mean()), k, float(np.abs(turns - k).max()), len(cur))
